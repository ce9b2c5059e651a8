"""Planar convex geometry and linear constraint systems for rate regions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, InvalidArgument

GEOM_TOL = 1e-9
SNAP_DECIMALS = 12


@dataclass(frozen=True, eq=False)
class LinearConstraintSystem:
    """Rows ``A @ x <= b`` over named coordinates; ``strict`` marks '<' rows.

    Strict rows are kept for reporting but every consumer uses closure
    semantics, i.e. treats them as '<='.
    """

    coords: tuple[str, ...]
    A: np.ndarray
    b: np.ndarray
    strict: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.size == 0:
            A = A.reshape(0, len(self.coords))
        if A.shape[1] != len(self.coords) or A.shape[0] != b.shape[0]:
            raise InvalidArgument(
                f"constraint matrix shape {A.shape} does not match {len(self.coords)} coords "
                f"and {b.shape[0]} bounds")
        strict = np.zeros(len(b), dtype=bool) if len(self.strict) == 0 else np.asarray(self.strict, bool)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "strict", strict)
        labels = tuple(self.labels) or tuple("" for _ in range(len(b)))
        object.__setattr__(self, "labels", labels)

    def satisfied(self, x, tol: float = GEOM_TOL) -> bool:
        return bool(np.all(self.A @ np.asarray(x, dtype=float) <= self.b + tol))

    def describe(self) -> list[str]:
        out = []
        for row, rhs, st, lab in zip(self.A, self.b, self.strict, self.labels):
            terms = []
            for c, name in zip(row, self.coords):
                if c == 0:
                    continue
                sign = "-" if c < 0 else "+"
                mag = "" if abs(c) == 1 else f"{abs(c):g}*"
                terms.append(f"{sign} {mag}{name}")
            lhs = " ".join(terms).lstrip("+ ") or "0"
            op = "<" if st else "<="
            out.append(f"{lhs} {op} {rhs:.12g}" + (f"   [{lab}]" if lab else ""))
        return out


class SystemBuilder:
    """Accumulates rows like ``add({"R1": 1, "R11": -1}, bound)``."""

    def __init__(self, coords: Sequence[str]):
        self.coords = tuple(coords)
        self.rows: list[np.ndarray] = []
        self.bounds: list[float] = []
        self.strict: list[bool] = []
        self.labels: list[str] = []

    def add(self, coeffs: dict[str, float], bound: float, strict: bool = False, label: str = ""):
        row = np.zeros(len(self.coords))
        for k, v in coeffs.items():
            row[self.coords.index(k)] += v
        self.rows.append(row)
        self.bounds.append(float(bound))
        self.strict.append(strict)
        self.labels.append(label)

    def nonnegative(self):
        for c in self.coords:
            self.add({c: -1.0}, 0.0, label=f"{c} >= 0")

    def build(self) -> LinearConstraintSystem:
        A = np.array(self.rows) if self.rows else np.zeros((0, len(self.coords)))
        return LinearConstraintSystem(self.coords, A, np.array(self.bounds),
                                      np.array(self.strict, dtype=bool), tuple(self.labels))


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points, tol: float = 1e-13) -> np.ndarray:
    """Counterclockwise hull vertices starting at the lexicographically smallest point.

    Collinear points on edges are dropped.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise InvalidArgument("convex hull of an empty point set")
    # snapping removes float dust that would otherwise reorder or split vertices
    pts = np.unique(np.round(pts, SNAP_DECIMALS) + 0.0, axis=0)  # sorted by R1 then R2
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) == 2 and np.allclose(hull[0], hull[1]):
        return hull[:1]
    return hull


def _hull_halfplanes(vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Outward half-planes ``a . x <= b`` for each edge of a CCW polygon."""
    k = len(vertices)
    if k < 3:
        return np.zeros((0, 2)), np.zeros(0)
    A, b = [], []
    for i in range(k):
        p, q = vertices[i], vertices[(i + 1) % k]
        normal = np.array([q[1] - p[1], p[0] - q[0]])
        norm = np.hypot(*normal)
        normal = normal / norm
        A.append(normal)
        b.append(float(normal @ p))
    return np.array(A), np.array(b)


@dataclass(frozen=True, eq=False)
class RatePolygon:
    """Convex region in a 2D rate plane, kept as CCW vertices plus half-planes.

    An empty region has no vertices. ``axes`` names the two coordinates;
    ``sources`` optionally maps each vertex to a label of the input
    distribution that produced it.
    """

    vertices: np.ndarray
    axes: tuple[str, str] = ("R1", "R2")
    sources: tuple = field(default=())

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2) + 0.0  # drops -0.0
        object.__setattr__(self, "vertices", v)

    @classmethod
    def empty(cls, axes=("R1", "R2")) -> "RatePolygon":
        return cls(np.zeros((0, 2)), axes)

    @classmethod
    def hull_of(cls, points, axes=("R1", "R2"), sources=None) -> "RatePolygon":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if len(pts) == 0:
            return cls.empty(axes)
        hull = convex_hull_2d(pts)
        srcs: tuple = ()
        if sources is not None:
            lookup = {}
            for p, s in zip(pts, sources):
                lookup.setdefault((p[0], p[1]), s)
            srcs = tuple(lookup.get((h[0], h[1])) for h in hull)
        return cls(hull, axes, srcs)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    @property
    def halfplanes(self) -> tuple[np.ndarray, np.ndarray]:
        return _hull_halfplanes(self.vertices)

    def contains(self, point, tol: float = GEOM_TOL) -> bool:
        if self.is_empty:
            return False
        return point_polygon_distance(np.asarray(point, dtype=float), self.vertices) <= tol

    def union(self, other: "RatePolygon") -> "RatePolygon":
        """Convex hull of the union."""
        pts = list(self.vertices) + list(other.vertices)
        srcs = list(self.sources or [None] * len(self.vertices)) + \
            list(other.sources or [None] * len(other.vertices))
        return RatePolygon.hull_of(pts, self.axes, srcs) if pts else RatePolygon.empty(self.axes)

    def max_along(self, direction) -> float:
        if self.is_empty:
            return -np.inf
        return float(np.max(self.vertices @ np.asarray(direction, dtype=float)))


def _segment_distance(p, a, b) -> float:
    ab = b - a
    denom = ab @ ab
    t = 0.0 if denom == 0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.hypot(*(p - (a + t * ab))))


def point_polygon_distance(p: np.ndarray, vertices: np.ndarray) -> float:
    """Euclidean distance from ``p`` to a convex CCW polygon (0 inside)."""
    k = len(vertices)
    if k == 0:
        return np.inf
    if k == 1:
        return float(np.hypot(*(p - vertices[0])))
    if k == 2:
        return _segment_distance(p, vertices[0], vertices[1])
    inside = True
    for i in range(k):
        if _cross(vertices[i], vertices[(i + 1) % k], p) < 0:
            inside = False
            break
    if inside:
        return 0.0
    return min(_segment_distance(p, vertices[i], vertices[(i + 1) % k]) for i in range(k))


def hausdorff(p: RatePolygon, q: RatePolygon) -> float:
    """Hausdorff distance between convex polygons (attained at vertices)."""
    if p.is_empty and q.is_empty:
        return 0.0
    if p.is_empty or q.is_empty:
        return np.inf
    d1 = max(point_polygon_distance(v, q.vertices) for v in p.vertices)
    d2 = max(point_polygon_distance(v, p.vertices) for v in q.vertices)
    return max(d1, d2)


def includes(outer: RatePolygon, inner: RatePolygon, tol: float = GEOM_TOL) -> bool:
    return all(outer.contains(v, tol) for v in inner.vertices)


def halfplanes_to_polygon(A, b, axes=("R1", "R2"), tol: float = GEOM_TOL) -> RatePolygon:
    """Bounded intersection of 2D half-planes ``A @ x <= b`` as a polygon.

    Vertices come from pairwise line intersections that satisfy every row.
    An unbounded feasible set raises :class:`ConsistencyError`.
    """
    A = np.asarray(A, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1)
    scale = np.maximum(np.hypot(A[:, 0], A[:, 1]), 1e-300)
    nz = scale > 1e-14
    trivial = ~nz
    if np.any(b[trivial] < -tol):
        return RatePolygon.empty(axes)
    A, b = A[nz] / scale[nz, None], b[nz] / scale[nz]
    m = len(b)
    pts = []
    for i in range(m):
        for j in range(i + 1, m):
            M = np.array([A[i], A[j]])
            det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
            if abs(det) < 1e-14:
                continue
            x = np.linalg.solve(M, [b[i], b[j]])
            if np.all(A @ x <= b + tol):
                pts.append(x)
    if not pts:
        return RatePolygon.empty(axes)
    poly = RatePolygon.hull_of(pts, axes)
    _check_bounded(A, b, poly, tol)
    return poly


def _check_bounded(A, b, poly: RatePolygon, tol):
    # An unbounded feasible set has a recession direction d with A d <= 0; in the
    # plane the extreme rays of that cone are orthogonal to some row normal.
    if len(A) == 0:
        raise ConsistencyError("projection is unbounded; no constraints remain")
    dirs = np.vstack([np.column_stack([-A[:, 1], A[:, 0]]), np.column_stack([A[:, 1], -A[:, 0]])])
    for d in dirs:
        if np.all(A @ d <= 1e-12):
            raise ConsistencyError("projection is unbounded; region systems must bound every rate")


def fourier_motzkin(system: LinearConstraintSystem, eliminate: Sequence[str],
                    tol: float = 1e-12) -> LinearConstraintSystem:
    """Eliminate coordinates by Fourier-Motzkin, pruning duplicates and dominated rows."""
    coords = list(system.coords)
    A, b = system.A.copy(), system.b.copy()
    for name in eliminate:
        j = coords.index(name)
        col = A[:, j]
        pos, neg, zero = col > tol, col < -tol, np.abs(col) <= tol
        rows = [A[zero]]
        rhs = [b[zero]]
        P, bP = A[pos] / col[pos, None], b[pos] / col[pos]
        N, bN = A[neg] / -col[neg, None], b[neg] / -col[neg]
        if len(P) and len(N):
            rows.append((P[:, None, :] + N[None, :, :]).reshape(-1, A.shape[1]))
            rhs.append((bP[:, None] + bN[None, :]).reshape(-1))
        A = np.vstack(rows)
        b = np.concatenate(rhs)
        A = np.delete(A, j, axis=1)
        coords.pop(j)
        A, b = _prune(A, b)
    return LinearConstraintSystem(tuple(coords), A, b, np.zeros(len(b), dtype=bool))


def _prune(A, b, decimals: int = 12):
    """Drop zero rows that hold, exact duplicates, and rows dominated by a parallel one."""
    if len(b) == 0:
        return A, b
    scale = np.max(np.abs(A), axis=1)
    zero = scale <= 1e-14
    if np.any(b[zero] < -1e-12):
        # infeasible; keep a single contradiction row
        return np.zeros((1, A.shape[1])), np.array([-1.0])
    A, b, scale = A[~zero], b[~zero], scale[~zero]
    A, b = A / scale[:, None], b / scale
    key = np.round(A, decimals)
    best: dict[bytes, int] = {}
    for i, k in enumerate(key):
        h = k.tobytes()
        if h not in best or b[i] < b[best[h]]:
            best[h] = i
    keep = sorted(best.values())
    return A[keep], b[keep]


def project_polytope(system: LinearConstraintSystem, keep=("R1", "R2")) -> RatePolygon:
    """Closure of the projection of ``{x : A x <= b}`` onto the ``keep`` coordinates."""
    keep = tuple(keep)
    for k in keep:
        if k not in system.coords:
            raise InvalidArgument(f"cannot keep unknown coordinate {k!r}")
    elim = [c for c in system.coords if c not in keep]
    reduced = fourier_motzkin(system, elim)
    order = [reduced.coords.index(k) for k in keep]
    A = reduced.A[:, order]
    # rates are nonnegative in every region
    A = np.vstack([A, -np.eye(2)])
    b = np.concatenate([reduced.b, [0.0, 0.0]])
    return halfplanes_to_polygon(A, b, axes=keep)
