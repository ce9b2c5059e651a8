"""Searches over input distributions and the closed-form capacity expressions."""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import InvalidArgument, PreconditionError, ResourceError
from .geometry import RatePolygon
from .pmf import (AuxChain, ChannelModel, JointPmf, assemble_joint, binary_convolution,
                  binary_entropy, entropy, mutual_information)
from .regions import (SCHEME2, box_with_sum, expand_region, mi_bundle,
                      region_axes, region_polygon)


@dataclass(frozen=True)
class SearchConfig:
    """How the union over auxiliary distributions is approximated.

    ``cardinalities`` may set any of V, U, U1, U2 (V defaults to |S|, the others to 2).
    ``grid`` > 0 enumerates every factor row on the simplex grid with that many
    steps together with every pair of deterministic input maps. ``samples`` seeded
    Dirichlet draws follow. Explicit ``candidates`` are always evaluated first.
    """

    cardinalities: dict = field(default_factory=dict)
    grid: int = 0
    samples: int = 64
    seed: int = 0
    candidates: tuple = ()
    budget: int = 20000
    deterministic_maps: bool = True
    u2_equals_x2: bool = False

    def __post_init__(self):
        for k, v in self.cardinalities.items():
            if k not in ("V", "U", "U1", "U2"):
                raise InvalidArgument(f"unknown auxiliary {k!r} in cardinalities")
            if int(v) < 1:
                raise InvalidArgument(f"cardinality of {k} must be >= 1")
        if self.grid < 0 or self.samples < 0 or self.budget < 1:
            raise InvalidArgument("grid and samples must be >= 0 and budget >= 1")

    def sizes(self, channel: ChannelModel) -> dict:
        cs = channel.sizes
        out = {"V": cs["S"], "U": 2, "U1": 2, "U2": 2}
        out.update({k: int(v) for k, v in self.cardinalities.items()})
        if self.u2_equals_x2:
            out["U2"] = cs["X2"]
        return out

    def to_dict(self) -> dict:
        return {"cardinalities": dict(sorted(self.cardinalities.items())), "grid": self.grid,
                "samples": self.samples, "seed": self.seed, "budget": self.budget,
                "deterministic_maps": self.deterministic_maps,
                "u2_equals_x2": self.u2_equals_x2,
                "candidates": [c.to_dict() for c in self.candidates]}

    @classmethod
    def from_dict(cls, d: dict) -> "SearchConfig":
        d = dict(d)
        cands = tuple(AuxChain.from_dict(c) for c in d.pop("candidates", []))
        try:
            return cls(candidates=cands, **d)
        except TypeError as exc:
            raise InvalidArgument(f"bad search config: {exc}") from None


def simplex_grid(k: int, r: int) -> np.ndarray:
    """All points of the k-simplex with coordinates in {0, 1/r, ..., 1}."""
    if k == 1:
        return np.ones((1, 1))
    pts = [np.diff([0, *c, r]) for c in itertools.combinations_with_replacement(range(r + 1), k - 1)]
    return np.array(pts, dtype=float) / r


def _profile_sizes(sizes: dict, region: str) -> dict:
    s = dict(sizes)
    if region in SCHEME2 or region in ("D21", "D22"):
        s["V"] = 1
    if region in SCHEME2:
        s["U"] = 1
    return s


def _maps_array(table: np.ndarray, n_out: int) -> np.ndarray:
    return np.eye(n_out)[table]


def _chain(sizes, cs, p_v_s, p_u, p_u1_u, p_u2_u, p_x1, p_x2, u2x2: bool) -> AuxChain:
    if u2x2:
        p_x2 = np.zeros((sizes["U"], cs["X2"], cs["S"], cs["X2"]))
        for u2 in range(cs["X2"]):
            p_x2[:, u2, :, u2] = 1.0
    return AuxChain(p_v_s, p_u, p_u1_u, p_u2_u, p_x1, p_x2)


def _grid_candidates(channel: ChannelModel, sizes: dict, cfg: SearchConfig) -> Iterator[AuxChain]:
    cs = channel.sizes
    r = cfg.grid
    nS, nV, nU, nU1, nU2 = cs["S"], sizes["V"], sizes["U"], sizes["U1"], sizes["U2"]
    g_v, g_u, g_u1, g_u2 = (simplex_grid(nV, r), simplex_grid(nU, r),
                            simplex_grid(nU1, r), simplex_grid(nU2, r))
    n_x1_maps = cs["X1"] ** (nU * nU1 * nS)
    n_x2_maps = 1 if cfg.u2_equals_x2 else cs["X2"] ** (nU * nU2 * nS)
    total = (len(g_v) ** nS * len(g_u) * len(g_u1) ** nU * len(g_u2) ** nU
             * n_x1_maps * n_x2_maps)
    if total > cfg.budget:
        raise ResourceError(f"grid search needs {total} candidates, budget is {cfg.budget}")
    x1_shape, x2_shape = (nU, nU1, nS), (nU, nU2, nS)
    for vs in itertools.product(range(len(g_v)), repeat=nS):
        p_v_s = g_v[list(vs)]
        for iu in range(len(g_u)):
            for a in itertools.product(range(len(g_u1)), repeat=nU):
                for b in itertools.product(range(len(g_u2)), repeat=nU):
                    for m1 in range(n_x1_maps):
                        t1 = np.array(np.unravel_index(m1, (cs["X1"],) * int(np.prod(x1_shape))))
                        p_x1 = _maps_array(t1.reshape(x1_shape), cs["X1"])
                        for m2 in range(n_x2_maps):
                            t2 = np.array(np.unravel_index(m2, (cs["X2"],) * int(np.prod(x2_shape))))
                            p_x2 = _maps_array(t2.reshape(x2_shape), cs["X2"])
                            yield _chain(sizes, cs, p_v_s, g_u[iu], g_u1[list(a)], g_u2[list(b)],
                                         p_x1, p_x2, cfg.u2_equals_x2)


def _random_candidates(channel: ChannelModel, sizes: dict, cfg: SearchConfig,
                       stream: int) -> Iterator[AuxChain]:
    cs = channel.sizes
    rng = np.random.default_rng([cfg.seed, stream])
    nS, nV, nU, nU1, nU2 = cs["S"], sizes["V"], sizes["U"], sizes["U1"], sizes["U2"]
    for _ in range(cfg.samples):
        p_v_s = rng.dirichlet(np.ones(nV), size=nS)
        p_u = rng.dirichlet(np.ones(nU))
        p_u1_u = rng.dirichlet(np.ones(nU1), size=nU)
        p_u2_u = rng.dirichlet(np.ones(nU2), size=nU)
        if cfg.deterministic_maps:
            p_x1 = _maps_array(rng.integers(cs["X1"], size=(nU, nU1, nS)), cs["X1"])
            p_x2 = _maps_array(rng.integers(cs["X2"], size=(nU, nU2, nS)), cs["X2"])
        else:
            p_x1 = rng.dirichlet(np.ones(cs["X1"]), size=(nU, nU1, nS))
            p_x2 = rng.dirichlet(np.ones(cs["X2"]), size=(nU, nU2, nS))
        yield _chain(sizes, cs, p_v_s, p_u, p_u1_u, p_u2_u, p_x1, p_x2, cfg.u2_equals_x2)


def _trivial_candidate(channel: ChannelModel, cfg: SearchConfig) -> AuxChain:
    """Constant auxiliaries and inputs; its polygon is the origin whenever that is feasible."""
    cs = channel.sizes
    nU2 = cs["X2"] if cfg.u2_equals_x2 else 1
    p_x1 = np.zeros((1, 1, cs["S"], cs["X1"]))
    p_x2 = np.zeros((1, nU2, cs["S"], cs["X2"]))
    p_x1[..., 0] = p_x2[..., 0] = 1.0
    p_u2 = np.eye(nU2)[:1]
    return _chain({"U": 1}, cs, np.ones((cs["S"], 1)), np.ones(1), np.ones((1, 1)), p_u2,
                  p_x1, p_x2, cfg.u2_equals_x2)


def _fits(aux: AuxChain, sizes: dict) -> bool:
    # profiles that force a trivial auxiliary reject candidates that use it
    return all(aux.sizes[k] == 1 for k in ("V", "U") if sizes[k] == 1)


def iter_candidates(channel: ChannelModel, sizes: dict, cfg: SearchConfig,
                    stream: int = 0) -> Iterator[tuple[str, AuxChain]]:
    """Labelled candidates: explicit ones, the trivial one, the grid, then random draws."""
    for i, c in enumerate(cfg.candidates):
        if _fits(c, sizes):
            yield f"candidate#{i}", c
    yield "trivial", _trivial_candidate(channel, cfg)
    if cfg.grid > 0:
        for i, c in enumerate(_grid_candidates(channel, sizes, cfg)):
            yield f"grid#{i}", c
    for i, c in enumerate(_random_candidates(channel, sizes, cfg, stream)):
        yield f"random#{i}", c


def achievable_region(channel: ChannelModel, spec: str, search: SearchConfig | None = None) -> RatePolygon:
    """Convex hull of the union of per-distribution polygons of one region id or family."""
    search = search or SearchConfig()
    ids = expand_region(spec)
    axes = region_axes(ids[0])
    if any(region_axes(r) != axes for r in ids):
        raise InvalidArgument(f"region family {spec!r} mixes rate planes")
    base = search.sizes(channel)
    groups: dict[tuple, list[str]] = {}
    for r in ids:
        key = tuple(sorted(_profile_sizes(base, r).items()))
        groups.setdefault(key, []).append(r)
    points, sources = [], []
    n_eval = 0
    for stream, (key, regs) in enumerate(sorted(groups.items())):
        sizes = dict(key)
        for label, aux in iter_candidates(channel, sizes, search, stream):
            n_eval += 1
            if n_eval > search.budget:
                raise ResourceError(f"search exceeded its budget of {search.budget} candidates")
            bundle = mi_bundle(assemble_joint(channel, aux))
            for r in regs:
                poly = region_polygon(bundle, r)
                points.extend(poly.vertices)
                sources.extend([f"{label}/{r}"] * len(poly.vertices))
    if not points:
        return RatePolygon.empty(axes)
    return RatePolygon.hull_of(points, axes, sources)


# ---------------------------------------------------------------------------
# Shannon strategies (scheme-2 sender-1 rate)


def _mi_rows(grid: np.ndarray, T: np.ndarray) -> np.ndarray:
    """I(X;Y) for each input law in ``grid`` (rows) through channel matrix ``T[x, y]``."""
    py = grid @ T
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(T[None] > 0, T[None] / py[:, None, :], 1.0)
        terms = grid[:, :, None] * T[None] * np.log2(ratio)
    return np.nansum(terms, axis=(1, 2))


def blahut_arimoto(T: np.ndarray, tol: float = 1e-12, max_iter: int = 100000) -> float:
    """Capacity in bits of the channel matrix ``T[x, y]``."""
    T = np.asarray(T, dtype=float)
    p = np.full(T.shape[0], 1.0 / T.shape[0])
    lo = 0.0
    for _ in range(max_iter):
        py = p @ T
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.nansum(np.where(T > 0, T * np.log2(T / py), 0.0), axis=1)
        lo = float(p @ d)
        hi = float(d.max())
        if hi - lo < tol:
            break
        p = p * np.exp2(d)
        p /= p.sum()
    return lo


def strategy_channels(channel: ChannelModel, n_u1: int = 2, n_u2: int = 2) -> Iterator[tuple]:
    """Channels U1 -> Y for every deterministic x1(u1, s) and fixed u2 under x2(u2, s).

    I(U1;Y|U2) is linear in P_U2, so only point masses of U2 matter and a
    single column x2(u2, .) of the sender-2 map suffices.
    """
    cs = channel.sizes
    nS = cs["S"]
    W = channel.kernel.sum(axis=4)  # [x1, x2, s, y]
    for m1 in itertools.product(range(cs["X1"]), repeat=n_u1 * nS):
        x1 = np.array(m1).reshape(n_u1, nS)
        for m2 in itertools.product(range(cs["X2"]), repeat=nS):
            T = np.zeros((n_u1, cs["Y"]))
            for u1 in range(n_u1):
                for s in range(nS):
                    T[u1] += channel.p_s[s] * W[x1[u1, s], m2[s], s]
            yield x1, np.array(m2), T


def shannon_strategy_bound(channel: ChannelModel, n_u1: int = 2, n_u2: int = 2,
                           step: float = 1e-3, budget: int = 10 ** 7,
                           return_argmax: bool = False):
    """max I(U1;Y|U2) over deterministic strategies and P_U1 on a simplex grid."""
    r = int(round(1.0 / step))
    if not math.isclose(r * step, 1.0, rel_tol=1e-9):
        raise InvalidArgument("step must divide 1")
    cs = channel.sizes
    n_maps = cs["X1"] ** (n_u1 * cs["S"]) * cs["X2"] ** cs["S"]
    n_grid = math.comb(r + n_u1 - 1, n_u1 - 1)
    if n_maps * n_grid > budget:
        raise ResourceError(f"strategy enumeration needs {n_maps * n_grid} evaluations, budget {budget}")
    grid = simplex_grid(n_u1, r)
    best, arg = -np.inf, None
    for x1, x2col, T in strategy_channels(channel, n_u1, n_u2):
        vals = _mi_rows(grid, T)
        i = int(np.argmax(vals))
        if vals[i] > best + 1e-15:
            best, arg = float(vals[i]), {"x1": x1.tolist(), "x2_column": x2col.tolist(),
                                         "p_u1": grid[i].tolist()}
    best = max(best, 0.0)
    return (best, arg) if return_argmax else best


def shannon_strategy_capacity(channel: ChannelModel, n_u1: int = 2, n_u2: int = 2) -> float:
    """Same maximization with Blahut-Arimoto in place of the grid."""
    return max(blahut_arimoto(T) for _, _, T in strategy_channels(channel, n_u1, n_u2))


# ---------------------------------------------------------------------------
# Example 2 and the degraded capacity formula


def example2_rows(q: float, p: float, alpha: float) -> tuple[float, float, float, float]:
    """(R1 first, R1 second, sum first, sum second) bounds at one alpha."""
    h, conv = binary_entropy, binary_convolution
    return (h(alpha) + h(q) - h(conv(p, alpha)) + h(p), h(alpha),
            1.0 + h(q) - h(conv(alpha, p)) + h(p), 1.0)


def example2_capacity(q: float, p: float, alpha_grid: Sequence[float]) -> RatePolygon:
    """Hull over alpha of {R1 <= min(first two rows), R1 + R2 <= min(last two rows)}."""
    for name, v in (("q", q), ("p", p)):
        if not 0.0 <= v <= 0.5:
            raise InvalidArgument(f"{name} must lie in [0, 1/2], got {v}")
    pts, srcs = [], []
    for a in alpha_grid:
        if not 0.5 <= a <= 1.0:
            raise InvalidArgument(f"alpha must lie in [1/2, 1], got {a}")
        r1a, r1b, sa, sb = example2_rows(q, p, a)
        c1, cs = min(r1a, r1b), min(sa, sb)
        poly = box_with_sum(c1, cs, cs)
        pts.extend(poly.vertices)
        srcs.extend([f"alpha={a:.12g}"] * len(poly.vertices))
    return RatePolygon.hull_of(pts, ("R1", "R2"), srcs)


@dataclass(frozen=True, eq=False)
class DegradedInput:
    """P_U, P_{X1|U,S} as ``p_x1[u, s, x1]`` and P_{X2|U} as ``p_x2[u, x2]``."""

    p_u: np.ndarray
    p_x1: np.ndarray
    p_x2: np.ndarray


def degraded_joint(channel: ChannelModel, inp: DegradedInput) -> JointPmf:
    p = np.einsum("s,u,usx,uw,xwsyz->suxwyz", channel.p_s, inp.p_u, inp.p_x1, inp.p_x2,
                  channel.kernel, optimize=True)
    return JointPmf(("S", "U", "X1", "X2", "Y", "Z"), p, tol=1e-10)


def degraded_rows(channel: ChannelModel, inp: DegradedInput) -> tuple[float, float, float, float]:
    j = degraded_joint(channel, inp)
    main = mutual_information(j, "X1", "Y", ("U", "X2", "S"))
    leak = mutual_information(j, "X1", "Z", ("U", "X2", "S"))
    key = entropy(j, "S", ("Z", "U", "X2"))
    total = mutual_information(j, ("X1", "X2"), "Y", "S")
    return main - leak + key, main, total - leak + key, total


def is_physically_degraded(channel: ChannelModel, tol: float = 1e-12) -> bool:
    """Whether P(z | y, x1, x2, s) depends on y only."""
    K = channel.kernel
    py = K.sum(axis=4, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(py > 0, K / py, np.nan)
    flat = cond.reshape(-1, K.shape[3], K.shape[4])
    for y in range(K.shape[3]):
        rows = flat[:, y, :]
        rows = rows[~np.isnan(rows[:, 0])]
        if len(rows) and np.max(np.ptp(rows, axis=0)) > tol:
            return False
    return True


def is_stochastically_degraded(channel: ChannelModel, tol: float = 1e-9) -> bool:
    """Whether some kernel Q(z|y) gives P_{Z|X1X2S} = P_{Y|X1X2S} Q (an LP feasibility check)."""
    K = channel.kernel
    ny, nz = K.shape[3], K.shape[4]
    WY = K.sum(axis=4).reshape(-1, ny)
    WZ = K.sum(axis=3).reshape(-1, nz)
    n = ny * nz
    A_eq, b_eq = [], []
    for i in range(WY.shape[0]):
        for z in range(nz):
            row = np.zeros(n)
            row[z::nz] = WY[i]
            A_eq.append(row)
            b_eq.append(WZ[i, z])
    for y in range(ny):
        row = np.zeros(n)
        row[y * nz:(y + 1) * nz] = 1.0
        A_eq.append(row)
        b_eq.append(1.0)
    # minimize the total slack of |A q - b| to tolerate float noise
    m = len(b_eq)
    A = np.array(A_eq)
    c = np.concatenate([np.zeros(n), np.ones(2 * m)])
    A_full = np.hstack([A, np.eye(m), -np.eye(m)])
    res = linprog(c, A_eq=A_full, b_eq=np.array(b_eq), bounds=(0, None), method="highs")
    return bool(res.status == 0 and res.fun <= tol)


def check_degraded(channel: ChannelModel, mode: str = "raise") -> bool:
    """Verify stochastic degradedness; ``mode`` is raise, warn or skip."""
    if mode == "skip":
        return True
    ok = is_stochastically_degraded(channel)
    if not ok:
        msg = "the eavesdropper channel is not a degraded version of the main channel"
        if mode == "raise":
            raise PreconditionError(msg)
        if mode != "warn":
            raise InvalidArgument(f"unknown degradedness mode {mode!r}")
        warnings.warn(msg, stacklevel=2)
    return ok


def _degraded_candidates(channel: ChannelModel, search: SearchConfig, inputs) -> Iterator[tuple[str, DegradedInput]]:
    cs = channel.sizes
    nU = int(search.cardinalities.get("U", 2))
    for i, c in enumerate(inputs):
        yield f"candidate#{i}", c
    if search.grid > 0:
        gu, g1, g2 = simplex_grid(nU, search.grid), simplex_grid(cs["X1"], search.grid), \
            simplex_grid(cs["X2"], search.grid)
        total = len(gu) * len(g1) ** (nU * cs["S"]) * len(g2) ** nU
        if total > search.budget:
            raise ResourceError(f"grid search needs {total} candidates, budget is {search.budget}")
        for k, (iu, a, b) in enumerate(itertools.product(
                range(len(gu)), itertools.product(range(len(g1)), repeat=nU * cs["S"]),
                itertools.product(range(len(g2)), repeat=nU))):
            yield f"grid#{k}", DegradedInput(gu[iu], g1[list(a)].reshape(nU, cs["S"], -1), g2[list(b)])
    rng = np.random.default_rng([search.seed, 99])
    for k in range(search.samples):
        yield f"random#{k}", DegradedInput(rng.dirichlet(np.ones(nU)),
                                           rng.dirichlet(np.ones(cs["X1"]), size=(nU, cs["S"])),
                                           rng.dirichlet(np.ones(cs["X2"]), size=nU))


def degraded_capacity(channel: ChannelModel, search: SearchConfig | None = None,
                      inputs: Sequence[DegradedInput] = (), degraded: str = "raise") -> RatePolygon:
    """Hull over P_U P_{X1|US} P_{X2|U} of the degraded capacity rows, in the (R1, R0) plane."""
    search = search or SearchConfig()
    check_degraded(channel, degraded)
    pts, srcs = [], []
    for n, (label, inp) in enumerate(_degraded_candidates(channel, search, inputs)):
        if n >= search.budget:
            raise ResourceError(f"search exceeded its budget of {search.budget} candidates")
        r1a, r1b, sa, sb = degraded_rows(channel, inp)
        c1, cs_ = min(r1a, r1b), min(sa, sb)
        poly = box_with_sum(c1, cs_, cs_, axes=("R1", "R0"))
        pts.extend(poly.vertices)
        srcs.extend([label] * len(poly.vertices))
    if not pts:
        return RatePolygon.empty(("R1", "R0"))
    return RatePolygon.hull_of(pts, ("R1", "R0"), srcs)


def example2_degraded_input(alpha: float) -> DegradedInput:
    """X2 = 1 and X1 = U xor X' with U uniform and X' ~ Bern(alpha)."""
    p_x1 = np.zeros((2, 2, 2))
    for u in range(2):
        p_x1[u, :, u] = 1.0 - alpha
        p_x1[u, :, u ^ 1] = alpha
    return DegradedInput(np.full(2, 0.5), p_x1, np.array([[0.0, 1.0], [0.0, 1.0]]))

