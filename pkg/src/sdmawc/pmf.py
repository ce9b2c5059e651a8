"""Finite-alphabet probability tensors and information measures (in bits)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConsistencyError, InvalidArgument

NORM_TOL = 1e-12
MI_CLAMP = 1e-10

# Canonical variable order of the assembled joint distribution.
JOINT_VARS = ("S", "V", "U", "U1", "U2", "X1", "X2", "Y", "Z")


@dataclass(frozen=True)
class Alphabet:
    name: str
    size: int

    def __post_init__(self):
        if int(self.size) < 1:
            raise InvalidArgument(f"alphabet {self.name!r} must have size >= 1")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


class JointPmf:
    """Dense probability tensor whose axes are labelled by variable names."""

    def __init__(self, variables: Sequence[str], weights, tol: float = NORM_TOL):
        weights = _frozen(weights)
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise InvalidArgument(f"duplicate variable names in {variables}")
        if weights.ndim != len(variables):
            raise InvalidArgument(
                f"tensor has {weights.ndim} axes but {len(variables)} variables were named")
        if np.any(weights < 0):
            raise InvalidArgument("probabilities must be nonnegative")
        total = weights.sum()
        if abs(total - 1.0) > tol:
            raise InvalidArgument(f"probabilities sum to {total!r}, not 1")
        self.variables = variables
        self.p = weights

    @property
    def alphabets(self) -> tuple[Alphabet, ...]:
        return tuple(Alphabet(v, s) for v, s in zip(self.variables, self.p.shape))

    def size_of(self, var: str) -> int:
        return self.p.shape[self._axis(var)]

    def _axis(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise InvalidArgument(f"unknown variable {var!r}; have {self.variables}") from None

    def __repr__(self):
        shape = ", ".join(f"{v}:{s}" for v, s in zip(self.variables, self.p.shape))
        return f"JointPmf({shape})"


def _as_tuple(vars_: str | Iterable[str]) -> tuple[str, ...]:
    if isinstance(vars_, str):
        return (vars_,)
    return tuple(vars_)


def marginalize(joint: JointPmf, keep: str | Iterable[str]) -> JointPmf:
    """Marginal over ``keep``; axes follow the order of ``keep``."""
    keep = _as_tuple(keep)
    axes = [joint._axis(v) for v in keep]
    if len(set(axes)) != len(axes):
        raise InvalidArgument(f"duplicate variables in {keep}")
    drop = tuple(i for i in range(len(joint.variables)) if i not in axes)
    m = joint.p.sum(axis=drop) if drop else joint.p
    # after summation the remaining axes are in joint order; permute to keep order
    remaining = sorted(axes)
    perm = [remaining.index(a) for a in axes]
    return JointPmf(keep, np.transpose(m, perm), tol=1e-9)


def _plogp_sum(p: np.ndarray) -> float:
    q = p[p > 0]
    return float(-np.sum(q * np.log2(q)))


def _joint_entropy(joint: JointPmf, vars_: tuple[str, ...]) -> float:
    if not vars_:
        return 0.0
    return _plogp_sum(marginalize(joint, vars_).p)


def _check_disjoint(*groups: tuple[str, ...]):
    seen: set[str] = set()
    for g in groups:
        if len(set(g)) != len(g):
            raise InvalidArgument(f"repeated variable in {g}")
        if seen & set(g):
            raise InvalidArgument(f"variable sets overlap: {groups}")
        seen |= set(g)


def entropy(joint: JointPmf, vars_, given=()) -> float:
    """H(vars | given) in bits."""
    a, c = _as_tuple(vars_), _as_tuple(given)
    _check_disjoint(a, c)
    for v in a + c:
        joint._axis(v)
    h = _joint_entropy(joint, a + c) - _joint_entropy(joint, c)
    return _clamp(h)


def mutual_information(joint: JointPmf, a, b, given=()) -> float:
    """I(a; b | given) in bits, computed as H(a|given) - H(a|b,given)."""
    a, b, c = _as_tuple(a), _as_tuple(b), _as_tuple(given)
    _check_disjoint(a, b, c)
    for v in a + b + c:
        joint._axis(v)
    h = _joint_entropy
    val = h(joint, a + c) + h(joint, b + c) - h(joint, a + b + c) - h(joint, c)
    return _clamp(val)


def _clamp(val: float) -> float:
    if val < 0:
        if val < -MI_CLAMP:
            raise ConsistencyError(f"information quantity {val!r} is negative beyond tolerance")
        return 0.0
    return float(val)


def binary_entropy(a: float) -> float:
    if not 0.0 <= a <= 1.0:
        raise InvalidArgument(f"binary_entropy: {a!r} is not a probability")
    if a == 0.0 or a == 1.0:
        return 0.0
    return -a * math.log2(a) - (1 - a) * math.log2(1 - a)


def binary_convolution(a: float, b: float) -> float:
    for x in (a, b):
        if not 0.0 <= x <= 1.0:
            raise InvalidArgument(f"binary_convolution: {x!r} is not a probability")
    return a * (1 - b) + (1 - a) * b


def check_conditional(name: str, arr, n_target_axes: int = 1) -> np.ndarray:
    """Validate a conditional PMF stored with target axes last."""
    arr = np.asarray(arr, dtype=float)
    if arr.ndim < n_target_axes:
        raise InvalidArgument(f"{name}: expected at least {n_target_axes} axes")
    if np.any(arr < 0):
        raise InvalidArgument(f"{name}: negative probability")
    sums = arr.reshape(arr.shape[: arr.ndim - n_target_axes] + (-1,)).sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > NORM_TOL):
        raise InvalidArgument(f"{name}: conditional slices do not sum to 1 (max error "
                              f"{np.max(np.abs(sums - 1.0)):.3g})")
    return _frozen(arr)


@dataclass(frozen=True, eq=False)
class ChannelModel:
    """State law ``p_s[s]`` and kernel ``kernel[x1, x2, s, y, z]``."""

    p_s: np.ndarray
    kernel: np.ndarray

    def __post_init__(self):
        p_s = check_conditional("p_s", self.p_s, 1)
        kernel = check_conditional("kernel", self.kernel, 2)
        if kernel.ndim != 5:
            raise InvalidArgument("kernel must be indexed [x1][x2][s][y][z]")
        if kernel.shape[2] != p_s.shape[0]:
            raise InvalidArgument(
                f"kernel state axis has size {kernel.shape[2]}, p_s has {p_s.shape[0]}")
        object.__setattr__(self, "p_s", p_s)
        object.__setattr__(self, "kernel", kernel)

    @property
    def sizes(self) -> dict[str, int]:
        x1, x2, s, y, z = self.kernel.shape
        return {"X1": x1, "X2": x2, "S": s, "Y": y, "Z": z}

    @classmethod
    def from_functions(cls, p_s, sizes, law) -> "ChannelModel":
        """Build from ``law(x1, x2, s) -> {(y, z): prob}``."""
        nx1, nx2, ns, ny, nz = sizes
        k = np.zeros(sizes)
        for x1 in range(nx1):
            for x2 in range(nx2):
                for s in range(ns):
                    for (y, z), pr in law(x1, x2, s).items():
                        k[x1, x2, s, y, z] += pr
        return cls(np.asarray(p_s, dtype=float), k)

    def to_dict(self) -> dict:
        return {"p_s": self.p_s.tolist(), "kernel": self.kernel.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelModel":
        try:
            return cls(np.asarray(d["p_s"], dtype=float), np.asarray(d["kernel"], dtype=float))
        except KeyError as exc:
            raise InvalidArgument(f"channel document is missing field {exc}") from None
        except ValueError as exc:
            raise InvalidArgument(f"malformed channel document: {exc}") from None


@dataclass(frozen=True, eq=False)
class AuxChain:
    """Auxiliary factorization P_{V|S} P_U P_{U1|U} P_{U2|U} P_{X1|U U1 S} P_{X2|U U2 S}.

    Arrays keep conditioning axes first: ``p_v_s[s, v]``, ``p_u1_u[u, u1]``,
    ``p_x1[u, u1, s, x1]`` and so on.
    """

    p_v_s: np.ndarray
    p_u: np.ndarray
    p_u1_u: np.ndarray
    p_u2_u: np.ndarray
    p_x1: np.ndarray
    p_x2: np.ndarray

    def __post_init__(self):
        for name, nd in (("p_v_s", 2), ("p_u", 1), ("p_u1_u", 2), ("p_u2_u", 2),
                         ("p_x1", 4), ("p_x2", 4)):
            arr = check_conditional(name, getattr(self, name), 1)
            if arr.ndim != nd:
                raise InvalidArgument(f"{name} must have {nd} axes, got {arr.ndim}")
            object.__setattr__(self, name, arr)
        nu = self.p_u.shape[0]
        if self.p_u1_u.shape[0] != nu or self.p_u2_u.shape[0] != nu:
            raise InvalidArgument("U alphabet size disagrees between factors")
        if self.p_x1.shape[:2] != (nu, self.p_u1_u.shape[1]):
            raise InvalidArgument("p_x1 must be indexed [u, u1, s, x1]")
        if self.p_x2.shape[:2] != (nu, self.p_u2_u.shape[1]):
            raise InvalidArgument("p_x2 must be indexed [u, u2, s, x2]")
        if self.p_x1.shape[2] != self.p_v_s.shape[0] or self.p_x2.shape[2] != self.p_v_s.shape[0]:
            raise InvalidArgument("state alphabet size disagrees between factors")

    @property
    def sizes(self) -> dict[str, int]:
        return {"S": self.p_v_s.shape[0], "V": self.p_v_s.shape[1], "U": self.p_u.shape[0],
                "U1": self.p_u1_u.shape[1], "U2": self.p_u2_u.shape[1],
                "X1": self.p_x1.shape[3], "X2": self.p_x2.shape[3]}

    def to_dict(self) -> dict:
        return {k: getattr(self, k).tolist()
                for k in ("p_v_s", "p_u", "p_u1_u", "p_u2_u", "p_x1", "p_x2")}

    @classmethod
    def from_dict(cls, d: dict) -> "AuxChain":
        try:
            return cls(*(np.asarray(d[k], dtype=float)
                         for k in ("p_v_s", "p_u", "p_u1_u", "p_u2_u", "p_x1", "p_x2")))
        except KeyError as exc:
            raise InvalidArgument(f"aux document is missing field {exc}") from None
        except ValueError as exc:
            raise InvalidArgument(f"malformed aux document: {exc}") from None

    @classmethod
    def from_maps(cls, n_s: int, p_v_s, p_u, p_u1_u, p_u2_u, x1_map, x2_map,
                  n_x1: int, n_x2: int) -> "AuxChain":
        """Chain with deterministic inputs ``x1_map(u, u1, s)`` and ``x2_map(u, u2, s)``."""
        p_u = np.asarray(p_u, dtype=float)
        p_u1_u = np.asarray(p_u1_u, dtype=float)
        p_u2_u = np.asarray(p_u2_u, dtype=float)
        nu, nu1, nu2 = p_u.shape[0], p_u1_u.shape[1], p_u2_u.shape[1]
        p_x1 = np.zeros((nu, nu1, n_s, n_x1))
        p_x2 = np.zeros((nu, nu2, n_s, n_x2))
        for u in range(nu):
            for s in range(n_s):
                for a in range(nu1):
                    p_x1[u, a, s, x1_map(u, a, s)] = 1.0
                for a in range(nu2):
                    p_x2[u, a, s, x2_map(u, a, s)] = 1.0
        return cls(np.asarray(p_v_s, dtype=float), p_u, p_u1_u, p_u2_u, p_x1, p_x2)


def assemble_joint(channel: ChannelModel, aux: AuxChain) -> JointPmf:
    """Joint PMF over (S, V, U, U1, U2, X1, X2, Y, Z)."""
    cs, asz = channel.sizes, aux.sizes
    for v in ("S", "X1", "X2"):
        if cs[v] != asz[v]:
            raise InvalidArgument(f"alphabet of {v} is {cs[v]} in the channel but {asz[v]} in aux")
    p = np.einsum("s,sv,u,ua,ub,uasx,ubsw,xwsyz->svuabxwyz",
                  channel.p_s, aux.p_v_s, aux.p_u, aux.p_u1_u, aux.p_u2_u,
                  aux.p_x1, aux.p_x2, channel.kernel, optimize=True)
    return JointPmf(JOINT_VARS, p, tol=1e-10)
