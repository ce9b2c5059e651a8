"""Random key mappings and the equal-partition step of the key construction."""
from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidArgument


def bin_deviation(assign: np.ndarray, k: int) -> float:
    """sum_m |P(assign^{-1}(m)) - 1/k| under the uniform law on the domain."""
    counts = np.bincount(np.asarray(assign), minlength=k)
    return float(np.abs(counts / len(assign) - 1.0 / k).sum())


def build_key_mapping(size: int, k: int, seed=0) -> tuple[np.ndarray, dict]:
    """Uniformly random kappa: [size] -> [k] and its uniformity report."""
    if k < 1 or size < 1:
        raise InvalidArgument("key range and domain must be positive")
    if k > size:
        raise InvalidArgument(f"key range {k} exceeds the sub-codebook size {size}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    kappa = rng.integers(k, size=size) if k > 1 else np.zeros(size, dtype=np.int64)
    return kappa, {"size": size, "k": k, "deviation": bin_deviation(kappa, k)}


def equalize_partition(g, k: int) -> tuple[np.ndarray, dict]:
    """Move the fewest elements so that every bin holds exactly ``len(g) / k`` of them.

    Surplus elements of overfull bins (highest indices first) fill underfull bins in
    increasing bin order. The report carries H(K0 | g(V)) for V uniform on the
    domain and K0 = g_equal(V), together with the bound 4 sqrt(eps) log2 k,
    where eps = deviation / 3.
    """
    g = np.asarray(g, dtype=np.int64)
    d = len(g)
    if k < 1:
        raise InvalidArgument("bin count must be positive")
    if d % k:
        raise InvalidArgument(f"domain size {d} is not divisible by {k}; truncate the codebook first")
    if g.size and (g.min() < 0 or g.max() >= k):
        raise InvalidArgument("bin labels must lie in [0, k)")
    target = d // k
    out = g.copy()
    counts = np.bincount(g, minlength=k)
    surplus = []
    for m in range(k):
        if counts[m] > target:
            members = np.flatnonzero(g == m)
            surplus.extend(members[target:].tolist())
    surplus.sort()
    pos = 0
    for m in range(k):
        need = target - counts[m]
        for _ in range(max(need, 0)):
            out[surplus[pos]] = m
            pos += 1
    moved = int(np.sum(out != g))
    dev = bin_deviation(g, k)
    eps = dev / 3.0
    return out, {"moved": moved, "deviation": dev, "epsilon": eps,
                 "conditional_entropy": conditional_entropy(out, g, k),
                 "bound": 4.0 * math.sqrt(eps) * math.log2(k) if k > 1 else 0.0}


def conditional_entropy(k0, g, k: int) -> float:
    """H(K0 | G) in bits for a uniform element with labels ``k0`` and ``g``."""
    joint = np.zeros((k, k))
    np.add.at(joint, (np.asarray(g), np.asarray(k0)), 1.0)
    joint /= joint.sum()
    pg = joint.sum(axis=1, keepdims=True)
    nz = joint > 0
    return float(-np.sum(joint[nz] * np.log2((joint / np.where(pg > 0, pg, 1.0))[nz])) + 0.0)
