"""Random codebooks of the block-Markov scheme."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ResourceError
from ..pmf import marginalize
from .config import SimConfig
from .extractor import build_key_mapping, equalize_partition


@dataclass(frozen=True, eq=False)
class KeyCodebook:
    """Codewords over V with an equal partition into sub-codebooks and a key map.

    ``members[k0, t]`` is the codeword index of the t-th member of sub-codebook k0
    and ``kappa[t]`` the key attached to within-sub-codebook index t.
    """

    codewords: np.ndarray
    members: np.ndarray
    kappa: np.ndarray
    report: dict

    def locate(self) -> tuple[np.ndarray, np.ndarray]:
        """(k0, t) of every codeword index."""
        nk0, t = self.members.shape
        k0 = np.empty(nk0 * t, dtype=np.int64)
        pos = np.empty(nk0 * t, dtype=np.int64)
        k0[self.members.ravel()] = np.repeat(np.arange(nk0), t)
        pos[self.members.ravel()] = np.tile(np.arange(t), nk0)
        return k0, pos


@dataclass(frozen=True, eq=False)
class MessageCodebook:
    """u[m0] plus u1[m0, i1] and u2[m0, i2] with flat two-layer indices.

    For sender j the flat index is ``(m_j0 * M_j1 + c_j1) * L_j + l_j``.
    """

    u: np.ndarray
    u1: np.ndarray
    u2: np.ndarray


@dataclass(frozen=True, eq=False)
class Codebooks:
    key: dict          # block b (2..B+1) -> KeyCodebook
    message: dict      # block b (1..B+1) -> MessageCodebook


def _draw(rng, p, shape) -> np.ndarray:
    """Symbols i.i.d. from ``p`` with the given shape."""
    return np.searchsorted(np.cumsum(p)[:-1], rng.random(shape), side="right")


def _draw_conditional(rng, cond, given) -> np.ndarray:
    """Symbol-wise draw from rows ``cond[given]``; ``given`` has any shape."""
    cdf = np.cumsum(cond, axis=-1)[given]
    r = rng.random(given.shape)[..., None]
    return np.minimum((r >= cdf).sum(axis=-1), cond.shape[-1] - 1)


def key_codebook(cfg: SimConfig, rng) -> KeyCodebook:
    s = cfg.sizes
    p_v = marginalize(cfg.joint, "V").p
    nk = s["NKused"]
    words = _draw(rng, p_v, (nk, cfg.n))
    g = rng.integers(s["NK0"], size=nk)
    g_eq, part = equalize_partition(g, s["NK0"])
    members = np.stack([np.flatnonzero(g_eq == m) for m in range(s["NK0"])])
    kappa, krep = build_key_mapping(s["T"], s["MK1"], rng)
    return KeyCodebook(words, members, kappa, {"partition": part, "kappa": krep,
                                              "generated": s["NK"], "kept": nk})


def message_codebook(cfg: SimConfig, rng, length: int) -> MessageCodebook:
    # only the first NK0 rows of u are ever addressed, so only those are drawn
    s, aux = cfg.sizes, cfg.aux
    rows = s["NK0"]
    u = _draw(rng, aux.p_u, (rows, length))
    u1 = _draw_conditional(rng, aux.p_u1_u, np.broadcast_to(u[:, None, :], (rows, s["C1"], length)))
    u2 = _draw_conditional(rng, aux.p_u2_u, np.broadcast_to(u[:, None, :], (rows, s["C2"], length)))
    return MessageCodebook(u, u1, u2)


def generate_codebooks(cfg: SimConfig, rng=None) -> Codebooks:
    """All codebooks of one run; deterministic given ``rng`` (default: seeded from cfg)."""
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    s = cfg.sizes
    cells = (s["NKused"] * cfg.n * cfg.B
             + s["NK0"] * (1 + s["C1"] + s["C2"]) * cfg.total_length)
    if cells > cfg.budget:
        raise ResourceError(f"codebooks need {cells} symbols, budget is {cfg.budget}")
    key = {b: key_codebook(cfg, rng) for b in range(2, cfg.B + 2)}
    message = {b: message_codebook(cfg, rng, cfg.n if b <= cfg.B else s["nLast"])
               for b in range(1, cfg.B + 2)}
    return Codebooks(key, message)
