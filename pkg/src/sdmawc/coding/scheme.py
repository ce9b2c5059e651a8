"""Encoding, channel use and backward decoding of the block-Markov scheme.

Blocks are numbered 1..B+1 as in the scheme description: block 1 and block
B+1 carry dummy messages, blocks 2..B carry (m10, m11, m20, m21).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgument, ResourceError
from ..pmf import ChannelModel
from .codebooks import Codebooks, KeyCodebook, MessageCodebook, _draw, _draw_conditional
from .config import SimConfig
from .typicality import batch_typical, flat_symbols, reference_pmf

CAUSES = ("wz-encode", "last-block", "v-decode", "tuple-decode", "key-mismatch")


@dataclass
class BlockTranscript:
    block: int
    s: np.ndarray
    k0: int
    t: int | None
    key: tuple
    messages: tuple
    ciphers: tuple
    local: tuple
    y: np.ndarray | None = None
    z: np.ndarray | None = None
    wz_failed: bool = False


@dataclass
class DecodeResult:
    decoded: dict = field(default_factory=dict)   # block -> (m10, m11, m20, m21)
    failed: dict = field(default_factory=dict)    # block -> cause
    events: list = field(default_factory=list)    # (cause, block) in decoding order
    k0: dict = field(default_factory=dict)


class References:
    """Flattened reference laws used by the encoders and the decoder."""

    def __init__(self, cfg: SimConfig):
        j = cfg.joint
        self.sizes = dict(zip(j.variables, j.p.shape))
        self.sv = reference_pmf(j, ("S", "V"))
        self.vy = reference_pmf(j, ("V", "Y"))
        self.last = reference_pmf(j, ("U", "U1", "U2", "Y"))
        self.vuy = reference_pmf(j, ("V", "U", "Y"))
        self.vu1 = reference_pmf(j, ("V", "U", "U1", "Y"))
        self.vu2 = reference_pmf(j, ("V", "U", "U2", "Y"))
        self.full = reference_pmf(j, ("V", "U", "U1", "U2", "Y"))

    def dims(self, *names) -> tuple:
        return tuple(self.sizes[n] for n in names)


def wyner_ziv_encode(s: np.ndarray, book: KeyCodebook, refs: References, delta: float):
    """Smallest (k0, t) whose codeword is jointly typical with ``s``; None if none is."""
    sym = flat_symbols([np.asarray(s)[None, :], book.codewords], refs.dims("S", "V"))
    ok = np.flatnonzero(batch_typical(sym, refs.sv, delta))
    if len(ok) == 0:
        return None
    k0, pos = book.locate()
    order = np.lexsort((pos[ok], k0[ok]))
    j = ok[order[0]]
    return int(k0[j]), int(pos[j])


def split_key(k1: int, m11: int) -> tuple[int, int]:
    """Low mixed-radix digit goes to sender 1."""
    return k1 % m11, k1 // m11


def flat_index(m0_part: int, c: int, l: int, m_c: int, n_l: int) -> int:
    return (m0_part * m_c + c) * n_l + l


def unflat_index(i: int, m_c: int, n_l: int) -> tuple[int, int, int]:
    rest, l = divmod(int(i), n_l)
    m, c = divmod(rest, m_c)
    return m, c, l


def inputs_from_codewords(cfg: SimConfig, u, u1, u2, s, rng) -> tuple[np.ndarray, np.ndarray]:
    """Symbol-wise inputs; position i uses only (u_i, u_ji, s_i)."""
    aux = cfg.aux
    x1 = _draw_conditional(rng, aux.p_x1.reshape(-1, aux.p_x1.shape[-1]),
                           np.ravel_multi_index((u, u1, s), aux.p_x1.shape[:3]))
    x2 = _draw_conditional(rng, aux.p_x2.reshape(-1, aux.p_x2.shape[-1]),
                           np.ravel_multi_index((u, u2, s), aux.p_x2.shape[:3]))
    return x1, x2


def encode_block(b: int, messages, s_b, s_prev, books: Codebooks, cfg: SimConfig,
                 rng, refs: References | None = None):
    """Channel inputs and transcript of block ``b``.

    ``messages`` is (m10, m11, m20, m21) for blocks 2..B and ignored otherwise.
    """
    if not 1 <= b <= cfg.B + 1:
        raise InvalidArgument(f"block index {b} outside [1, {cfg.B + 1}]")
    refs = refs or References(cfg)
    sz = cfg.sizes
    s_b = np.asarray(s_b)
    k0, t, wz_failed = 0, None, False
    k11 = k21 = 0
    if b >= 2:
        found = wyner_ziv_encode(s_prev, books.key[b], refs, cfg.deltas["wz"])
        if found is None:
            wz_failed = True
            found = (0, 0)
        k0, t = found
        k11, k21 = split_key(int(books.key[b].kappa[t]), sz["M11"])
    if 2 <= b <= cfg.B:
        m10, m11, m20, m21 = (int(m) for m in messages)
        c11, c21 = (m11 + k11) % sz["M11"], (m21 + k21) % sz["M21"]
        l1, l2 = int(rng.integers(sz["L1"])), int(rng.integers(sz["L2"]))
    elif b == 1:
        m10 = m11 = m20 = m21 = c11 = c21 = 0
        l1, l2 = int(rng.integers(sz["L1"])), int(rng.integers(sz["L2"]))
    else:
        m10 = m11 = m20 = m21 = c11 = c21 = l1 = l2 = 0
    mb: MessageCodebook = books.message[b]
    i1 = flat_index(m10, c11, l1, sz["M11"], sz["L1"])
    i2 = flat_index(m20, c21, l2, sz["M21"], sz["L2"])
    u, u1, u2 = mb.u[k0], mb.u1[k0, i1], mb.u2[k0, i2]
    x1, x2 = inputs_from_codewords(cfg, u, u1, u2, s_b, rng)
    tr = BlockTranscript(b, s_b, k0, t, (k11, k21), (m10, m11, m20, m21), (c11, c21), (l1, l2),
                         wz_failed=wz_failed)
    return x1, x2, tr


def channel_transmit(x1, x2, s, channel: ChannelModel, rng) -> tuple[np.ndarray, np.ndarray]:
    """Memoryless draw of (y, z) given the input and state sequences."""
    x1, x2, s = np.asarray(x1), np.asarray(x2), np.asarray(s)
    if not x1.shape == x2.shape == s.shape:
        raise InvalidArgument("x1, x2 and s must have equal lengths")
    K = channel.kernel
    nx1, nx2, ns, ny, nz = K.shape
    if (x1.size and (x1.max() >= nx1 or x2.max() >= nx2 or s.max() >= ns)) or \
            (x1.size and min(x1.min(), x2.min(), s.min()) < 0):
        raise InvalidArgument("input or state symbol outside the channel alphabet")
    flat = K.reshape(nx1 * nx2 * ns, ny * nz)
    out = _draw_conditional(rng, flat, np.ravel_multi_index((x1, x2, s), (nx1, nx2, ns)))
    return out // nz, out % nz


def _unique(mask_idx):
    return int(mask_idx[0]) if len(mask_idx) == 1 else None


def decode_last_block(y, mb: MessageCodebook, cfg: SimConfig, refs: References):
    nk0 = cfg.sizes["NK0"]
    sym = flat_symbols([mb.u[:nk0], mb.u1[:nk0, 0], mb.u2[:nk0, 0], np.asarray(y)[None, :]],
                       refs.dims("U", "U1", "U2", "Y"))
    return _unique(np.flatnonzero(batch_typical(sym, refs.last, cfg.deltas["last"])))


def decode_v(y, book: KeyCodebook, k0: int, cfg: SimConfig, refs: References):
    words = book.codewords[book.members[k0]]
    sym = flat_symbols([words, np.asarray(y)[None, :]], refs.dims("V", "Y"))
    return _unique(np.flatnonzero(batch_typical(sym, refs.vy, cfg.deltas["v"])))


def decode_tuple(v, y, mb: MessageCodebook, cfg: SimConfig, refs: References):
    """Unique (k0, i1, i2) typical with (v, y); None on zero or several candidates."""
    d = cfg.deltas["tuple"]
    nk0 = cfg.sizes["NK0"]
    v, y = np.asarray(v)[None, :], np.asarray(y)[None, :]
    ok0 = np.flatnonzero(batch_typical(
        flat_symbols([v, mb.u[:nk0], y], refs.dims("V", "U", "Y")), refs.vuy, d))
    found = []
    work = 0
    for k0 in ok0:
        u = mb.u[k0][None, :]
        a = np.flatnonzero(batch_typical(
            flat_symbols([v, u, mb.u1[k0], y], refs.dims("V", "U", "U1", "Y")), refs.vu1, d))
        c = np.flatnonzero(batch_typical(
            flat_symbols([v, u, mb.u2[k0], y], refs.dims("V", "U", "U2", "Y")), refs.vu2, d))
        work += len(a) * len(c)
        if work > cfg.budget:
            raise ResourceError(f"tuple search exceeded {cfg.budget} candidate pairs")
        if len(a) == 0 or len(c) == 0:
            continue
        sym = flat_symbols([v[:, None, :], u[:, None, :], mb.u1[k0][a][:, None, :],
                            mb.u2[k0][c][None, :, :], y[:, None, :]],
                           refs.dims("V", "U", "U1", "U2", "Y"))
        ii, jj = np.nonzero(batch_typical(sym, refs.full, d))
        found.extend((int(k0), int(a[i]), int(c[j])) for i, j in zip(ii, jj))
        if len(found) > 1:
            return None
    return found[0] if len(found) == 1 else None


def backward_decode(ys: dict, books: Codebooks, cfg: SimConfig,
                    refs: References | None = None) -> DecodeResult:
    """Backward decoding over blocks B+1, B, ..., 1."""
    refs = refs or References(cfg)
    sz = cfg.sizes
    res = DecodeResult()
    pending = set(cfg.message_blocks)

    def fail(cause: str, block: int, upto: int):
        res.events.append((cause, block))
        for m in sorted(pending):
            if m <= upto:
                res.failed[m] = cause
                pending.discard(m)

    k0_next = decode_last_block(ys[cfg.B + 1], books.message[cfg.B + 1], cfg, refs)
    if k0_next is None:
        fail("last-block", cfg.B + 1, cfg.B)
        return res
    res.k0[cfg.B + 1] = k0_next
    ciphers: dict = {}
    for b in range(cfg.B, 0, -1):
        book = books.key[b + 1]
        t = decode_v(ys[b], book, k0_next, cfg, refs)
        if t is None:
            fail("v-decode", b, b + 1)
            return res
        v_b = book.codewords[book.members[k0_next, t]]
        if b + 1 in ciphers:
            k11, k21 = split_key(int(book.kappa[t]), sz["M11"])
            m10, c11, m20, c21 = ciphers[b + 1]
            res.decoded[b + 1] = (m10, (c11 - k11) % sz["M11"], m20, (c21 - k21) % sz["M21"])
            pending.discard(b + 1)
        if b >= 2:
            hit = decode_tuple(v_b, ys[b], books.message[b], cfg, refs)
            if hit is None:
                fail("tuple-decode", b, b)
                return res
            k0_b, i1, i2 = hit
            m10, c11, _ = unflat_index(i1, sz["M11"], sz["L1"])
            m20, c21, _ = unflat_index(i2, sz["M21"], sz["L2"])
            ciphers[b] = (m10, c11, m20, c21)
            res.k0[b] = k0_b
            k0_next = k0_b
    return res


def draw_messages(cfg: SimConfig, rng) -> dict:
    sz = cfg.sizes
    return {b: (int(rng.integers(sz["M10"])), int(rng.integers(sz["M11"])),
                int(rng.integers(sz["M20"])), int(rng.integers(sz["M21"])))
            for b in cfg.message_blocks}


def draw_states(cfg: SimConfig, rng) -> dict:
    p_s = cfg.channel.p_s
    return {b: _draw(rng, p_s, cfg.n if b <= cfg.B else cfg.sizes["nLast"])
            for b in range(1, cfg.B + 2)}


def run_transmission(cfg: SimConfig, books: Codebooks, rng, refs: References | None = None,
                     messages: dict | None = None, states: dict | None = None):
    """Encode all blocks and pass them through the channel; returns transcripts."""
    refs = refs or References(cfg)
    messages = draw_messages(cfg, rng) if messages is None else messages
    states = draw_states(cfg, rng) if states is None else states
    trs = []
    for b in range(1, cfg.B + 2):
        x1, x2, tr = encode_block(b, messages.get(b), states[b], states.get(b - 1), books, cfg,
                                  rng, refs)
        tr.y, tr.z = channel_transmit(x1, x2, states[b], cfg.channel, rng)
        trs.append(tr)
    return messages, trs


def classify_trial(cfg: SimConfig, messages: dict, trs: list, res: DecodeResult):
    """(is_error, root cause or None, per-block causes)."""
    per_block: dict = {}
    root = None
    for tr in trs:
        if tr.wz_failed:
            root = root or "wz-encode"
            if tr.block in cfg.message_blocks:
                per_block.setdefault(tr.block, "wz-encode")
    if root is None and res.events:
        root = res.events[0][0]
    for b in cfg.message_blocks:
        if b in res.failed:
            per_block.setdefault(b, res.failed[b])
            continue
        got, sent = res.decoded.get(b), messages[b]
        if got is None or tuple(got) != tuple(sent):
            cause = "tuple-decode" if got is None or got[0] != sent[0] or got[2] != sent[2] \
                else "key-mismatch"
            per_block.setdefault(b, cause)
            root = root or cause
    return bool(per_block) or root is not None, root, per_block
