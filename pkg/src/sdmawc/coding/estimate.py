"""Monte Carlo error rate and information leakage of the block-Markov scheme."""
from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidArgument, ResourceError
from .codebooks import Codebooks, _draw, _draw_conditional, generate_codebooks
from .config import SimConfig, SimReport
from .scheme import (References, backward_decode, classify_trial, run_transmission,
                     split_key)
from .typicality import batch_typical, flat_symbols


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def run_trial(cfg: SimConfig, trial: int, refs: References | None = None):
    """One trial with fresh codebooks; returns (is_error, root cause, per-block causes)."""
    refs = refs or References(cfg)
    rng = trial_rng(cfg.seed, trial)
    books = generate_codebooks(cfg, rng)
    messages, trs = run_transmission(cfg, books, rng, refs)
    res = backward_decode({tr.block: tr.y for tr in trs}, books, cfg, refs)
    return classify_trial(cfg, messages, trs, res)


def trial_errors(cfg: SimConfig, trials: int) -> np.ndarray:
    """Per-trial error indicators, for paired comparisons across configurations."""
    refs = References(cfg)
    return np.array([run_trial(cfg, t, refs)[0] for t in range(trials)], dtype=bool)


def estimate_error(cfg: SimConfig, trials: int, log: list | None = None) -> SimReport:
    """Average error over ``trials`` runs, each with its own random codebooks.

    When ``log`` is a list, one (trial, is_error, root cause, per-block causes)
    tuple per trial is appended to it.
    """
    if trials < 1:
        raise InvalidArgument("trials must be >= 1")
    refs = References(cfg)
    rep = SimReport(trials=trials, sizes=dict(cfg.sizes),
                    seeds={"seed": cfg.seed, "per_trial": "default_rng([seed, trial])"})
    for t in range(trials):
        err, root, per_block = run_trial(cfg, t, refs)
        if log is not None:
            log.append((t, err, root, per_block))
        rep.errors += int(err)
        if root is not None:
            rep.trial_failures[root] = rep.trial_failures.get(root, 0) + 1
        for cause in per_block.values():
            rep.block_failures[cause] = rep.block_failures.get(cause, 0) + 1
    return rep


# ---------------------------------------------------------------------------
# leakage


def _eve_kernel(cfg: SimConfig) -> np.ndarray:
    """P(z | u, u1, u2, s) with the inputs and Y summed out."""
    aux = cfg.aux
    pz = cfg.channel.kernel.sum(axis=3)  # [x1, x2, s, z]
    return np.einsum("uasx,ubsw,xwsz->uabsz", aux.p_x1, aux.p_x2, pz)


def _all_sequences(k: int, n: int) -> np.ndarray:
    return np.array(np.unravel_index(np.arange(k ** n), (k,) * n)).T.reshape(-1, n)


def _seq_probs(p: np.ndarray, seqs: np.ndarray) -> np.ndarray:
    return np.prod(p[seqs], axis=1)


def _kron_rows(vecs: np.ndarray) -> np.ndarray:
    """Row-wise Kronecker product over the time axis: (K, n, Z) -> (K, Z**n)."""
    out = np.ones((vecs.shape[0], 1))
    for i in range(vecs.shape[1]):
        out = (out[:, :, None] * vecs[:, i, None, :]).reshape(vecs.shape[0], -1)
    return out


def _first_typical(s: np.ndarray, book, refs: References, delta: float) -> np.ndarray:
    """Codeword index chosen by the encoder for each row of ``s`` (fallback (0, 0))."""
    order = book.members.ravel()  # codewords in (k0, t) order
    sym = flat_symbols([s[:, None, :], book.codewords[order][None, :, :]], refs.dims("S", "V"))
    ok = batch_typical(sym, refs.sv, delta)
    first = np.argmax(ok, axis=1)
    first[~ok.any(axis=1)] = 0
    return order[first]


def _message_tuples(cfg: SimConfig) -> np.ndarray:
    sz = cfg.sizes
    return _all_sequences_mixed((sz["M10"], sz["M11"], sz["M20"], sz["M21"]))


def _all_sequences_mixed(dims) -> np.ndarray:
    return np.array(np.unravel_index(np.arange(int(np.prod(dims))), dims)).T


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def exact_leakage(cfg: SimConfig, books: Codebooks, refs: References | None = None) -> float:
    """I(M1, M2; Z over all blocks) by enumeration, for fixed codebooks."""
    refs = refs or References(cfg)
    sz = cfg.sizes
    nS, nZ = cfg.channel.sizes["S"], cfg.channel.sizes["Z"]
    n_msg = sz["M10"] * sz["M11"] * sz["M20"] * sz["M21"]
    total_m = n_msg ** len(cfg.message_blocks)
    carries = sz["NKused"]
    cells = total_m * carries * nZ ** cfg.total_length
    work = max(carries, 1) * n_msg * nS ** cfg.n * sz["L1"] * sz["L2"] * nZ ** cfg.n
    if cells > cfg.budget or work > cfg.budget:
        raise ResourceError(f"exact leakage needs {max(cells, work)} cells, budget is {cfg.budget}")
    zeff = _eve_kernel(cfg)
    msgs = _message_tuples(cfg)
    # P[m_prefix, carry, z_prefix]
    P = np.ones((1, 1, 1))
    for b in range(1, cfg.B + 2):
        length = cfg.n if b <= cfg.B else sz["nLast"]
        seqs = _all_sequences(nS, length)
        ps = _seq_probs(cfg.channel.p_s, seqs)
        mb = books.message[b]
        if b <= cfg.B:
            c_out = _first_typical(seqs, books.key[b + 1], refs, cfg.deltas["wz"])
            n_out = carries
        else:
            c_out = np.zeros(len(seqs), dtype=np.int64)
            n_out = 1
        block_msgs = msgs if b in cfg.message_blocks else np.zeros((1, 4), dtype=np.int64)
        n_in = 1 if b == 1 else carries
        A = np.zeros((n_in, len(block_msgs), n_out, nZ ** length))
        if b == 1:
            locs = [(0, 0, (0, 0))]
        else:
            k0s, pos = books.key[b].locate()
            locs = [(int(k0s[c]), int(pos[c]),
                     split_key(int(books.key[b].kappa[pos[c]]), sz["M11"])) for c in range(carries)]
        if b in (1,) or 2 <= b <= cfg.B:
            ls = _all_sequences_mixed((sz["L1"], sz["L2"]))
        else:
            ls = np.zeros((1, 2), dtype=np.int64)
        for ci, (k0, _, (k11, k21)) in enumerate(locs):
            for mi, (m10, m11, m20, m21) in enumerate(block_msgs):
                c11 = (m11 + k11) % sz["M11"] if b in cfg.message_blocks else 0
                c21 = (m21 + k21) % sz["M21"] if b in cfg.message_blocks else 0
                i1 = ((m10 * sz["M11"] + c11) * sz["L1"]) + ls[:, 0]
                i2 = ((m20 * sz["M21"] + c21) * sz["L2"]) + ls[:, 1]
                u = mb.u[k0]
                u1, u2 = mb.u1[k0, i1], mb.u2[k0, i2]          # (L, len)
                # per (l, s) sequence, per position kernel rows
                vec = zeff[u[None, None, :], u1[:, None, :], u2[:, None, :], seqs[None, :, :]]
                q = _kron_rows(vec.reshape(-1, length, nZ)).reshape(len(ls), len(seqs), -1).mean(axis=0)
                w = ps[:, None] * q
                np.add.at(A[ci, mi], c_out, w)
        P = np.einsum("pcz,cmdw->pmdzw", P, A)
        P = P.reshape(P.shape[0] * P.shape[1], P.shape[2], -1)
    pz_m = P.sum(axis=1)  # [messages, z]
    pz = pz_m.mean(axis=0)
    h_cond = np.mean([_entropy_bits(r) for r in pz_m])
    return max(_entropy_bits(pz) - h_cond, 0.0)


def simulate_eve(cfg: SimConfig, books: Codebooks, trials: int, rng,
                 refs: References | None = None, chunk: int = 20000) -> tuple[np.ndarray, np.ndarray]:
    """(message index, eavesdropper sequence rows) for ``trials`` vectorized runs."""
    refs = refs or References(cfg)
    sz = cfg.sizes
    aux = cfg.aux
    m_idx, z_rows = [], []
    dims = (sz["M10"], sz["M11"], sz["M20"], sz["M21"])
    for start in range(0, trials, chunk):
        T = min(chunk, trials - start)
        states = {b: _draw(rng, cfg.channel.p_s, (T, cfg.n if b <= cfg.B else sz["nLast"]))
                  for b in range(1, cfg.B + 2)}
        mcode = np.zeros(T, dtype=np.int64)
        zs = []
        for b in range(1, cfg.B + 2):
            mb = books.message[b]
            if b == 1:
                k0 = np.zeros(T, dtype=np.int64)
                k11 = k21 = np.zeros(T, dtype=np.int64)
            else:
                c = _first_typical(states[b - 1], books.key[b], refs, cfg.deltas["wz"])
                k0s, pos = books.key[b].locate()
                k0 = k0s[c]
                k11, k21 = split_key(books.key[b].kappa[pos[c]], sz["M11"])
            if b in cfg.message_blocks:
                m = [rng.integers(d, size=T) for d in dims]
                mcode = mcode * int(np.prod(dims)) + np.ravel_multi_index(m, dims)
                c11, c21 = (m[1] + k11) % sz["M11"], (m[3] + k21) % sz["M21"]
                m10, m20 = m[0], m[2]
            else:
                m10 = m20 = c11 = c21 = np.zeros(T, dtype=np.int64)
            if b <= cfg.B:
                l1, l2 = rng.integers(sz["L1"], size=T), rng.integers(sz["L2"], size=T)
            else:
                l1 = l2 = np.zeros(T, dtype=np.int64)
            i1 = (m10 * sz["M11"] + c11) * sz["L1"] + l1
            i2 = (m20 * sz["M21"] + c21) * sz["L2"] + l2
            u, u1, u2 = mb.u[k0], mb.u1[k0, i1], mb.u2[k0, i2]
            s = states[b]
            x1 = _draw_conditional(rng, aux.p_x1.reshape(-1, aux.p_x1.shape[-1]),
                                   np.ravel_multi_index((u, u1, s), aux.p_x1.shape[:3]))
            x2 = _draw_conditional(rng, aux.p_x2.reshape(-1, aux.p_x2.shape[-1]),
                                   np.ravel_multi_index((u, u2, s), aux.p_x2.shape[:3]))
            K = cfg.channel.kernel
            pz = K.sum(axis=3).reshape(-1, K.shape[4])
            zs.append(_draw_conditional(rng, pz, np.ravel_multi_index((x1, x2, s), K.shape[:3])))
        m_idx.append(mcode)
        z_rows.append(np.concatenate(zs, axis=1))
    return np.concatenate(m_idx), np.concatenate(z_rows)


def miller_madow_entropy(labels: np.ndarray) -> float:
    """Plug-in entropy in bits plus the (K - 1) / (2 N ln 2) bias correction."""
    _, counts = np.unique(labels, axis=0, return_counts=True)
    n = counts.sum()
    p = counts / n
    return _entropy_bits(p) + (len(counts) - 1) / (2.0 * n * math.log(2))


def plugin_mutual_information(x: np.ndarray, z_rows: np.ndarray) -> float:
    x = np.asarray(x).reshape(-1, 1)
    z_rows = np.asarray(z_rows).reshape(len(x), -1)
    _, z = np.unique(z_rows, axis=0, return_inverse=True)
    z = z.reshape(-1, 1)
    hx, hz = miller_madow_entropy(x), miller_madow_entropy(z)
    hxz = miller_madow_entropy(np.hstack([x, z]))
    return hx + hz - hxz


def estimate_leakage(cfg: SimConfig, mode: str = "exact", trials: int = 100000,
                     books: Codebooks | None = None) -> dict:
    """Leakage report for the codebooks generated from ``cfg.seed``."""
    if mode not in ("exact", "plug-in"):
        raise InvalidArgument(f"unknown leakage mode {mode!r}")
    refs = References(cfg)
    books = books or generate_codebooks(cfg, np.random.default_rng(cfg.seed))
    if mode == "exact":
        bits = exact_leakage(cfg, books, refs)
        n_trials = None
    else:
        if trials < 1:
            raise InvalidArgument("trials must be >= 1")
        m, z = simulate_eve(cfg, books, trials, np.random.default_rng([cfg.seed, 1 << 30]), refs)
        bits = plugin_mutual_information(m, z)
        n_trials = trials
    bits = float(bits)
    out = {"mode": mode, "bits": bits, "per_symbol": bits / cfg.total_length,
           "channel_uses": cfg.total_length, "message_blocks": len(cfg.message_blocks)}
    if n_trials is not None:
        out["trials"] = n_trials
        out["caveat"] = "plug-in estimate with Miller-Madow bias correction"
    return out


def otp_leakage(n_messages: int, key_pmf) -> float:
    """I(M; (M + K) mod n) for a uniform message and an independent key law."""
    key_pmf = np.asarray(key_pmf, dtype=float)
    if key_pmf.shape != (n_messages,) or abs(key_pmf.sum() - 1) > 1e-12:
        raise InvalidArgument("key law must be a distribution over the message set")
    pc_m = np.array([np.roll(key_pmf, m) for m in range(n_messages)])  # [m, c]
    pc = pc_m.mean(axis=0)
    return float(max(_entropy_bits(pc) - np.mean([_entropy_bits(r) for r in pc_m]), 0.0))
