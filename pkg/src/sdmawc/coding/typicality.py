"""Strong typicality with relative slack, vectorized over candidate sequences."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument
from ..pmf import JointPmf, marginalize

# absolute float slack on the frequency test
FREQ_EPS = 1e-12


def flat_symbols(seqs, sizes) -> np.ndarray:
    """Row-major joint symbol index of aligned sequences.

    Each element of ``seqs`` may carry leading batch axes; all are broadcast
    together and the last axis is time.
    """
    seqs = [np.asarray(s) for s in seqs]
    if len(seqs) != len(sizes):
        raise InvalidArgument("one alphabet size is needed per sequence")
    lengths = {s.shape[-1] for s in seqs}
    if len(lengths) != 1:
        raise InvalidArgument(f"sequences have different lengths {sorted(lengths)}")
    idx = np.zeros(np.broadcast_shapes(*(s.shape for s in seqs)), dtype=np.int64)
    for s, k in zip(seqs, sizes):
        if s.size and (s.min() < 0 or s.max() >= k):
            raise InvalidArgument(f"symbol outside alphabet of size {k}")
        idx = idx * k + s
    return idx


def batch_typical(symbols: np.ndarray, p_flat: np.ndarray, delta: float) -> np.ndarray:
    """Typicality of each row of ``symbols`` (joint indices) against ``p_flat``.

    A row is typical iff |freq(a) - P(a)| <= delta * P(a) for every symbol a,
    which forces freq(a) = 0 wherever P(a) = 0.
    """
    symbols = np.asarray(symbols)
    batch = symbols.shape[:-1]
    n = symbols.shape[-1]
    A = p_flat.size
    if n == 0:
        return np.ones(batch, dtype=bool)
    rows = symbols.reshape(-1, n)
    offs = (np.arange(rows.shape[0], dtype=np.int64) * A)[:, None]
    counts = np.bincount((rows + offs).ravel(), minlength=rows.shape[0] * A).reshape(-1, A)
    freq = counts / n
    ok = np.all(np.abs(freq - p_flat) <= delta * p_flat + FREQ_EPS, axis=1)
    return ok.reshape(batch)


def reference_pmf(joint: JointPmf, variables) -> np.ndarray:
    """Flattened marginal of ``joint`` on ``variables`` in the given order."""
    return marginalize(joint, tuple(variables)).p.ravel()


def typical_set_test(seqs, reference: JointPmf, delta: float) -> bool:
    """Whether aligned sequences (one per variable of ``reference``) are jointly typical."""
    if delta <= 0:
        raise InvalidArgument("delta must be positive")
    seqs = [np.asarray(s) for s in seqs]
    if len(seqs) != len(reference.variables):
        raise InvalidArgument(
            f"{len(seqs)} sequences given for {len(reference.variables)} variables")
    if len({len(s) for s in seqs}) != 1:
        raise InvalidArgument("sequences must have equal lengths")
    sym = flat_symbols(seqs, reference.p.shape)
    return bool(batch_typical(sym[None, :], reference.p.ravel(), delta)[0])
