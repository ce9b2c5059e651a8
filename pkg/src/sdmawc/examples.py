"""Channels and input assignments of the worked examples, plus the simulator's regression channel."""
from __future__ import annotations

import numpy as np

from .errors import InvalidArgument
from .pmf import AuxChain, ChannelModel


def _check_prob(name: str, a: float):
    if not 0.0 <= a <= 1.0:
        raise InvalidArgument(f"{name} must lie in [0, 1], got {a}")


def _bern(a: float) -> np.ndarray:
    return np.array([1.0 - a, a])


def example1_channel(p: float) -> ChannelModel:
    """Y = X1 when S = 0 and Y = X2 when S = 1; Z = X2; Pr{S=1} = p."""
    _check_prob("p", p)
    return ChannelModel.from_functions(
        _bern(p), (2, 2, 2, 2, 2), lambda x1, x2, s: {((x1 if s == 0 else x2), x2): 1.0})


def example1b_channel(p: float) -> ChannelModel:
    """Y = X1 xor X2 xor S; Z = X2; Pr{S=1} = p."""
    _check_prob("p", p)
    return ChannelModel.from_functions(
        _bern(p), (2, 2, 2, 2, 2), lambda x1, x2, s: {(x1 ^ x2 ^ s, x2): 1.0})


def example1_scheme1_assignment() -> AuxChain:
    """V = S, trivial U2, X1 = U1, X2 = U with U, U1 uniform bits."""
    half = np.full(2, 0.5)
    return AuxChain.from_maps(
        2, np.eye(2), half, np.tile(half, (2, 1)), np.ones((2, 1)),
        lambda u, u1, s: u1, lambda u, u2, s: u, 2, 2)


def example1b_scheme2_assignment() -> AuxChain:
    """Trivial V and U; X1 = U1, X2 = U2 uniform bits."""
    half = np.full(2, 0.5)
    return AuxChain.from_maps(
        2, np.ones((2, 1)), np.ones(1), half[None, :], half[None, :],
        lambda u, u1, s: u1, lambda u, u2, s: u2, 2, 2)


def example2_channel(q: float, p: float) -> ChannelModel:
    """Y = (X1.X2 xor S, X1.X2) encoded as 2*y1 + y2; Z = y2 xor N.

    The product X1.X2 is the Boolean AND. S ~ Bern(q), N ~ Bern(p).
    """
    _check_prob("q", q)
    _check_prob("p", p)

    def law(x1, x2, s):
        b = x1 & x2
        y = 2 * (b ^ s) + b
        return {(y, b): 1.0 - p, (y, b ^ 1): p} if 0 < p < 1 else {(y, b ^ int(p == 1)): 1.0}

    return ChannelModel.from_functions(_bern(q), (2, 2, 2, 4, 2), law)


def example2_beta(q: float, alpha: float) -> float:
    """Solve q * beta = alpha for beta; raises when no beta in [0, 1] exists."""
    _check_prob("q", q)
    _check_prob("alpha", alpha)
    if q == 0.5:
        if alpha != 0.5:
            raise InvalidArgument("q = 1/2 forces q * beta = 1/2")
        return 0.5
    beta = (alpha - q) / (1.0 - 2.0 * q)
    if not -1e-12 <= beta <= 1.0 + 1e-12:
        raise InvalidArgument(
            f"no beta in [0, 1] with {q} * beta = {alpha}; reachable values lie in "
            f"[{min(q, 1 - q)}, {max(q, 1 - q)}]")
    return float(np.clip(beta, 0.0, 1.0))


def example2_published_assignment(q: float, alpha: float) -> AuxChain:
    """X2 = 1, U uniform, X' ~ Bern(beta) with q * beta = alpha, X1 = U xor S xor X'.

    U1 carries X' and U2 is the constant X2.
    """
    beta = example2_beta(q, alpha)
    return AuxChain.from_maps(
        2, np.ones((2, 1)), np.full(2, 0.5), np.tile(_bern(beta), (2, 1)), np.ones((2, 1)),
        lambda u, u1, s: u ^ s ^ u1, lambda u, u2, s: 1, 2, 2)


def example2_corrected_assignment(alpha: float) -> AuxChain:
    """X2 = 1, U uniform, X' ~ Bern(alpha), X1 = U xor X' (no state in the input)."""
    _check_prob("alpha", alpha)
    return AuxChain.from_maps(
        2, np.ones((2, 1)), np.full(2, 0.5), np.tile(_bern(alpha), (2, 1)), np.ones((2, 1)),
        lambda u, u1, s: u ^ u1, lambda u, u2, s: 1, 2, 2)


def regression_channel(eve_flip: float = 0.25) -> ChannelModel:
    """Simulator regression channel built from bits; S ~ Bern(1/2).

    The receiver gets the pair (X1 AND X2, S) packed as 2 * b + s. The
    eavesdropper sees Z = X1 xor N with N ~ Bern(eve_flip).
    """
    _check_prob("eve_flip", eve_flip)

    def law(x1, x2, s):
        y = 2 * (x1 & x2) + s
        if eve_flip in (0.0, 1.0):
            return {(y, x1 ^ int(eve_flip)): 1.0}
        return {(y, x1): 1.0 - eve_flip, (y, x1 ^ 1): eve_flip}

    return ChannelModel.from_functions(np.full(2, 0.5), (2, 2, 2, 4, 2), law)


def regression_assignment(w: float = 0.4) -> AuxChain:
    """V = S xor W with W ~ Bern(w), trivial U, X1 = U1 and X2 = U2 uniform bits."""
    _check_prob("w", w)
    half = np.full(2, 0.5)
    return AuxChain.from_maps(
        2, np.array([[1 - w, w], [w, 1 - w]]), np.ones(1), half[None, :], half[None, :],
        lambda u, u1, s: u1, lambda u, u2, s: u2, 2, 2)


# slack per typicality stage for the regression instance; the decoders get
# more room than the encoder, as in the usual covering/packing arguments
REGRESSION_DELTA = {"wz": 3.0, "v": 5.0, "last": 5.0, "tuple": 5.0}


def regression_config(n: int = 12, B: int = 2, seed: int = 0, lengths=(12, 24),
                      tau: float = 0.05, margin: float = 0.25):
    """SimConfig of the regression instance with rates ``margin`` below the bounds.

    Rates are shared by every block length in ``lengths`` so that runs at
    different n are directly comparable. mu equals R0, which makes the last
    block as long as the others.
    """
    from .coding.config import SimConfig, rates_below_bounds

    ch, aux = regression_channel(), regression_assignment()
    rates = rates_below_bounds(ch, aux, tuple(lengths), tau=tau, margin=margin)
    base = SimConfig(ch, aux, n, B, rates, tau=tau, delta=dict(REGRESSION_DELTA), seed=seed)
    return base.with_(mu=base.derived_rates["R0"])
