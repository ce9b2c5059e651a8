"""Simulation configuration, derived code sizes and the simulation report."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..errors import InvalidArgument
from ..pmf import AuxChain, ChannelModel, JointPmf, assemble_joint, mutual_information

RATE_KEYS = ("Rt1", "Rt2", "R10", "R11", "R20", "R21")
# typicality tests that can carry their own slack
STAGES = ("wz", "last", "v", "tuple")


def code_size(n: int, rate: float) -> int:
    """max(1, ceil(2^(n * rate))), guarded against float dust just above an integer."""
    if rate <= 0:
        return 1
    return max(1, math.ceil(2.0 ** (n * rate) - 1e-9))


def canonical_json(obj) -> str:
    """Sorted keys, no whitespace variation, 12 significant digits for floats."""
    return json.dumps(_round(obj), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, np.generic):
        return _round(obj.item())
    return obj


def config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def _delta(value):
    if isinstance(value, dict):
        return {str(k): float(v) for k, v in value.items()}
    return float(value)


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Block-Markov simulation settings.

    ``rates`` holds the codebook rates Rt1, Rt2 (the tilde rates), R10, R11, R20
    and R21 in bits per channel use. R_K, R_K0 and R0 follow from ``aux`` and
    ``tau``; ``mu`` defaults to I(U1,U2;Y). ``delta`` is one typicality slack or a
    map from stage name (see ``STAGES``) to slack.
    """

    channel: ChannelModel
    aux: AuxChain
    n: int
    B: int
    rates: dict
    tau: float = 0.05
    delta: float | dict = 1.0
    mu: float | None = None
    seed: int = 0
    budget: int = 5_000_000
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if int(self.n) < 1 or int(self.B) < 1:
            raise InvalidArgument("n and B must be >= 1")
        if self.tau <= 0:
            raise InvalidArgument("tau must be positive")
        if isinstance(self.delta, dict):
            if set(self.delta) != set(STAGES):
                raise InvalidArgument(f"delta map needs exactly the stages {list(STAGES)}")
        if min(self.deltas.values()) <= 0:
            raise InvalidArgument("delta must be positive")
        missing = [k for k in RATE_KEYS if k not in self.rates]
        if missing:
            raise InvalidArgument(f"rates are missing {missing}")
        unknown = set(self.rates) - set(RATE_KEYS)
        if unknown:
            raise InvalidArgument(f"unknown rate names {sorted(unknown)}")
        if any(float(v) < 0 for v in self.rates.values()):
            raise InvalidArgument("rates must be nonnegative")
        if self.R1p < -1e-12 or self.R2p < -1e-12:
            raise InvalidArgument("local-randomness rates R1' and R2' must be nonnegative")
        if self.mu is not None and self.mu <= 0:
            raise InvalidArgument("mu must be positive")
        if self.mu_value <= 0:
            raise InvalidArgument("I(U1,U2;Y) is zero; the last block cannot carry the state index")
        s = self.sizes
        if s["MK1"] > s["T"]:
            raise InvalidArgument(
                f"key range {s['MK1']} exceeds the sub-codebook size {s['T']}; lower R11 + R21")

    @property
    def deltas(self) -> dict:
        if isinstance(self.delta, dict):
            return {k: float(self.delta[k]) for k in STAGES}
        return {k: float(self.delta) for k in STAGES}

    @property
    def R1p(self) -> float:
        return self.rates["Rt1"] - self.rates["R10"] - self.rates["R11"]

    @property
    def R2p(self) -> float:
        return self.rates["Rt2"] - self.rates["R20"] - self.rates["R21"]

    @cached_property
    def joint(self) -> JointPmf:
        return assemble_joint(self.channel, self.aux)

    @cached_property
    def info(self) -> dict:
        j = self.joint
        return {"I(V;S)": mutual_information(j, "V", "S"),
                "I(V;Y)": mutual_information(j, "V", "Y"),
                "I(U1,U2;Y)": mutual_information(j, ("U1", "U2"), "Y")}

    @property
    def mu_value(self) -> float:
        return self.mu if self.mu is not None else self.info["I(U1,U2;Y)"]

    @property
    def derived_rates(self) -> dict:
        ivs, ivy = self.info["I(V;S)"], self.info["I(V;Y)"]
        out = {"RK": ivs + self.tau, "RK0": ivs - ivy + 2 * self.tau,
               "R0": ivs - ivy + 3 * self.tau, "RK1": self.rates["R11"] + self.rates["R21"],
               "R1p": self.R1p, "R2p": self.R2p}
        # float noise from the rate split should not show up as tiny negatives
        return {k: 0.0 if abs(v) < 1e-9 else v for k, v in out.items()}

    @cached_property
    def sizes(self) -> dict:
        n, r, d = self.n, self.rates, self.derived_rates
        nk, nk0 = code_size(n, d["RK"]), code_size(n, d["RK0"])
        t = max(1, nk // nk0)
        m0 = max(code_size(n, d["R0"]), nk0)
        out = {"NK": nk, "NK0": nk0, "T": t, "NKused": nk0 * t, "M0": m0,
               "M10": code_size(n, r["R10"]), "M11": code_size(n, r["R11"]),
               "L1": code_size(n, max(self.R1p, 0.0)),
               "M20": code_size(n, r["R20"]), "M21": code_size(n, r["R21"]),
               "L2": code_size(n, max(self.R2p, 0.0)),
               "nLast": max(1, math.ceil(n * max(d["R0"], 0.0) / self.mu_value - 1e-9))}
        out["MK1"] = out["M11"] * out["M21"]
        out["C1"] = out["M10"] * out["M11"] * out["L1"]
        out["C2"] = out["M20"] * out["M21"] * out["L2"]
        return out

    @property
    def total_length(self) -> int:
        return self.n * self.B + self.sizes["nLast"]

    @property
    def message_blocks(self) -> list[int]:
        """Blocks that carry messages (2..B, counting from 1)."""
        return list(range(2, self.B + 1))

    def to_dict(self) -> dict:
        d = {"channel": self.channel.to_dict(), "aux": self.aux.to_dict(), "n": self.n,
             "B": self.B, "rates": dict(self.rates), "tau": self.tau,
             "delta": dict(self.delta) if isinstance(self.delta, dict) else self.delta,
             "seed": self.seed, "budget": self.budget}
        if self.mu is not None:
            d["mu"] = self.mu
        if self.extra:
            d["extra"] = dict(self.extra)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        try:
            return cls(ChannelModel.from_dict(d["channel"]), AuxChain.from_dict(d["aux"]),
                       int(d["n"]), int(d["B"]), {k: float(v) for k, v in d["rates"].items()},
                       float(d.get("tau", 0.05)), _delta(d.get("delta", 1.0)),
                       None if d.get("mu") is None else float(d["mu"]), int(d.get("seed", 0)),
                       int(d.get("budget", 5_000_000)), dict(d.get("extra", {})))
        except KeyError as exc:
            raise InvalidArgument(f"simulation config is missing field {exc}") from None

    def with_(self, **changes) -> "SimConfig":
        d = {"channel": self.channel, "aux": self.aux, "n": self.n, "B": self.B,
             "rates": self.rates, "tau": self.tau, "delta": self.delta, "mu": self.mu,
             "seed": self.seed, "budget": self.budget, "extra": self.extra}
        d.update(changes)
        return SimConfig(**d)


@dataclass
class SimReport:
    """Outcome of ``trials`` independent runs (or a leakage evaluation)."""

    trials: int
    errors: int = 0
    trial_failures: dict = field(default_factory=dict)
    block_failures: dict = field(default_factory=dict)
    leakage: dict | None = None
    sizes: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)

    @property
    def p_error(self) -> float:
        return self.errors / self.trials if self.trials else 0.0

    def to_dict(self) -> dict:
        d = {"trials": self.trials, "errors": self.errors, "p_error": self.p_error,
             "trial_failures": dict(sorted(self.trial_failures.items())),
             "block_failures": dict(sorted(self.block_failures.items())),
             "sizes": dict(sorted(self.sizes.items())), "seeds": self.seeds}
        if self.leakage is not None:
            d["leakage"] = self.leakage
        return d


def rates_below_bounds(channel: ChannelModel, aux: AuxChain, n, tau: float = 0.05,
                       margin: float = 0.25) -> dict:
    """Codebook rates a fraction ``margin`` below the single-letter decoding bounds.

    Each codebook rate is cut to (1 - margin) of its receiver bound. The local
    randomness covers the eavesdropper term where possible, the key part is capped
    so that the key range fits one sub-codebook at every block length in ``n`` (an
    int or a sequence), and the rest goes to R10 / R20.
    """
    from ..regions import mi_bundle

    if not 0.0 < margin < 1.0:
        raise InvalidArgument("margin must lie in (0, 1)")
    m = mi_bundle(assemble_joint(channel, aux))
    keep = 1.0 - margin
    rt1, rt2 = keep * m["I(U1;Y|V,U,U2)"], keep * m["I(U2;Y|V,U,U1)"]
    cap = keep * m.r_sum
    if rt1 + rt2 > cap > 0:
        rt1, rt2 = rt1 * cap / (rt1 + rt2), rt2 * cap / (rt1 + rt2)
    lp1 = min(rt1, m["I(U1;Z|S,U)"])
    lp2 = min(rt2, m["I(U2;Z|S,U)"])
    key = max(keep * (m["I(V;Y)"] - m["I(V;U,Z)"]), 0.0)
    k1 = min(key / 2, rt1 - lp1)
    k2 = min(key - k1, rt2 - lp2)
    rates = {"Rt1": rt1, "Rt2": rt2, "R11": k1, "R21": k2,
             "R10": rt1 - lp1 - k1, "R20": rt2 - lp2 - k2}
    # shrink the key part until the key range fits into one sub-codebook
    for _ in range(64):
        try:
            for length in np.atleast_1d(n):
                SimConfig(channel, aux, int(length), 1, rates, tau)
            break
        except InvalidArgument as exc:
            if "key range" not in str(exc):
                raise
        for a, b in (("R11", "R10"), ("R21", "R20")):
            cut = rates[a] / 2 if rates[a] > 1e-6 else rates[a]
            rates[a] -= cut
            rates[b] += cut
    return {k: float(v) for k, v in rates.items()}
