"""Information-term bundles and the inequality systems of every rate region.

Region ids
----------
Scheme 1 (key from a lossy state description): ``R11``, ``R12``, ``R13``.
Scheme 2 (key from the state directly): ``R21``, ``R22``, ``R23``.
Wiretap coding only: ``R3`` (from ``R11``), with ``R3b``/``R3c`` obtained the
same way from ``R12``/``R13``.
Degraded message sets, in the (R1, R0) plane: ``D11``, ``D12``, ``D21``,
``D22``, ``D3``.
``NS`` drops every eavesdropper term from scheme 1 (no secrecy).
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import InvalidArgument
from .geometry import (LinearConstraintSystem, RatePolygon, SystemBuilder,
                       halfplanes_to_polygon, project_polytope)
from .pmf import JOINT_VARS, JointPmf, entropy, mutual_information

# (name, kind, first, second, given); kind "I" is I(first; second | given),
# kind "H" is H(first | given) and ignores ``second``.
TERMS: tuple = (
    ("I(U1;Y|V,U,U2)", "I", ("U1",), ("Y",), ("V", "U", "U2")),
    ("I(U2;Y|V,U,U1)", "I", ("U2",), ("Y",), ("V", "U", "U1")),
    ("I(U1,U2;Y|V,U)", "I", ("U1", "U2"), ("Y",), ("V", "U")),
    ("I(V,U,U1,U2;Y)", "I", ("V", "U", "U1", "U2"), ("Y",), ()),
    ("I(V;S)", "I", ("V",), ("S",), ()),
    ("I(V;Y)", "I", ("V",), ("Y",), ()),
    ("I(V;Z)", "I", ("V",), ("Z",), ()),
    ("I(V;U,Z)", "I", ("V",), ("U", "Z"), ()),
    ("I(V;Z,U,U1)", "I", ("V",), ("Z", "U", "U1"), ()),
    ("I(V;Z,U,U2)", "I", ("V",), ("Z", "U", "U2"), ()),
    ("I(U1;Z|S,U)", "I", ("U1",), ("Z",), ("S", "U")),
    ("I(U2;Z|S,U)", "I", ("U2",), ("Z",), ("S", "U")),
    ("I(U1,U2;Z|S,U)", "I", ("U1", "U2"), ("Z",), ("S", "U")),
    ("I(U2;Z|S,U,U1)", "I", ("U2",), ("Z",), ("S", "U", "U1")),
    ("I(U1;Z|S,U,U2)", "I", ("U1",), ("Z",), ("S", "U", "U2")),
    # eavesdropper terms with S removed (wiretap-only regions)
    ("I(U1;Z|U)", "I", ("U1",), ("Z",), ("U",)),
    ("I(U2;Z|U)", "I", ("U2",), ("Z",), ("U",)),
    ("I(U1,U2;Z|U)", "I", ("U1", "U2"), ("Z",), ("U",)),
    ("I(U2;Z|U,U1)", "I", ("U2",), ("Z",), ("U", "U1")),
    ("I(U1;Z|U,U2)", "I", ("U1",), ("Z",), ("U", "U2")),
    # scheme 2
    ("I(U1;Y|U2)", "I", ("U1",), ("Y",), ("U2",)),
    ("I(U2;Y|U1)", "I", ("U2",), ("Y",), ("U1",)),
    ("I(U1,U2;Y)", "I", ("U1", "U2"), ("Y",), ()),
    ("I(U1;Z|S)", "I", ("U1",), ("Z",), ("S",)),
    ("I(U2;Z|S)", "I", ("U2",), ("Z",), ("S",)),
    ("I(U1,U2;Z|S)", "I", ("U1", "U2"), ("Z",), ("S",)),
    ("I(U2;Z|S,U1)", "I", ("U2",), ("Z",), ("S", "U1")),
    ("I(U1;Z|S,U2)", "I", ("U1",), ("Z",), ("S", "U2")),
    ("H(S|Z)", "H", ("S",), (), ("Z",)),
    ("H(S|Z,U1)", "H", ("S",), (), ("Z", "U1")),
    ("H(S|Z,U2)", "H", ("S",), (), ("Z", "U2")),
    ("H(S|Y,U1,U2)", "H", ("S",), (), ("Y", "U1", "U2")),
    # degraded message sets, coding scheme 2
    ("I(U1;Y|U,U2)", "I", ("U1",), ("Y",), ("U", "U2")),
    ("I(U,U1,U2;Y)", "I", ("U", "U1", "U2"), ("Y",), ()),
    ("H(S|U,U1,U2,Y)", "H", ("S",), (), ("U", "U1", "U2", "Y")),
    ("H(S|Z,U,U2)", "H", ("S",), (), ("Z", "U", "U2")),
)

TERM_NAMES = tuple(t[0] for t in TERMS)

SCHEME1 = ("R11", "R12", "R13")
SCHEME2 = ("R21", "R22", "R23")
WIRETAP = ("R3", "R3b", "R3c")
DEGRADED = ("D11", "D12", "D21", "D22", "D3")
REGION_IDS = SCHEME1 + SCHEME2 + WIRETAP + DEGRADED + ("NS",)

# Named unions accepted wherever a region id is.
FAMILIES = {
    "R1": SCHEME1,
    "R2": SCHEME2,
    "R3": WIRETAP,
    "RCSI": SCHEME1 + SCHEME2 + WIRETAP,
    "D": DEGRADED,
}


@dataclass(frozen=True, eq=False)
class MiBundle:
    """Every information term the regions need, keyed by its printed form."""

    values: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))

    def __getitem__(self, key: str) -> float:
        try:
            return self.values[key]
        except KeyError:
            raise InvalidArgument(f"bundle has no term {key!r}") from None

    @property
    def r_sum(self) -> float:
        return min(self["I(U1,U2;Y|V,U)"], self["I(V,U,U1,U2;Y)"] - self["I(V;S)"])

    @property
    def r_sk(self) -> float:
        return self["I(V;Y)"] - self["I(V;Z,U,U2)"]

    def to_dict(self) -> dict:
        return dict(self.values)


def mi_bundle(joint: JointPmf) -> MiBundle:
    missing = [v for v in JOINT_VARS if v not in joint.variables]
    if missing:
        raise InvalidArgument(f"joint is missing variables {missing}")
    vals = {}
    for name, kind, a, b, c in TERMS:
        vals[name] = mutual_information(joint, a, b, c) if kind == "I" else entropy(joint, a, c)
    return MiBundle(vals)


def _scheme1_common(sb: SystemBuilder, m: MiBundle):
    sb.add({"R1": 1}, m["I(U1;Y|V,U,U2)"], label="R1 <= I(U1;Y|V,U,U2)")
    sb.add({"R2": 1}, m["I(U2;Y|V,U,U1)"], label="R2 <= I(U2;Y|V,U,U1)")
    sb.add({"R1": 1, "R2": 1}, m["I(U1,U2;Y|V,U)"], label="R1+R2 <= I(U1,U2;Y|V,U)")
    sb.add({"R1": 1, "R2": 1}, m["I(V,U,U1,U2;Y)"] - m["I(V;S)"],
           label="R1+R2 <= I(V,U,U1,U2;Y)-I(V;S)")


def _rsum_rows(sb: SystemBuilder, m: MiBundle, coeffs: dict, minus: float, tag: str):
    """Both halves of ``sum(coeffs) <= R_SUM - minus``."""
    sb.add(coeffs, m["I(U1,U2;Y|V,U)"] - minus, label=f"{tag} (R_SUM first)")
    sb.add(coeffs, m["I(V,U,U1,U2;Y)"] - m["I(V;S)"] - minus, label=f"{tag} (R_SUM second)")


def _r11(m: MiBundle, secrecy_terms: dict | None = None) -> LinearConstraintSystem:
    sb = SystemBuilder(("R1", "R2", "R11", "R21"))
    _scheme1_common(sb, m)
    A1, A2 = m["I(U1;Y|V,U,U2)"], m["I(U2;Y|V,U,U1)"]
    sb.add({"R1": 1, "R11": -1}, A1 - m["I(U1;Z|S,U)"], label="R1 <= I(U1;Y|V,U,U2)-I(U1;Z|S,U)+R11")
    sb.add({"R2": 1, "R21": -1}, A2 - m["I(U2;Z|S,U)"], label="R2 <= I(U2;Y|V,U,U1)-I(U2;Z|S,U)+R21")
    _rsum_rows(sb, m, {"R1": 1, "R2": 1, "R11": -1, "R21": -1}, m["I(U1,U2;Z|S,U)"],
               "R1+R2 <= R_SUM-I(U1,U2;Z|S,U)+R11+R21")
    sb.add({"R11": 1, "R21": 1}, m["I(V;Y)"] - m["I(V;U,Z)"], label="R11+R21 <= I(V;Y)-I(V;U,Z)")
    sb.nonnegative()
    return sb.build()


def _r12(m: MiBundle) -> LinearConstraintSystem:
    sb = SystemBuilder(("R1", "R2", "R11", "R21"))
    _scheme1_common(sb, m)
    A2, E = m["I(U2;Y|V,U,U1)"], m["I(U2;Z|S,U,U1)"]
    sb.add({"R1": 1, "R11": -1}, 0.0, label="R1 <= R11")
    sb.add({"R2": 1, "R21": -1}, A2 - E, label="R2 <= I(U2;Y|V,U,U1)-I(U2;Z|S,U,U1)+R21")
    _rsum_rows(sb, m, {"R1": 1, "R2": 1, "R21": -1}, E, "R1+R2 <= R_SUM-I(U2;Z|S,U,U1)+R21")
    sb.add({"R1": 1, "R2": 1, "R11": -1, "R21": -1}, A2 - E,
           label="R1+R2 <= I(U2;Y|V,U,U1)-I(U2;Z|S,U,U1)+R11+R21")
    sb.add({"R11": 1, "R21": 1}, m["I(V;Y)"] - m["I(V;Z,U,U1)"], label="R11+R21 <= I(V;Y)-I(V;Z,U,U1)")
    sb.nonnegative()
    return sb.build()


def _r13(m: MiBundle) -> LinearConstraintSystem:
    sb = SystemBuilder(("R1", "R2", "R11", "R21"))
    _scheme1_common(sb, m)
    A1, E = m["I(U1;Y|V,U,U2)"], m["I(U1;Z|S,U,U2)"]
    sb.add({"R1": 1, "R11": -1}, A1 - E, label="R1 <= I(U1;Y|V,U,U2)-I(U1;Z|S,U,U2)+R11")
    sb.add({"R2": 1, "R21": -1}, 0.0, label="R2 <= R21")
    _rsum_rows(sb, m, {"R1": 1, "R2": 1, "R11": -1}, E, "R1+R2 <= R_SUM-I(U1;Z|S,U,U2)+R11")
    sb.add({"R1": 1, "R2": 1, "R11": -1, "R21": -1}, A1 - E,
           label="R1+R2 <= I(U1;Y|V,U,U2)-I(U1;Z|S,U,U2)+R11+R21")
    sb.add({"R11": 1, "R21": 1}, m["I(V;Y)"] - m["I(V;Z,U,U2)"], label="R11+R21 <= I(V;Y)-I(V;Z,U,U2)")
    sb.nonnegative()
    return sb.build()


def _wiretap(m: MiBundle, variant: str) -> LinearConstraintSystem:
    # key rates pinned to zero, eavesdropper terms without S, key row removed
    sb = SystemBuilder(("R1", "R2"))
    _scheme1_common(sb, m)
    A1, A2 = m["I(U1;Y|V,U,U2)"], m["I(U2;Y|V,U,U1)"]
    if variant == "R3":
        sb.add({"R1": 1}, A1 - m["I(U1;Z|U)"], label="R1 <= I(U1;Y|V,U,U2)-I(U1;Z|U)")
        sb.add({"R2": 1}, A2 - m["I(U2;Z|U)"], label="R2 <= I(U2;Y|V,U,U1)-I(U2;Z|U)")
        _rsum_rows(sb, m, {"R1": 1, "R2": 1}, m["I(U1,U2;Z|U)"], "R1+R2 <= R_SUM-I(U1,U2;Z|U)")
    elif variant == "R3b":
        E = m["I(U2;Z|U,U1)"]
        sb.add({"R1": 1}, 0.0, label="R1 <= R11 = 0")
        sb.add({"R2": 1}, A2 - E, label="R2 <= I(U2;Y|V,U,U1)-I(U2;Z|U,U1)")
        _rsum_rows(sb, m, {"R1": 1, "R2": 1}, E, "R1+R2 <= R_SUM-I(U2;Z|U,U1)")
        sb.add({"R1": 1, "R2": 1}, A2 - E, label="R1+R2 <= I(U2;Y|V,U,U1)-I(U2;Z|U,U1)")
    else:
        E = m["I(U1;Z|U,U2)"]
        sb.add({"R1": 1}, A1 - E, label="R1 <= I(U1;Y|V,U,U2)-I(U1;Z|U,U2)")
        sb.add({"R2": 1}, 0.0, label="R2 <= R21 = 0")
        _rsum_rows(sb, m, {"R1": 1, "R2": 1}, E, "R1+R2 <= R_SUM-I(U1;Z|U,U2)")
        sb.add({"R1": 1, "R2": 1}, A1 - E, label="R1+R2 <= I(U1;Y|V,U,U2)-I(U1;Z|U,U2)")
    sb.nonnegative()
    return sb.build()


def _scheme2(m: MiBundle, which: str) -> LinearConstraintSystem:
    sb = SystemBuilder(("R1", "R2", "R11", "R12", "R21", "R22"))
    I1, I2, I12 = m["I(U1;Y|U2)"], m["I(U2;Y|U1)"], m["I(U1,U2;Y)"]
    Hres = m["H(S|Y,U1,U2)"]
    sb.add({"R1": 1, "R12": 1}, I1, label="R1 <= I(U1;Y|U2)-R12")
    sb.add({"R2": 1, "R22": 1}, I2, label="R2 <= I(U2;Y|U1)-R22")
    if which == "R21":
        sb.add({"R1": 1, "R11": -1}, I1 - m["I(U1;Z|S)"], label="R1 <= I(U1;Y|U2)-I(U1;Z|S)+R11")
        sb.add({"R2": 1, "R21": -1}, I2 - m["I(U2;Z|S)"], label="R2 <= I(U2;Y|U1)-I(U2;Z|S)+R21")
        sb.add({"R1": 1, "R2": 1}, I12 - m["I(U1,U2;Z|S)"] + m["H(S|Z)"] - Hres,
               label="R1+R2 <= I(U1,U2;Y)-I(U1,U2;Z|S)+H(S|Z)-H(S|U1U2Y)")
    elif which == "R22":
        E = m["I(U2;Z|S,U1)"]
        sb.add({"R1": 1, "R11": -1}, 0.0, label="R1 <= R11")
        sb.add({"R2": 1, "R21": -1}, I2 - E, label="R2 <= I(U2;Y|U1)-I(U2;Z|S,U1)+R21")
        sb.add({"R1": 1, "R2": 1}, I2 - E + m["H(S|Z,U1)"] - Hres,
               label="R1+R2 <= I(U2;Y|U1)-I(U2;Z|S,U1)+H(S|Z,U1)-H(S|U1U2Y)")
    else:
        E = m["I(U1;Z|S,U2)"]
        sb.add({"R1": 1, "R11": -1}, I1 - E, label="R1 <= I(U1;Y|U2)-I(U1;Z|S,U2)+R11")
        sb.add({"R2": 1, "R21": -1}, 0.0, label="R2 <= R21")
        sb.add({"R1": 1, "R2": 1}, I1 - E + m["H(S|Z,U2)"] - Hres,
               label="R1+R2 <= I(U1;Y|U2)-I(U1;Z|S,U2)+H(S|Z,U2)-H(S|U1U2Y)")
    sb.add({"R1": 1, "R2": 1}, I12 - Hres, label="R1+R2 <= I(U1,U2;Y)-H(S|U1U2Y)")
    sb.add({"R11": 1, "R12": 1, "R21": 1, "R22": 1}, m["H(S|Z)"], strict=True,
           label="R11+R12+R21+R22 < H(S|Z)")
    sb.add({"R12": -1, "R22": -1}, -Hres, strict=True, label="R12+R22 > H(S|Y,U1,U2)")
    sb.nonnegative()
    return sb.build()


def _degraded(m: MiBundle, which: str) -> LinearConstraintSystem:
    sb = SystemBuilder(("R1", "R0"))
    A1 = m["I(U1;Y|V,U,U2)"]
    total = m["I(V,U,U1,U2;Y)"] - m["I(V;S)"]
    if which in ("D11", "D3"):
        if which == "D11":
            leak, key = m["I(U1;Z|S,U,U2)"], m.r_sk
        else:
            leak, key = m["I(U1;Z|U,U2)"], 0.0
        sb.add({"R1": 1}, A1 - leak + key, label="R1 <= I(U1;Y|U,U2,V)-leak+R_SK")
        sb.add({"R1": 1}, A1, label="R1 <= I(U1;Y|U,U2,V)")
        sb.add({"R0": 1, "R1": 1}, total - leak + key, label="R0+R1 <= I(V,U,U1,U2;Y)-I(V;S)-leak+R_SK")
        sb.add({"R0": 1, "R1": 1}, total, label="R0+R1 <= I(V,U,U1,U2;Y)-I(V;S)")
    elif which == "D12":
        sb.add({"R1": 1}, m.r_sk, label="R1 <= R_SK")
        sb.add({"R1": 1}, A1, label="R1 <= I(U1;Y|U,U2,V)")
        sb.add({"R0": 1, "R1": 1}, total, label="R0+R1 <= I(V,U,U1,U2;Y)-I(V;S)")
    else:
        B1 = m["I(U1;Y|U,U2)"]
        Hres = m["H(S|U,U1,U2,Y)"]
        Hz = m["H(S|Z,U,U2)"]
        tot = m["I(U,U1,U2;Y)"]
        if which == "D21":
            leak = m["I(U1;Z|S,U,U2)"]
            sb.add({"R1": 1}, B1 - leak - Hres + Hz, label="R1 <= I(U1;Y|U,U2)-I(U1;Z|U2,U,S)-H(S|UU1U2Y)+H(S|Z,U,U2)")
            sb.add({"R1": 1}, B1 - Hres, label="R1 <= I(U1;Y|U,U2)-H(S|UU1U2Y)")
            sb.add({"R0": 1, "R1": 1}, tot - leak - Hres + Hz,
                   label="R0+R1 <= I(U,U1,U2;Y)-I(U1;Z|U2,U,S)-H(S|UU1U2Y)+H(S|Z,U,U2)")
            sb.add({"R0": 1, "R1": 1}, tot - Hres, label="R0+R1 <= I(U,U1,U2;Y)-H(S|UU1U2Y)")
        else:
            sb.add({"R1": 1}, Hz - Hres, label="R1 <= H(S|Z,U,U2)-H(S|UU1U2Y)")
            sb.add({"R1": 1}, B1 - Hres, label="R1 <= I(U1;Y|U,U2)-H(S|UU1U2Y)")
            sb.add({"R0": 1, "R1": 1}, tot - Hres, label="R0+R1 <= I(U,U1,U2;Y)-H(S|UU1U2Y)")
    sb.nonnegative()
    return sb.build()


def _no_secrecy(m: MiBundle) -> LinearConstraintSystem:
    sb = SystemBuilder(("R1", "R2"))
    _scheme1_common(sb, m)
    sb.nonnegative()
    return sb.build()


def region_system(bundle: MiBundle, which: str) -> LinearConstraintSystem:
    """Inequality system of one region for a fixed input distribution."""
    if which == "R11":
        return _r11(bundle)
    if which == "R12":
        return _r12(bundle)
    if which == "R13":
        return _r13(bundle)
    if which in WIRETAP:
        return _wiretap(bundle, which)
    if which in SCHEME2:
        return _scheme2(bundle, which)
    if which in DEGRADED:
        return _degraded(bundle, which)
    if which == "NS":
        return _no_secrecy(bundle)
    raise InvalidArgument(f"unknown region id {which!r}; expected one of {REGION_IDS}")


def region_axes(which: str) -> tuple[str, str]:
    return ("R1", "R0") if which in DEGRADED or which == "D" else ("R1", "R2")


def expand_region(which: str) -> tuple[str, ...]:
    if which in FAMILIES:
        return FAMILIES[which]
    if which in REGION_IDS:
        return (which,)
    raise InvalidArgument(f"unknown region id {which!r}")


def region_polygon(bundle: MiBundle, which: str) -> RatePolygon:
    """Projection of one region's system onto its rate plane."""
    if which == "R11":
        return scheme1_closed_form(bundle)
    system = region_system(bundle, which)
    return project_polytope(system, keep=region_axes(which))


def scheme1_closed_form(bundle: MiBundle) -> RatePolygon:
    """Projection of the ``R11`` system with the split rates eliminated by hand.

    With ``a_j = I(Uj;Y|..) - I(Uj;Z|S,U)``, ``s = R_SUM - I(U1,U2;Z|S,U)`` and key
    budget ``K``, the pair is feasible iff ``R_j <= min(A_j, a_j + K)`` and
    ``R1 + R2 <= min(R_SUM, s + K, a_1 + a_2 + K)``, and ``K >= 0``.
    """
    m = bundle
    A1, A2 = m["I(U1;Y|V,U,U2)"], m["I(U2;Y|V,U,U1)"]
    a1, a2 = A1 - m["I(U1;Z|S,U)"], A2 - m["I(U2;Z|S,U)"]
    K = m["I(V;Y)"] - m["I(V;U,Z)"]
    if K < 0:
        return RatePolygon.empty()
    rs = m.r_sum
    s = rs - m["I(U1,U2;Z|S,U)"]
    c1 = min(A1, a1 + K)
    c2 = min(A2, a2 + K)
    cs = min(rs, s + K, a1 + a2 + K)
    return box_with_sum(c1, c2, cs)


def box_with_sum(c1: float, c2: float, cs: float, axes=("R1", "R2")) -> RatePolygon:
    """{R1 <= c1, R2 <= c2, R1 + R2 <= cs} in the nonnegative quadrant."""
    A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    return halfplanes_to_polygon(A, [c1, c2, cs, 0.0, 0.0], axes=axes)
