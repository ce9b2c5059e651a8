import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_aux, random_channel
from sdmawc.errors import InvalidArgument
from sdmawc.geometry import hausdorff, includes, project_polytope
from sdmawc.pmf import assemble_joint
from sdmawc.regions import (DEGRADED, FAMILIES, REGION_IDS, TERM_NAMES, MiBundle, box_with_sum,
                            expand_region, mi_bundle, region_axes, region_polygon, region_system,
                            scheme1_closed_form)


def bundle_for(seed: int) -> MiBundle:
    rng = np.random.default_rng(seed)
    ch = random_channel(rng, alpha=0.5)
    return mi_bundle(assemble_joint(ch, random_aux(rng, ch, alpha=0.5)))


class TestBundle:
    def test_all_terms_present_and_nonnegative(self):
        b = bundle_for(1)
        assert set(b.to_dict()) == set(TERM_NAMES)
        assert all(v >= 0 for v in b.to_dict().values())

    def test_unknown_term(self):
        with pytest.raises(InvalidArgument):
            bundle_for(1)["I(A;B)"]

    def test_immutable(self):
        b = bundle_for(2)
        with pytest.raises(TypeError):
            b.values["I(V;S)"] = 3.0

    def test_missing_variables(self):
        from sdmawc.pmf import JointPmf
        with pytest.raises(InvalidArgument):
            mi_bundle(JointPmf(("S",), [1.0]))


class TestRegionIds:
    def test_families_expand(self):
        assert expand_region("R1") == ("R11", "R12", "R13")
        assert set(FAMILIES["RCSI"]) <= set(REGION_IDS)
        with pytest.raises(InvalidArgument):
            expand_region("R99")

    def test_axes(self):
        assert region_axes("D11") == ("R1", "R0")
        assert region_axes("R21") == ("R1", "R2")

    def test_unknown_system(self):
        with pytest.raises(InvalidArgument):
            region_system(bundle_for(0), "nope")

    @pytest.mark.parametrize("which", REGION_IDS)
    def test_every_region_is_a_bounded_polygon(self, which):
        for seed in range(5):
            poly = region_polygon(bundle_for(seed), which)
            assert poly.axes == region_axes(which)
            if not poly.is_empty:
                assert np.all(poly.vertices >= -1e-12)
                assert np.all(np.isfinite(poly.vertices))


class TestScheme1:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_closed_form_equals_elimination(self, seed):
        b = bundle_for(seed)
        closed = scheme1_closed_form(b)
        fm = project_polytope(region_system(b, "R11"))
        if closed.is_empty or fm.is_empty:
            assert closed.is_empty and fm.is_empty
        else:
            assert hausdorff(closed, fm) < 1e-9

    def test_negative_key_budget_is_empty(self):
        vals = dict(bundle_for(3).to_dict())
        vals["I(V;Y)"], vals["I(V;U,Z)"] = 0.1, 0.3
        assert scheme1_closed_form(MiBundle(vals)).is_empty

    @pytest.mark.parametrize("seed", range(10))
    def test_secrecy_region_inside_no_secrecy(self, seed):
        b = bundle_for(seed)
        ns = region_polygon(b, "NS")
        for r in ("R11", "R12", "R13", "R3", "R3b", "R3c"):
            assert includes(ns, region_polygon(b, r), 1e-9)

    def test_wiretap_without_key_is_inside_r11_when_state_is_trivial(self):
        # with a constant state the key budget can still only help
        rng = np.random.default_rng(5)
        ch = random_channel(rng, ns=1)
        b = mi_bundle(assemble_joint(ch, random_aux(rng, ch, nv=1)))
        assert includes(region_polygon(b, "R11"), region_polygon(b, "R3"), 1e-9)


class TestDegraded:
    @pytest.mark.parametrize("which", DEGRADED)
    def test_rate_plane(self, which):
        poly = region_polygon(bundle_for(7), which)
        assert poly.axes == ("R1", "R0")


def test_box_with_sum_vertices():
    p = box_with_sum(1.0, 2.0, 2.5)
    expected = {(0, 0), (1, 0), (1, 1.5), (0.5, 2), (0, 2)}
    assert {tuple(np.round(v, 12)) for v in p.vertices} == expected
