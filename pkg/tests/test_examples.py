import numpy as np
import pytest

from sdmawc.errors import InvalidArgument
from sdmawc.examples import (example1_channel, example1_scheme1_assignment, example1b_channel,
                             example1b_scheme2_assignment, example2_beta, example2_channel,
                             example2_corrected_assignment, example2_published_assignment,
                             regression_assignment, regression_channel, regression_config)
from sdmawc.geometry import RatePolygon
from sdmawc.pmf import (JointPmf, assemble_joint, binary_convolution, binary_entropy, entropy,
                        mutual_information)
from sdmawc.regions import mi_bundle, region_polygon
from sdmawc.search import SearchConfig, achievable_region, degraded_rows, example2_degraded_input


class TestExample1:
    @pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
    def test_channel_is_deterministic(self, p):
        k = example1_channel(p).kernel
        assert set(np.unique(k)) <= {0.0, 1.0}

    def test_state_selects_sender(self):
        k = example1_channel(0.5).kernel
        assert k[1, 0, 0, 1, 0] == 1.0 and k[1, 0, 1, 0, 0] == 1.0

    @pytest.mark.parametrize("p", [0.6, 0.75, 0.9])
    def test_scheme1_terms(self, p):
        b = mi_bundle(assemble_joint(example1_channel(p), example1_scheme1_assignment()))
        assert b["I(U1;Y|V,U,U2)"] == pytest.approx(1 - p, abs=1e-12)
        assert b["I(V;S)"] == pytest.approx(binary_entropy(p), abs=1e-12)
        assert b["I(U1;Z|S,U)"] == 0.0

    @pytest.mark.parametrize("p", [0.6, 0.9])
    def test_conditional_output_entropy_comes_from_state_zero(self, p):
        j = assemble_joint(example1_channel(p), example1_scheme1_assignment())
        s_axis = j.variables.index("S")
        per_state = []
        for s in range(2):
            cell = np.take(j.p, [s], axis=s_axis)
            sub = JointPmf(j.variables, cell / cell.sum())
            per_state.append(entropy(sub, "Y", "U"))
        assert per_state == pytest.approx([1.0, 0.0], abs=1e-12)
        assert entropy(j, "Y", ("S", "U")) == pytest.approx((1 - p) * per_state[0], abs=1e-12)

    def test_example1b_point(self):
        p = 0.1
        poly = achievable_region(example1b_channel(p), "R2",
                                 SearchConfig(candidates=(example1b_scheme2_assignment(),),
                                              samples=0))
        assert poly.contains((0.0, binary_entropy(p)), 1e-6)

    def test_domain(self):
        with pytest.raises(InvalidArgument):
            example1_channel(-0.1)


class TestExample2:
    def test_beta_solves_convolution(self):
        for a in (0.3, 0.5, 0.7):
            assert binary_convolution(0.25, example2_beta(0.25, a)) == pytest.approx(a)

    def test_no_beta_outside_reachable_range(self):
        with pytest.raises(InvalidArgument, match="reachable"):
            example2_beta(0.25, 0.8)
        with pytest.raises(InvalidArgument):
            example2_beta(0.5, 0.6)
        assert example2_beta(0.5, 0.5) == 0.5

    def test_published_assignment_matches_only_at_half(self):
        ch = example2_channel(0.25, 0.1)
        j_pub = assemble_joint(ch, example2_published_assignment(0.25, 0.5))
        j_cor = assemble_joint(ch, example2_corrected_assignment(0.5))
        assert mutual_information(j_pub, "U1", "Y", ("U", "U2")) == pytest.approx(
            mutual_information(j_cor, "U1", "Y", ("U", "U2")), abs=1e-12)
        j_pub = assemble_joint(ch, example2_published_assignment(0.25, 0.7))
        j_cor = assemble_joint(ch, example2_corrected_assignment(0.7))
        assert abs(mutual_information(j_pub, "U1", "Y", ("U", "U2"))
                   - mutual_information(j_cor, "U1", "Y", ("U", "U2"))) > 0.05

    def test_degraded_input_matches_corrected_chain(self):
        ch = example2_channel(0.25, 0.1)
        inp = example2_degraded_input(0.8)
        j = assemble_joint(ch, example2_corrected_assignment(0.8))
        assert degraded_rows(ch, inp)[3] == pytest.approx(
            mutual_information(j, ("X1", "X2"), "Y", "S"), abs=1e-12)

    def test_output_pairs(self):
        k = example2_channel(0.25, 0.0).kernel
        # X1 = X2 = 1 and S = 1: y1 = 0, y2 = 1, so Y = 1 and Z = 1
        assert k[1, 1, 1, 1, 1] == 1.0


class TestRegression:
    def test_channel_layout(self):
        k = regression_channel(0.25).kernel
        assert k[1, 1, 0, 2].sum() == 1.0 and k[1, 0, 1, 1].sum() == 1.0
        assert k[1, 0, 0, 0, 1] == pytest.approx(0.75)

    def test_state_description_is_weak(self):
        cfg = regression_config(12)
        assert cfg.info["I(V;S)"] < cfg.tau
        assert cfg.sizes["T"] == 1 == regression_config(24).sizes["T"]

    def test_rates_shared_across_lengths(self):
        assert regression_config(12).rates == regression_config(24).rates

    def test_assignment_domain(self):
        with pytest.raises(InvalidArgument):
            regression_assignment(1.5)

    def test_region_nonempty(self):
        b = mi_bundle(assemble_joint(regression_channel(), regression_assignment()))
        assert isinstance(region_polygon(b, "R11"), RatePolygon)
        assert not region_polygon(b, "R11").is_empty
