import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdmawc.coding.typicality import batch_typical, flat_symbols, reference_pmf, typical_set_test
from sdmawc.errors import InvalidArgument
from sdmawc.pmf import JointPmf


def typical_loop(x, y, p, delta):
    """Direct transcription of the relative-slack definition."""
    n = len(x)
    for a, b in itertools.product(range(p.shape[0]), range(p.shape[1])):
        f = sum(1 for i in range(n) if x[i] == a and y[i] == b) / n
        if abs(f - p[a, b]) > delta * p[a, b] + 1e-12:
            return False
    return True


class TestFlatSymbols:
    def test_row_major(self):
        idx = flat_symbols([np.array([0, 1, 1]), np.array([2, 0, 1])], (2, 3))
        np.testing.assert_array_equal(idx, [2, 3, 4])

    def test_broadcast_batch(self):
        a = np.zeros((4, 5), dtype=int)
        b = np.ones((1, 5), dtype=int)
        assert flat_symbols([a, b], (2, 2)).shape == (4, 5)

    def test_out_of_alphabet(self):
        with pytest.raises(InvalidArgument):
            flat_symbols([np.array([0, 3])], (2,))

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgument):
            flat_symbols([np.zeros(3, int), np.zeros(4, int)], (2, 2))


class TestBatchTypical:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0.1, 0.5, 1.0, 3.0]))
    def test_matches_definition(self, seed, delta):
        rng = np.random.default_rng(seed)
        p = rng.dirichlet(np.ones(4)).reshape(2, 2)
        if rng.random() < 0.3:
            p[0, 1] = 0.0
            p /= p.sum()
        n = int(rng.integers(4, 30))
        xs = rng.integers(2, size=(20, n))
        ys = rng.integers(2, size=(20, n))
        got = batch_typical(flat_symbols([xs, ys], (2, 2)), p.ravel(), delta)
        want = [typical_loop(xs[i], ys[i], p, delta) for i in range(20)]
        np.testing.assert_array_equal(got, want)

    def test_zero_probability_cell_forbidden(self):
        p = np.array([0.5, 0.5, 0.0])
        assert not batch_typical(np.array([0, 1, 2, 0]), p, 10.0)
        assert batch_typical(np.array([0, 1, 1, 0]), p, 0.01)

    def test_empty_sequence_is_typical(self):
        assert batch_typical(np.zeros((3, 0), dtype=int), np.array([1.0]), 0.1).all()

    def test_joint_test_on_pmf(self):
        j = JointPmf(("A", "B"), np.array([[0.5, 0.0], [0.0, 0.5]]))
        assert typical_set_test([np.array([0, 1, 0, 1]), np.array([0, 1, 0, 1])], j, 0.1)
        assert not typical_set_test([np.array([0, 1, 0, 1]), np.array([1, 1, 0, 1])], j, 0.1)
        np.testing.assert_allclose(reference_pmf(j, ("B", "A")), [0.5, 0, 0, 0.5])

    def test_bad_delta(self):
        j = JointPmf(("A",), [0.5, 0.5])
        with pytest.raises(InvalidArgument):
            typical_set_test([np.array([0, 1])], j, 0.0)


class TestTypicalSetExamples:
    def test_constant_sequence_vs_point_mass(self):
        j = JointPmf(("A",), [0.0, 1.0])
        for delta in (1e-6, 0.1, 2.0):
            assert typical_set_test([np.ones(20, int)], j, delta)

    def test_constant_sequence_vs_uniform(self):
        j = JointPmf(("A",), [0.5, 0.5])
        assert not typical_set_test([np.zeros(20, int)], j, 0.1)

    def test_iid_sample_is_typical(self):
        rng = np.random.default_rng(11)
        p = np.array([0.6, 0.4])
        draws = rng.choice(2, p=p, size=(10 ** 4, 2000))
        assert batch_typical(draws, p, 0.1).mean() >= 0.99
