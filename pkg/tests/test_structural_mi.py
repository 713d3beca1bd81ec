import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import shannon_bits, smi_by_brute_force
from structinfo.encoding_tree import optimize_two_layer, structural_entropy
from structinfo.graph import JointDistribution, bipartite_from_joint
from structinfo.structural_mi import (joint_entropy_closed_form, joint_structural_entropy,
                                      marginal_structural_entropy, matching_tree, shannon, smi_by_definition,
                                      smi_closed_form, theorem32_report, theorem41_check)

UNIFORM = JointDistribution(np.full((2, 2), 0.25))
NEAR_DIAG = JointDistribution(np.array([[0.499, 0.001], [0.001, 0.499]]))


@st.composite
def square_joints(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    cells = draw(st.lists(st.floats(0.01, 1.0), min_size=n * n, max_size=n * n))
    t = np.asarray(cells).reshape(n, n)
    return JointDistribution(t / t.sum())


class TestMarginal:
    def test_uniform(self):
        assert marginal_structural_entropy(UNIFORM, "X") == pytest.approx(1.0, abs=1e-15)

    def test_skewed(self):
        j = JointDistribution(np.array([[0.1, 0.2], [0.3, 0.4]]))
        expected = -0.15 * np.log2(0.15) - 0.35 * np.log2(0.35)
        assert marginal_structural_entropy(j, "X") == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(0.9406, abs=1e-4)

    def test_single_outcome(self):
        assert marginal_structural_entropy(JointDistribution(np.array([[1.0]])), "Y") == pytest.approx(0.5)


class TestJointEntropy:
    def test_matches_tree_entropy_on_diagonal_dominant_joint(self):
        g = bipartite_from_joint(NEAR_DIAG)
        expected = structural_entropy(g, optimize_two_layer(g, "matching"))
        assert joint_structural_entropy(NEAR_DIAG, 0) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("l", [0, 1, 2, 5])
    def test_uniform_gap_is_half_bit_per_shift(self, l):
        single = marginal_structural_entropy(UNIFORM, "X") + marginal_structural_entropy(UNIFORM, "Y")
        assert single - joint_structural_entropy(UNIFORM, l) == pytest.approx(0.5, abs=1e-12)

    @given(square_joints(min_n=2), st.integers(0, 7))
    def test_closed_form_matches_graph_when_base_is_identity(self, j, l):
        g = bipartite_from_joint(j)
        base = matching_tree(j, g)
        n = j.shape[0]
        if sorted(base.groups()) == [(i, n + i) for i in range(n)]:
            assert abs(joint_entropy_closed_form(j, l) - joint_structural_entropy(j, l)) < 1e-12


class TestSmi:
    def test_uniform_closed_form(self):
        assert smi_closed_form(UNIFORM) == pytest.approx(1.0, abs=1e-15)

    def test_uniform_by_definition(self):
        assert smi_by_definition(UNIFORM) == pytest.approx(1.0, abs=1e-12)

    def test_near_one_to_one_is_close_to_marginal_entropy(self):
        assert smi_closed_form(NEAR_DIAG) == pytest.approx(1.0, abs=0.03)

    def test_single_cell(self):
        one = JointDistribution(np.array([[1.0]]))
        assert smi_by_definition(one) == pytest.approx(0.0, abs=1e-15)
        assert smi_closed_form(one) == 0.0

    def test_rectangular_rejected(self):
        with pytest.raises(ValueError):
            smi_closed_form(JointDistribution(np.full((2, 3), 1 / 6)))

    @given(square_joints())
    def test_closed_form_matches_brute_force(self, j):
        assert abs(smi_closed_form(j) - smi_by_brute_force(j.table)) < 1e-9

    @given(square_joints(max_n=5))
    def test_closed_form_matches_definition(self, j):
        assert abs(smi_closed_form(j) - smi_by_definition(j)) < 1e-9

    @given(square_joints())
    def test_symmetric_under_transpose(self, j):
        assert abs(smi_closed_form(j) - smi_closed_form(j.transpose())) < 1e-12

    @given(square_joints())
    def test_never_below_mutual_information(self, j):
        assert smi_closed_form(j) >= shannon(j).mi - 1e-9


class TestShannon:
    def test_uniform(self):
        sh = shannon(UNIFORM)
        assert sh.mi == pytest.approx(0.0, abs=1e-15)
        assert sh.hxy == pytest.approx(2.0)

    def test_near_diagonal_mi(self):
        # X is uniform and H(X|Y) is the binary entropy of 0.002
        assert shannon(NEAR_DIAG).mi == pytest.approx(1.0 - shannon_bits([0.002, 0.998]), abs=1e-12)
        assert shannon(NEAR_DIAG).mi == pytest.approx(0.97919, abs=1e-5)

    @given(square_joints())
    def test_identities(self, j):
        sh = shannon(j)
        assert abs(sh.hx - shannon_bits(j.px)) < 1e-12
        assert abs(sh.mi - (sh.hx + sh.hy - sh.hxy)) < 1e-12
        assert abs(sh.hx_given_y - (sh.hxy - sh.hy)) < 1e-12


class TestSandwichAndIdentity:
    def test_uniform_sandwich_is_tight(self):
        rep = theorem32_report(UNIFORM)
        assert rep.epsilon == pytest.approx(0.5)
        assert (rep.lhs, rep.mid, rep.rhs) == pytest.approx((0.0, 1.0, 1.0), abs=1e-12)
        assert rep.holds

    def test_near_one_to_one_mid_approaches_lhs(self):
        rep = theorem32_report(NEAR_DIAG)
        assert rep.mid - rep.lhs < 0.03
        assert rep.holds

    @given(square_joints(min_n=2, max_n=8))
    def test_sandwich_holds(self, j):
        rep = theorem32_report(j)
        assert 0 <= rep.epsilon <= 1
        assert rep.holds

    def test_report_flags_a_broken_estimator(self):
        assert not theorem32_report(UNIFORM, smi=lambda j: -1.0).holds

    @pytest.mark.parametrize("p, expected", [([0.5, 0.5], 1.0), ([0.3, 0.7], 0.8812908992306927), ([1.0], 0.0)])
    def test_theorem41_examples(self, p, expected):
        smi, mi = theorem41_check(p)
        assert smi == pytest.approx(expected, abs=1e-12)
        assert mi == pytest.approx(expected, abs=1e-12)

    def test_theorem41_rejects_invalid(self):
        with pytest.raises(ValueError):
            theorem41_check([0.5, 0.6])
