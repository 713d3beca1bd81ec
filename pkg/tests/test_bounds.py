import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import shannon_bits
from structinfo.bounds import (LossBundle, TabularChannel, combined_loss, l_sgz, l_up, l_zgs,
                               smi_upper_decomposition_check, true_marginal_decoder, true_s_given_z,
                               true_z_given_s)
from structinfo.graph import JointDistribution


def positive_tables(rows, cols):
    return st.lists(st.floats(0.02, 1.0), min_size=rows * cols, max_size=rows * cols).map(
        lambda xs: np.asarray(xs).reshape(rows, cols))


@st.composite
def joint_and_decoders(draw):
    nz, ns = draw(st.integers(1, 5)), draw(st.integers(1, 5))
    t = draw(positive_tables(nz, ns))
    j = JointDistribution(t / t.sum())
    q_m = TabularChannel.normalized(draw(positive_tables(1, nz)))
    q_zs = TabularChannel.normalized(draw(positive_tables(ns, nz)))
    q_sz = TabularChannel.normalized(draw(positive_tables(nz, ns)))
    return j, q_m, q_zs, q_sz


def mi(j):
    return shannon_bits(j.px) + shannon_bits(j.py) - shannon_bits(j.table)


def h_z_given_s(j):
    return shannon_bits(j.table) - shannon_bits(j.py)


class TestChannel:
    @pytest.mark.parametrize("t", [[[0.5, 0.6]], [[0.0, 1.0]], [[np.nan, 1.0]]])
    def test_rejects_invalid(self, t):
        with pytest.raises(ValueError):
            TabularChannel(np.array(t))

    def test_normalized(self):
        assert np.allclose(TabularChannel.normalized([[1, 3], [2, 2]]).table, [[0.25, 0.75], [0.5, 0.5]])


class TestLup:
    def test_true_marginal_is_tight(self):
        j = JointDistribution(np.array([[0.1, 0.2], [0.3, 0.4]]))
        assert l_up(j, true_marginal_decoder(j)) == pytest.approx(mi(j), abs=1e-12)

    def test_independent_joint_gives_zero(self):
        j = JointDistribution(np.outer([0.3, 0.7], [0.6, 0.4]))
        assert l_up(j, true_marginal_decoder(j)) == pytest.approx(0.0, abs=1e-12)

    @given(joint_and_decoders())
    def test_upper_bounds_mutual_information(self, draw):
        j, q_m, _, _ = draw
        assert l_up(j, q_m) >= mi(j) - 1e-12

    def test_shape_check(self):
        j = JointDistribution(np.full((2, 2), 0.25))
        with pytest.raises(ValueError):
            l_up(j, TabularChannel.normalized(np.ones((1, 3))))


class TestLzgs:
    def test_true_conditional_is_tight(self):
        j = JointDistribution(np.array([[0.1, 0.2], [0.3, 0.4]]))
        assert l_zgs(j, true_z_given_s(j)) == pytest.approx(h_z_given_s(j), abs=1e-12)

    def test_near_deterministic_code_with_confident_decoder(self):
        # Z = S up to 1e-12 leakage; the decoder puts 0.999 on the right symbol
        eps = 1e-12
        t = np.full((3, 3), eps) + np.diag(np.full(3, (1 - 9 * eps) / 3))
        q = np.full((3, 3), 0.0005) + np.diag(np.full(3, 0.999 - 0.0005))
        assert l_zgs(JointDistribution(t), TabularChannel(q)) == pytest.approx(-np.log2(0.999), abs=1e-9)

    @given(joint_and_decoders())
    def test_upper_bounds_conditional_entropy(self, draw):
        j, _, q_zs, _ = draw
        assert l_zgs(j, q_zs) >= h_z_given_s(j) - 1e-12


class TestLsgz:
    def test_constant_next_state(self):
        j = JointDistribution(np.array([[0.4], [0.6]]))
        assert l_sgz(j, true_s_given_z(j)) == pytest.approx(0.0, abs=1e-15)

    def test_true_conditional_gives_mi_minus_entropy(self):
        j = JointDistribution(np.array([[0.1, 0.2], [0.3, 0.4]]))
        assert l_sgz(j, true_s_given_z(j)) == pytest.approx(mi(j) - shannon_bits(j.py), abs=1e-12)

    @given(joint_and_decoders())
    def test_lower_bounds_mutual_information(self, draw):
        j, _, _, q_sz = draw
        assert l_sgz(j, q_sz) <= mi(j) + 1e-12
        assert shannon_bits(j.py) + l_sgz(j, q_sz) <= mi(j) + 1e-12


class TestTightnessIsStrict:
    @given(joint_and_decoders(), st.floats(0.05, 0.5))
    def test_perturbed_decoders_are_looser(self, draw, mix):
        j, q_m, q_zs, q_sz = draw
        nz, ns = j.shape
        pert_m = TabularChannel((1 - mix) * true_marginal_decoder(j).table + mix * q_m.table)
        pert_zs = TabularChannel((1 - mix) * true_z_given_s(j).table + mix * q_zs.table)
        pert_sz = TabularChannel((1 - mix) * true_s_given_z(j).table + mix * q_sz.table)
        if not np.allclose(pert_m.table, true_marginal_decoder(j).table, atol=1e-6):
            assert l_up(j, pert_m) > l_up(j, true_marginal_decoder(j))
        if not np.allclose(pert_zs.table, true_z_given_s(j).table, atol=1e-6):
            assert l_zgs(j, pert_zs) > l_zgs(j, true_z_given_s(j))
        if not np.allclose(pert_sz.table, true_s_given_z(j).table, atol=1e-6):
            assert l_sgz(j, pert_sz) < l_sgz(j, true_s_given_z(j))


class TestDecompositionAndCombination:
    def test_uniform_check(self):
        assert smi_upper_decomposition_check(JointDistribution(np.full((2, 2), 0.25)))

    def test_near_one_to_one(self):
        assert smi_upper_decomposition_check(JointDistribution(np.array([[0.499, 0.001], [0.001, 0.499]])))

    @given(st.integers(1, 6).flatmap(lambda n: positive_tables(n, n)))
    def test_decomposition_always_holds(self, t):
        assert smi_upper_decomposition_check(JointDistribution(t / t.sum()))

    def test_combined_examples(self):
        assert combined_loss(0, 0, 0, 1).combined == 0
        assert combined_loss(0.4, 0.3, -0.2, 0.5).combined == pytest.approx(0.6, abs=1e-12)

    def test_zero_eta_ignores_next_state_term(self):
        assert combined_loss(0.4, 0.3, -5.0, 0.0).combined == combined_loss(0.4, 0.3, 7.0, 0.0).combined

    def test_negative_eta_rejected(self):
        with pytest.raises(ValueError):
            combined_loss(0, 0, 0, -1)

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 5))
    def test_bundle_sum(self, a, b, c, eta):
        assert abs(LossBundle(a, b, c, eta).combined - (a + b + eta * c)) < 1e-12
