import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvbell.fock import ModeCutoff, TwoModeState, auto_cutoff, expectation, identity, product_expectation, tensor
from cvbell.pseudospin import FULL, make_pseudospin
from cvbell.squeeze import (
    apply_pair_creation_exponential,
    conjugate_observable,
    squeeze_unitary,
    tmsv_amplitudes,
    truncation_weight,
)


def analytic_tmsv(zeta, n_max):
    """Schmidt amplitudes tanh^n / cosh evaluated term by term."""
    return np.array([math.tanh(zeta) ** n / math.cosh(zeta) for n in range(n_max + 1)])


class TestAmplitudes:
    def test_vacuum(self):
        s = tmsv_amplitudes(0.0, ModeCutoff(5))
        expected = np.zeros((6, 6))
        expected[0, 0] = 1
        assert np.array_equal(s.amplitudes, expected)

    def test_first_pair(self):
        s = tmsv_amplitudes(0.5, ModeCutoff(5))
        assert s.amplitude(1, 1).real == pytest.approx(math.tanh(0.5) / math.cosh(0.5))
        assert s.amplitude(1, 1).real == pytest.approx(0.409814, abs=1e-6)

    def test_schmidt_structure(self):
        amps = tmsv_amplitudes(0.9, ModeCutoff(12)).amplitudes
        assert np.count_nonzero(amps - np.diag(np.diag(amps))) == 0

    def test_norm_converges(self):
        s = tmsv_amplitudes(0.5, auto_cutoff(0.5))
        assert s.norm_squared == pytest.approx(1.0, abs=1e-12)

    def test_not_renormalized(self):
        c = ModeCutoff(4)
        s = tmsv_amplitudes(1.0, c)
        assert s.norm_squared == pytest.approx(1 - truncation_weight(1.0, c), abs=1e-14)


class TestTruncationWeight:
    def test_vacuum(self):
        assert truncation_weight(0.0, ModeCutoff(3)) == 0.0

    def test_values(self):
        c = ModeCutoff(16)
        assert truncation_weight(0.5, c) == pytest.approx(math.tanh(0.5) ** 34)
        assert truncation_weight(0.5, c) == pytest.approx(3.9955e-12, rel=1e-4)
        assert truncation_weight(1.5, c) == pytest.approx(math.tanh(1.5) ** 34)
        assert truncation_weight(1.5, c) == pytest.approx(0.033765, rel=1e-4)

    @settings(max_examples=40, deadline=None)
    @given(z=st.floats(0.01, 2.0), dz=st.floats(0.01, 0.5), n=st.integers(1, 60))
    def test_monotone(self, z, dz, n):
        c = ModeCutoff(n)
        assert truncation_weight(z + dz, c) > truncation_weight(z, c)
        assert truncation_weight(z, ModeCutoff(n + 1)) < truncation_weight(z, c)


class TestUnitary:
    def test_identity_at_zero(self):
        c = ModeCutoff(4)
        assert np.allclose(squeeze_unitary(0.0, c).toarray(), np.eye(25))

    def test_vacuum_column_matches_schmidt_form(self):
        c = ModeCutoff(40)
        out = squeeze_unitary(0.5, c).apply(TwoModeState.basis(c))
        expected = np.diag(analytic_tmsv(0.5, 40))
        assert np.abs(out.amplitudes - expected).max() < 1e-8

    def test_vacuum_norm(self):
        c = ModeCutoff(40)
        s = squeeze_unitary(0.5, c)
        vac = TwoModeState.basis(c)
        assert expectation(vac, s.adjoint() @ s).real == pytest.approx(1.0, abs=1e-10)


class TestConjugation:
    def test_identity_invariant(self):
        c = ModeCutoff(10)
        out = conjugate_observable(identity(c, 2), 0.7)
        assert np.abs(out.toarray() - np.eye(121)).max() < 1e-12

    def test_hermiticity_preserved(self):
        c = ModeCutoff(9)
        t = make_pseudospin(FULL, c)
        out = conjugate_observable(tensor(t.sx, t.sx), 0.6)
        assert out.hermiticity_error() < 1e-12

    @pytest.mark.parametrize("zeta", [0.2, 0.5, 1.0])
    def test_level_zero_closed_forms(self, zeta):
        c = auto_cutoff(zeta)
        t = make_pseudospin(0, c)
        vac = TwoModeState.basis(c)
        k, ch2 = math.tanh(zeta), math.cosh(zeta) ** 2
        zz = conjugate_observable(tensor(t.sz, t.sz), zeta)
        xx = conjugate_observable(tensor(t.sx, t.sx), zeta)
        assert expectation(vac, zz).real == pytest.approx((1 + k * k) / ch2, abs=1e-10)
        assert expectation(vac, xx).real == pytest.approx(2 * k / ch2, abs=1e-10)


class TestPairCreation:
    def test_k_zero(self):
        rng = np.random.default_rng(0)
        s = TwoModeState(ModeCutoff(3), rng.normal(size=(4, 4)))
        assert np.array_equal(apply_pair_creation_exponential(0.0, s).amplitudes, s.amplitudes)

    def test_vacuum_series(self):
        c = ModeCutoff(6)
        out = apply_pair_creation_exponential(0.4, TwoModeState.basis(c))
        assert np.allclose(np.diag(out.amplitudes), 0.4 ** np.arange(7))
        assert np.count_nonzero(out.amplitudes - np.diag(np.diag(out.amplitudes))) == 0

    def test_range(self):
        with pytest.raises(ValueError):
            apply_pair_creation_exponential(1.0, TwoModeState.basis(ModeCutoff(2)))

    def test_general_state_against_dense_exponential(self):
        import scipy.linalg

        from cvbell.fock import creation

        c = ModeCutoff(5)
        rng = np.random.default_rng(7)
        s = TwoModeState(c, rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
        ad = creation(c)
        gen = tensor(ad, ad).toarray()
        ref = scipy.linalg.expm(0.3 * gen) @ s.vector
        assert np.allclose(apply_pair_creation_exponential(0.3, s).vector, ref, atol=1e-13)

    def test_normal_ordered_matches_exponential(self):
        zeta = 0.5
        c = auto_cutoff(zeta)
        t = make_pseudospin(0, c)
        vac = TwoModeState.basis(c)
        dressed = apply_pair_creation_exponential(math.tanh(zeta), vac)
        lhs = product_expectation(dressed, t.sz, t.sz).real / math.cosh(zeta) ** 2
        rhs = expectation(vac, conjugate_observable(tensor(t.sz, t.sz), zeta)).real
        assert abs(lhs - rhs) < 1e-10
