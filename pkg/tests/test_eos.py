import numpy as np
import pytest
from hypothesis import given, strategies as st

from releu.eos import Eos, p_zero_index


class TestEnergyDensity:
    def test_vacuum(self):
        assert Eos(2.0).rho_of_n(0.0) == 0.0

    def test_quarter(self):
        assert Eos(2.0).rho_of_n(0.25) == pytest.approx(1.0 / 3.0, rel=1e-14)

    def test_near_causal_endpoint(self):
        n = 1.0 / 3.0 - 1e-10
        assert Eos(2.0).rho_of_n(n) == pytest.approx(0.5, rel=1e-8)

    def test_negative_density_rejected(self):
        with pytest.raises(ValueError):
            Eos(2.0).rho_of_n(-0.1)

    def test_singular_density_rejected(self):
        with pytest.raises(ValueError):
            Eos(2.0).rho_of_n(1.0)


class TestSoundSpeed:
    def test_vacuum(self):
        assert Eos(2.0).sound_speed_sq(0.0) == 0.0

    def test_half(self):
        assert Eos(2.0).sound_speed_sq(0.2) == pytest.approx(0.5, rel=1e-14)

    def test_light_speed_endpoint(self):
        # the causal bound itself: algebra evaluates there, validation rejects
        assert Eos(2.0).sound_speed_sq(1.0 / 3.0) == pytest.approx(1.0, rel=1e-14)
        assert not Eos(2.0).is_causal(1.0 / 3.0)


class TestEnthalpy:
    def test_vacuum(self):
        assert Eos(2.0).enthalpy_s(0.0) == 1.0

    def test_causal_endpoint(self):
        assert Eos(2.0).enthalpy_s(1.0 / 3.0) == pytest.approx(2.25, rel=1e-14)

    def test_gamma_two_closed_form(self):
        n = 0.1
        assert Eos(2.0).enthalpy_s(n) == pytest.approx(1.0 / (1.0 - n) ** 2, rel=1e-14)

    def test_lagrangian_composition(self):
        eos = Eos(2.0)
        assert eos.enthalpy_S_of_f(0.0) == 1.0
        assert eos.enthalpy_S_of_f(0.125) == pytest.approx(64.0 / 49.0, rel=1e-14)
        assert eos.enthalpy_S_of_f(0.25) == pytest.approx(16.0 / 9.0, rel=1e-14)


class TestPZeroIndex:
    @pytest.mark.parametrize("gamma,want", [(2.0, 0), (1.5, 1), (3.0, 0)])
    def test_values(self, gamma, want):
        assert p_zero_index(gamma) == want

    def test_gamma_at_most_one_rejected(self):
        with pytest.raises(ValueError):
            p_zero_index(1.0)
        with pytest.raises(ValueError):
            Eos(0.9)

    @given(st.floats(min_value=1.01, max_value=10.0))
    def test_defining_inequality(self, gamma):
        p0 = p_zero_index(gamma)
        assert 1.0 + 1.0 / (gamma - 1.0) - p0 <= 2.0 + 1e-12
        if p0 > 0:
            assert 1.0 + 1.0 / (gamma - 1.0) - (p0 - 1) > 2.0


@pytest.mark.parametrize("gamma", [1.5, 2.0, 3.0])
class TestThermodynamicConsistency:
    def admissible_samples(self, eos):
        return np.linspace(0.02, 0.98, 25) * eos.n_causal

    def test_sound_speed_range(self, gamma):
        eos = Eos(gamma)
        cs2 = eos.sound_speed_sq(self.admissible_samples(eos))
        assert np.all(cs2 > 0.0) and np.all(cs2 < 1.0)

    def test_enthalpy_from_rho_and_p(self, gamma):
        # s = (rho + p) / n
        eos = Eos(gamma)
        n = self.admissible_samples(eos)
        lhs = eos.enthalpy_s(n)
        rhs = (eos.rho_of_n(n) + eos.pressure_of_n(n)) / n
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)

    def test_enthalpy_is_density_derivative(self, gamma):
        # s = d(rho)/dn, via central differences
        eos = Eos(gamma)
        n = self.admissible_samples(eos)
        dn = 1e-6 * eos.n_causal
        fd = (eos.rho_of_n(n + dn) - eos.rho_of_n(n - dn)) / (2.0 * dn)
        np.testing.assert_allclose(fd, eos.enthalpy_s(n), rtol=1e-6)

    def test_monotonicity(self, gamma):
        eos = Eos(gamma)
        n = self.admissible_samples(eos)
        for fn in (eos.rho_of_n, eos.enthalpy_s, eos.sound_speed_sq):
            vals = fn(n)
            assert np.all(np.diff(vals) > 0.0)


class TestCausalBound:
    def test_gamma_two_bound_is_one_third(self):
        assert Eos(2.0).n_causal == pytest.approx(1.0 / 3.0, rel=1e-14)

    def test_require_causal(self):
        eos = Eos(2.0)
        eos.require_causal(0.3)
        with pytest.raises(ValueError):
            eos.require_causal(1.0 / 3.0)

    @given(st.floats(min_value=1.2, max_value=4.0))
    def test_sound_speed_is_unity_at_bound(self, gamma):
        eos = Eos(gamma)
        assert eos.sound_speed_sq(eos.n_causal) == pytest.approx(1.0, rel=1e-9)
