import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import hbar, k as k_B

from trapcoherence.decoherence import (
    CS133_MASS_KG,
    CS_CLOCK_ETA_780NM,
    CoherenceModel,
    DESParams,
    PowerLawTrap,
    aux_frequency,
    coherence,
    frequency_ratio,
    one_over_e_time,
    rate_parametric,
    rate_pointing,
    t2_star,
    thermal_phonon_number,
    threshold_ratio,
    total_rate_3d,
    var_des,
    var_des_signed,
)
from trapcoherence.noise import POINTING, white

V_033_MK = k_B * 0.33e-3


def cs_trap(l=1, a=2.86e-6, v_c=V_033_MK):
    return PowerLawTrap(l=l, v_c=v_c, a=a, mass=CS133_MASS_KG)


class TestAuxFrequency:
    def test_harmonic_reduction_identity(self):
        trap = cs_trap()
        omega = aux_frequency(trap)
        assert omega**2 * trap.mass * trap.a**2 / 2 == pytest.approx(
            trap.v_c, rel=1e-12
        )

    def test_harmonic_lambda_identity(self):
        # lambda = M omega^2 / 2 for l = 1
        trap = cs_trap()
        omega = aux_frequency(trap)
        assert trap.lam == pytest.approx(trap.mass * omega**2 / 2, rel=1e-12)

    def test_cs_example(self):
        # direct arithmetic, independent of the general-l formula
        expected = math.sqrt(2 * V_033_MK / (CS133_MASS_KG * 2.86e-6**2))
        omega = aux_frequency(cs_trap())
        assert omega == pytest.approx(expected, rel=1e-12)
        assert omega == pytest.approx(7.1e4, rel=0.01)

    def test_order_ratio_matches_closed_form(self):
        a, v = 2.8638e-6, V_033_MK
        ratio = aux_frequency(cs_trap(l=2, a=a, v_c=v)) / aux_frequency(
            cs_trap(l=1, a=a, v_c=v)
        )
        assert ratio == pytest.approx(frequency_ratio(CS133_MASS_KG, a, v), rel=1e-12)


class TestFrequencyRatio:
    def test_paper_instance(self):
        ratio = frequency_ratio(CS133_MASS_KG, 4.05e-6 / math.sqrt(2), V_033_MK)
        assert ratio == pytest.approx(0.074, abs=0.002)

    def test_unit_point(self):
        a, m = 1.3e-6, CS133_MASS_KG
        v0 = hbar**2 / (8 * m * a**2)
        assert frequency_ratio(m, a, v0) == pytest.approx(1.0, rel=1e-12)

    def test_size_power_law(self):
        base = frequency_ratio(CS133_MASS_KG, 1e-6, V_033_MK)
        wide = frequency_ratio(CS133_MASS_KG, 4e-6, V_033_MK)
        assert base / wide == pytest.approx(4 ** (1 / 3), rel=1e-12)


class TestRates:
    def test_harmonic_parametric_closed_form(self, harmonic_spectrum):
        omega, level = 2.0e5, 3e-12
        rate = rate_parametric(harmonic_spectrum, omega, white(level))
        assert rate == pytest.approx(math.pi * omega**2 * level / 8, rel=1e-10)

    def test_harmonic_pointing_closed_form(self, harmonic_spectrum):
        omega, level = 2.0e5, 1e-26
        rate = rate_pointing(
            harmonic_spectrum, omega, CS133_MASS_KG, white(level, POINTING)
        )
        expected = math.pi * CS133_MASS_KG * omega**3 * level / (2 * hbar)
        assert rate == pytest.approx(expected, rel=1e-10)

    def test_zero_noise(self, harmonic_spectrum):
        assert rate_parametric(harmonic_spectrum, 1e5, white(0.0)) == 0.0
        assert rate_pointing(
            harmonic_spectrum, 1e5, CS133_MASS_KG, white(0.0, POINTING)
        ) == 0.0

    def test_quartic_to_harmonic_ratio_parametric(
        self, harmonic_spectrum, quartic_spectrum
    ):
        omega, s = 1e5, white(1e-12)
        ratio = rate_parametric(quartic_spectrum, omega, s) / rate_parametric(
            harmonic_spectrum, omega, s
        )
        assert ratio == pytest.approx(5.83 / 2, rel=0.01)

    def test_quartic_to_harmonic_ratio_pointing(
        self, harmonic_spectrum, quartic_spectrum
    ):
        omega, s = 1e5, white(1e-26, POINTING)
        ratio = rate_pointing(
            quartic_spectrum, omega, CS133_MASS_KG, s
        ) / rate_pointing(harmonic_spectrum, omega, CS133_MASS_KG, s)
        assert ratio == pytest.approx(8.48, rel=0.01)

    def test_scaling_laws(self, harmonic_spectrum):
        # linear in the noise level, cubic in omega for the pointing channel
        r1 = rate_pointing(harmonic_spectrum, 1e5, CS133_MASS_KG, white(1e-26, POINTING))
        r2 = rate_pointing(harmonic_spectrum, 2e5, CS133_MASS_KG, white(1e-26, POINTING))
        r3 = rate_pointing(harmonic_spectrum, 1e5, CS133_MASS_KG, white(3e-26, POINTING))
        assert r2 / r1 == pytest.approx(8.0, rel=1e-10)
        assert r3 / r1 == pytest.approx(3.0, rel=1e-10)

    def test_flavor_mixups_rejected(self, harmonic_spectrum):
        with pytest.raises(ValueError):
            rate_parametric(harmonic_spectrum, 1e5, white(1e-12, POINTING))
        with pytest.raises(ValueError):
            rate_pointing(harmonic_spectrum, 1e5, CS133_MASS_KG, white(1e-12))


class TestThresholdRatio:
    def test_published_thresholds(self):
        assert threshold_ratio(5.83, 2.0, 2) == pytest.approx(0.586, abs=5e-4)
        assert threshold_ratio(8.48, 1.0, 3) == pytest.approx(0.490, abs=5e-4)

    def test_equal_sums(self):
        assert threshold_ratio(3.3, 3.3, 2) == 1.0

    def test_rejects_bad_power(self):
        with pytest.raises(ValueError):
            threshold_ratio(1.0, 1.0, 4)


class TestTotalRate:
    def test_cases(self):
        assert total_rate_3d([(0, 0), (0, 0), (0, 0)]) == 0.0
        assert total_rate_3d([(1, 2), (3, 4), (5, 6)]) == 21.0
        assert total_rate_3d([(1.5, 2.5)]) == 4.0

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            total_rate_3d([(-1.0, 0.0)])


class TestVarDes:
    def test_zero_power_noise(self):
        p = DESParams(eta=2.8e-4, v0_at_atom=0.0, rel_power_var=0.0, temperature=5e-6)
        assert var_des(p, 1) == 0.0

    def test_order_scaling_at_dark_focus(self):
        p = DESParams(eta=2.8e-4, v0_at_atom=0.0, rel_power_var=1e-4, temperature=5e-6)
        assert var_des(p, 2) / var_des(p, 1) == pytest.approx(2 / 3, rel=1e-12)

    def test_cancellation_point(self):
        temperature, l = 5e-6, 1
        p = DESParams(
            eta=2.8e-4,
            v0_at_atom=k_B * temperature / (l + 1),
            rel_power_var=1e-4,
            temperature=temperature,
        )
        assert var_des(p, l) == pytest.approx(0.0, abs=1e-30)

    def test_signed_value_and_magnitude(self):
        p = DESParams(eta=2.8e-4, v0_at_atom=1e-26, rel_power_var=1e-4,
                      temperature=5e-6)
        signed = var_des_signed(p, 1)
        assert signed < 0  # deep potential dominates the thermal term
        assert var_des(p, 1) == -signed

    @settings(max_examples=30, deadline=None)
    @given(
        scale=st.floats(min_value=0.1, max_value=10.0),
        eta_scale=st.floats(min_value=0.1, max_value=10.0),
    )
    def test_linear_in_power_var_and_eta(self, scale, eta_scale):
        base = DESParams(eta=2.8e-4, v0_at_atom=0.0, rel_power_var=1e-4,
                         temperature=5e-6)
        scaled = DESParams(eta=2.8e-4 * eta_scale, v0_at_atom=0.0,
                           rel_power_var=1e-4 * scale, temperature=5e-6)
        assert var_des(scaled, 1) == pytest.approx(
            var_des(base, 1) * scale * eta_scale, rel=1e-12
        )


class TestT2Star:
    def test_inversion_recovers_eta(self):
        # published pair (10.2 ms, 5.8 uK) pins eta near 2.5e-4
        eta = 0.97 * 2 * hbar / (10.2e-3 * k_B * 5.8e-6)
        assert eta == pytest.approx(2.5e-4, rel=0.01)
        assert t2_star(eta, 5.8e-6) == pytest.approx(10.2e-3, rel=1e-12)

    def test_temperature_power_law(self):
        assert t2_star(2.8e-4, 10e-6) == pytest.approx(
            t2_star(2.8e-4, 5e-6) / 2, rel=1e-12
        )

    def test_cs_preset(self):
        t2 = t2_star(CS_CLOCK_ETA_780NM, 5.1e-6)
        assert t2 == pytest.approx(10.38e-3, rel=0.01)
        assert 10.1e-3 <= t2 <= 13.1e-3  # inside the published 11.6 +- 1.5 ms band

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            t2_star(0.0, 5e-6)


class TestCoherence:
    def test_unity_at_zero(self):
        assert coherence(CoherenceModel(var_des=3.0, r_total=2.0), 0.0) == 1.0

    def test_pure_exponential_1e_point(self):
        model = CoherenceModel(var_des=0.0, r_total=1 / 0.3147)
        assert coherence(model, 0.3147) == pytest.approx(1 / math.e, rel=1e-12)
        assert one_over_e_time(model) == pytest.approx(0.3147, rel=1e-12)

    def test_pure_gaussian_1e_time(self):
        model = CoherenceModel(var_des=4.0, r_total=0.0)
        t = one_over_e_time(model)
        assert t == pytest.approx(math.sqrt(2) / 4.0, rel=1e-12)
        assert coherence(model, t) == pytest.approx(1 / math.e, rel=1e-12)

    def test_mixed_1e_solves_envelope(self):
        model = CoherenceModel(var_des=2.5, r_total=1.7)
        t = one_over_e_time(model)
        assert coherence(model, t) == pytest.approx(1 / math.e, rel=1e-12)

    def test_infinite_when_no_decoherence(self):
        assert one_over_e_time(CoherenceModel(0.0, 0.0)) == math.inf

    @settings(max_examples=30, deadline=None)
    @given(
        v=st.floats(min_value=0.0, max_value=1e3),
        r=st.floats(min_value=0.0, max_value=1e3),
        t1=st.floats(min_value=0.0, max_value=10.0),
        dt=st.floats(min_value=0.0, max_value=10.0),
    )
    def test_monotone_nonincreasing(self, v, r, t1, dt):
        model = CoherenceModel(var_des=v, r_total=r)
        assert coherence(model, t1 + dt) <= coherence(model, t1) + 1e-15

    def test_log_curve_recovers_parameters(self):
        model = CoherenceModel(var_des=12.0, r_total=3.5)
        ts = np.linspace(1e-4, 0.3, 200)
        neg_log = -np.log(coherence(model, ts))
        design = np.column_stack([ts**2, ts])
        (a, b), *_ = np.linalg.lstsq(design, neg_log, rcond=None)
        assert math.sqrt(2 * a) == pytest.approx(model.var_des, rel=1e-3)
        assert b == pytest.approx(model.r_total, rel=1e-3)

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            coherence(CoherenceModel(1.0, 1.0), -1.0)


class TestThermalPhononNumber:
    def test_zero_temperature(self):
        assert thermal_phonon_number(0.0, 1e5) == 0.0

    def test_unity_point(self):
        omega = 1e5
        assert thermal_phonon_number(hbar * omega / k_B, omega) == pytest.approx(
            1.0, rel=1e-12
        )

    def test_cs_example(self):
        assert thermal_phonon_number(5.8e-6, 7.1e4) == pytest.approx(10.7, rel=0.01)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            thermal_phonon_number(-1e-6, 1e5)
        with pytest.raises(ValueError):
            thermal_phonon_number(1e-6, 0.0)
