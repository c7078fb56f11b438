"""Propagation oracle checks against closed-form fiber physics."""

import numpy as np
import numpy.testing as npt

from optwin.phys import (
    AmplifierSpec,
    FiberSpec,
    OpticalField,
    edfa_amplify,
    mean_power_dbm,
    mean_power_w,
    ssfm_propagate,
)


def gaussian_field(t0_s=30e-12, n=4096, dt=0.25e-12):
    t = (np.arange(n) - n / 2) * dt
    return OpticalField(np.exp(-(t**2) / (2 * t0_s**2)).astype(complex), dt), t


def nmse(a, b):
    return float(np.sum(np.abs(a - b) ** 2) / np.sum(np.abs(b) ** 2))


def rms_width(samples, t):
    p = np.abs(samples) ** 2
    m = np.sum(t * p) / np.sum(p)
    return float(np.sqrt(np.sum((t - m) ** 2 * p) / np.sum(p)))


class TestSsfm:
    def test_zero_length_identity_bit_exact(self):
        field, _ = gaussian_field()
        out = ssfm_propagate(field, FiberSpec(length_km=0.0))
        npt.assert_array_equal(out.samples, field.samples)

    def test_attenuation_only_80km_is_minus_16db(self):
        field, _ = gaussian_field()
        fiber = FiberSpec(80.0, 0.2, 0.0, 0.0)
        out = ssfm_propagate(field, fiber, step_km=0.1)
        drop = mean_power_dbm(out) - mean_power_dbm(field)
        assert abs(drop + 16.0) < 1e-6

    def test_gaussian_dispersion_broadening_matches_analytic(self):
        # RMS width ratio sqrt(1 + (beta2*L/T0^2)^2), lossless linear fiber
        t0 = 30e-12
        field, t = gaussian_field(t0)
        fiber = FiberSpec(80.0, 0.0, -21.7, 0.0)
        out = ssfm_propagate(field, fiber, step_km=1.0)
        ratio = rms_width(out.samples, t) / rms_width(field.samples, t)
        analytic = np.sqrt(1.0 + (21.7e-24 * 80.0 / t0**2) ** 2)
        assert abs(ratio / analytic - 1.0) < 0.005

    def test_lossless_linear_energy_conserved(self):
        field, _ = gaussian_field()
        fiber = FiberSpec(80.0, 0.0, -21.7, 0.0)
        out = ssfm_propagate(field, fiber, step_km=0.1)
        e0 = np.sum(np.abs(field.samples) ** 2)
        e1 = np.sum(np.abs(out.samples) ** 2)
        assert abs(e1 / e0 - 1.0) < 1e-9

    def test_linear_semigroup_property(self):
        field, _ = gaussian_field()
        fiber_a = FiberSpec(30.0, 0.2, -21.7, 0.0)
        fiber_b = FiberSpec(50.0, 0.2, -21.7, 0.0)
        fiber_ab = FiberSpec(80.0, 0.2, -21.7, 0.0)
        via = ssfm_propagate(ssfm_propagate(field, fiber_a), fiber_b)
        direct = ssfm_propagate(field, fiber_ab)
        assert nmse(via.samples, direct.samples) < 1e-9

    def test_nonlinear_step_convergence(self):
        # halving the step changes the 80 km nonlinear output by < 1e-4 NMSE
        field, _ = gaussian_field()
        field = OpticalField(field.samples * np.sqrt(5e-3), field.dt)  # ~4 mW peak
        fiber = FiberSpec(80.0, 0.2, -21.7, 1.3)
        coarse = ssfm_propagate(field, fiber, step_km=0.2)
        fine = ssfm_propagate(field, fiber, step_km=0.1)
        assert nmse(coarse.samples, fine.samples) < 1e-4

    def test_partial_last_step_taken_without_error(self):
        field, _ = gaussian_field()
        fiber = FiberSpec(0.75, 0.2, -21.7, 0.0)
        out = ssfm_propagate(field, fiber, step_km=0.2)  # 3 full + 0.15 partial
        drop = mean_power_dbm(out) - mean_power_dbm(field)
        npt.assert_allclose(drop, -0.15, atol=1e-9)


class TestEdfa:
    def test_unity_gain_no_noise_is_identity(self):
        field, _ = gaussian_field()
        amp = AmplifierSpec(gain_db=0.0, noise_figure_db=3.0)
        out = edfa_amplify(field, amp, seed=1, add_noise=False)
        npt.assert_array_equal(out.samples, field.samples)

    def test_gain_restores_span_loss(self):
        field, _ = gaussian_field()
        scaled = OpticalField(field.samples * 10 ** (-16.0 / 20.0), field.dt)
        out = edfa_amplify(scaled, AmplifierSpec(16.0, 5.0), seed=3)
        restored = mean_power_w(out) / mean_power_w(field)
        assert abs(10 * np.log10(restored)) < 0.05

    def test_seed_determinism_and_variation(self):
        field, _ = gaussian_field()
        amp = AmplifierSpec(16.0, 5.0)
        a = edfa_amplify(field, amp, seed=11)
        b = edfa_amplify(field, amp, seed=11)
        c = edfa_amplify(field, amp, seed=12)
        npt.assert_array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)
        assert abs(mean_power_dbm(a) - mean_power_dbm(c)) < 0.05
