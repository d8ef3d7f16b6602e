"""Information values, both weight families, thresholds, and verdicts."""
import math

import numpy as np
import pytest

from eitats.fitter import FitConfig
from eitats.lineshape import Spectrum, TlaParams, absorption_profile, default_grid
from eitats.models import AtsParams, eval_ats
from eitats.selection import (
    Verdict,
    aic_least_squares,
    akaike_weights,
    discriminate,
    eit_threshold,
    noise_threshold,
    per_point_weights,
)
from eitats.simulation import NoiseSpec, add_noise


class TestInformationValue:
    def test_unit_variance(self):
        assert aic_least_squares(ssr=100.0, n=100, k=3) == pytest.approx(6.0, abs=1e-12)

    def test_e_squared_variance(self):
        n = 57
        assert aic_least_squares(ssr=n * math.e**2, n=n, k=4) == pytest.approx(2 * n + 8, rel=1e-12)

    def test_zero_ssr_rejected(self):
        with pytest.raises(ValueError, match="floor"):
            aic_least_squares(0.0, 10, 3)

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            aic_least_squares(1.0, 0, 3)
        with pytest.raises(ValueError):
            aic_least_squares(1.0, 10, -1)


class TestWeights:
    def test_equal_information_splits_evenly(self):
        assert np.allclose(akaike_weights([3.7, 3.7]), [0.5, 0.5], atol=1e-15)

    def test_two_model_closed_form(self):
        w = akaike_weights([1.0, 3.0])
        expected = 1.0 / (1.0 + math.exp(-1.0))
        assert w[0] == pytest.approx(expected, rel=1e-12)
        assert w[1] == pytest.approx(1.0 - expected, rel=1e-12)

    def test_normalization(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            vals = rng.uniform(-500, 500, size=rng.integers(2, 6))
            assert abs(akaike_weights(vals).sum() - 1.0) <= 1e-12
            assert abs(per_point_weights(vals, 201).sum() - 1.0) <= 1e-12

    def test_shift_invariance(self):
        rng = np.random.default_rng(42)
        vals = rng.uniform(-50, 50, size=4)
        shifted = vals + 123.456
        assert np.max(np.abs(akaike_weights(vals) - akaike_weights(shifted))) <= 1e-12
        assert np.max(np.abs(per_point_weights(vals, 77) - per_point_weights(shifted, 77))) <= 1e-12

    def test_monotonicity(self):
        w0 = akaike_weights([10.0, 12.0, 14.0])
        w1 = akaike_weights([9.0, 12.0, 14.0])
        assert w1[0] > w0[0]

    def test_huge_information_gap_stays_finite(self):
        w = akaike_weights([0.0, 2000.0])
        assert w[0] == 1.0
        assert w[1] == 0.0

    def test_per_point_equal_split(self):
        assert np.allclose(per_point_weights([5.0, 5.0], 100), [0.5, 0.5], atol=1e-15)

    def test_binarization_vs_per_point_saturation(self):
        # Fixed variance ratio (close to 1 so the growth is visible):
        # plain weights binarize with n; per-point weights approach the
        # square-root-of-variance-ratio split.
        s1, s2, k1, k2 = 1.0, 1.02, 4, 3
        limit = math.sqrt(s2 / s1)
        gaps, ratios = [], []
        for n in (100, 1000, 10000):
            i1 = aic_least_squares(n * s1, n, k1)
            i2 = aic_least_squares(n * s2, n, k2)
            w = akaike_weights([i1, i2])
            gaps.append(w[0])
            ratios.append(math.exp(-(i1 - i2) / (2 * n)))
        assert gaps[0] < gaps[1] < gaps[2]
        assert gaps[2] > 1.0 - 1e-12
        errs = [abs(r - limit) for r in ratios]
        assert errs[0] > errs[1] > errs[2]
        w_limit = limit / (1.0 + limit)
        wp = per_point_weights([aic_least_squares(10000 * s1, 10000, k1),
                                aic_least_squares(10000 * s2, 10000, k2)], 10000)
        assert wp[0] == pytest.approx(w_limit, rel=1e-3)

    def test_per_point_ratio_convergence(self):
        s1, s2, k1, k2 = 0.5, 1.0, 4, 3
        limit = math.sqrt(s2 / s1)
        errs = []
        for n in (201, 2001, 20001):
            i1 = aic_least_squares(n * s1, n, k1)
            i2 = aic_least_squares(n * s2, n, k2)
            ratio = math.exp(-(i1 - i2) / (2 * n))
            errs.append(abs(ratio - limit))
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-3 * limit


class TestThresholds:
    def test_eit_threshold_reference_value(self):
        assert eit_threshold(1.0, 0.1) == pytest.approx(0.45, abs=1e-15)

    def test_eit_threshold_equal_rates(self):
        assert eit_threshold(1.0, 1.0) == 0.0

    def test_eit_threshold_circuit_rates(self):
        assert eit_threshold(7.2, 6.912) == pytest.approx(0.144, abs=1e-12)
        assert eit_threshold(7.2, 6.912) == pytest.approx(0.15, abs=0.01)

    def test_eit_threshold_domain(self):
        with pytest.raises(ValueError, match="undefined"):
            eit_threshold(1.0, 1.5)

    def test_noise_threshold_values(self):
        assert noise_threshold(1.0, 0.1, 0.0) == 0.0
        assert noise_threshold(1.0, 0.1, 0.1) == pytest.approx(math.sqrt(0.025), abs=1e-12)
        assert noise_threshold(1.0, 0.1, 0.01) == pytest.approx(0.045175395145262566, rel=1e-12)

    def test_noise_threshold_domain(self):
        with pytest.raises(ValueError, match="sigma"):
            noise_threshold(1.0, 0.1, 0.5)
        with pytest.raises(ValueError, match="sigma"):
            noise_threshold(1.0, 0.1, -0.01)


class TestDiscriminate:
    def test_weak_pump_verdict(self):
        data = absorption_profile(TlaParams(omega=0.2, gamma_ab=1.0, gamma_bc=0.1), default_grid())
        report = discriminate(data)
        assert report.verdict is Verdict.EIT
        assert report.per_point_weights["ats"] < 0.5
        assert report.aic["eit"] < report.aic["ats"]

    def test_strong_pump_verdict(self):
        data = absorption_profile(TlaParams(omega=3.0, gamma_ab=1.0, gamma_bc=0.1), default_grid())
        report = discriminate(data)
        assert report.verdict is Verdict.ATS
        assert report.aic["ats"] < report.aic["eit"]

    def test_noisy_weak_pump_is_inconclusive(self):
        data = absorption_profile(TlaParams(omega=0.0, gamma_ab=1.0, gamma_bc=0.1), default_grid())
        noisy = add_noise(data, NoiseSpec(sigma=0.1, seed=0), 0)
        report = discriminate(noisy)
        assert report.verdict is Verdict.INCONCLUSIVE
        assert report.per_point_weights["eit"] == pytest.approx(0.5, abs=report.inconclusive_margin)
        assert report.per_point_weights["ats"] == pytest.approx(0.5, abs=report.inconclusive_margin)

    def test_weight_vectors_normalized(self):
        data = absorption_profile(TlaParams(omega=0.7), default_grid())
        report = discriminate(data)
        assert abs(sum(report.akaike_weights.values()) - 1.0) <= 1e-12
        assert abs(sum(report.per_point_weights.values()) - 1.0) <= 1e-12

    def test_plain_weights_saturate_on_either_side_of_the_crossing(self):
        # Noiseless 201-point profiles: total certainty for the signed
        # pair up to pump 0.8, for the doublet from 0.9 on.
        for omega in (0.5, 0.8):
            data = absorption_profile(TlaParams(omega=omega, gamma_ab=1.0, gamma_bc=0.1), default_grid())
            report = discriminate(data)
            assert report.akaike_weights["eit"] == pytest.approx(1.0, abs=1e-6), omega
        for omega in (0.9, 1.2):
            data = absorption_profile(TlaParams(omega=omega, gamma_ab=1.0, gamma_bc=0.1), default_grid())
            report = discriminate(data)
            assert report.akaike_weights["ats"] == pytest.approx(1.0, abs=1e-6), omega

    def test_survivor_wins_when_one_model_cannot_fit(self):
        # Four points: enough for the 3-parameter doublet, too few for the
        # 4-parameter signed pair.
        grid = np.linspace(-2, 2, 4)
        data = Spectrum(deltas=grid, values=eval_ats(AtsParams(0.8, 1.0, 1.0), grid))
        report = discriminate(data)
        assert report.verdict is Verdict.ATS
        assert "eit" in report.fit_failures
        assert report.akaike_weights["eit"] is None
        assert report.per_point_weights["ats"] == 1.0

    def test_exact_fit_is_floored_not_infinite(self):
        grid = default_grid()
        data = Spectrum(deltas=grid, values=eval_ats(AtsParams(0.5, 1.0, 2.0), grid))
        report = discriminate(data)
        assert np.isfinite(report.aic["ats"])
        assert report.verdict is Verdict.ATS
        assert report.akaike_weights["ats"] == pytest.approx(1.0, abs=1e-12)

    def test_margin_validation(self):
        data = absorption_profile(TlaParams(omega=0.5), default_grid())
        with pytest.raises(ValueError, match="margin"):
            discriminate(data, margin=1.5)

    def test_custom_margin_changes_verdict(self):
        data = absorption_profile(TlaParams(omega=0.8, gamma_ab=1.0, gamma_bc=0.1), default_grid())
        cfg = FitConfig()
        strict = discriminate(data, cfg, margin=0.0001)
        lax = discriminate(data, cfg, margin=0.999)
        assert strict.verdict in (Verdict.EIT, Verdict.ATS)
        assert lax.verdict is Verdict.INCONCLUSIVE
