"""Tests for coupled trajectories and dependence-decay estimation."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from polyfreq.dependence import (
    check_summability,
    coupled_paths,
    deltas_to_csv,
    estimate_delta,
    estimate_delta_profile,
    simulate_coupled,
)
from polyfreq.models import (
    ArmaModel,
    LinearProcess,
    ModelValidityError,
    NlarModel,
    TarModel,
    make_rng,
)

AR1 = ArmaModel(ar=(0.5,))
SQRT2 = math.sqrt(2.0)


class TestCoupledConstruction:
    def test_lag_zero_difference_is_innovation_gap(self):
        # the two trajectories branch through the time-0 innovation only,
        # so swapping it must exchange the paths exactly
        pair = simulate_coupled(TarModel(0.6, -0.3), 0, seed=5)
        swapped = simulate_coupled(TarModel(0.6, -0.3), 0, seed=5, swap_innovations=True)
        assert pair.path[0] != pair.coupled_path[0]
        assert pair.path[0] == swapped.coupled_path[0]
        assert pair.coupled_path[0] == swapped.path[0]

    @pytest.mark.parametrize(
        "model",
        [AR1, LinearProcess(coeffs=(1.0, 0.5, 0.25)), TarModel(0.6, -0.3)],
    )
    def test_swap_exchanges_roles_exactly(self, model):
        pair = simulate_coupled(model, 6, seed=17)
        swapped = simulate_coupled(model, 6, seed=17, swap_innovations=True)
        assert_array_equal(pair.path, swapped.coupled_path)
        assert_array_equal(pair.coupled_path, swapped.path)

    def test_linear_process_exact_cancellation(self):
        # every shared innovation term cancels, leaving coeff[k] times the
        # time-0 innovation gap (up to accumulation rounding)
        order = 19
        lp = LinearProcess(coeffs=tuple(0.5**j for j in range(order + 1)))
        pair = simulate_coupled(lp, 10, seed=5)
        buf = make_rng(5).standard_normal(order + 10 + 2)
        gap = buf[order] - buf[order + 1]
        for k in range(11):
            expected = 0.5**k * gap
            assert pair.difference(k) == pytest.approx(expected, rel=1e-10)

    def test_arma_difference_follows_ma_coefficients(self):
        # for ARMA the difference sequence is beta_k times the innovation gap
        model = ArmaModel(ar=(0.5,), ma=(0.2,))
        pair = simulate_coupled(model, 8, seed=23)
        gap = pair.difference(0)
        beta = [1.0, 0.7, 0.35, 0.175, 0.0875]
        for k, bk in enumerate(beta):
            assert pair.difference(k) == pytest.approx(bk * gap, rel=1e-9)

    def test_tar_degenerate_no_propagation(self):
        a, b = coupled_paths(TarModel(0.0, 0.0), 5, list(range(50)))
        assert np.all(a[:, 0] != b[:, 0])
        assert_array_equal(a[:, 1:], b[:, 1:])

    def test_lag_extensible_prefix(self):
        short = simulate_coupled(AR1, 3, seed=9)
        long = simulate_coupled(AR1, 9, seed=9)
        assert_array_equal(short.path, long.path[:4])
        assert_array_equal(short.coupled_path, long.coupled_path[:4])

    def test_negative_lag_rejected(self):
        with pytest.raises(ValueError, match="lag"):
            simulate_coupled(AR1, -1)

    def test_invalid_model_rejected(self):
        with pytest.raises(ModelValidityError):
            simulate_coupled(ArmaModel(ar=(1.5,)), 2)

    def test_nlar_family_supported(self):
        model = NlarModel(transition=lambda x: 0.4 * np.tanh(np.asarray(x)), lipschitz_bound=0.4)
        pair = simulate_coupled(model, 4, seed=2)
        diffs = np.abs(pair.path - pair.coupled_path)
        assert np.all(diffs[1:] <= 0.4 * diffs[:-1] + 1e-12)


class TestEstimateDelta:
    def test_lag_zero_is_scaled_innovation_std(self):
        d = estimate_delta(AR1, 0, 4000, seed=1)
        assert abs(d.delta_hat - SQRT2) < 3 * d.std_error

    def test_ar1_matches_exact_geometry(self):
        d = estimate_delta(AR1, 3, 4000, seed=1)
        assert abs(d.delta_hat - 0.5**3 * SQRT2) < 3 * d.std_error

    def test_profile_consistent_with_single_lag(self):
        profile = estimate_delta_profile(AR1, 5, 300, seed=8)
        assert profile[3] == estimate_delta(AR1, 3, 300, seed=8)

    def test_replication_floor(self):
        with pytest.raises(ValueError, match="100"):
            estimate_delta(AR1, 1, 50)

    def test_exact_zero_lags_have_zero_error(self):
        profile = estimate_delta_profile(TarModel(0.0, 0.0), 3, 200, seed=2)
        for d in profile[1:]:
            assert d.delta_hat == 0.0
            assert d.std_error == 0.0

    def test_pathwise_contraction_small(self):
        a, b = coupled_paths(TarModel(0.6, -0.3), 10, list(range(500)))
        d = np.abs(a - b)
        slack = (1.0 + np.abs(a[:, 1:]) + np.abs(b[:, 1:]) + np.abs(a[:, :-1]) + np.abs(b[:, :-1])) * 2.0**-48
        assert np.all(d[:, 1:] <= 0.6 * d[:, :-1] + slack)


class TestSummability:
    def test_ar1_slope_recovers_log_half(self):
        profile = estimate_delta_profile(AR1, 8, 4000, seed=12)
        report = check_summability(profile, 0.5)
        assert report.conclusive
        assert report.slope == pytest.approx(math.log(0.5), abs=0.05)
        assert report.decay_ok
        # exact sum of 0.5^k sqrt(2) over all k is 2 sqrt(2)
        assert report.certificate_total == pytest.approx(2.0 * SQRT2, rel=0.02)

    def test_tar_decay_bounded_by_contraction(self):
        model = TarModel(0.6, -0.3)
        profile = estimate_delta_profile(model, 10, 4000, seed=13)
        report = check_summability(profile, 0.6)
        assert report.slope is not None
        assert report.slope <= math.log(0.6) + 0.05
        d0 = profile[0]
        for d in profile:
            slack = 1.0 + 4.0 * d.std_error / max(d.delta_hat, 1e-300)
            assert d.delta_hat <= d0.delta_hat * 0.6**d.lag * slack

    def test_iid_inconclusive_with_clean_certificate(self):
        profile = estimate_delta_profile(TarModel(0.0, 0.0), 5, 300, seed=3)
        report = check_summability(profile, 0.0)
        assert not report.conclusive
        assert report.slope is None
        assert report.certificate_total == pytest.approx(profile[0].delta_hat)
        assert report.tail_bound == 0.0

    def test_noise_floor_lags_excluded(self):
        profile = estimate_delta_profile(AR1, 8, 4000, seed=12)
        # push every lag beyond 2 under the floor artificially
        doctored = [
            d if d.lag <= 2 else type(d)(d.lag, d.delta_hat, d.delta_hat, d.replications)
            for d in profile
        ]
        report = check_summability(doctored, 0.5)
        assert max(report.used_lags) == 2

    def test_input_validation(self):
        profile = estimate_delta_profile(AR1, 3, 200, seed=1)
        with pytest.raises(ValueError, match="consecutive"):
            check_summability(profile[1:], 0.5)
        with pytest.raises(ValueError, match="contraction"):
            check_summability(profile, 1.0)

    def test_csv_serialization(self):
        profile = estimate_delta_profile(AR1, 2, 200, seed=1)
        text = deltas_to_csv(profile)
        lines = text.strip().split("\n")
        assert lines[0] == "k,delta_hat,std_error,replications"
        assert len(lines) == 4
        k, dh, se, reps = lines[1].split(",")
        assert (int(k), int(reps)) == (0, 200)
        assert float(dh) == profile[0].delta_hat  # 17 digits round-trip
