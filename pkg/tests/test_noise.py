import numpy as np
import pytest

from lpc import (
    GmmSpec,
    LabeledDataset,
    RhoParams,
    derive_seed,
    empirical_second_moment,
    estimate_noise_rates,
    flip_labels,
    generate_gmm,
)
from lpc.core import _targets
from lpc.noise import solve_noise_system
from lpc.theory import isotropic_moments

PROBES = (RhoParams(0.0, 0.1), RhoParams(0.0, 0.4))


def _noisy(p, n, pi1, snr, eps, seed):
    ds = generate_gmm(GmmSpec.isotropic(p, n, pi1, snr, seed=derive_seed(seed, 0)))
    return flip_labels(ds, eps[0], eps[1], derive_seed(seed, 1))


class TestEmpiricalSecondMoment:
    def test_zero_features(self):
        ds = LabeledDataset(X=np.zeros((2, 6)), y_noisy=np.array([1, -1, 1, -1, 1, -1]))
        assert empirical_second_moment(ds, RhoParams(), 1.0) == 0.0

    def test_matches_brute_force_average(self):
        ds = _noisy(2, 6, 0.5, 1.2, (0.2, 0.1), seed=4)
        rho, gamma = RhoParams(0.1, 0.0), 0.6
        t = _targets(ds.y_noisy, rho)
        vals = []
        for i in range(ds.n):
            keep = np.arange(ds.n) != i
            Xi = ds.X[:, keep]
            A = Xi @ Xi.T / ds.n + gamma * np.eye(ds.p)
            wi = np.linalg.solve(A, Xi @ t[keep] / ds.n)
            vals.append((ds.X[:, i] @ wi) ** 2)
        assert empirical_second_moment(ds, rho, gamma) == pytest.approx(
            np.mean(vals), abs=1e-10
        )

    def test_tracks_theory_second_moment(self):
        # high-dimensional configuration: the loo moment approximates nu
        p, n, pi1, snr, gamma = 1000, 5000, 1 / 3, 2.0, 0.1
        ep, em = 0.4, 0.3
        vals = []
        for seed in range(3):
            ds = _noisy(p, n, pi1, snr, (ep, em), seed)
            vals.append(empirical_second_moment(ds, RhoParams(), gamma))
        _, nu, *_ = isotropic_moments(p / n, gamma, snr, pi1, ep, em, RhoParams())
        assert np.mean(vals) == pytest.approx(float(nu), rel=0.05)


class TestEstimateNoiseRates:
    def test_probes_must_differ(self):
        ds = _noisy(10, 40, 0.5, 1.0, (0.1, 0.1), seed=0)
        with pytest.raises(ValueError, match="distinct"):
            estimate_noise_rates(ds, PROBES[0], PROBES[0], 1.0, 1.0, 0.5)

    def test_input_validation(self):
        ds = _noisy(10, 40, 0.5, 1.0, (0.1, 0.1), seed=0)
        with pytest.raises(ValueError, match="snr"):
            estimate_noise_rates(ds, PROBES[0], PROBES[1], 1.0, 0.0, 0.5)
        with pytest.raises(ValueError, match="pi1"):
            estimate_noise_rates(ds, PROBES[0], PROBES[1], 1.0, 1.0, 1.0)

    def test_noiseless_recovery(self):
        hats = []
        for seed in range(5):
            ds = _noisy(100, 1000, 1 / 3, 2.0, (0.0, 0.0), seed)
            est = estimate_noise_rates(ds, PROBES[0], PROBES[1], 0.1, 2.0, 1 / 3)
            hats.append((est.eps_plus, est.eps_minus))
        hats = np.array(hats)
        assert np.all(np.abs(hats.mean(axis=0)) <= 0.03)

    def test_estimates_stay_on_simplex(self):
        for seed in range(6):
            ds = _noisy(80, 600, 0.4, 1.5, (0.45, 0.45), seed)
            est = estimate_noise_rates(ds, PROBES[0], PROBES[1], 0.1, 1.5, 0.4)
            assert est.eps_plus >= 0 and est.eps_minus >= 0
            assert est.eps_plus + est.eps_minus < 1.0
            assert np.isfinite(est.residual)

    def test_consistency_with_more_data(self):
        # fixed dimension ratio: the endpoint of the n-sweep improves on the
        # smallest size (strict per-step monotonicity is noise at 3 seeds)
        def mean_error(n):
            errs = []
            for seed in range(3):
                ds = _noisy(n // 10, n, 1 / 3, 2.0, (0.3, 0.2), 100 + seed)
                est = estimate_noise_rates(ds, PROBES[0], PROBES[1], 0.1, 2.0, 1 / 3)
                errs.append(abs(est.eps_plus - 0.3) + abs(est.eps_minus - 0.2))
            return float(np.mean(errs))

        sweep = {n: mean_error(n) for n in (250, 500, 1000, 2000)}
        assert sweep[2000] <= sweep[250], sweep


class TestForwardInverse:
    def test_exact_moment_inversion(self):
        # feeding exact theoretical moments must reproduce the noise rates
        eta, gamma, snr, pi1 = 0.1, 0.1, 2.0, 1 / 3
        rng = np.random.default_rng(0)
        checked = 0
        while checked < 50:
            ep, em = rng.uniform(0.0, 0.7, 2)
            if ep + em > 0.9:
                continue
            nu = np.array([
                float(isotropic_moments(eta, gamma, snr, pi1, ep, em, pr)[1])
                for pr in PROBES
            ])
            est = solve_noise_system(nu, eta, gamma, snr, pi1, PROBES)
            assert abs(est.eps_plus - ep) <= 1e-8
            assert abs(est.eps_minus - em) <= 1e-8
            assert est.residual <= 1e-10
            checked += 1

    def test_high_residual_flag(self):
        # moments that no simplex point can produce leave a large residual
        est = solve_noise_system(
            np.array([50.0, 0.01]), 0.1, 0.1, 2.0, 1 / 3, PROBES
        )
        assert est.high_residual
