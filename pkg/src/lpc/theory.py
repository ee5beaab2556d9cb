"""Closed-form asymptotic statistics of the LPC decision function.

In the proportional regime ``p/n -> eta`` the decision value ``w @ x`` on a
fresh test point from class ``a`` is asymptotically Gaussian with mean
``(-1)^a * m_rho`` and second moment ``nu_rho``.  This module computes those
limits, the predicted accuracy/risk they imply, the closed-form optimal and
worst-case ``rho_plus``, and the general-covariance extension.

Everything here is a pure function of scalar (or matrix) inputs; these are
the reference values that the Monte Carlo experiments are validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .core import SINGULARITY_GUARD, RhoParams

__all__ = [
    "TheoryConfig",
    "TheoryStats",
    "delta",
    "gaussian_upper_tail",
    "theory_stats_isotropic",
    "theory_stats_general",
    "predict_accuracy_risk",
    "optimal_rho_plus",
    "worst_rho_plus",
]

_H_GUARD = 1e-6
_FIXED_POINT_TOL = 1e-12
_FIXED_POINT_MAX_ITERS = 10_000
_FIXED_POINT_DAMPING = 0.5


def delta(eta: float, gamma: float) -> float:
    """Nonnegative root of ``gamma d^2 + (1 + gamma - eta) d - eta = 0``.

    This is the normalized trace of the deterministic equivalent of the
    ridge resolvent; it captures the high-dimensional bias (``delta -> 0``
    as ``eta -> 0``).
    """
    if eta <= 0 or gamma <= 0:
        raise ValueError(f"delta needs eta > 0 and gamma > 0, got ({eta}, {gamma})")
    b = eta - gamma - 1.0
    disc = math.sqrt(b * b + 4.0 * eta * gamma)
    if b >= 0:
        return (b + disc) / (2.0 * gamma)
    # avoid cancellation between b and the discriminant
    return 2.0 * eta / (disc - b)


def gaussian_upper_tail(x):
    """Standard normal upper-tail probability ``P(Z > x)``."""
    return 0.5 * erfc(x / math.sqrt(2.0))


@dataclass(frozen=True)
class TheoryConfig:
    """Inputs of the asymptotic formulas.

    For the isotropic path give ``snr = ||mu||``.  For the general path give
    the mean direction ``mu`` and the two covariance matrices instead.
    """

    eta: float
    pi1: float
    gamma: float
    eps_plus: float = 0.0
    eps_minus: float = 0.0
    rho: RhoParams = RhoParams()
    snr: float | None = None
    mu: np.ndarray | None = None
    C1: np.ndarray | None = None
    C2: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.eta <= 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not 0.0 < self.pi1 < 1.0:
            raise ValueError(f"pi1 must lie in (0, 1), got {self.pi1}")
        if self.eps_plus + self.eps_minus >= 1.0:
            raise ValueError("eps_plus + eps_minus must be < 1")
        general = self.mu is not None or self.C1 is not None or self.C2 is not None
        if general and (self.mu is None or self.C1 is None or self.C2 is None):
            raise ValueError("general-covariance config needs mu, C1 and C2 together")
        if not general and self.snr is None:
            raise ValueError("config needs either snr or (mu, C1, C2)")

    @property
    def pi2(self) -> float:
        return 1.0 - self.pi1


@dataclass(frozen=True)
class TheoryStats:
    """Asymptotic statistics for one configuration.

    Class 1 decision values center at ``-m_rho``, class 2 at ``+m_rho``
    (``m_rho`` itself can be negative past the singular parameter line);
    ``nu_rho`` is the common second moment.  ``kappa`` is the
    mean-direction part of the oracle second moment (isotropic path only).
    ``delta2`` is set on the general path, where the two covariances have
    separate trace fixed points.
    """

    delta: float
    h: float
    m_rho: float
    nu_rho: float
    kappa: float | None
    m_oracle: float
    nu_oracle: float
    accuracy: float
    risk: float
    delta2: float | None = None

    @property
    def variance(self) -> float:
        return self.nu_rho - self.m_rho**2


def _label_weights(rho: RhoParams, eps_plus, eps_minus):
    """Per-class effective label weights after averaging over flips.

    Returns ``(A, B)`` with ``A`` the class-1 weight ``lambda_minus -
    2 beta eps_minus`` and ``B`` the class-2 analogue.  Broadcasts over
    array-valued noise rates.
    """
    beta = rho.beta
    A = rho.lambda_minus - 2.0 * beta * np.asarray(eps_minus)
    B = rho.lambda_plus - 2.0 * beta * np.asarray(eps_plus)
    return A, B


def _diag_weights(rho: RhoParams, eps_plus, eps_minus):
    """Second-moment label weights ``E[target^2]`` per class."""
    beta2 = rho.beta**2
    gap = rho.rho_plus - rho.rho_minus
    d1 = 4.0 * beta2 * np.asarray(eps_minus) * gap + rho.lambda_minus**2
    d2 = -4.0 * beta2 * np.asarray(eps_plus) * gap + rho.lambda_plus**2
    return d1, d2


def isotropic_moments(eta, gamma, snr, pi1, eps_plus, eps_minus, rho: RhoParams):
    """Decision mean and second moment ``(m, nu)`` for the isotropic model.

    Broadcasts over array-valued ``eps_plus``/``eps_minus`` (used by the
    noise-rate estimator's grid scan).
    """
    d = delta(eta, gamma)
    gd = gamma * (1.0 + d)
    h = 1.0 - eta / (1.0 + gd) ** 2
    if h <= _H_GUARD:
        raise ValueError(
            f"theory outside validity range: h = {h:.3e} <= 0 at (eta, gamma) = ({eta}, {gamma})"
        )
    s2 = float(snr) ** 2
    D = s2 + 1.0 + gd
    pi2 = 1.0 - pi1
    A, B = _label_weights(rho, eps_plus, eps_minus)
    S = pi1 * A + pi2 * B
    m = S * s2 / D
    kappa = ((s2 + 1.0) / D - 2.0 * (1.0 - h)) * s2 / (h * D)
    d1, d2 = _diag_weights(rho, eps_plus, eps_minus)
    nu = S**2 * kappa + (1.0 - h) / h * (pi1 * d1 + pi2 * d2)
    return m, nu, d, h, kappa


def theory_stats_isotropic(cfg: TheoryConfig) -> TheoryStats:
    """Full asymptotic statistics for an isotropic configuration."""
    if cfg.snr is None:
        raise ValueError("theory_stats_isotropic needs cfg.snr")
    m, nu, d, h, kappa = isotropic_moments(
        cfg.eta, cfg.gamma, cfg.snr, cfg.pi1, cfg.eps_plus, cfg.eps_minus, cfg.rho
    )
    gd = cfg.gamma * (1.0 + d)
    m_oracle = cfg.snr**2 / (cfg.snr**2 + 1.0 + gd)
    nu_oracle = kappa + (1.0 - h) / h
    accuracy, risk = _accuracy_risk(float(m), float(nu))
    return TheoryStats(
        delta=d,
        h=h,
        m_rho=float(m),
        nu_rho=float(nu),
        kappa=float(kappa),
        m_oracle=m_oracle,
        nu_oracle=nu_oracle,
        accuracy=accuracy,
        risk=risk,
    )


def _accuracy_risk(m: float, nu: float) -> tuple[float, float]:
    var = nu - m * m
    if var <= 0:
        raise ValueError(f"non-positive decision variance {var:.3e}")
    accuracy = 1.0 - float(gaussian_upper_tail(abs(m) / math.sqrt(var)))
    risk = 1.0 - 2.0 * m + nu
    return accuracy, risk


def predict_accuracy_risk(stats: TheoryStats) -> tuple[float, float]:
    """Asymptotic test accuracy and risk implied by ``(m_rho, nu_rho)``.

    The sign of the asymptotic mean is known in closed form, so the decision
    rule is taken as ``sign(m_rho) * sign(w @ x)`` and the accuracy reads
    ``1 - Phi(|m| / sqrt(nu - m^2))`` with ``Phi`` the upper tail.  For
    ``rho`` pairs with ``rho_plus + rho_minus < 1`` the mean is positive at
    any sub-random-guess noise level, so this reduces to the plain sign
    rule.  The risk ``1 - 2 m + nu`` is that of the raw ridge regressor.
    """
    return _accuracy_risk(stats.m_rho, stats.nu_rho)


def optimal_rho_plus(
    pi1: float, eps_plus: float, eps_minus: float, rho_minus: float = 0.0
) -> float:
    """``rho_plus`` maximizing the asymptotic accuracy at fixed ``rho_minus``.

    Depends only on the class proportions and the noise rates, not on the
    SNR, the regularization or the dimension ratio.
    """
    if not 0.0 < pi1 < 1.0:
        raise ValueError(f"pi1 must lie in (0, 1), got {pi1}")
    denom = 1.0 - eps_plus - eps_minus
    if abs(denom) <= SINGULARITY_GUARD:
        raise ValueError("eps_plus + eps_minus = 1 makes the optimum singular")
    pi2 = 1.0 - pi1
    num = pi1**2 * eps_minus * (eps_minus - 1.0) + pi2**2 * eps_plus * (1.0 - eps_plus)
    return num / (pi1 * pi2 * denom) + rho_minus


def worst_rho_plus(
    pi1: float, eps_plus: float, eps_minus: float, rho_minus: float = 0.0
) -> float:
    """``rho_plus`` at which the decision mean vanishes (random-guess point)."""
    if abs(pi1 - 0.5) <= 1e-12:
        raise ValueError(
            "pi1 = 1/2: the decision mean has no root in rho_plus (balanced classes)"
        )
    pi2 = 1.0 - pi1
    return (1.0 - 2.0 * pi1 * eps_minus - 2.0 * pi2 * eps_plus) / (2.0 * pi1 - 1.0) + rho_minus


def _check_sym_psd(name: str, M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.T)) > 1e-10 * scale:
        raise ValueError(f"{name} is not symmetric")
    vals = np.linalg.eigvalsh(M)
    if vals[0] < -1e-10 * scale:
        raise ValueError(f"{name} is not PSD: smallest eigenvalue {vals[0]:.3e}")
    return M


def _general_fixed_point(
    C1: np.ndarray, C2: np.ndarray, pi1: float, gamma: float, eta: float
) -> tuple[float, float]:
    """Damped fixed point for the per-class trace pair ``(delta_1, delta_2)``.

    The iteration runs on the mean-free resolvent: the rank-one mean
    contribution to a normalized trace is O(1/n) and dropping it makes the
    identity-covariance case reduce exactly to the scalar ``delta``.
    """
    p = C1.shape[0]
    pi2 = 1.0 - pi1
    eye = np.eye(p)
    d1 = d2 = 0.0
    for _ in range(_FIXED_POINT_MAX_ITERS):
        Q0 = np.linalg.inv(pi1 * C1 / (1.0 + d1) + pi2 * C2 / (1.0 + d2) + gamma * eye)
        f1 = eta / p * float(np.trace(C1 @ Q0))
        f2 = eta / p * float(np.trace(C2 @ Q0))
        residual = max(abs(f1 - d1), abs(f2 - d2))
        d1 = (1.0 - _FIXED_POINT_DAMPING) * d1 + _FIXED_POINT_DAMPING * f1
        d2 = (1.0 - _FIXED_POINT_DAMPING) * d2 + _FIXED_POINT_DAMPING * f2
        if residual < _FIXED_POINT_TOL:
            return d1, d2
    raise RuntimeError(
        f"trace fixed point did not converge in {_FIXED_POINT_MAX_ITERS} iterations; "
        f"last residual {residual:.3e}"
    )


def theory_stats_general(cfg: TheoryConfig, test_class: int = 2) -> TheoryStats:
    """Asymptotic statistics under per-class covariances ``C1, C2``.

    ``test_class`` selects the class of the test point (its second moment
    enters the variance).  All normalized traces are evaluated without the
    rank-one mean term, so with ``C1 = C2 = I`` the result coincides with
    :func:`theory_stats_isotropic` to solver tolerance.
    """
    if cfg.mu is None or cfg.C1 is None or cfg.C2 is None:
        raise ValueError("theory_stats_general needs cfg.mu, cfg.C1 and cfg.C2")
    if test_class not in (1, 2):
        raise ValueError(f"test_class must be 1 or 2, got {test_class}")
    mu = np.asarray(cfg.mu, dtype=float).reshape(-1)
    C1 = _check_sym_psd("C1", cfg.C1)
    C2 = _check_sym_psd("C2", cfg.C2)
    p = mu.size
    if C1.shape != (p, p) or C2.shape != (p, p):
        raise ValueError("covariance shapes must match len(mu)")
    pi1, pi2, gamma, eta = cfg.pi1, cfg.pi2, cfg.gamma, cfg.eta

    d1, d2 = _general_fixed_point(C1, C2, pi1, gamma, eta)
    eye = np.eye(p)
    Q0 = np.linalg.inv(pi1 * C1 / (1.0 + d1) + pi2 * C2 / (1.0 + d2) + gamma * eye)
    S1 = np.outer(mu, mu) + C1
    S2 = np.outer(mu, mu) + C2
    Qbar = np.linalg.inv(pi1 * S1 / (1.0 + d1) + pi2 * S2 / (1.0 + d2) + gamma * eye)

    mu_Q_mu = float(mu @ Qbar @ mu)
    N = [Qbar @ S1 @ Qbar, Qbar @ S2 @ Qbar]
    mu_N_mu = [float(mu @ Nb @ mu) for Nb in N]
    N0 = [Q0 @ C1 @ Q0, Q0 @ C2 @ Q0]
    # tr[k][b] approximates Tr(Sigma_k Qbar Sigma_b Qbar) by its mean-free part
    tr = [[float(np.trace(Ck @ Nb)) for Nb in N0] for Ck in (C1, C2)]
    c = [eta / p * pi1 / (1.0 + d1) ** 2, eta / p * pi2 / (1.0 + d2) ** 2]
    G = np.array(
        [[c[0] * tr[0][0], c[1] * tr[1][0]], [c[0] * tr[0][1], c[1] * tr[1][1]]]
    )
    h_like = float(np.linalg.det(np.eye(2) - G))
    if h_like <= _H_GUARD:
        raise ValueError(
            f"theory outside validity range: det(I - G) = {h_like:.3e} at "
            f"(eta, gamma) = ({eta}, {gamma})"
        )
    alpha = np.linalg.inv(np.eye(2) - G)[test_class - 1]
    mu_M_mu = alpha[0] * mu_N_mu[0] + alpha[1] * mu_N_mu[1]
    # T_b = (1/n) Tr(Sigma_b E[Q Sigma_a Q]), mean-free
    T = [eta / p * (alpha[0] * tr[b][0] + alpha[1] * tr[b][1]) for b in (0, 1)]

    def moments(rho: RhoParams, eps_plus: float, eps_minus: float) -> tuple[float, float]:
        A, B = _label_weights(rho, eps_plus, eps_minus)
        a1 = pi1 * float(A) / (1.0 + d1)
        a2 = pi2 * float(B) / (1.0 + d2)
        S = a1 + a2
        m = S * mu_Q_mu
        w1, w2 = _diag_weights(rho, eps_plus, eps_minus)
        nu = (
            S**2 * mu_M_mu
            - 2.0 * S * (T[0] / (1.0 + d1) * a1 + T[1] / (1.0 + d2) * a2) * mu_Q_mu
            + pi1 * float(w1) * T[0] / (1.0 + d1) ** 2
            + pi2 * float(w2) * T[1] / (1.0 + d2) ** 2
        )
        return m, nu

    m, nu = moments(cfg.rho, cfg.eps_plus, cfg.eps_minus)
    m_oracle, nu_oracle = moments(RhoParams(), 0.0, 0.0)
    accuracy, risk = _accuracy_risk(m, nu)
    return TheoryStats(
        delta=d1,
        h=h_like,
        m_rho=m,
        nu_rho=nu,
        kappa=None,
        m_oracle=m_oracle,
        nu_oracle=nu_oracle,
        accuracy=accuracy,
        risk=risk,
        delta2=d2,
    )
