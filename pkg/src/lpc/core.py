"""Training and evaluation of the Labels-Perturbed Classifier (LPC).

The LPC is a ridge regression on reweighted labels: with the pair
``rho = (rho_plus, rho_minus)`` the regression target of sample ``i`` is
``+lambda_plus`` when its (noisy) label is ``+1`` and ``-lambda_minus``
otherwise, where the ``lambda`` weights are derived from ``rho``.  The
weight vector solves

    (X X^T / n + gamma I) w = (1/n) X t.

``rho = (0, 0)`` gives the plain (naive) ridge classifier; training the
same on clean labels is the oracle variant.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import expit

from .datasets import LabeledDataset

__all__ = [
    "RhoParams",
    "Classifier",
    "train_lpc",
    "train_lpc_bce",
    "decision",
    "evaluate",
    "loo_decisions",
    "perturbed_bce_loss",
    "save_classifier",
    "load_classifier",
]

SINGULARITY_GUARD = 1e-8
_RESIDUAL_TOL = 1e-8
_LOO_DENOM_TOL = 1e-10


@dataclass(frozen=True)
class RhoParams:
    """Noise-handling parameter pair and its derived label weights.

    ``1 - rho_plus - rho_minus`` appears in every denominator, so the pair
    is rejected within ``SINGULARITY_GUARD`` of that singular line.
    """

    rho_plus: float = 0.0
    rho_minus: float = 0.0

    def __post_init__(self) -> None:
        if not np.isfinite(self.rho_plus) or not np.isfinite(self.rho_minus):
            raise ValueError("rho parameters must be finite")
        if abs(1.0 - self.rho_plus - self.rho_minus) <= SINGULARITY_GUARD:
            raise ValueError(
                f"rho_plus + rho_minus = {self.rho_plus + self.rho_minus} is too close "
                "to 1; the label weights are singular there"
            )

    @property
    def beta(self) -> float:
        return 1.0 / (1.0 - self.rho_plus - self.rho_minus)

    @property
    def lambda_minus(self) -> float:
        return (1.0 - self.rho_plus + self.rho_minus) * self.beta

    @property
    def lambda_plus(self) -> float:
        return (1.0 - self.rho_minus + self.rho_plus) * self.beta


@dataclass(frozen=True)
class Classifier:
    """Trained linear classifier: scores are ``w @ x`` (logits for bce)."""

    w: np.ndarray
    gamma: float
    rho: RhoParams
    loss_kind: str = "squared"
    n: int = 0
    p: int = 0

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=float).reshape(-1)
        if not np.all(np.isfinite(w)):
            raise ValueError("classifier weights must be finite")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "p", w.size)


def _targets(y_noisy: np.ndarray, rho: RhoParams) -> np.ndarray:
    # D_rho y: +lambda_plus on positive labels, -lambda_minus on negative ones
    return np.where(y_noisy == 1, rho.lambda_plus, -rho.lambda_minus)


def _gram_factor(X: np.ndarray, gamma: float):
    p, n = X.shape
    A = (X @ X.T) / n
    A[np.diag_indices_from(A)] += gamma
    return A, cho_factor(A, lower=True)


def train_lpc(ds: LabeledDataset, rho: RhoParams, gamma: float) -> Classifier:
    """Solve the reweighted ridge system for the training labels in ``ds``.

    Uses a Cholesky factorization of the (SPD) regularized Gram matrix;
    the normal-equation residual is verified to ``1e-8`` relative.
    """
    _check_training_inputs(ds, gamma)
    t = _targets(ds.y_noisy, rho)
    A, factor = _gram_factor(ds.X, gamma)
    rhs = ds.X @ t / ds.n
    w = cho_solve(factor, rhs)
    _check_residual(A, w, rhs)
    return Classifier(w=w, gamma=gamma, rho=rho, loss_kind="squared", n=ds.n, p=ds.p)


def _check_training_inputs(ds: LabeledDataset, gamma: float) -> None:
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0 (got {gamma}); the system may be singular")
    if not np.all(np.isfinite(ds.X)):
        raise ValueError("features contain non-finite values")


def _check_residual(A: np.ndarray, w: np.ndarray, rhs: np.ndarray) -> None:
    scale = float(np.linalg.norm(w))
    if scale == 0.0:
        return
    res = float(np.linalg.norm(A @ w - rhs))
    if res > _RESIDUAL_TOL * scale:
        raise FloatingPointError(
            f"normal-equation residual {res:.3e} exceeds {_RESIDUAL_TOL:.0e} * ||w||"
        )


def decision(c: Classifier, X_test: np.ndarray) -> np.ndarray:
    """Scores ``w @ x`` for each column of ``X_test``."""
    X_test = np.asarray(X_test, dtype=float)
    if X_test.ndim == 1:
        X_test = X_test[:, None]
    if X_test.shape[0] != c.p:
        raise ValueError(
            f"dimension mismatch: classifier expects p={c.p}, test data has p={X_test.shape[0]}"
        )
    return c.w @ X_test


def evaluate(c: Classifier, X_test: np.ndarray, y_test: np.ndarray) -> tuple[float, float]:
    """Accuracy (sign matches, with sign(0) = +1) and squared-error risk."""
    y_test = np.asarray(y_test)
    if y_test.size == 0:
        raise ValueError("empty test set")
    if not np.all(np.isin(y_test, (-1, 1))):
        raise ValueError("test labels must be -1 or +1")
    scores = decision(c, X_test)
    pred = np.where(scores >= 0, 1, -1)
    accuracy = float(np.mean(pred == y_test))
    risk = float(np.mean((scores - y_test) ** 2))
    return accuracy, risk


def loo_decisions(ds: LabeledDataset, rho: RhoParams, gamma: float) -> np.ndarray:
    """Leave-one-out decision values ``x_i @ w^{-i}`` for every sample.

    ``w^{-i}`` keeps the full-data ``1/n`` scaling, so it follows from the
    full solve by a rank-one downdate:

        s_i = (x_i @ w - c_i * d_i) / (1 - d_i),   d_i = x_i Q x_i / n,

    with ``c_i`` the regression target of sample ``i``.  One factorization
    serves all ``n`` indices.  Indices where the downdate denominator
    degenerates fall back to an explicit retrain.
    """
    _check_training_inputs(ds, gamma)
    if ds.n < 2:
        raise ValueError("loo_decisions needs n >= 2")
    X = ds.X
    t = _targets(ds.y_noisy, rho)
    A, factor = _gram_factor(X, gamma)
    w = cho_solve(factor, X @ t / ds.n)
    QX = cho_solve(factor, X)
    d = np.einsum("ij,ij->j", X, QX) / ds.n
    denom = 1.0 - d
    scores = (X.T @ w - t * d) / np.where(np.abs(denom) < _LOO_DENOM_TOL, np.nan, denom)

    bad = np.flatnonzero(~np.isfinite(scores))
    if bad.size:
        warnings.warn(
            f"loo downdate denominator degenerate for {bad.size} indices; retraining explicitly",
            stacklevel=2,
        )
        for i in bad:
            keep = np.arange(ds.n) != i
            Xi = X[:, keep]
            Ai = (Xi @ Xi.T) / ds.n
            Ai[np.diag_indices_from(Ai)] += gamma
            wi = np.linalg.solve(Ai, Xi @ t[keep] / ds.n)
            scores[i] = X[:, i] @ wi
    return scores


def _softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def perturbed_bce_loss(
    w: np.ndarray, X: np.ndarray, y01: np.ndarray, rho: RhoParams, gamma: float
) -> tuple[float, np.ndarray]:
    """Value and gradient of the reweighted BCE objective.

    ``y01`` holds labels in {0, 1} (1 = positive class).  Per sample the
    plain BCE terms are combined with weights that depend on the label:
    ``((1 - rho_opposite) * loss(own) - rho_own * loss(other)) * beta``,
    where ``rho_own`` is ``rho_plus`` for label 1 and ``rho_minus`` for
    label 0.  A ridge penalty ``gamma * ||w||^2`` is added.
    """
    with np.errstate(over="ignore"):  # overflow to inf triggers the halt path
        logits = w @ X
        loss_pos = _softplus(-logits)  # -log sigmoid(t)
        loss_neg = _softplus(logits)  # -log (1 - sigmoid(t))
        beta = rho.beta
        pos = y01 == 1
        w_own = np.where(pos, (1.0 - rho.rho_minus) * beta, (1.0 - rho.rho_plus) * beta)
        w_opp = np.where(pos, rho.rho_plus * beta, rho.rho_minus * beta)
        own = np.where(pos, loss_pos, loss_neg)
        opp = np.where(pos, loss_neg, loss_pos)
        value = float(np.mean(w_own * own - w_opp * opp)) + gamma * float(w @ w)

        s = expit(logits)
        # d/dt of loss_pos is s - 1, of loss_neg is s
        g_own = np.where(pos, s - 1.0, s)
        g_opp = np.where(pos, s, s - 1.0)
        coeff = w_own * g_own - w_opp * g_opp
        grad = X @ coeff / X.shape[1] + 2.0 * gamma * w
    return value, grad


def train_lpc_bce(
    ds: LabeledDataset,
    rho: RhoParams,
    learning_rate: float = 0.1,
    iters: int = 400,
    seed: int = 0,
    gamma: float = 1e-3,
) -> Classifier:
    """Full-batch gradient descent on the reweighted BCE loss, from ``w = 0``.

    Labels are remapped to {0, 1} with 1 = class 2 (noisy label ``+1``).
    Runs exactly ``iters`` steps unless the loss turns non-finite, in which
    case descent halts at the last finite iterate with a warning naming the
    step.  Deterministic; ``seed`` is accepted for interface symmetry with
    the stochastic trainers but unused by full-batch descent.
    """
    del seed
    _check_training_inputs(ds, gamma)
    if learning_rate <= 0:
        raise ValueError("learning_rate must be > 0")
    y01 = (ds.y_noisy == 1).astype(float)
    w = np.zeros(ds.p)
    for step in range(iters):
        value, grad = perturbed_bce_loss(w, ds.X, y01, rho, gamma)
        if not np.isfinite(value) or not np.all(np.isfinite(grad)):
            warnings.warn(
                f"bce descent halted at step {step}: non-finite loss; "
                "returning last finite iterate",
                stacklevel=2,
            )
            break
        w_next = w - learning_rate * grad
        if not np.all(np.isfinite(w_next)):
            warnings.warn(
                f"bce descent halted at step {step}: non-finite update; "
                "returning last finite iterate",
                stacklevel=2,
            )
            break
        w = w_next
    return Classifier(w=w, gamma=gamma, rho=rho, loss_kind="bce", n=ds.n, p=ds.p)


_FORMAT_TAG = "lpc-classifier-v1"


def save_classifier(c: Classifier, path) -> None:
    """Serialize as text: a version tag line, then ``p + 3`` numbers
    (gamma, rho_plus, rho_minus, w...)."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{_FORMAT_TAG} {c.loss_kind}\n")
        f.write(f"{float(c.gamma)!r}\n{float(c.rho.rho_plus)!r}\n{float(c.rho.rho_minus)!r}\n")
        for v in c.w:
            f.write(f"{float(v)!r}\n")


def load_classifier(path) -> Classifier:
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if not header or header[0] != _FORMAT_TAG:
            raise ValueError(f"{path}: not a {_FORMAT_TAG} file")
        loss_kind = header[1] if len(header) > 1 else "squared"
        values = [float(line) for line in f if line.strip()]
    if len(values) < 4:
        raise ValueError(f"{path}: truncated classifier file")
    gamma, rho_plus, rho_minus = values[:3]
    w = np.array(values[3:])
    return Classifier(
        w=w,
        gamma=gamma,
        rho=RhoParams(rho_plus, rho_minus),
        loss_kind=loss_kind,
        n=0,
        p=w.size,
    )
