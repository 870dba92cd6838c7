"""RBF-kernel models trained by kernelized Pegasos-style subgradient descent.

The fitted state keeps the support rows of the (standardized) training
matrix together with their combined coefficients, so prediction is a single
kernel evaluation against the support set.
"""

from __future__ import annotations

import numpy as np


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (np.sum(A * A, axis=1)[:, None]
          + np.sum(B * B, axis=1)[None, :]
          - 2.0 * (A @ B.T))
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def resolve_gamma(gamma: float | None, n_features: int) -> float:
    # standardized features have unit variance, so 1/d is the "scale" default
    return gamma if gamma is not None else 1.0 / n_features


def _kernel_pegasos_binary(K: np.ndarray, y_signed: np.ndarray, epochs: int,
                           lam: float, rng: np.random.Generator) -> np.ndarray:
    """Returns combined coefficients c with f(x) = sum_j c_j K(x_j, x)."""
    n = K.shape[0]
    s = np.zeros(n)  # accumulates alpha_j * y_j
    t = 0
    for _ in range(epochs):
        order = rng.permutation(n)
        for i in order:
            t += 1
            margin = y_signed[i] * (K[i] @ s) / (lam * t)
            if margin < 1.0:
                s[i] += y_signed[i]
    return s / (lam * t)


def fit_svm_rbf(X: np.ndarray, y: np.ndarray, n_classes: int, epochs: int,
                lam: float, gamma: float | None,
                rng: np.random.Generator) -> dict:
    g = resolve_gamma(gamma, X.shape[1])
    K = rbf_kernel(X, X, g)
    coef = np.zeros((n_classes, X.shape[0]))
    for c in range(n_classes):
        child = np.random.default_rng(rng.integers(0, 2**63 - 1))
        y_signed = np.where(y == c, 1.0, -1.0)
        coef[c] = _kernel_pegasos_binary(K, y_signed, epochs, lam, child)

    support = np.nonzero(np.any(coef != 0.0, axis=0))[0]
    # contiguous copy: keeps BLAS on the same code path after a JSON round
    # trip, so serialized models predict bit-identically
    return {"support_X": X[support],
            "coef": np.ascontiguousarray(coef[:, support]), "gamma": g}


def svm_rbf_scores(state: dict, X: np.ndarray) -> np.ndarray:
    K = rbf_kernel(X, state["support_X"], state["gamma"])
    return K @ state["coef"].T


def fit_svr_rbf(X: np.ndarray, y: np.ndarray, epochs: int, lam: float,
                gamma: float | None, epsilon: float,
                rng: np.random.Generator) -> dict:
    g = resolve_gamma(gamma, X.shape[1])
    K = rbf_kernel(X, X, g)
    n = X.shape[0]
    y_mean = float(y.mean())
    yc = y - y_mean
    beta = np.zeros(n)
    t = 0
    for _ in range(epochs):
        order = rng.permutation(n)
        for i in order:
            t += 1
            pred = (K[i] @ beta) / (lam * t)
            resid = yc[i] - pred
            if resid > epsilon:
                beta[i] += 1.0
            elif resid < -epsilon:
                beta[i] -= 1.0
    coef = beta / (lam * t)
    support = np.nonzero(coef != 0.0)[0]
    return {"support_X": X[support], "coef": coef[support], "gamma": g,
            "intercept": y_mean}


def svr_rbf_values(state: dict, X: np.ndarray) -> np.ndarray:
    K = rbf_kernel(X, state["support_X"], state["gamma"])
    return K @ state["coef"] + state["intercept"]
