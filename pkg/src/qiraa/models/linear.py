"""Linear models trained by (sub)gradient descent, plus closed-form ridge.

* softmax classification: cross-entropy + L2, SGD or full-batch gradient
  descent (the batch mode halves the step whenever a move would increase
  the loss, so the loss trace is non-increasing);
* linear SVM classification: one-vs-rest Pegasos on the hinge loss;
* ridge regression: closed form on standardized inputs;
* linear SVR: epsilon-insensitive subgradient descent.
"""

from __future__ import annotations

import numpy as np


def softmax_probs(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    e = np.exp(Z)
    return e / e.sum(axis=1, keepdims=True)


def softmax_loss_and_grad(W: np.ndarray, b: np.ndarray, X: np.ndarray,
                          Y: np.ndarray, lam: float):
    """Mean cross-entropy with L2 penalty on W (bias unpenalized).

    ``Y`` is the one-hot label matrix.  Returns (loss, grad_W, grad_b);
    used directly by the finite-difference gradient check.
    """
    n = X.shape[0]
    P = softmax_probs(X @ W.T + b)
    eps = 1e-300
    loss = -np.sum(Y * np.log(P + eps)) / n + 0.5 * lam * np.sum(W * W)
    D = (P - Y) / n
    grad_W = D.T @ X + lam * W
    grad_b = D.sum(axis=0)
    return loss, grad_W, grad_b


def fit_softmax(X: np.ndarray, y: np.ndarray, n_classes: int, epochs: int,
                lr: float, lam: float, mode: str,
                rng: np.random.Generator) -> dict:
    n, d = X.shape
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0
    W = np.zeros((n_classes, d))
    b = np.zeros(n_classes)
    loss_trace: list[float] = []

    if mode == "batch":
        step = lr
        loss, gW, gb = softmax_loss_and_grad(W, b, X, Y, lam)
        loss_trace.append(loss)
        for _ in range(epochs):
            for _attempt in range(40):
                W2 = W - step * gW
                b2 = b - step * gb
                new_loss, gW2, gb2 = softmax_loss_and_grad(W2, b2, X, Y, lam)
                if new_loss <= loss:
                    W, b, loss, gW, gb = W2, b2, new_loss, gW2, gb2
                    break
                step /= 2.0
            loss_trace.append(loss)
    else:
        t = 0
        for _ in range(epochs):
            order = rng.permutation(n)
            for i in order:
                t += 1
                eta = lr / (1.0 + lr * lam * t)
                z = W @ X[i] + b
                z -= z.max()
                p = np.exp(z)
                p /= p.sum()
                diff = p - Y[i]
                W -= eta * (np.outer(diff, X[i]) + lam * W)
                b -= eta * diff
            loss_trace.append(softmax_loss_and_grad(W, b, X, Y, lam)[0])

    return {"W": W, "b": b, "loss_trace": np.asarray(loss_trace)}


def softmax_scores(state: dict, X: np.ndarray) -> np.ndarray:
    return softmax_probs(X @ state["W"].T + state["b"])


def _pegasos_binary(X: np.ndarray, y_signed: np.ndarray, epochs: int,
                    lam: float, rng: np.random.Generator):
    """Primal Pegasos with an unregularized bias; returns (w, b)."""
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    t = 0
    for _ in range(epochs):
        order = rng.permutation(n)
        for i in order:
            t += 1
            eta = 1.0 / (lam * t)
            margin = y_signed[i] * (X[i] @ w + b)
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w += eta * y_signed[i] * X[i]
                b += eta * y_signed[i]
    return w, b


def fit_svm_linear(X: np.ndarray, y: np.ndarray, n_classes: int, epochs: int,
                   lam: float, rng: np.random.Generator) -> dict:
    """One-vs-rest linear SVM; each binary problem reuses a child generator
    so per-class training is independent of class count."""
    W = np.zeros((n_classes, X.shape[1]))
    b = np.zeros(n_classes)
    for c in range(n_classes):
        child = np.random.default_rng(rng.integers(0, 2**63 - 1))
        y_signed = np.where(y == c, 1.0, -1.0)
        W[c], b[c] = _pegasos_binary(X, y_signed, epochs, lam, child)
    return {"W": W, "b": b}


def svm_linear_scores(state: dict, X: np.ndarray) -> np.ndarray:
    return X @ state["W"].T + state["b"]


def fit_ridge(X: np.ndarray, y: np.ndarray, lam: float) -> dict:
    """Closed-form ridge on standardized X with centered target."""
    n, d = X.shape
    y_mean = float(y.mean())
    yc = y - y_mean
    A = X.T @ X / n + lam * np.eye(d)
    w = np.linalg.solve(A, X.T @ yc / n)
    return {"w": w, "intercept": y_mean}


def ridge_values(state: dict, X: np.ndarray) -> np.ndarray:
    return X @ state["w"] + state["intercept"]


def fit_svr_linear(X: np.ndarray, y: np.ndarray, epochs: int, lam: float,
                   epsilon: float, rng: np.random.Generator) -> dict:
    n, d = X.shape
    y_mean = float(y.mean())
    yc = y - y_mean
    w = np.zeros(d)
    b = 0.0
    t = 0
    for _ in range(epochs):
        order = rng.permutation(n)
        for i in order:
            t += 1
            eta = 1.0 / (lam * t)
            resid = yc[i] - (X[i] @ w + b)
            w *= 1.0 - eta * lam
            if resid > epsilon:
                w += eta * X[i]
                b += eta
            elif resid < -epsilon:
                w -= eta * X[i]
                b -= eta
    return {"w": w, "b": b, "intercept": y_mean}


def svr_linear_values(state: dict, X: np.ndarray) -> np.ndarray:
    return X @ state["w"] + state["b"] + state["intercept"]
