"""Kernel SVM trained with an SMO-type dual solver, one-vs-rest for multiclass."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TAU = 1e-12


def kernel_matrix(A: np.ndarray, B: np.ndarray, kernel: str, gamma: float) -> np.ndarray:
    if kernel == "linear":
        return A @ B.T
    if kernel == "rbf":
        sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * (A @ B.T)
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-gamma * sq)
    raise ValueError(f"unknown kernel {kernel!r}")


@dataclass
class DualSolution:
    alpha: np.ndarray
    rho: float
    iterations: int
    converged: bool
    gap: float


def smo_solve(
    K: np.ndarray,
    y: np.ndarray,
    C: np.ndarray,
    tol: float = 1e-3,
    max_iter: int = 200_000,
) -> DualSolution:
    """Solve the C-SVC dual with second-order working-set selection.

    Minimises ``0.5 a'Qa - e'a`` subject to ``y'a = 0`` and ``0 <= a_i <= C_i``
    where ``Q_ij = y_i y_j K_ij``.  Stops when the maximal KKT violation
    ``m(a) - M(a)`` drops below ``tol``.
    """
    y = np.asarray(y, dtype=np.float64)
    C = np.broadcast_to(np.asarray(C, dtype=np.float64), y.shape).copy()
    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    diag = np.diag(K).copy()
    pos = y > 0
    it = 0
    gap = np.inf
    converged = False
    while it < max_iter:
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        score = -y * grad
        up_scores = np.where(up, score, -np.inf)
        i = int(np.argmax(up_scores))
        m_val = up_scores[i]
        low_scores = np.where(low, score, np.inf)
        M_val = low_scores.min()
        gap = m_val - M_val
        if gap < tol:
            converged = True
            break
        b = m_val - score
        cand = low & (b > 0)
        a = diag[i] + diag - 2.0 * K[i]
        a = np.where(a > 0, a, TAU)
        obj = np.where(cand, -(b * b) / a, np.inf)
        j = int(np.argmin(obj))

        yi, yj = y[i], y[j]
        Ci, Cj = C[i], C[j]
        Qij = yi * yj * K[i, j]
        ai_old, aj_old = alpha[i], alpha[j]
        ai, aj = ai_old, aj_old
        if yi != yj:
            quad = diag[i] + diag[j] + 2.0 * Qij
            if quad <= 0:
                quad = TAU
            delta = (-grad[i] - grad[j]) / quad
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0:
                if aj < 0:
                    aj = 0.0
                    ai = diff
            else:
                if ai < 0:
                    ai = 0.0
                    aj = -diff
            if diff > Ci - Cj:
                if ai > Ci:
                    ai = Ci
                    aj = Ci - diff
            else:
                if aj > Cj:
                    aj = Cj
                    ai = Cj + diff
        else:
            quad = diag[i] + diag[j] - 2.0 * Qij
            if quad <= 0:
                quad = TAU
            delta = (grad[i] - grad[j]) / quad
            total = ai + aj
            ai -= delta
            aj += delta
            if total > Ci:
                if ai > Ci:
                    ai = Ci
                    aj = total - Ci
            else:
                if aj < 0:
                    aj = 0.0
                    ai = total
            if total > Cj:
                if aj > Cj:
                    aj = Cj
                    ai = total - Cj
            else:
                if ai < 0:
                    ai = 0.0
                    aj = total
        d_i = ai - ai_old
        d_j = aj - aj_old
        alpha[i] = ai
        alpha[j] = aj
        grad += y * (yi * d_i * K[:, i] + yj * d_j * K[:, j])
        it += 1

    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yg[free].mean())
    else:
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        ub = yg[low].min() if low.any() else np.inf
        lb = yg[up].max() if up.any() else -np.inf
        rho = float((ub + lb) / 2) if np.isfinite(ub + lb) else 0.0
    return DualSolution(alpha=alpha, rho=rho, iterations=it, converged=converged, gap=float(gap))


def resolve_gamma(gamma, X: np.ndarray) -> float:
    if gamma == "scale":
        var = X.var()
        return 1.0 / (X.shape[1] * var) if var > 0 else 1.0
    return float(gamma)


@dataclass
class BinarySvm:
    support: np.ndarray  # support vector coordinates
    coef: np.ndarray  # alpha_i * y_i for each support vector
    support_index: np.ndarray  # indices into the training matrix
    rho: float
    kernel: str
    gamma: float
    converged: bool

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        if len(self.coef) == 0:
            return np.full(len(X), -self.rho)
        return kernel_matrix(np.asarray(X, float), self.support, self.kernel, self.gamma) @ self.coef - self.rho


def fit_binary(
    X: np.ndarray,
    y_pm: np.ndarray,
    C: float | np.ndarray = 1.0,
    kernel: str = "linear",
    gamma="scale",
    tol: float = 1e-3,
    max_iter: int = 200_000,
    K: np.ndarray | None = None,
) -> BinarySvm:
    """Train a two-class SVM on labels in {-1, +1}."""
    X = np.asarray(X, dtype=np.float64)
    g = resolve_gamma(gamma, X)
    if K is None:
        K = kernel_matrix(X, X, kernel, g)
    sol = smo_solve(K, y_pm, C, tol=tol, max_iter=max_iter)
    sv = np.flatnonzero(sol.alpha > 0)
    return BinarySvm(
        support=X[sv],
        coef=sol.alpha[sv] * np.asarray(y_pm, float)[sv],
        support_index=sv,
        rho=sol.rho,
        kernel=kernel,
        gamma=g,
        converged=sol.converged,
    )


def fit_one_vs_rest(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    C: float,
    kernel: str,
    gamma,
    sample_weight: np.ndarray | None = None,
    tol: float = 1e-3,
    max_iter: int = 200_000,
) -> list[BinarySvm]:
    X = np.asarray(X, dtype=np.float64)
    g = resolve_gamma(gamma, X)
    K = kernel_matrix(X, X, kernel, g)
    Ci = C * (np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, float))
    models = []
    for c in range(n_classes):
        y_pm = np.where(y == c, 1.0, -1.0)
        models.append(fit_binary(X, y_pm, Ci, kernel, g, tol=tol, max_iter=max_iter, K=K))
    return models
