"""Independent reference solvers used only by the tests."""

import numpy as np


def coordinate_descent(X, y, tau, mu, tol=1e-14, max_sweeps=200_000):
    """Cyclic coordinate descent on (1/n)||y - Xb||^2 + mu||b||^2 + tau||b||_1."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    b = np.zeros(p)
    r = y.copy()
    sq = (X**2).sum(axis=0)
    for _ in range(max_sweeps):
        largest = 0.0
        for j in range(p):
            if sq[j] == 0:
                continue
            rho = X[:, j] @ r + sq[j] * b[j]
            # minimize (1/n)(sq b^2 - 2 rho b) + mu b^2 + tau |b|
            new = np.sign(rho) * max(abs(rho) - n * tau / 2, 0.0) / (sq[j] + n * mu)
            if new != b[j]:
                r -= X[:, j] * (new - b[j])
                largest = max(largest, abs(new - b[j]))
                b[j] = new
        if largest <= tol * max(1.0, np.abs(b).max()):
            break
    return b


def ridge_closed_form(X, y, mu):
    n, p = X.shape
    return np.linalg.solve(X.T @ X + n * mu * np.eye(p), X.T @ y)


def brute_force_rejection(scores, labels):
    """Narrowest interval [a, b] with a <= 0 <= b, endpoints drawn from the
    scores and 0, that covers every misclassified sample."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=float)
    pred = np.where(s >= 0, 1.0, -1.0)
    wrong = pred != y
    candidates = np.unique(np.concatenate([s, [0.0]]))
    best = None
    for a in candidates[candidates <= 0]:
        for b in candidates[candidates >= 0]:
            inside = (s >= a) & (s <= b)
            if np.all(inside[wrong]) and (best is None or b - a < best[1] - best[0]):
                best = (a, b)
    return best
