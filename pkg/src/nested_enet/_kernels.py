"""Compiled inner loop of the damped thresholding iteration.

Two layouts: a precomputed Gram matrix when p <= n, and the transposed
design (p x n, rows contiguous) otherwise. Both skip zero coefficients when
forming ``X^T X beta``.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _gram_times(G, beta, out):
    p = beta.shape[0]
    for i in range(p):
        out[i] = 0.0
    for j in range(p):
        b = beta[j]
        if b != 0.0:
            for i in range(p):
                out[i] += b * G[j, i]


@njit(cache=True)
def _design_times(XT, beta, resid, out):
    # resid <- X beta, out <- X^T X beta
    p, n = XT.shape
    for i in range(n):
        resid[i] = 0.0
    for j in range(p):
        b = beta[j]
        if b != 0.0:
            for i in range(n):
                resid[i] += b * XT[j, i]
    for j in range(p):
        acc = 0.0
        for i in range(n):
            acc += XT[j, i] * resid[i]
        out[j] = acc


@njit(cache=True)
def _kkt(Xty, XtXb, beta, n, tau, mu):
    worst = 0.0
    for j in range(beta.shape[0]):
        corr = 2.0 / n * (Xty[j] - XtXb[j])
        if beta[j] != 0.0:
            s = 1.0 if beta[j] > 0 else -1.0
            r = abs(-corr + 2.0 * mu * beta[j] + tau * s)
        else:
            r = abs(corr) - tau
        if r > worst:
            worst = r
    return worst


@njit(cache=True)
def damped_iteration(M, gram, Xty, beta, C, tau, mu, n, rtol, kkt_tol, max_iter):
    """Iterate in place on ``beta``; returns (iterations, converged, kkt).

    Iterations is -1 when a non-finite value appeared.

    ``M`` is ``X^T X`` when ``gram`` is True, else ``X^T`` (p x n).
    """
    p = beta.shape[0]
    half_threshold = n * tau / C / 2.0
    damping = 1.0 / (1.0 + n * mu / C)
    XtXb = np.empty(p)
    resid = np.empty(M.shape[1])
    new = np.empty(p)
    for l in range(1, max_iter + 1):
        if gram:
            _gram_times(M, beta, XtXb)
        else:
            _design_times(M, beta, resid, XtXb)
        steady = True
        bound = rtol / l
        # rounding-level moves (e.g. 0 <-> 1e-17 flips) do not block the stop
        floor = 0.0
        for j in range(p):
            if abs(beta[j]) > floor:
                floor = abs(beta[j])
        floor *= 1e-13
        for j in range(p):
            v = beta[j] + (Xty[j] - XtXb[j]) / C
            a = abs(v) - half_threshold
            if a >= 0.0:
                w = damping * (a if v >= 0 else -a)
            else:
                w = 0.0
            if not np.isfinite(w):
                return -1, False, np.inf
            if abs(w - beta[j]) > bound * abs(beta[j]) and abs(w - beta[j]) > floor:
                steady = False
            new[j] = w
        for j in range(p):
            beta[j] = new[j]
        if steady:
            if gram:
                _gram_times(M, beta, XtXb)
            else:
                _design_times(M, beta, resid, XtXb)
            kkt = _kkt(Xty, XtXb, beta, n, tau, mu)
            if kkt <= kkt_tol:
                return l, True, kkt
    if gram:
        _gram_times(M, beta, XtXb)
    else:
        _design_times(M, beta, resid, XtXb)
    return max_iter, False, _kkt(Xty, XtXb, beta, n, tau, mu)
