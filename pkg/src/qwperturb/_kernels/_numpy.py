"""Vectorized numpy implementations of the hot kernels.

Each function here has a loop-form twin in ``_numba``; both must agree to
rounding (``tau1`` agrees bit-for-bit, the summation order is shared).
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=128)
def _round_robin(n):
    """Disjoint (p, q) index pairs covering every p < q once, n - 1 rounds."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p >= n or q >= n:
                continue
            if p > q:
                p, q = q, p
            ps.append(p)
            qs.append(q)
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigvalsh(a, tol=1e-14, max_sweeps=60):
    # Parallel-ordered Jacobi: every round applies n/2 commuting rotations at once.
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    if n == 1:
        return a.diagonal().copy()
    rounds = _round_robin(n)
    frob = np.sqrt(np.sum(a * a))
    eye = np.eye(n)
    for sweep in range(max_sweeps):
        off = a - np.diag(a.diagonal())
        if np.sqrt(np.sum(off * off)) <= tol * frob:
            break
        for p, q in rounds:
            apq = a[p, q]
            app = a[p, p]
            aqq = a[q, q]
            g = 100.0 * np.abs(apq)
            negligible = (np.abs(app) + g == np.abs(app)) & (np.abs(aqq) + g == np.abs(aqq))
            dropped = (apq != 0.0) & negligible & (sweep > 3)
            active = (apq != 0.0) & ~dropped
            a[p[dropped], q[dropped]] = 0.0
            a[q[dropped], p[dropped]] = 0.0
            if not active.any():
                continue
            theta = (aqq - app) / (2.0 * np.where(active, apq, 1.0))
            # hypot avoids overflow for huge theta; copysign makes theta == 0 rotate by pi/4.
            t = np.copysign(1.0, theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rot = eye.copy()
            rot[p, p] = c
            rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            a = rot.T @ a @ rot
            a[p, q] = 0.0
            a[q, p] = 0.0
        a = 0.5 * (a + a.T)
    return a.diagonal().copy()


def top_singular_value(e, tol=1e-12, max_iter=100_000):
    """Power iteration on ``E^T E`` by repeated squaring; returns ``(sigma, converged)``.

    Squaring doubles the power per step, so a Python loop of at most ~60 BLAS
    calls reaches the same exponent the loop kernel needs thousands of steps for.
    ``max_iter`` bounds the equivalent number of plain power steps.
    """
    e = np.asarray(e, dtype=np.float64)
    gram = e.T @ e
    g = gram.copy()
    power = 1
    while True:
        cols = np.sqrt(np.sum(g * g, axis=0))
        j = int(np.argmax(cols))
        if cols[j] == 0.0:
            return 0.0, True
        x = g[:, j] / cols[j]
        y = gram @ x
        rho = float(x @ y)
        r = y - rho * x
        if np.sqrt(r @ r) <= tol * max(rho, 1e-300):
            return float(np.sqrt(max(rho, 0.0))), True
        if power >= max_iter:
            return float(np.sqrt(max(rho, 0.0))), False
        g = g @ g
        g /= np.abs(g).max()
        power *= 2


def tau1(p):
    p = np.asarray(p, dtype=np.float64)
    n = p.shape[0]
    acc = np.zeros((n, n))
    for k in range(n):
        col = p[:, k]
        acc += np.abs(col[:, None] - col[None, :])
    return 0.5 * float(acc.max())


def stationary_power(p, x0, tol=1e-14, max_iter=10_000):
    """Left power iteration ``x <- x P``; returns ``(x, iterations, l1_residual)``."""
    p = np.asarray(p, dtype=np.float64)
    x = np.array(x0, dtype=np.float64, copy=True)
    x /= x.sum()
    res = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        y = x @ p
        y /= y.sum()
        res = float(np.abs(y - x).sum())
        x = y
        if res <= tol:
            break
    return x, it, float(np.abs(x @ p - x).sum())
