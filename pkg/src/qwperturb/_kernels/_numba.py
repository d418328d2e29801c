"""Loop-form kernels compiled with numba. Mirrors ``_numpy`` function by function."""

import numba as nb
import numpy as np


@nb.njit(cache=True)
def jacobi_eigvalsh(a, tol=1e-14, max_sweeps=60):
    a = a.copy()
    n = a.shape[0]
    frob = 0.0
    for i in range(n):
        for j in range(n):
            frob += a[i, j] * a[i, j]
    frob = np.sqrt(frob)
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if np.sqrt(2.0 * off) <= tol * frob:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                g = 100.0 * abs(apq)
                if sweep > 3 and abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                elif theta == 0.0:
                    t = 1.0
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
    out = np.empty(n)
    for i in range(n):
        out[i] = a[i, i]
    return out


@nb.njit(cache=True)
def top_singular_value(e, tol=1e-12, max_iter=100_000):
    n = e.shape[1]
    m = e.shape[0]
    gram = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(m):
                s += e[k, i] * e[k, j]
            gram[i, j] = s
    best = -1.0
    jbest = 0
    for j in range(n):
        s = 0.0
        for i in range(n):
            s += gram[i, j] * gram[i, j]
        s = np.sqrt(s)
        if s > best:
            best = s
            jbest = j
    if best == 0.0:
        return 0.0, True
    x = np.empty(n)
    for i in range(n):
        x[i] = gram[i, jbest] / best
    y = np.empty(n)
    rho = 0.0
    for _ in range(max_iter):
        for i in range(n):
            s = 0.0
            for j in range(n):
                s += gram[i, j] * x[j]
            y[i] = s
        rho = 0.0
        for i in range(n):
            rho += x[i] * y[i]
        rr = 0.0
        ny = 0.0
        for i in range(n):
            d = y[i] - rho * x[i]
            rr += d * d
            ny += y[i] * y[i]
        if np.sqrt(rr) <= tol * max(rho, 1e-300):
            return np.sqrt(max(rho, 0.0)), True
        ny = np.sqrt(ny)
        for i in range(n):
            x[i] = y[i] / ny
    return np.sqrt(max(rho, 0.0)), False


@nb.njit(cache=True)
def tau1(p):
    n = p.shape[0]
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for k in range(n):
                s += abs(p[i, k] - p[j, k])
            if s > best:
                best = s
    return 0.5 * best


@nb.njit(cache=True)
def stationary_power(p, x0, tol=1e-14, max_iter=10_000):
    n = p.shape[0]
    x = x0 / x0.sum()
    y = np.empty(n)
    it = 0
    for it in range(1, max_iter + 1):
        total = 0.0
        for j in range(n):
            s = 0.0
            for i in range(n):
                s += x[i] * p[i, j]
            y[j] = s
            total += s
        res = 0.0
        for j in range(n):
            y[j] /= total
            res += abs(y[j] - x[j])
        x, y = y, x
        if res <= tol:
            break
    res = 0.0
    for j in range(n):
        s = 0.0
        for i in range(n):
            s += x[i] * p[i, j]
        res += abs(s - x[j])
    return x, it, res
