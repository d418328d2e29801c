"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The numba backend is used when numba imports cleanly, unless the environment
variable ``QWPERTURB_DISABLE_NUMBA`` is set to a truthy value (``1``, ``true``,
``yes``). The choice is made once at import time; ``BACKEND`` records it.
"""

import os

import numpy as np

from . import _numpy as numpy_backend

_disabled = os.environ.get("QWPERTURB_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

numba_backend = None
if not _disabled:
    try:
        from . import _numba as numba_backend
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba_backend = None

_impl = numba_backend if numba_backend is not None else numpy_backend
BACKEND = "numba" if numba_backend is not None else "numpy"


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def eigvalsh(a, tol=1e-14, max_sweeps=60):
    """Eigenvalues of a real symmetric matrix, sorted descending (cyclic Jacobi)."""
    a = _f64(a)
    if a.shape[0] == 0:
        return np.empty(0)
    return np.sort(_impl.jacobi_eigvalsh(a, tol, max_sweeps))[::-1].copy()


def top_singular_value(e, tol=1e-12, max_iter=100_000):
    e = _f64(e)
    if e.size == 0:
        return 0.0
    sigma, converged = _impl.top_singular_value(e, tol, max_iter)
    if not converged:
        # Near-degenerate top pair: the Rayleigh quotient stalls; solve E^T E exactly.
        lam = eigvalsh(e.T @ e)[0]
        sigma = np.sqrt(max(lam, 0.0))
    return float(sigma)


def tau1(p):
    p = _f64(p)
    if p.shape[0] < 2:
        return 0.0
    return float(_impl.tau1(p))


def stationary_power(p, x0, tol=1e-14, max_iter=10_000):
    x, it, res = _impl.stationary_power(_f64(p), _f64(x0), tol, max_iter)
    return np.asarray(x), int(it), float(res)
