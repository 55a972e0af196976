"""Hot numeric kernels.

Each kernel has a numba ``@njit`` implementation and a pure-numpy twin with
the same signature.  The numba path is used when numba imports cleanly and
the environment variable ``BSLSPACES_PURE_NUMPY`` is unset or ``0``.
"""
import os

import numpy as np

_WANT_NUMPY = os.environ.get("BSLSPACES_PURE_NUMPY", "0") not in ("", "0", "false", "no")

try:
    if _WANT_NUMPY:
        raise ImportError("pure numpy requested")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# pure numpy
# ---------------------------------------------------------------------------

def log_moments_np(logw, logabs, ps, edge):
    """log sum_i exp(logw_i + p*logabs_i) for every p, plus the same sum
    restricted to the ``edge`` nodes.  Zero values carry logabs = -inf."""
    ps = np.asarray(ps, dtype=np.float64)
    live = np.isfinite(logabs)
    lw = logw[live]
    la = logabs[live]
    ed = edge[live]
    if lw.size == 0:
        full = np.full(ps.shape, -np.inf)
        return full, full.copy()
    terms = lw[None, :] + ps[:, None] * la[None, :]
    top = terms.max(axis=1)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        s = np.exp(terms - safe[:, None])
        total = safe + np.log(s.sum(axis=1))
        if ed.any():
            e = s[:, ed].sum(axis=1)
            with np.errstate(divide="ignore"):
                tail = safe + np.log(e)
        else:
            tail = np.full(ps.shape, -np.inf)
    total = np.where(np.isfinite(top), total, top)
    return total, tail


def norms_and_gradients_np(w, y, ps):
    """Weighted p-norms N_j(y) = (sum w y^p)^(1/p) of a nonnegative vector and
    the rows dN_j/dy.  Rows are zero where N_j(y) == 0."""
    ps = np.asarray(ps, dtype=np.float64)
    ymax = y.max()
    m = ps.size
    if ymax <= 0.0:
        return np.zeros(m), np.zeros((m, y.size))
    z = y / ymax
    with np.errstate(divide="ignore"):
        logz = np.log(z)
    pw = np.exp(ps[:, None] * logz[None, :])          # z^p
    sums = (w[None, :] * pw).sum(axis=1)
    norms = ymax * sums ** (1.0 / ps)
    # dN/dy_i = w_i y_i^(p-1) N^(1-p) = w_i (z_i / (N/ymax))^(p-1)
    scaled = norms / ymax
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.exp((ps[:, None] - 1.0) * (logz[None, :] - np.log(scaled)[:, None]))
    grads = w[None, :] * np.where(z[None, :] > 0, ratio, 0.0)
    return norms, grads


# ---------------------------------------------------------------------------
# numba
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, fastmath=False)
    def _log_moments_nb(logw, logabs, ps, edge):
        m = ps.size
        n = logw.size
        total = np.empty(m)
        tail = np.empty(m)
        for j in range(m):
            p = ps[j]
            top = -np.inf
            for i in range(n):
                if np.isfinite(logabs[i]):
                    t = logw[i] + p * logabs[i]
                    if t > top:
                        top = t
            if not np.isfinite(top):
                total[j] = top
                tail[j] = -np.inf
                continue
            s = 0.0
            e = 0.0
            for i in range(n):
                if np.isfinite(logabs[i]):
                    v = np.exp(logw[i] + p * logabs[i] - top)
                    s += v
                    if edge[i]:
                        e += v
            total[j] = top + np.log(s)
            tail[j] = top + np.log(e) if e > 0.0 else -np.inf
        return total, tail

    @njit(cache=True, fastmath=False)
    def _norms_and_gradients_nb(w, y, ps):
        m = ps.size
        n = y.size
        norms = np.zeros(m)
        grads = np.zeros((m, n))
        ymax = 0.0
        for i in range(n):
            if y[i] > ymax:
                ymax = y[i]
        if ymax <= 0.0:
            return norms, grads
        for j in range(m):
            p = ps[j]
            s = 0.0
            for i in range(n):
                if y[i] > 0.0:
                    s += w[i] * (y[i] / ymax) ** p
            scaled = s ** (1.0 / p)
            norms[j] = ymax * scaled
            for i in range(n):
                if y[i] > 0.0:
                    grads[j, i] = w[i] * ((y[i] / ymax) / scaled) ** (p - 1.0)
        return norms, grads

    def log_moments(logw, logabs, ps, edge):
        ps = np.ascontiguousarray(np.atleast_1d(np.asarray(ps, dtype=np.float64)))
        return _log_moments_nb(logw, logabs, ps, edge)

    def norms_and_gradients(w, y, ps):
        ps = np.ascontiguousarray(np.atleast_1d(np.asarray(ps, dtype=np.float64)))
        return _norms_and_gradients_nb(w, np.ascontiguousarray(y, dtype=np.float64), ps)

    BACKEND = "numba"
else:
    def log_moments(logw, logabs, ps, edge):
        return log_moments_np(logw, logabs, np.atleast_1d(ps), edge)

    def norms_and_gradients(w, y, ps):
        return norms_and_gradients_np(w, np.asarray(y, dtype=np.float64), np.atleast_1d(ps))

    BACKEND = "numpy"
