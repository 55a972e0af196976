"""Scalar bounded search (scipy) and a batched golden-section search."""
import math

import numpy as np
from scipy.optimize import minimize_scalar

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_max(fun, lo, hi, tol=1e-11, maxiter=200):
    """Maximize a unimodal ``fun`` on [lo, hi] with bounded Brent search.
    Returns (x, fun(x))."""
    a, b = float(lo), float(hi)
    if b - a <= tol:
        x = 0.5 * (a + b)
        return x, fun(x)
    res = minimize_scalar(lambda x: -fun(x), bounds=(a, b), method="bounded",
                          options={"xatol": tol * max(1.0, abs(a)), "maxiter": maxiter})
    x = float(res.x)
    return x, fun(x)


def golden_max_batch(fun, lo, hi, tol=1e-11, maxiter=200):
    """Vectorized golden section: ``fun`` maps an array of abscissae (one per
    problem) to an array of values.  Brackets shrink in lockstep."""
    a = np.array(lo, dtype=np.float64)
    b = np.array(hi, dtype=np.float64)
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    yc, yd = fun(c), fun(d)
    for _ in range(maxiter):
        if np.all(h <= tol * np.maximum(1.0, np.abs(a))):
            break
        left = yc >= yd
        # left: keep [a, d]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        h = INV_PHI * h
        new_c = a + INV_PHI2 * h
        new_d = a + INV_PHI * h
        nd_from_c = np.where(left, c, new_d)
        nc_from_d = np.where(left, new_c, d)
        y_keep = np.where(left, yc, yd)
        # one fresh evaluation per problem
        probe = np.where(left, new_c, new_d)
        yp = fun(probe)
        c = nc_from_d
        d = nd_from_c
        yc = np.where(left, yp, y_keep)
        yd = np.where(left, y_keep, yp)
    best = yc >= yd
    return np.where(best, c, d), np.where(best, yc, yd)


def ols_slope(x, y):
    """Least-squares slope, intercept and residual standard error."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = max(len(x) - 2, 1)
    se = math.sqrt(float(resid @ resid) / dof)
    return float(coef[0]), float(coef[1]), se
