"""Dilation norms and Boyd-type indices of G(psi) and SL(psi) on the half-line."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._optim import ols_slope
from .fundamental import log_phi_grand

LOG10_RANGE = (-400.0, 400.0)
LOG10_STEP = 0.5
SMALL_S = np.arange(-6.0, -1.99, 0.5)     # log10 s for s -> 0+
LARGE_S = np.arange(2.0, 6.01, 0.5)       # log10 s for s -> inf
FIT_RESIDUAL_MAX = 0.05


@dataclass
class DilationEstimate:
    s: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    slope: float
    intercept: float
    residual: float
    diagnostics: dict = field(default_factory=dict)


class _PhiTable:
    """log phi(G(psi), delta) on a log10-delta grid with step LOG10_STEP."""

    def __init__(self, psi, lo=LOG10_RANGE[0], hi=LOG10_RANGE[1], step=LOG10_STEP):
        self.step = step
        self.k = np.arange(round(lo / step), round(hi / step) + 1)
        self.log10 = self.k * step
        self.logphi, _ = log_phi_grand(psi, self.log10 * math.log(10.0))

    def shift(self, log10_s):
        """Pairs (log phi(delta), log phi(s delta)) over deltas where both are tabulated."""
        j = int(round(log10_s / self.step))
        if abs(j * self.step - log10_s) > 1e-9:
            raise ValueError("s must be a power of 10 on the table step")
        if j >= 0:
            return self.logphi[: self.logphi.size - j], self.logphi[j:]
        return self.logphi[-j:], self.logphi[: self.logphi.size + j]


def _envelope(psi, s):
    s = np.asarray(s, dtype=np.float64)
    inv_b = 0.0 if math.isinf(psi.b) else 1.0 / psi.b
    return np.where(s < 1, s ** inv_b, s ** (1.0 / psi.a))


def dilation_norm_bounds(psi, s, table=None):
    """(lower, upper) for the dilation sigma_s f(x) = f(x/s) on G(psi).

    lower: max over indicators I([0, delta]) of phi(s delta) / phi(delta);
    upper: sup_p s^(1/p), i.e. s^(1/b) for s < 1 and s^(1/a) for s > 1.
    ``s`` must be a power of ten on the table step.
    """
    tab = table or _PhiTable(psi)
    l10 = math.log10(s)
    base, shifted = tab.shift(l10)
    lower = float(np.exp(np.max(shifted - base)))
    return lower, float(_envelope(psi, s))


def _fit(log10_s, log_lower, upper, lower):
    x = np.asarray(log10_s) * math.log(10.0)
    slope, icpt, res = ols_slope(x, log_lower)
    return slope, icpt, res


def _dilation_estimate(tab, psi, l10s, small_space=False):
    lows, ups = [], []
    for l10 in l10s:
        base, shifted = tab.shift(l10)
        if small_space:
            # chi(s d)/chi(d) = s phi(d)/phi(s d)
            v = l10 * math.log(10.0) + np.max(base - shifted)
            up = l10 * math.log(10.0) - math.log(float(_envelope(psi, 10.0 ** l10)))
        else:
            v = np.max(shifted - base)
            up = math.log(float(_envelope(psi, 10.0 ** l10)))
        lows.append(v)
        ups.append(up)
    lows, ups = np.array(lows), np.array(ups)
    slope, icpt, res = _fit(l10s, lows, ups, lows)
    s = 10.0 ** np.asarray(l10s)
    diag = {"fit_ok": res <= FIT_RESIDUAL_MAX, "bounded": bool(np.all(lows <= ups + 1e-9))}
    return DilationEstimate(s, np.exp(lows), np.exp(ups), slope, icpt, res, diag)


def boyd_indices_grand(psi, table=None):
    """Fitted (gamma_1, gamma_2) of G(psi) with the two dilation estimates."""
    tab = table or _PhiTable(psi)
    e1 = _dilation_estimate(tab, psi, SMALL_S)
    e2 = _dilation_estimate(tab, psi, LARGE_S)
    return e1.slope, e2.slope, {"small_s": e1, "large_s": e2}


def indices_small(psi, table=None):
    """Fitted (gamma_1, gamma_2, beta_1, beta_2) of SL(psi) from the dilation
    of chi = delta / phi.  The beta values come from the same fit."""
    tab = table or _PhiTable(psi)
    e1 = _dilation_estimate(tab, psi, SMALL_S, small_space=True)
    e2 = _dilation_estimate(tab, psi, LARGE_S, small_space=True)
    return e1.slope, e2.slope, e1.slope, e2.slope, {"small_s": e1, "large_s": e2}


def index_report(psi):
    """Both index pairs, their targets and the duality identity residuals."""
    tab = _PhiTable(psi)
    g1, g2, gd = boyd_indices_grand(psi, tab)
    s1, s2, b1, b2, sd = indices_small(psi, tab)
    inv_b = 0.0 if math.isinf(psi.b) else 1.0 / psi.b
    targets = {"grand": (inv_b, 1.0 / psi.a), "small": (1.0 - 1.0 / psi.a, 1.0 - inv_b)}
    return {
        "grand": {"gamma1": g1, "gamma2": g2, "residuals": (gd["small_s"].residual, gd["large_s"].residual)},
        "small": {"gamma1": s1, "gamma2": s2, "beta1": b1, "beta2": b2,
                  "residuals": (sd["small_s"].residual, sd["large_s"].residual)},
        "targets": targets,
        "duality": {"g1_small+g2_grand": s1 + g2, "g2_small+g1_grand": s2 + g1},
    }
