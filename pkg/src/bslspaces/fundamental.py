"""Fundamental functions phi(G, delta) and chi(delta) = delta / phi(G, delta)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._optim import golden_max_batch
from .measure import DomainError
from .psi import PsiFunction, exponent_grid, zeta_root_h

DIAG_TOL = 1e-4
PER_DECADE = 33


def log_phi_grand(psi, log_delta, n=128, tol=1e-12):
    """log phi(G(psi), delta) for an array of log delta.

    Returns (log phi, maximizing p).  One shared exponent grid, then a
    batched golden-section polish inside each best bracket.
    """
    L = np.atleast_1d(np.asarray(log_delta, dtype=np.float64))
    ps = exponent_grid(psi, n)
    lpsi = psi.log(ps)
    V = L[:, None] / ps[None, :] - lpsi[None, :]
    V = np.where(np.isnan(V), -np.inf, V)
    i = np.argmax(V, axis=1)
    best = V[np.arange(L.size), i]
    lo = ps[np.maximum(i - 1, 0)]
    hi = ps[np.minimum(i + 1, ps.size - 1)]

    def obj(p):
        return L / p - psi.log(p)

    p_pol, v_pol = golden_max_batch(obj, lo, hi, tol=tol)
    take = v_pol > best
    val = np.where(take, v_pol, best)
    arg = np.where(take, p_pol, ps[i])
    return val, arg


def phi_grand_numeric(psi, delta, n=128):
    """phi(G(psi), delta) = sup_p delta^(1/p) / psi(p)."""
    d = np.asarray(delta, dtype=np.float64)
    if np.any(d <= 0):
        raise DomainError("delta must be positive")
    val, _ = log_phi_grand(psi, np.log(d.ravel()), n=n)
    out = np.exp(val).reshape(d.shape)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# closed form for the zeta family
# ---------------------------------------------------------------------------

@dataclass
class ClosedForm:
    """Closed-form phi for the zeta family with per-point branch labels."""

    value: np.ndarray
    branch: list
    p_star: np.ndarray
    reading: str
    diagnostics: list = field(default_factory=list)


def _check_zeta(a, b, alpha, beta):
    zeta_root_h(a, b, alpha, beta)


def _branch1(L, a, alpha, h, reading):
    """max over p in (a, h] of L/p + alpha log(p - a)."""
    at_h = L / h + alpha * math.log(h - a)
    disc = L * L / (4 * alpha * alpha) - a * L / alpha
    if L >= alpha * h * h / (h - a):
        p1 = L / (2 * alpha) - math.sqrt(disc)
        return L / p1 + alpha * math.log(p1 - a), p1, "phi1:stationary"
    if reading == "resolved" and L > 0 and disc >= 0:
        # the minus root is a local max; if it lies left of h it may beat h
        p1 = L / (2 * alpha) - math.sqrt(disc)
        if a < p1 < h:
            v1 = L / p1 + alpha * math.log(p1 - a)
            if v1 > at_h:
                return v1, p1, "phi1:stationary(below h)"
    return at_h, h, "phi1:h"


def _branch2(L, b, beta, h, reading):
    """max over p in [h, b) of L/p + beta log(b - p)."""
    if L < -h * h * beta / (b - h):
        M = -L
        if reading == "printed":
            inner = math.log(math.exp(L) / (4 * beta * beta)) ** 2 + b * M / beta
        else:
            inner = L * L / (4 * beta * beta) + b * M / beta
        p2 = -M / (2 * beta) + math.sqrt(inner)
        if not (h <= p2 < b):
            return -math.inf, p2, "phi2:stationary(out of range)"
        return L / p2 + beta * math.log(b - p2), p2, "phi2:stationary"
    return L / h + beta * math.log(b - h), h, "phi2:h"


def _branch3(L, beta, h):
    """max over p >= h of L/p - |beta| log p."""
    nb = abs(beta)
    if L < -h * nb:
        M = -L
        return nb * math.log(nb / math.e) - nb * math.log(M), M / nb, "phi3:stationary"
    return -nb * math.log(h) + L / h, h, "phi3:h"


def phi_grand_closed(a, b, alpha, beta, delta, reading="resolved", check=True):
    """Closed-form phi(G(a, b; alpha, beta), delta) = max of the branch maxima.

    ``reading`` selects 'printed' (the p2 root with log(delta/(4 beta^2))^2 and
    only the threshold rule on the left branch) or 'resolved' (the stationary
    root with (log delta)^2 / (4 beta^2), plus the left-branch local maximum
    when it sits below the crossover).  With ``check`` every point is compared
    to the numeric supremum and relative deviations above 1e-4 are listed in
    ``diagnostics``.
    """
    if reading not in ("printed", "resolved"):
        raise ValueError("reading must be 'printed' or 'resolved'")
    _check_zeta(a, b, alpha, beta)
    h = zeta_root_h(a, b, alpha, beta)
    d = np.atleast_1d(np.asarray(delta, dtype=np.float64))
    if np.any(d <= 0):
        raise DomainError("delta must be positive")
    vals = np.empty(d.size)
    pst = np.empty(d.size)
    branch = []
    for k, L in enumerate(np.log(d)):
        v1, p1, b1 = _branch1(L, a, alpha, h, reading)
        if math.isinf(b):
            v2, p2, b2 = _branch3(L, beta, h)
        else:
            v2, p2, b2 = _branch2(L, b, beta, h, reading)
        if v1 >= v2:
            vals[k], pst[k] = v1, p1
            branch.append(b1)
        else:
            vals[k], pst[k] = v2, p2
            branch.append(b2)
    out = ClosedForm(np.exp(vals), branch, pst, reading)
    if check:
        num, _ = log_phi_grand(PsiFunction.zeta(a, b, alpha, beta), np.log(d))
        rel = np.abs(np.expm1(vals - num))
        for k in np.nonzero(~(rel <= DIAG_TOL))[0]:
            out.diagnostics.append({"delta": float(d[k]), "branch": branch[k],
                                    "closed": float(np.exp(vals[k])),
                                    "numeric": float(np.exp(num[k])), "rel_dev": float(rel[k])})
    return out


def stationary_residual(a, alpha, delta):
    """alpha p1^2 - (p1 - a) log delta at the printed left-branch root."""
    L = math.log(delta)
    p1 = L / (2 * alpha) - math.sqrt(L * L / (4 * alpha * alpha) - a * L / alpha)
    return alpha * p1 * p1 - (p1 - a) * L, p1


def left_branch_counterexample(a, b, alpha, beta, L):
    """Compare the printed left-branch rule with the true max over (a, h] at
    log delta = L.  Nonzero gap means the threshold rule misses a local max."""
    h = zeta_root_h(a, b, alpha, beta)
    printed, _, _ = _branch1(L, a, alpha, h, "printed")
    resolved, p, _ = _branch1(L, a, alpha, h, "resolved")
    return {"h": h, "printed": math.exp(printed), "resolved": math.exp(resolved), "p": p}


# ---------------------------------------------------------------------------
# asymptotes
# ---------------------------------------------------------------------------

def phi_asymptote(a, b, alpha, beta, delta, end="small"):
    """Leading-order phi for the zeta family as delta -> 0+ ('small') or
    delta -> inf ('large')."""
    d = np.asarray(delta, dtype=np.float64)
    L = np.log(d)
    with np.errstate(divide="ignore", invalid="ignore"):
        if end == "small":
            if math.isinf(b):
                nb = abs(beta)
                return (nb / math.e) ** nb * np.abs(L) ** (-nb)
            return (beta * b * b / math.e) ** beta * d ** (1.0 / b) * np.abs(L) ** (-beta)
        if end == "large":
            return (alpha * a * a / math.e) ** alpha * d ** (1.0 / a) * L ** (-alpha)
    raise ValueError("end must be 'small' or 'large'")


# ---------------------------------------------------------------------------
# chi and profiles
# ---------------------------------------------------------------------------

def _check_delta_range(delta, space):
    if space is None:
        return
    if not space.nonatomic:
        raise DomainError("chi(delta) = delta / phi(delta) needs a nonatomic measure")
    d = np.asarray(delta)
    if np.any(d <= 0) or np.any(d >= space.total_mass):
        raise DomainError("delta must lie in (0, mu(X))")


def phi_small(psi, delta, space=None):
    """chi(delta) = phi(SL(psi), delta) = delta / phi(G(psi), delta).

    ``psi`` may also be a plain callable giving phi(G, delta) directly.
    """
    d = np.asarray(delta, dtype=np.float64)
    if np.any(d <= 0):
        raise DomainError("delta must be positive")
    _check_delta_range(d, space)
    if isinstance(psi, PsiFunction):
        phi = phi_grand_numeric(psi, d)
    else:
        phi = np.asarray(psi(d), dtype=np.float64)
    out = d / phi
    return float(out) if np.ndim(out) == 0 else out


def indicator_sl_norm(delta, psi, space=None):
    """||I(A)||_SL for mu(A) = delta."""
    return phi_small(psi, delta, space)


def sqrt_model(delta):
    """phi(G, delta) = sqrt(delta), whose chi is sqrt(delta) as well."""
    return np.sqrt(delta)


@dataclass
class FundamentalProfile:
    delta: np.ndarray
    phi: np.ndarray
    p_star: np.ndarray
    chi: np.ndarray
    closed: Optional[np.ndarray] = None
    asymptote: Optional[np.ndarray] = None

    def is_quasiconcave(self, rtol=1e-9):
        """phi nondecreasing and phi/delta nonincreasing."""
        inc = np.all(np.diff(self.phi) >= -rtol * self.phi[1:])
        r = self.phi / self.delta
        dec = np.all(np.diff(r) <= rtol * r[:-1])
        return bool(inc and dec)


def delta_grid(lo, hi, per_decade=PER_DECADE):
    """Log grid with ``per_decade`` points per decade, endpoints included."""
    a, b = math.log10(lo), math.log10(hi)
    n = int(round((b - a) * per_decade)) + 1
    return np.logspace(a, b, max(n, 2))


def fundamental_profile(psi, lo=1e-8, hi=1e8, per_decade=PER_DECADE):
    d = delta_grid(lo, hi, per_decade)
    lv, ps = log_phi_grand(psi, np.log(d))
    phi = np.exp(lv)
    closed = asym = None
    if psi.family == "zeta":
        pr = psi.params
        cf = phi_grand_closed(pr["a"], pr["b"], pr["alpha"], pr["beta"], d, check=False)
        closed = cf.value
        asym = phi_asymptote(pr["a"], pr["b"], pr["alpha"], pr["beta"], d, "small")
    return FundamentalProfile(d, phi, ps, d / phi, closed, asym)
