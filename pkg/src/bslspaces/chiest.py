"""The chi-integral majorant |||f||| = integral of |f| d chi, and the distance
d(f, g) = |||f - g|||."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._optim import golden_max
from .fundamental import phi_small
from .measure import DomainError, MeasureSpace, SampledFunction
from .psi import PsiFunction

LEVELS = (1, 2, 4, 8, 16)
LADDER_RTOL = 1e-6
LADDER_MAX = 60
GEOM_RATIO = 2.0 ** 0.25
GEOM_DEPTH = 160


def chi_from_psi(psi):
    """delta -> delta / phi(G(psi), delta), with chi(0) = 0."""
    def chi(d):
        d = np.asarray(d, dtype=np.float64)
        out = np.zeros(d.shape)
        pos = d > 0
        if np.any(pos):
            out[pos] = phi_small(psi, d[pos])
        return float(out) if out.ndim == 0 else out
    return chi


def chi_power(r):
    """chi(delta) = delta^r."""
    def chi(d):
        d = np.asarray(d, dtype=np.float64)
        out = np.where(d > 0, np.abs(d) ** r, 0.0)
        return float(out) if out.ndim == 0 else out
    return chi


def _as_chi(chi):
    return chi_from_psi(chi) if isinstance(chi, PsiFunction) else chi


@dataclass
class SimpleFunction:
    """sum_k c_k I(H_k) with pairwise disjoint H_k of positive finite measure.

    ``masks`` (with ``space``) identify the sets when they are known; an
    abstract function only carries coefficients and measures.
    """

    coefficients: np.ndarray
    measures: np.ndarray
    masks: Optional[np.ndarray] = None
    space: Optional[MeasureSpace] = None

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64)
        self.measures = np.asarray(self.measures, dtype=np.float64)
        if self.coefficients.shape != self.measures.shape:
            raise DomainError("one measure per coefficient")
        if np.any(~(self.measures > 0)) or np.any(~np.isfinite(self.measures)):
            raise DomainError("set measures must be positive and finite")
        if self.masks is not None:
            m = np.asarray(self.masks, dtype=bool)
            if np.any(m.sum(axis=0) > 1):
                raise DomainError("sets of a simple function must be disjoint")

    @classmethod
    def from_pairs(cls, pairs):
        """Abstract form from (coefficient, measure) pairs."""
        pairs = list(pairs)
        c = [p[0] for p in pairs]
        m = [p[1] for p in pairs]
        return cls(np.array(c, dtype=np.float64), np.array(m, dtype=np.float64))

    @classmethod
    def from_terms(cls, space, terms):
        """From (coefficient, mask) pairs on a space."""
        terms = list(terms)
        masks = np.array([np.asarray(t[1], dtype=bool) for t in terms]).reshape(len(terms), space.size)
        if np.any(masks.sum(axis=0) > 1):
            raise DomainError("sets of a simple function must be disjoint")
        meas = np.array([space.measure(mk) for mk in masks])
        return cls(np.array([t[0] for t in terms], dtype=np.float64), meas, masks, space)

    @classmethod
    def from_sampled(cls, f):
        """Level sets of a finitely-valued function on an atomic space."""
        if f.space.variant != "atomic":
            raise DomainError("simple form needs an atomic space")
        v = f.values
        vals = np.unique(v[v != 0])
        masks = np.array([v == c for c in vals]).reshape(vals.size, v.size)
        meas = np.array([f.space.measure(mk) for mk in masks])
        return cls(vals, meas, masks, f.space)

    def canonical(self):
        """Merge the sets that share the same |c|; drop zero coefficients."""
        a = np.abs(self.coefficients)
        keys = np.unique(a[a > 0])
        meas = np.array([self.measures[a == k].sum() for k in keys])
        masks = None
        if self.masks is not None:
            masks = np.zeros((keys.size, self.masks.shape[-1]), dtype=bool)
            for j, k in enumerate(keys):
                masks[j] = self.masks[a == k].any(axis=0)
        return SimpleFunction(keys, meas, masks, self.space)

    def to_sampled(self):
        if self.space is None or self.masks is None:
            raise DomainError("abstract simple function has no sampled form")
        v = (self.coefficients[:, None] * self.masks).sum(axis=0)
        return SampledFunction.from_values(self.space, v)

    def __mul__(self, lam):
        return SimpleFunction(lam * self.coefficients, self.measures, self.masks, self.space)

    __rmul__ = __mul__


def chi_integral_simple(f, chi):
    """sum_k |c_k| chi(mu(H_k)) over the canonical representation."""
    chi = _as_chi(chi)
    if isinstance(f, SampledFunction):
        f = SimpleFunction.from_sampled(f)
    can = f.canonical()
    if can.coefficients.size == 0:
        return 0.0
    return float(np.sum(can.coefficients * np.asarray(chi(can.measures), dtype=np.float64)))


# ---------------------------------------------------------------------------
# level-partition majorants
# ---------------------------------------------------------------------------

@dataclass
class MajorantResult:
    value: float
    thresholds: np.ndarray
    levels: int
    by_levels: dict = field(default_factory=dict)
    simple_value: Optional[float] = None
    truncation: Optional[list] = None


def _level_value(t, D, chi, d0):
    """Cost of the majorant taking value t_k on {t_(k-1) < f <= t_k}."""
    t = np.asarray(t, dtype=np.float64)
    Dt = np.asarray(D(t), dtype=np.float64)
    upper = np.concatenate([[d0], Dt[:-1]])
    mass = np.maximum(upper - Dt, 0.0)
    return float(np.sum(t * np.asarray(chi(mass), dtype=np.float64)))


def _optimize_levels(D, top, chi, levels=LEVELS, sweeps=4):
    d0 = float(np.asarray(D(np.array([0.0])))[0])
    t = np.array([top])
    best = _level_value(t, D, chi, d0)
    best_t = t.copy()
    record = {1: best}
    for m in levels[1:]:
        # refine by duplicating thresholds: the value is unchanged
        while t.size < m:
            t = np.sort(np.concatenate([t, t[: m - t.size]]))
        cur = _level_value(t, D, chi, d0)
        for _ in range(sweeps):
            improved = False
            for k in range(t.size - 1):  # the top level stays at sup f
                lo = 0.0 if k == 0 else t[k - 1]
                hi = t[k + 1]
                if hi <= lo:
                    continue

                def neg(x, k=k):
                    tt = t.copy()
                    tt[k] = x
                    return -_level_value(tt, D, chi, d0)

                x, v = golden_max(neg, lo, hi, tol=1e-10)
                if -v < cur - 1e-15 * abs(cur):
                    t[k] = x
                    cur = -v
                    improved = True
            if not improved:
                break
        if cur < best:
            best, best_t = cur, t.copy()
        record[m] = best
    return best, best_t, record


def _geometric_majorant(D, top, chi, ratio=GEOM_RATIO, depth=GEOM_DEPTH):
    """Majorant with thresholds top * ratio^(-j), j = depth .. 0."""
    d0 = float(np.asarray(D(np.array([0.0])))[0])
    t = top * ratio ** (-np.arange(depth, -1, -1, dtype=np.float64))
    return _level_value(t, D, chi, d0), t


def chi_integral_general(f, chi, levels=LEVELS, distribution=None, sup=None):
    """Upper value of inf over simple majorants g >= |f| of the chi-integral of g.

    The family is level partitions with up to max(levels) levels; the value
    is nonincreasing in the family.  ``f`` is a SampledFunction, a
    SimpleFunction, or None with ``distribution`` (s -> mu{|f| > s}) and
    ``sup`` given.  Unbounded f (sup = inf) goes through the truncation
    ladder min(|f|, 2^k).
    """
    chi = _as_chi(chi)
    simple_value = None
    if isinstance(f, SimpleFunction):
        simple_value = chi_integral_simple(f, chi)
        can = f.canonical()
        c, mu = can.coefficients, can.measures

        def D(s, _c=c, _m=mu):
            s = np.atleast_1d(np.asarray(s, dtype=np.float64))
            return (_m[None, :] * (_c[None, :] > s[:, None])).sum(axis=1)

        top = float(c.max()) if c.size else 0.0
    elif isinstance(f, SampledFunction):
        if f.is_zero():
            return MajorantResult(0.0, np.zeros(0), 0)
        D = f.abs().distribution_function
        top = f.sup_abs()
        if f.space.variant == "atomic" and np.unique(f.values[f.values != 0]).size <= max(levels):
            simple_value = chi_integral_simple(f, chi)
    else:
        if distribution is None or sup is None:
            raise DomainError("need a function, or a distribution with its sup")
        D, top = distribution, float(sup)
    if top == 0.0:
        return MajorantResult(0.0, np.zeros(0), 0, simple_value=simple_value)
    if math.isinf(top):
        return _truncation_ladder(D, chi, levels)
    val, t, rec = _optimize_levels(D, top, chi, levels)
    gval, gt = _geometric_majorant(D, top, chi)
    rec["geometric"] = gval
    if gval < val:
        val, t = gval, gt
    out = MajorantResult(val, t, max(levels), rec, simple_value)
    if simple_value is not None and simple_value < val:
        out.value = simple_value
    return out


def _truncation_ladder(D, chi, levels):
    """Values for min(|f|, N), N = 2^k, until successive values settle."""
    hist = []
    prev = None

    def truncated(N):
        def DN(s, _N=N):
            s = np.atleast_1d(np.asarray(s, dtype=np.float64))
            return np.where(s < _N, D(s), 0.0)
        return DN

    for k in range(LADDER_MAX):
        N = 2.0 ** k
        val, _ = _geometric_majorant(truncated(N), N, chi)
        hist.append((N, val))
        if prev is not None and abs(val - prev) <= LADDER_RTOL * max(abs(val), 1e-300):
            DN = truncated(N)
            lval, t, rec = _optimize_levels(DN, N, chi, levels)
            gval, gt = _geometric_majorant(DN, N, chi)
            rec["geometric"] = gval
            if gval <= lval:
                lval, t = gval, gt
            return MajorantResult(lval, t, max(levels), rec, truncation=hist)
        prev = val
    return MajorantResult(math.inf, np.zeros(0), max(levels), truncation=hist)


def chi_seminorm(f, chi, levels=LEVELS):
    """|||f||| = integral of |f| d chi.

    Simple functions, including any function on an atomic space, use the
    canonical sum; other sampled functions the best level-partition majorant
    of |f|.
    """
    if isinstance(f, SimpleFunction) or f.space.variant == "atomic":
        return chi_integral_simple(f, chi)
    if f.is_zero():
        return 0.0
    return chi_integral_general(f.abs(), chi, levels).value


def chi_distance(f, g, chi, levels=LEVELS):
    """d(f, g) = |||f - g|||."""
    if isinstance(f, SimpleFunction):
        f = f.to_sampled()
    if isinstance(g, SimpleFunction):
        g = g.to_sampled()
    return chi_seminorm(f - g, chi, levels)
