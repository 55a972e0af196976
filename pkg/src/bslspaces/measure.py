"""Measure spaces, sampled functions and L_p norms.

Three representations of (X, Sigma, mu) are supported:

* ``atomic``: finitely many atoms with positive weights (exact sums);
* ``interval``: composite Gauss-Legendre nodes on a finite interval, or the
  log-substituted half-line panels used for improper integrals;
* ``radial``: R^n with the weight |x|^sigma, restricted to radial functions.

Functions are stored in log-magnitude form (``log|f|`` and a sign), so the
catalog's functions can be sampled at nodes like x = exp(exp(36)) without
overflow.  Improper integrals over (0, rho) and (rho, inf) use r = rho*exp(-+t)
followed by t = exp(u) with a uniform trapezoid rule in u; Gamma-type
integrands become doubly-exponentially decaying in u, which the trapezoid rule
integrates to near machine precision.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln

from . import _kernels

DEFAULT_NODES = 2048
# u-range of t = exp(u) on each half-line panel; beyond t ~ 4e15 the log-domain
# products p*log|f| + log w lose all precision to cancellation
U_RANGE = (-50.0, 36.0)
EDGE_NODES = 16


class DomainError(ValueError):
    """Arguments outside the mathematical domain of an operation."""


def radial_constants(n, sigma=0.0):
    """Return (omega(n), Omega(n), R(sigma, n)).

    omega is the volume of the unit ball, Omega = n*omega its surface area and
    R the radius for which the ball has unit |x|^sigma-weighted measure.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n}")
    if n + sigma <= 0:
        raise DomainError(f"need n + sigma > 0, got n={n}, sigma={sigma}")
    omega = math.exp(0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0))
    Omega = n * omega
    R = ((sigma + n) / Omega) ** (1.0 / (sigma + n))
    return omega, Omega, R


def conjugate_exponent(p):
    """p/(p-1); +inf maps to 1 and 1 maps to +inf."""
    if isinstance(p, np.ndarray):
        p = p.astype(np.float64)
        if np.any(p < 1) or np.any(np.isnan(p)):
            raise DomainError("conjugate exponent needs p >= 1")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = p / (p - 1.0)
        out = np.where(np.isinf(p), 1.0, out)
        return np.where(p == 1.0, np.inf, out)
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise DomainError(f"conjugate exponent needs p >= 1, got {p}")
    if math.isinf(p):
        return 1.0
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


def _halfline_panel(nodes, rho, inward):
    """Nodes for r in (0, rho) (inward) or (rho, inf) as (log_r, log_dr, edge)."""
    u = np.linspace(U_RANGE[0], U_RANGE[1], nodes)
    h = u[1] - u[0]
    t = np.exp(u)
    log_r = math.log(rho) + (-t if inward else t)
    # dr = r dt, dt = t du; trapezoid end weights halved
    log_dr = log_r + u + math.log(h)
    log_dr[0] -= math.log(2.0)
    log_dr[-1] -= math.log(2.0)
    edge = np.zeros(nodes, dtype=bool)
    edge[:EDGE_NODES] = True
    edge[-EDGE_NODES:] = True
    return log_r, log_dr, edge


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    variant: str
    log_weights: np.ndarray
    log_r: np.ndarray
    edge: np.ndarray
    ids: tuple = ()
    dim: int = 1
    sigma: float = 0.0
    finite_mass: bool = False
    nonatomic: bool = False
    resonant: bool = False
    tail_tol: float = 1e-4
    layout: dict = field(default_factory=dict)

    def __post_init__(self):
        lw = self.log_weights
        if self.variant not in ("atomic", "interval", "radial"):
            raise DomainError(f"unknown variant {self.variant!r}")
        if lw.ndim != 1 or lw.size == 0 or not np.all(np.isfinite(lw)):
            raise DomainError("weights must be finite and strictly positive")
        if self.variant == "radial" and self.dim + self.sigma <= 0:
            raise DomainError("radial space needs n + sigma > 0")
        for arr in (self.log_weights, self.log_r, self.edge):
            arr.setflags(write=False)

    # -- constructors -------------------------------------------------------

    @classmethod
    def atomic(cls, weights, ids=None):
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.size == 0 or np.any(~(w > 0)) or np.any(~np.isfinite(w)):
            raise DomainError("atomic weights must be finite and > 0")
        ids = tuple(range(w.size)) if ids is None else tuple(ids)
        if len(ids) != w.size:
            raise DomainError("ids and weights differ in length")
        equal = bool(np.allclose(w, w[0], rtol=1e-12, atol=0))
        return cls(
            variant="atomic",
            log_weights=np.log(w),
            log_r=np.full(w.size, np.nan),
            edge=np.zeros(w.size, dtype=bool),
            ids=ids,
            finite_mass=True,
            nonatomic=False,
            resonant=equal,
        )

    @classmethod
    def interval(cls, lo=0.0, hi=1.0, nodes=DEFAULT_NODES, panels=64):
        """Composite Gauss-Legendre rule on a finite interval [lo, hi]."""
        if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
            raise DomainError("interval needs finite lo < hi")
        k = max(1, nodes // panels)
        xg, wg = np.polynomial.legendre.leggauss(k)
        edges = np.linspace(lo, hi, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
        w = (half[:, None] * wg[None, :]).ravel()
        with np.errstate(divide="ignore"):
            log_r = np.log(np.abs(x))
        return cls(
            variant="interval",
            log_weights=np.log(w),
            log_r=log_r,
            edge=np.zeros(x.size, dtype=bool),
            finite_mass=True,
            nonatomic=True,
            resonant=True,
            layout={"kind": "gauss-legendre", "lo": lo, "hi": hi, "x": x},
        )

    @classmethod
    def radial(cls, n=1, sigma=0.0, nodes=DEFAULT_NODES, split=None, symmetric_1d=True):
        """R^n with d mu = |x|^sigma dx acting on radial functions.

        The radius axis is split at ``split`` (default R(sigma, n), the radius of
        the unit-measure ball) into an inner and an outer log-substituted panel.
        """
        _, Omega, R = radial_constants(n, sigma)
        rho = R if split is None else float(split)
        half = nodes // 2
        lr_in, ldr_in, e_in = _halfline_panel(half, rho, inward=True)
        lr_out, ldr_out, e_out = _halfline_panel(nodes - half, rho, inward=False)
        log_r = np.concatenate([lr_in, lr_out])
        log_dr = np.concatenate([ldr_in, ldr_out])
        jac = (n + sigma - 1.0) * log_r
        if n == 1 and not symmetric_1d:
            log_omega = 0.0
        else:
            log_omega = math.log(Omega)
        return cls(
            variant="radial",
            log_weights=log_omega + jac + log_dr,
            log_r=log_r,
            edge=np.concatenate([e_in, e_out]),
            dim=int(n),
            sigma=float(sigma),
            finite_mass=False,
            nonatomic=True,
            resonant=True,
            layout={"kind": "log-substituted", "split": rho, "inner": slice(0, half),
                    "outer": slice(half, nodes), "u_range": U_RANGE},
        )

    @classmethod
    def real_line(cls, nodes=DEFAULT_NODES):
        """(R, dx) for even functions, split at |x| = 1."""
        return cls.radial(1, 0.0, nodes=nodes, split=1.0)

    @classmethod
    def half_line(cls, nodes=DEFAULT_NODES):
        """([0, inf), dx), split at x = 1."""
        return cls.radial(1, 0.0, nodes=nodes, split=1.0, symmetric_1d=False)

    # -- queries -------------------------------------------------------------

    @property
    def size(self):
        return self.log_weights.size

    @property
    def weights(self):
        with np.errstate(over="ignore"):
            return np.exp(self.log_weights)

    @property
    def total_mass(self):
        return float(self.weights.sum()) if self.finite_mass else math.inf

    def measure(self, mask):
        return float(self.weights[np.asarray(mask, dtype=bool)].sum())

    @property
    def flags(self):
        return {
            "finite_mass": self.finite_mass,
            "probabilistic": self.finite_mass and abs(self.total_mass - 1.0) < 1e-9,
            "nonatomic_model": self.nonatomic,
            "resonant_model": self.resonant,
        }


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """A function known at the nodes of a space, in log-magnitude form.

    ``log_moment`` (optional) maps an array of p to log |f|_p^p, returning
    +inf where the moment diverges.  ``distribution`` (optional) maps s to
    mu{|f| > s}.
    """

    space: MeasureSpace
    log_abs: np.ndarray
    sign: np.ndarray
    log_moment: Optional[Callable] = None
    distribution: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        if self.log_abs.shape != (self.space.size,) or self.sign.shape != (self.space.size,):
            raise DomainError("function shape does not match its space")
        if np.any(np.isnan(self.log_abs)) or np.any(self.log_abs == np.inf):
            raise DomainError("function values must be finite at every node")

    @classmethod
    def from_values(cls, space, values, **kw):
        v = np.asarray(values, dtype=np.float64).ravel()
        if v.shape != (space.size,):
            raise DomainError(f"expected {space.size} values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise DomainError("function values must be finite")
        with np.errstate(divide="ignore"):
            la = np.log(np.abs(v))
        return cls(space, la, np.sign(v), **kw)

    @classmethod
    def from_log(cls, space, log_abs, sign=None, **kw):
        la = np.asarray(log_abs, dtype=np.float64)
        s = np.where(np.isfinite(la), 1.0, 0.0) if sign is None else np.asarray(sign, dtype=np.float64)
        return cls(space, la, s * np.isfinite(la), **kw)

    @classmethod
    def indicator(cls, space, mask, name="indicator"):
        mask = np.asarray(mask, dtype=bool)
        delta = space.measure(mask)
        la = np.where(mask, 0.0, -np.inf)

        def log_moment(ps, _d=delta):
            return np.full(np.shape(ps), math.log(_d) if _d > 0 else -np.inf)

        def distribution(s, _d=delta):
            return np.where(np.asarray(s) < 1.0, _d, 0.0)

        return cls(space, la, mask.astype(np.float64), log_moment, distribution, name)

    @classmethod
    def zero(cls, space):
        return cls(space, np.full(space.size, -np.inf), np.zeros(space.size), name="zero")

    @property
    def values(self):
        with np.errstate(over="ignore"):
            return self.sign * np.exp(self.log_abs)

    def is_zero(self):
        return not np.any(np.isfinite(self.log_abs))

    def scale(self, lam):
        lam = float(lam)
        if lam == 0.0:
            return SampledFunction.zero(self.space)
        shift = math.log(abs(lam))
        lm = None
        if self.log_moment is not None:
            base = self.log_moment

            def lm(ps, _b=base, _s=shift):
                return _b(ps) + np.asarray(ps) * _s

        dist = None
        if self.distribution is not None:
            d0 = self.distribution

            def dist(s, _d=d0, _l=abs(lam)):
                return _d(np.asarray(s) / _l)

        return SampledFunction(self.space, self.log_abs + shift, self.sign * math.copysign(1.0, lam),
                               lm, dist, self.name)

    def __mul__(self, other):
        if isinstance(other, SampledFunction):
            _same_space(self, other)
            return SampledFunction(self.space, self.log_abs + other.log_abs, self.sign * other.sign)
        return self.scale(other)

    __rmul__ = __mul__

    def __add__(self, other):
        _same_space(self, other)
        return SampledFunction.from_values(self.space, self.values + other.values)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def __neg__(self):
        return self.scale(-1.0)

    def abs(self):
        return SampledFunction(self.space, self.log_abs, np.abs(self.sign),
                               self.log_moment, self.distribution, self.name)

    def restrict(self, mask):
        mask = np.asarray(mask, dtype=bool)
        return SampledFunction(self.space, np.where(mask, self.log_abs, -np.inf),
                               np.where(mask, self.sign, 0.0), name=self.name)

    def power(self, r):
        """|f|^r with the sign dropped."""
        la = np.where(np.isfinite(self.log_abs), r * self.log_abs, -np.inf)
        return SampledFunction(self.space, la, np.isfinite(la).astype(np.float64))

    def sup_abs(self):
        live = np.isfinite(self.log_abs)
        return float(np.exp(self.log_abs[live].max())) if live.any() else 0.0

    def distribution_function(self, s):
        """mu{|f| > s}: the closed form when present, node sums otherwise."""
        if self.distribution is not None:
            return self.distribution(s)
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        w = self.space.weights
        a = np.exp(self.log_abs)
        out = np.array([w[a > si].sum() for si in s])
        return out


def _same_space(f, g):
    if f.space is not g.space:
        raise DomainError("functions live on different spaces")


def log_lp_norms(f, ps, method="auto"):
    """log |f|_p for an array of exponents p >= 1 (inf entries mean divergence).

    ``method``: 'analytic' uses the closed-form moment, 'quadrature' the nodes,
    'auto' prefers the closed form when attached.
    """
    ps = np.atleast_1d(np.asarray(ps, dtype=np.float64))
    if np.any(ps < 1.0) or np.any(np.isnan(ps)):
        raise DomainError("L_p norms need p >= 1")
    out = np.empty(ps.shape)
    fin = np.isfinite(ps)
    if np.any(~fin):
        live = np.isfinite(f.log_abs) & np.isfinite(f.space.log_weights)
        out[~fin] = f.log_abs[live].max() if live.any() else -np.inf
    if not np.any(fin):
        return out
    pf = ps[fin]
    use_analytic = f.log_moment is not None and method in ("auto", "analytic")
    if method == "analytic" and f.log_moment is None:
        raise DomainError("function has no analytic moment evaluator")
    if use_analytic:
        lm = np.asarray(f.log_moment(pf), dtype=np.float64)
    else:
        lm, tail = _kernels.log_moments(f.space.log_weights, f.log_abs, pf, f.space.edge)
        with np.errstate(invalid="ignore"):
            diverged = (tail - lm) > math.log(f.space.tail_tol)
        lm = np.where(diverged, np.inf, lm)
    out[fin] = lm / pf
    return out


def lp_norm(f, p, space=None, method="auto"):
    """(integral of |f|^p d mu)^(1/p); +inf when the integral diverges."""
    if space is not None and space is not f.space:
        raise DomainError("function is not defined on the given space")
    scalar = np.ndim(p) == 0
    vals = np.exp(log_lp_norms(f, p, method=method))
    return float(vals[0]) if scalar else vals


def integrate_product(f, g):
    """integral of f*g d mu (finite spaces or quadrature rules)."""
    _same_space(f, g)
    la = f.log_abs + g.log_abs + f.space.log_weights
    sg = f.sign * g.sign
    live = np.isfinite(la)
    if not live.any():
        return 0.0
    top = la[live].max()
    return float(math.exp(top) * np.sum(sg[live] * np.exp(la[live] - top)))


def load_atomic_csv(path):
    """Read an atomic space and a function from CSV columns id, weight, value."""
    ids, w, v = [], [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"id", "weight", "value"} - set(reader.fieldnames or [])
        if missing:
            raise DomainError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            ids.append(row["id"])
            w.append(float(row["weight"]))
            v.append(float(row["value"]))
    space = MeasureSpace.atomic(w, ids)
    return space, SampledFunction.from_values(space, v, name=str(path))


def write_atomic_csv(path, f):
    if f.space.variant != "atomic":
        raise DomainError("only atomic functions export to id,weight,value CSV")
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["id", "weight", "value"])
        for i, w, v in zip(f.space.ids, f.space.weights, f.values):
            wr.writerow([i, repr(float(w)), repr(float(v))])


def gamma_log_moment(c, k):
    """log of integral_0^inf exp(-c t) t^k dt = Gamma(k+1)/c^(k+1); +inf when
    the integral diverges (c <= 0 or k <= -1)."""
    c = np.asarray(c, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    ok = (c > 0) & (k > -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = gammaln(np.where(ok, k + 1.0, 1.0)) - (k + 1.0) * np.log(np.where(ok, c, 1.0))
    return np.where(ok, val, np.inf)
