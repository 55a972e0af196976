"""Weight functions psi(p) on an open exponent interval (a, b).

Every ``PsiFunction`` is evaluated in log form (``psi.log(p)``) because the
families of interest span hundreds of orders of magnitude near the endpoints.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._optim import golden_max
from .measure import DomainError

EXPLODE_LEVEL = 1e12
CLUSTER_DEPTH = 40
INF_DEPTH = 20
TREND_TOL = 1e-2


def _check_interval(a, b):
    if not (a >= 1.0) or not (b > a):
        raise DomainError(f"need 1 <= a < b <= inf, got a={a}, b={b}")


def zeta_root_h(a, b, alpha, beta, tol=1e-12):
    """Crossover point h of the two branches of zeta.

    Finite b: (h-a)^alpha = (b-h)^beta on (a, b), alpha, beta > 0.
    Infinite b: (h-a)^alpha = h^beta, h > a, alpha > 0 > beta.
    """
    _check_interval(a, b)
    if math.isinf(b):
        if not (alpha > 0 and beta < 0):
            raise DomainError("b = inf needs alpha > 0 > beta for a crossover root")

        def F(h):
            return alpha * math.log(h - a) - beta * math.log(h)

        lo, hi = a, a + 1.0
        while F(hi) < 0:
            lo, hi = hi, a + 2.0 * (hi - a)
    else:
        if not (alpha > 0 and beta > 0):
            raise DomainError("finite b needs min(alpha, beta) > 0 for a crossover root")

        def F(h):
            return alpha * math.log(h - a) - beta * math.log(b - h)

        lo, hi = a, b
    # F increases from -inf to +inf across the bracket
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if F(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _zeta_log(a, b, alpha, beta, h, p):
    p = np.asarray(p, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        if math.isinf(b):
            if h is None:
                return beta * np.log(p)
            return np.where(p < h, alpha * np.log(p - a), beta * np.log(p))
        if h is None:
            if alpha == 0:
                return beta * np.log(b - p)
            return alpha * np.log(p - a)
        return np.where(p < h, alpha * np.log(p - a), beta * np.log(b - p))


def _zeta_h(a, b, alpha, beta):
    if math.isinf(b):
        if beta >= 0 or alpha < 0:
            raise DomainError("b = inf needs alpha >= 0 and beta < 0")
        return None if alpha == 0 else zeta_root_h(a, b, alpha, beta)
    if alpha < 0 or beta < 0 or (alpha == 0 and beta == 0):
        raise DomainError("finite b needs alpha, beta >= 0, not both zero")
    if alpha == 0 or beta == 0:
        return None
    return zeta_root_h(a, b, alpha, beta)


def zeta_eval(a, b, alpha, beta, p):
    """zeta(a, b; alpha, beta; p), glued at the crossover root h."""
    _check_interval(a, b)
    h = _zeta_h(a, b, alpha, beta)
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr <= a) or np.any(arr >= b):
        raise DomainError(f"p must lie in the open interval ({a}, {b})")
    out = np.exp(_zeta_log(a, b, alpha, beta, h, arr))
    return float(out) if np.ndim(p) == 0 else out


@dataclass(frozen=True, eq=False)
class PsiFunction:
    a: float
    b: float
    log_eval: Callable
    family: str = "custom"
    params: dict = field(default_factory=dict)
    h: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        _check_interval(self.a, self.b)

    # -- evaluation ---------------------------------------------------------

    def log(self, p):
        arr = np.asarray(p, dtype=np.float64)
        out = np.asarray(self.log_eval(arr), dtype=np.float64)
        return float(out) if np.ndim(p) == 0 else out

    def __call__(self, p):
        out = np.exp(self.log(p))
        return float(out) if np.ndim(p) == 0 else out

    @property
    def finite_b(self):
        return math.isfinite(self.b)

    @property
    def center(self):
        """Interior reference point: the zeta crossover, else the grid argmin."""
        if self.h is not None:
            return self.h
        c = self.params.get("_center")
        if c is not None:
            return c
        if self.finite_b:
            grid = self.a + (self.b - self.a) * np.linspace(0.01, 0.99, 197)
        else:
            grid = self.a + np.geomspace(1e-2, 1e3, 197)
        c = float(grid[np.argmin(self.log(grid))])
        self.params["_center"] = c
        return c

    def endpoint_sequences(self):
        """Geometric sequences approaching each endpoint, ordered toward it."""
        c = self.center
        k = np.arange(1, CLUSTER_DEPTH + 1, dtype=np.float64)
        seqs = {"a": self.a + (c - self.a) * 2.0 ** (-k)}
        if self.finite_b:
            seqs["b"] = self.b - (self.b - c) * 2.0 ** (-k)
        else:
            kk = np.arange(1, INF_DEPTH + 1, dtype=np.float64)
            seqs["b"] = max(c, 1.0) * 2.0 ** kk
        return seqs

    def explodes(self):
        """Per-endpoint flag for psi(a+0) = inf and psi(b-0) = inf."""
        out = {}
        for side, ps in self.endpoint_sequences().items():
            lv = self.log(ps)
            out[side] = bool(lv[-1] > math.log(EXPLODE_LEVEL) or trend(lv) == "growing")
        return out

    def check(self, n=400):
        """Grid checks for positivity, continuity and inf psi > 0."""
        ps = np.sort(np.concatenate([interior_grid(self, n), *self.endpoint_sequences().values()]))
        lv = self.log(ps)
        finite = np.all(np.isfinite(lv))
        ex = self.explodes()
        return {
            "positive": bool(finite),
            "continuous": bool(finite and self._no_jumps(ps, lv)),
            "inf_positive": bool(finite and np.min(lv) > -700),
            "inf_value": float(np.exp(np.min(lv))) if finite else 0.0,
            "explodes_a": ex["a"],
            "explodes_b": ex["b"],
            "nontrivial": ex["a"] or ex["b"],
        }

    def _no_jumps(self, ps, lv, halvings=40, tol=1e-6):
        """Bisect every grid cell toward its larger half; a jump keeps its
        size, continuous variation shrinks below ``tol``."""
        lo, hi, flo, fhi = ps[:-1].copy(), ps[1:].copy(), lv[:-1].copy(), lv[1:].copy()
        for _ in range(halvings):
            mid = 0.5 * (lo + hi)
            fm = self.log(mid)
            left = np.abs(fm - flo) >= np.abs(fhi - fm)
            hi, fhi = np.where(left, mid, hi), np.where(left, fm, fhi)
            lo, flo = np.where(left, lo, mid), np.where(left, flo, fm)
        jump = np.abs(fhi - flo)
        # cells at floating-point resolution next to an endpoint cannot shrink further
        unresolved = (hi - lo) <= 8 * np.finfo(float).eps * np.maximum(np.abs(hi), 1.0)
        return bool(np.all((jump <= tol) | (unresolved & (jump <= 1e-2))))

    # -- algebra ------------------------------------------------------------

    def scaled(self, c):
        lc = math.log(c)
        base = self.log_eval
        return PsiFunction(self.a, self.b, lambda p: base(p) + lc, self.family,
                           dict(self.params, scale=c), self.h, f"{c}*{self.name}")

    def times(self, other_log, name="product"):
        base = self.log_eval
        return PsiFunction(self.a, self.b, lambda p: base(p) + other_log(p), "custom",
                           dict(self.params), self.h, name)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zeta(cls, a, b, alpha, beta):
        """psi = 1/zeta(a, b; alpha, beta; .)."""
        h = _zeta_h(a, b, alpha, beta)
        params = {"a": a, "b": b, "alpha": alpha, "beta": beta}

        def log_eval(p, _a=a, _b=b, _al=alpha, _be=beta, _h=h):
            return -_zeta_log(_a, _b, _al, _be, _h, p)

        psi = cls(a, b, log_eval, "zeta", params, h, f"zeta({a},{b},{alpha},{beta})")
        if h is None:
            psi.params["_center"] = 0.5 * (a + b) if math.isfinite(b) else a + 1.0
        return psi

    @classmethod
    def custom(cls, a, b, fn, log=False, name="custom"):
        if log:
            return cls(a, b, fn, "custom", {}, None, name)
        return cls(a, b, lambda p: np.log(fn(p)), "custom", {}, None, name)

    @classmethod
    def tabulated(cls, ps, values, name="tabulated"):
        """Linear interpolation of log psi in p over the table's range."""
        ps = np.asarray(ps, dtype=np.float64)
        vals = np.asarray(values, dtype=np.float64)
        order = np.argsort(ps)
        ps, vals = ps[order], vals[order]
        if np.any(vals <= 0):
            raise DomainError("tabulated psi values must be positive")
        lv = np.log(vals)

        def log_eval(p):
            return np.interp(p, ps, lv)

        return cls(float(ps[0]), float(ps[-1]), log_eval, "tabulated",
                   {"n": int(ps.size)}, None, name)

    @classmethod
    def representation(cls, f, a, b, name=None):
        """psi(p) = |f|_p for a function with an analytic or quadrature moment."""
        from .measure import log_lp_norms

        def log_eval(p, _f=f):
            return log_lp_norms(_f, np.atleast_1d(p)).reshape(np.shape(p))

        return cls(a, b, log_eval, "custom", {"representation": f.name}, None,
                   name or f"|{f.name}|_p")


def load_tabulated_csv(path):
    ps, vs = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if not row or row[0].strip().lower() in ("p", "#"):
                continue
            ps.append(float(row[0]))
            vs.append(float(row[1]))
    return PsiFunction.tabulated(ps, vs, name=str(path))


def trend(log_values, window=5):
    """Classify the tail of a sequence sampled at geometrically shrinking
    distances to an endpoint: 'growing', 'decaying' or 'flat'.

    The per-halving increment of log value must keep one sign over the window
    and average more than TREND_TOL per unit log-distance.
    """
    y = np.asarray(log_values, dtype=np.float64)[-window:]
    if not np.all(np.isfinite(y)):
        return "growing" if y[-1] == np.inf else "decaying"
    d = np.diff(y) / math.log(2.0)
    if np.all(d > 0) and d.mean() > TREND_TOL:
        return "growing"
    if np.all(d < 0) and d.mean() < -TREND_TOL:
        return "decaying"
    return "flat"


def interior_grid(psi, n=128):
    """Uniform interior grid on (a, b); for b = inf, uniform up to 2*center then
    geometric out to 64*center."""
    a, b = psi.a, psi.b
    if math.isfinite(b):
        return a + (b - a) * (np.arange(1, n + 1) / (n + 1.0))
    c = max(psi.center, a + 1e-3)
    n1 = n // 2
    lin = a + (2 * c - a) * (np.arange(1, n1 + 1) / (n1 + 1.0))
    geo = np.geomspace(2 * c, 64 * c, n - n1)
    return np.concatenate([lin, geo])


def exponent_grid(psi, n=128):
    """Interior grid plus endpoint clusters and the center point, sorted."""
    seqs = psi.endpoint_sequences()
    g = np.concatenate([interior_grid(psi, n), seqs["a"], seqs["b"], [psi.center]])
    g = g[(g > psi.a) & (g < psi.b)]
    return np.unique(g)


# ---------------------------------------------------------------------------
# slowly varying decorations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlowlyVarying:
    fn: Callable
    name: str = "L"

    def __call__(self, z):
        return self.fn(np.asarray(z, dtype=np.float64))

    def check(self, zs=(1e10, 1e20, 1e30), lambdas=(2.0, 10.0), tol=0.05):
        """L > 0 and L(lambda z)/L(z) -> 1 on the sampled range."""
        zs = np.asarray(zs, dtype=np.float64)
        positive = bool(np.all(self(np.geomspace(1e-3, zs[-1], 200)) > 0))
        devs = {}
        ok = positive
        for lam in lambdas:
            dev = np.abs(self(lam * zs) / self(zs) - 1.0)
            devs[lam] = dev.tolist()
            ok = ok and bool(dev[-1] <= tol and np.all(np.diff(dev) <= 1e-12))
        return {"positive": positive, "deviations": devs, "slowly_varying": ok}


def log_factor(e=math.e):
    return SlowlyVarying(lambda z: np.log(e + z), "log(e+z)")


def psi_slowly_varying(base, L, side):
    """Decorate a zeta-family psi with L(a/(p-a)), L(b/(b-p)) or their max."""
    if base.family != "zeta":
        raise DomainError("slowly varying decoration needs a zeta-family base")
    if side not in ("a", "b", "both"):
        raise DomainError(f"side must be 'a', 'b' or 'both', got {side!r}")
    if side in ("b", "both") and not base.finite_b:
        raise DomainError("the b-side decoration needs finite b")
    a, b = base.a, base.b
    blog = base.log_eval

    def la(p):
        with np.errstate(divide="ignore"):
            return np.log(L(a / (p - a)))

    def lb(p):
        with np.errstate(divide="ignore"):
            return np.log(L(b / (b - p)))

    if side == "a":
        fn = lambda p: blog(p) + la(p)
    elif side == "b":
        fn = lambda p: blog(p) + lb(p)
    else:
        fn = lambda p: blog(p) + np.maximum(la(p), lb(p))
    return PsiFunction(a, b, fn, "zeta-slowly-varying",
                       dict(base.params, L=L.name, side=side), base.h,
                       f"{base.name}*{L.name}[{side}]")


# ---------------------------------------------------------------------------
# Young-Fenchel construction
# ---------------------------------------------------------------------------

class UnboundedTransform(DomainError):
    """sup_z (p z - W(z)) has no interior maximizer inside the search bracket."""


def legendre_transform(W, p, z_lo=2.0, z_hi=None, tol=1e-12):
    """W*(p) = sup_{z > z_lo} (p z - W(z)) for convex W, with the maximizer."""
    hi = max(1000.0, 10.0 * p) if z_hi is None else z_hi
    z, val = golden_max(lambda z: p * z - W(z), z_lo, hi, tol=tol)
    if hi - z <= 1e-6 * hi:
        raise UnboundedTransform(f"sup over z of p*z - W(z) is unbounded at p={p}")
    return val, z


def young_fenchel_psi(W, p, z_lo=2.0):
    """psi(p) = exp(W*(p)/p)."""
    val, _ = legendre_transform(W, p, z_lo)
    return math.exp(val / p)


def young_fenchel_family(W, a=1.0, name="young-fenchel", z_lo=2.0):
    def log_eval(p):
        arr = np.atleast_1d(p)
        out = np.array([legendre_transform(W, float(q), z_lo)[0] / float(q) for q in arr.ravel()])
        return out.reshape(np.shape(p))

    return PsiFunction(a, math.inf, log_eval, "young-fenchel", {"W": name}, None, name)


# ---------------------------------------------------------------------------
# relations between psi-functions
# ---------------------------------------------------------------------------

def psi_equiv_test(psi, nu, grid=None, margin=1e6):
    """Two-sided comparability: 0 < inf psi/nu <= sup psi/nu < inf.

    Returns (equivalent, inf_ratio, sup_ratio).  The ratio must not trend to 0
    or inf along any endpoint sequence and its spread must stay below
    ``margin``.
    """
    if psi.a != nu.a or psi.b != nu.b:
        raise DomainError("psi-functions live on different intervals")
    ps = exponent_grid(psi) if grid is None else np.asarray(grid, dtype=np.float64)
    lr = psi.log(ps) - nu.log(ps)
    lo, hi = float(np.min(lr)), float(np.max(lr))
    ok = bool(np.isfinite(lo) and np.isfinite(hi) and hi - lo <= math.log(margin))
    for seq in psi.endpoint_sequences().values():
        if trend(psi.log(seq) - nu.log(seq)) != "flat":
            ok = False
    return ok, math.exp(lo), math.exp(hi)


def dominated_test(nu1, nu2, level=1e-3, sides=None):
    """nu1 << nu2: nu1/nu2 -> 0 wherever nu2 -> inf.  ``sides`` ('a' / 'b')
    restricts the check to some endpoints."""
    if nu1.a != nu2.a or nu1.b != nu2.b:
        raise DomainError("psi-functions live on different intervals")
    sides = [s for s, e in nu2.explodes().items() if e and (sides is None or s in sides)]
    if not sides:
        raise DomainError("nu2 is bounded at both endpoints; relation undefined")
    seqs = nu2.endpoint_sequences()
    for side in sides:
        lr = nu1.log(seqs[side]) - nu2.log(seqs[side])
        if not (lr[-1] < math.log(level) or trend(lr) == "decaying"):
            return False
    return True
