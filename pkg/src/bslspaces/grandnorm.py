"""Grand Lebesgue norms sup_p |f|_p / psi(p) and G^o membership."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import numpy as np

from ._optim import golden_max
from .measure import DomainError, integrate_product, log_lp_norms
from .psi import EXPLODE_LEVEL, exponent_grid, trend

POLISH_TOL = 1e-11


@dataclass
class NormReport:
    """Result of a norm computation.

    ``arg`` is the optimizing exponent, or one of the markers 'a+' / 'b-'
    when the optimum is an endpoint limit.  ``lower`` / ``upper`` are
    certified bounds when the method produces them.
    """

    value: float
    arg: Any = None
    grid_size: int = 0
    tolerance: float = POLISH_TOL
    certificate: Optional[dict] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        def clean(x):
            if isinstance(x, dict):
                return {str(k): clean(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [clean(v) for v in x]
            if isinstance(x, np.ndarray):
                return [clean(v) for v in x.tolist()]
            if isinstance(x, (np.floating, float)):
                x = float(x)
                if math.isinf(x):
                    return "inf" if x > 0 else "-inf"
                if math.isnan(x):
                    return "nan"
                return x
            if isinstance(x, (np.integer,)):
                return int(x)
            if isinstance(x, (np.bool_,)):
                return bool(x)
            return x

        return clean(asdict(self))

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def sup_over_exponents(log_obj, psi, n=128, tol=POLISH_TOL, grid=None, divergence=True):
    """Maximize a log-objective over the open exponent interval of ``psi``.

    Evaluates on the clustered grid, checks both endpoint sequences for
    divergence (unless ``divergence`` is off), then polishes the best
    interior bracket by golden section.  Returns (log_value, arg, info).
    """
    ps = exponent_grid(psi, n) if grid is None else np.asarray(grid, dtype=np.float64)
    vals = np.asarray(log_obj(ps), dtype=np.float64)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    info = {"grid_size": int(ps.size), "diverged": False}
    if divergence and np.any(vals == np.inf):
        i = int(np.argmax(vals == np.inf))
        info["diverged"] = True
        info["reason"] = "infinite moment"
        return math.inf, float(ps[i]), info
    for side, seq in (psi.endpoint_sequences().items() if divergence else ()):
        lv = np.asarray(log_obj(seq), dtype=np.float64)
        if np.any(lv == np.inf) or (lv[-1] > math.log(EXPLODE_LEVEL) and np.all(np.diff(lv[-3:]) > 0)) \
                or trend(lv) == "growing":
            info["diverged"] = True
            info["reason"] = f"objective grows toward the {side} endpoint"
            return math.inf, f"{side}+" if side == "a" else f"{side}-", info
    if not np.any(np.isfinite(vals)):
        return -math.inf, None, info
    i = int(np.argmax(vals))  # first occurrence: smallest maximizing p
    if i == 0:
        return float(vals[0]), "a+", info
    if i == ps.size - 1:
        return float(vals[-1]), "b-", info

    def scalar(p):
        v = float(np.asarray(log_obj(np.array([p])))[0])
        return -math.inf if math.isnan(v) else v

    p_star, v_star = golden_max(scalar, ps[i - 1], ps[i + 1], tol=tol)
    if v_star >= vals[i]:
        return float(v_star), float(p_star), info
    return float(vals[i]), float(ps[i]), info


def _log_ratio(f, psi, method="auto"):
    def obj(ps):
        return log_lp_norms(f, ps, method=method) - psi.log(ps)
    return obj


def grand_norm(f, psi, space=None, n=128, method="auto"):
    """||f||_G(psi) = sup over p in (a, b) of |f|_p / psi(p)."""
    if space is not None and space is not f.space:
        raise DomainError("function is not defined on the given space")
    if f.is_zero():
        return NormReport(0.0, None, 0, POLISH_TOL)
    lv, arg, info = sup_over_exponents(_log_ratio(f, psi, method), psi, n=n)
    value = math.exp(lv) if math.isfinite(lv) else (math.inf if lv > 0 else 0.0)
    return NormReport(value, arg, info["grid_size"], POLISH_TOL, diagnostics=info)


def in_g0_test(f, psi, space=None, level=1e-3, method="auto"):
    """Is |f|_p / psi(p) -> 0 wherever psi(p) -> inf?

    Returns (verdict, profile) where the profile maps each exploding endpoint
    to its sampled exponents and ratios.
    """
    if space is not None and space is not f.space:
        raise DomainError("function is not defined on the given space")
    ex = psi.explodes()
    sides = [s for s, e in ex.items() if e]
    if not sides:
        raise DomainError("psi is bounded at both endpoints; G^o test not applicable")
    if f.is_zero():
        return True, {s: None for s in sides}
    obj = _log_ratio(f, psi, method)
    seqs = psi.endpoint_sequences()
    verdict = True
    profile = {}
    for side in sides:
        lv = np.asarray(obj(seqs[side]), dtype=np.float64)
        tail = lv[-5:]
        small = np.isfinite(tail[-1]) and tail[-1] < math.log(level) and np.all(np.diff(tail) < 0)
        ok = bool(small or trend(lv) == "decaying")
        with np.errstate(over="ignore"):
            ratio = np.exp(lv)
        profile[side] = {"p": seqs[side].tolist(), "ratio": ratio.tolist(), "vanishes": ok}
        verdict = verdict and ok
    return verdict, profile


def holder_check(f, g, psi, sl_upper, rtol=1e-10):
    """Check |int f g| <= ||f||_G * (certified upper bound on ||g||_SL).

    Returns (holds, slack) with slack = rhs - lhs.
    """
    bound = sl_upper.value if isinstance(sl_upper, NormReport) else float(sl_upper)
    lhs = abs(integrate_product(f, g))
    gn = grand_norm(f, psi).value
    rhs = gn * bound if bound > 0 else 0.0
    slack = rhs - lhs
    return bool(lhs <= rhs + rtol * max(rhs, 1e-300)), slack
