"""Small Lebesgue (associate) norms: single-exponent bound, primal cutting
planes, dual decompositions, sharpness witness and absolute continuity."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize

from . import _kernels
from .grandnorm import NormReport, grand_norm, sup_over_exponents
from .measure import (DomainError, SampledFunction, conjugate_exponent,
                      integrate_product, log_lp_norms)
from .psi import exponent_grid

SOLVER_GRID = 64
RECON_TOL = 1e-12


# ---------------------------------------------------------------------------
# grids and small helpers
# ---------------------------------------------------------------------------

def solver_grid(psi, m=SOLVER_GRID):
    """m exponents strictly inside (a, b): m - 1 Chebyshev-clustered points
    plus the center of psi (the kink of the zeta family).

    For b = inf the unit interval is mapped by x -> a + (h - a) x / (1 - x)
    with h the center of psi.
    """
    k = np.arange(m - 1)
    x = 0.5 * (1.0 - np.cos(math.pi * (k + 0.5) / (m - 1)))
    c = psi.center
    if math.isfinite(psi.b):
        g = psi.a + (psi.b - psi.a) * x
    else:
        g = psi.a + 2.0 * (c - psi.a) * x / (1.0 - x)
    return np.unique(np.append(g, c))


def _wsum(w, d):
    """sum w |d|, skipping zero terms so infinite weights on null values add nothing."""
    d = np.abs(d)
    nz = d != 0
    return float(np.sum(w[nz] * d[nz]))


def _weighted_norm(w, x, r):
    """(sum w |x|^r)^(1/r) for scalar r in [1, inf]."""
    x = np.abs(x)
    nz = x != 0
    w, x = w[nz], x[nz]
    top = x.max() if x.size else 0.0
    if top == 0.0:
        return 0.0
    if math.isinf(r):
        return float(top)
    return float(top * (np.sum(w * (x / top) ** r)) ** (1.0 / r))


def _atomic_data(g, space):
    if space is not None and space is not g.space:
        raise DomainError("function is not defined on the given space")
    w = g.space.weights
    v = g.values
    # nodes whose weight underflowed to zero are null sets
    live = (v != 0) & (w > 0)
    return w, v, live


@dataclass
class Decomposition:
    """g = sum_k g_k with cost sum_k psi(q_k) |g_k|_{q_k'}."""

    exponents: np.ndarray
    components: np.ndarray          # K x n, values at the atoms
    residual: float
    cost: float
    nonnegative: bool = False

    def to_dict(self):
        return {"exponents": self.exponents.tolist(), "components": self.components.tolist(),
                "residual": self.residual, "cost": self.cost, "nonnegative": self.nonnegative}


def decomposition_cost(dec, psi, weights):
    """Recompute sum psi(q_k) |g_k|_{q_k'} from scratch."""
    total = 0.0
    for q, comp in zip(dec.exponents, dec.components):
        total += float(psi(q)) * _weighted_norm(weights, comp, float(conjugate_exponent(q)))
    return total


def verify_decomposition(dec, g, psi, tol=RECON_TOL):
    """Independent re-check: reconstruction, exponent range, sign mode and cost.

    Returns (ok, recomputed cost, L1 residual).
    """
    w = g.space.weights
    v = g.values
    comps = dec.components.reshape(-1, v.size)
    resid = _wsum(w, comps.sum(axis=0) - v) if comps.size else _wsum(w, v)
    scale = max(_wsum(w, v), 1e-300)
    inside = bool(np.all((dec.exponents > psi.a) & (dec.exponents < psi.b)))
    signs = True
    if dec.nonnegative:
        signs = bool(np.all(comps * np.sign(v)[None, :] >= -1e-15 * np.abs(v).max(initial=0.0)))
    cost = decomposition_cost(dec, psi, w)
    ok = resid <= tol * scale + 1e-300 and inside and signs
    return bool(ok), cost, resid


def verify_feasible(f, psi, grid, rtol=1e-9):
    """Is |f|_p <= psi(p) on every grid exponent?  Returns (ok, max ratio)."""
    ln = log_lp_norms(f, grid) - psi.log(grid)
    m = float(np.exp(np.max(ln))) if np.size(ln) else 0.0
    return bool(m <= 1.0 + rtol), m


# ---------------------------------------------------------------------------
# single-exponent bound
# ---------------------------------------------------------------------------

def sl_upper_single(g, psi, space=None, n=128, extra=()):
    """inf over p in (a, b) of psi(p) |g|_{p'}: an upper bound on ||g||_SL.

    ``extra`` lists additional exponents p to try (useful when |g|_{p'} is
    finite only at isolated points).
    """
    if space is not None and space is not g.space:
        raise DomainError("function is not defined on the given space")
    if g.is_zero():
        return NormReport(0.0, None, 0, certificate={"kind": "none"})

    def obj(ps):
        ps = np.asarray(ps, dtype=np.float64)
        return -(psi.log(ps) + log_lp_norms(g, conjugate_exponent(ps)))

    grid = np.unique(np.concatenate([exponent_grid(psi, n), np.asarray(extra, dtype=np.float64)]))
    grid = grid[(grid > psi.a) & (grid < psi.b)]
    lv, arg, info = sup_over_exponents(obj, psi, grid=grid, divergence=False)
    if not math.isfinite(lv):
        return NormReport(math.inf, None, int(grid.size), diagnostics=info)
    val = math.exp(-lv)
    return NormReport(val, arg, int(grid.size), upper=val,
                      certificate={"kind": "decomposition", "exponents": [arg], "single": True},
                      diagnostics=info)


# ---------------------------------------------------------------------------
# primal: sup <f, g> over the intersection of L_p balls, by cutting planes
# ---------------------------------------------------------------------------

def _continuum_violation(w, y, psi):
    """max over p in (a, b) of N_p(y) / psi(p), with its maximizer."""
    la = np.where(y > 0, np.log(np.where(y > 0, y, 1.0)), -np.inf)
    lw = np.log(w)
    edge = np.zeros(w.size, dtype=bool)

    def obj(ps):
        ps = np.atleast_1d(np.asarray(ps, dtype=np.float64))
        lm, _ = _kernels.log_moments(lw, la, ps, edge)
        return lm / ps - psi.log(ps)

    lv, arg, _ = sup_over_exponents(obj, psi, n=96, divergence=False)
    return math.exp(lv), arg


def sl_norm_primal(g, psi, space=None, p_grid=None, m=SOLVER_GRID, tol=1e-6,
                   maxiter=2000, exponent_cuts=False):
    """max <f, g> subject to |f|_p <= psi(p) for p in the grid.

    Kelley cutting planes: each cut is the supporting hyperplane of one
    L_p ball, solved as an LP.  ``value`` is the best feasible objective;
    ``upper`` is the LP bound.  With ``exponent_cuts`` the most violated
    exponent of the whole interval is added to the grid until the feasible
    point satisfies every constraint, so the result approaches the
    ungridded norm.  The LP duals yield a decomposition certificate.
    """
    w_all, v_all, live = _atomic_data(g, space)
    grid = solver_grid(psi, m) if p_grid is None else np.asarray(p_grid, dtype=np.float64)
    if np.any(grid <= psi.a) or np.any(grid >= psi.b):
        raise DomainError("grid exponents must lie inside (a, b)")
    if not live.any():
        f0 = SampledFunction.zero(g.space)
        return NormReport(0.0, None, int(grid.size), tol, certificate={"kind": "feasible-point", "f": f0},
                          lower=0.0, upper=0.0)
    w = w_all[live]
    x = np.abs(v_all[live])
    c = w * x
    n = x.size
    ps = list(grid)
    lpsi = list(psi.log(grid))

    rows, rhs, owner = [], [], []

    def add_cut(j, row):
        rows.append(row)
        rhs.append(math.exp(lpsi[j]))
        owner.append(j)

    # box cuts: the tightest single-coordinate bound coming from any ball
    for i in range(n):
        lb = np.array(lpsi) - np.log(w[i]) / np.array(ps)
        j = int(np.argmin(lb))
        row = np.zeros(n)
        row[i] = w[i] ** (1.0 / ps[j])
        add_cut(j, row)
    # warm start: each ball's own maximizer y ~ x^(1/(p-1))
    for j, p in enumerate(ps):
        y0 = np.exp(np.log(x) / (p - 1.0) - np.log(x).max() / (p - 1.0))
        _, gr = _kernels.norms_and_gradients(w, y0, np.array([p]))
        add_cut(j, gr[0])

    best_lb, best_y, ub, it = 0.0, None, math.inf, 0
    status = "converged"
    res = None
    while True:
        it += 1
        A = np.array(rows)
        res = linprog(-c, A_ub=A, b_ub=np.array(rhs), bounds=[(0, None)] * n, method="highs")
        if res.status != 0:
            status = f"lp failure: {res.message}"
            break
        ub = -res.fun
        y = np.maximum(res.x, 0.0)
        P = np.array(ps)
        norms, grads = _kernels.norms_and_gradients(w, y, P)
        ratio = norms / np.exp(np.array(lpsi))
        phi = ratio.max()
        if phi > 0:
            lb = float(c @ y) / max(phi, 1.0) if phi <= 1.0 else float(c @ y) / phi
            if lb > best_lb:
                best_lb, best_y = lb, y / max(phi, 1.0)
        gap = (ub - best_lb) / max(ub, 1e-300)
        if gap <= tol:
            if exponent_cuts and best_y is not None:
                viol, p_new = _continuum_violation(w, best_y, psi)
                if viol > 1.0 + tol and isinstance(p_new, float) and p_new not in ps:
                    ps.append(p_new)
                    lpsi.append(float(psi.log(p_new)))
                    # the feasible point must be rescaled for the new constraint
                    best_y = best_y / viol
                    best_lb = float(c @ best_y)
                    _, gr = _kernels.norms_and_gradients(w, y, np.array([p_new]))
                    add_cut(len(ps) - 1, gr[0])
                    if it < maxiter:
                        continue
            break
        if it >= maxiter:
            status = "iteration budget exhausted"
            break
        for j in np.nonzero(ratio > 1.0 + 1e-13)[0]:
            add_cut(int(j), grads[j])

    f_vals = np.zeros_like(v_all)
    if best_y is not None:
        f_vals[live] = best_y * np.sign(v_all[live])
    f_star = SampledFunction.from_values(g.space, f_vals, name="primal maximizer")
    cert = {"kind": "feasible-point", "f": f_star, "grid": np.array(ps)}
    dec = None
    if res is not None and res.status == 0:
        dec = _decomposition_from_duals(res, rows, owner, ps, lpsi, w, x, live, v_all)
        cert["decomposition"] = dec
    diag = {"iterations": it, "cuts": len(rows), "status": status,
            "gap": (ub - best_lb) / max(ub, 1e-300), "exponents": len(ps)}
    return NormReport(best_lb, None, len(ps), tol, certificate=cert, lower=best_lb, upper=ub,
                      diagnostics=diag)


def _decomposition_from_duals(res, rows, owner, ps, lpsi, w, x, live, v_all):
    """Turn LP multipliers into a decomposition of g.

    Each cut row is w * u with |u|_{p'} <= 1, so sum_k lam_k u_k dominates
    |g|; shrinking coordinatewise keeps every piece no larger.
    """
    lam = np.maximum(-np.asarray(res.ineqlin.marginals), 0.0)
    U = np.array(rows) / w[None, :]
    owner = np.array(owner)
    S = lam @ U
    shrink = np.where(S > 0, np.minimum(x / np.where(S > 0, S, 1.0), 1.0), 0.0)
    used = sorted(set(owner[lam > 0].tolist())) or [0]
    parts = np.array([(lam[owner == j] @ U[owner == j]) * shrink for j in used])
    parts[0] += x - parts.sum(axis=0)  # numerical shortfall, exact reconstruction
    comps = np.zeros((len(used), v_all.size))
    comps[:, live] = parts * np.sign(v_all[live])[None, :]
    resid = _wsum(w, comps[:, live].sum(axis=0) - v_all[live])
    cost = sum(math.exp(lpsi[j]) * _weighted_norm(w, parts[k], float(conjugate_exponent(ps[j])))
               for k, j in enumerate(used))
    return Decomposition(np.array([ps[j] for j in used]), comps, resid, float(cost), True)


# ---------------------------------------------------------------------------
# dual: decompositions over a growing exponent set
# ---------------------------------------------------------------------------

def _split_cost(z, w, x, lpsi_s, r_s):
    """Cost and gradient of sum_j psi_j |theta_j * x|_{r_j} in softmax logits."""
    k, n = lpsi_s.size, x.size
    Z = z.reshape(k, n)
    Z = Z - Z.max(axis=0)
    E = np.exp(Z)
    T = E / E.sum(axis=0)
    cost = 0.0
    G = np.zeros((k, n))
    for j in range(k):
        y = T[j] * x
        N, gr = _kernels.norms_and_gradients(w, y, np.array([r_s[j]]))
        pj = math.exp(lpsi_s[j])
        cost += pj * N[0]
        G[j] = pj * gr[0] * x
    avg = (T * G).sum(axis=0)
    dz = T * (G - avg[None, :])
    return cost, dz.ravel()


def _multiplier(w, x, T, lpsi_s, r_s):
    """f_i = psi_j (y_ji / N_j)^(r_j - 1), averaged over the active pieces."""
    f = np.zeros(x.size)
    for j in range(T.shape[0]):
        y = T[j] * x
        N, gr = _kernels.norms_and_gradients(w, y, np.array([r_s[j]]))
        f += T[j] * math.exp(lpsi_s[j]) * gr[0] / w
    return f


def sl_norm_dual(g, psi, space=None, q_grid=None, m=SOLVER_GRID, tol=1e-7, maxiter=60):
    """inf of sum_k psi(q_k) |g_k|_{q_k'} over decompositions g = sum_k g_k
    with q_k from the grid.

    The exponent set starts from the best single exponent and grows by the
    exponent whose constraint the implied multiplier violates most; for a
    fixed set the split is optimized with L-BFGS over softmax logits.
    ``value`` is the decomposition cost (an upper bound); ``lower`` is the
    objective at the rescaled multiplier.
    """
    w_all, v_all, live = _atomic_data(g, space)
    grid = solver_grid(psi, m) if q_grid is None else np.asarray(q_grid, dtype=np.float64)
    if np.any(grid <= psi.a) or np.any(grid >= psi.b):
        raise DomainError("grid exponents must lie inside (a, b)")
    if q_grid is None and live.any():
        # the best single exponent, so the decomposition never loses to it
        p1 = sl_upper_single(g, psi).arg
        if isinstance(p1, float) and psi.a < p1 < psi.b:
            grid = np.unique(np.append(grid, p1))
    if not live.any():
        dec = Decomposition(np.zeros(0), np.zeros((0, v_all.size)), 0.0, 0.0, True)
        return NormReport(0.0, None, int(grid.size), tol, certificate={"kind": "decomposition",
                          "decomposition": dec}, lower=0.0, upper=0.0)
    w = w_all[live]
    x = np.abs(v_all[live])
    n = x.size
    lpsi = psi.log(grid)
    r = conjugate_exponent(grid)
    single = np.array([lpsi[j] + math.log(_weighted_norm(w, x, r[j])) for j in range(grid.size)])
    S = [int(np.argmin(single))]
    best = (math.exp(single[S[0]]), np.ones((1, n)), list(S))
    lower = 0.0
    z = np.zeros(n)
    it = 0
    while True:
        it += 1
        ls, rs = lpsi[S], r[S]
        if len(S) == 1:
            T = np.ones((1, n))
            cost = math.exp(single[S[0]])
        else:
            out = minimize(_split_cost, z, args=(w, x, ls, rs), jac=True, method="L-BFGS-B",
                           options={"maxiter": 2000, "ftol": 1e-15, "gtol": 1e-13})
            Z = out.x.reshape(len(S), n)
            Z = Z - Z.max(axis=0)
            T = np.exp(Z) / np.exp(Z).sum(axis=0)
            cost = _split_cost(out.x, w, x, ls, rs)[0]
            z = out.x
        if cost < best[0]:
            best = (cost, T, list(S))
        f = _multiplier(w, x, T, ls, rs)
        norms, _ = _kernels.norms_and_gradients(w, f, grid)
        viol = norms / np.exp(lpsi)
        phi = viol.max()
        if phi > 0:
            lower = max(lower, float(np.sum(w * f * x)) / max(phi, 1e-300))
        gap = (best[0] - lower) / best[0]
        j = int(np.argmax(viol))
        if gap <= tol or it >= maxiter or j in S:
            break
        S.append(j)
        z = np.concatenate([z.reshape(-1, n), np.full((1, n), np.log(1e-3) + z.reshape(-1, n).max(axis=0))]).ravel()
    cost, T, Sb = best
    comps = np.zeros((len(Sb), v_all.size))
    comps[:, live] = T * v_all[live][None, :]
    comps[-1, live] += v_all[live] - comps[:, live].sum(axis=0)  # exact reconstruction
    resid = _wsum(w_all, comps.sum(axis=0) - v_all)
    dec = Decomposition(grid[Sb], comps, resid, 0.0, True)
    dec.cost = decomposition_cost(dec, psi, w_all)
    diag = {"iterations": it, "exponents_used": len(Sb), "gap": (dec.cost - lower) / dec.cost}
    return NormReport(dec.cost, None, int(grid.size), tol, certificate={"kind": "decomposition",
                      "decomposition": dec}, lower=lower, upper=dec.cost, diagnostics=diag)


def sl_norm(g, psi, space=None, m=SOLVER_GRID, mode="both", tol=1e-7):
    """Primal, dual or both; 'both' reports the gap and both certificates."""
    if mode == "primal":
        return sl_norm_primal(g, psi, space, m=m, tol=tol)
    if mode == "dual":
        return sl_norm_dual(g, psi, space, m=m, tol=tol)
    if mode != "both":
        raise ValueError("mode must be primal, dual or both")
    pr = sl_norm_primal(g, psi, space, m=m, tol=tol)
    du = sl_norm_dual(g, psi, space, m=m, tol=tol)
    gap = (du.value - pr.value) / du.value if du.value > 0 else 0.0
    return NormReport(du.value, None, du.grid_size, tol,
                      certificate={"kind": "decomposition", "primal": pr.certificate,
                                   "dual": du.certificate},
                      lower=pr.value, upper=du.value,
                      diagnostics={"duality_gap": gap, "primal": pr.diagnostics, "dual": du.diagnostics})


# ---------------------------------------------------------------------------
# sharpness and absolute continuity
# ---------------------------------------------------------------------------

@dataclass
class Witness:
    sigma: float
    g: SampledFunction
    pairing: float
    grand: float
    single: float
    rel_error: float
    details: dict = field(default_factory=dict)


def sharpness_witness(f, psi, space=None, rtol=1e-6):
    """Witness g = f^(sigma - 1) for the equality <f, g> = ||f||_G * psi(sigma) |g|_{sigma'}.

    sigma is where |f|_sigma / psi(sigma) attains the grand norm.
    """
    if space is not None and space is not f.space:
        raise DomainError("function is not defined on the given space")
    if f.is_zero() or np.any(f.sign < 0):
        raise DomainError("witness needs a nonzero f >= 0")
    gn = grand_norm(f, psi)
    if not isinstance(gn.arg, float) or not math.isfinite(gn.value):
        raise DomainError("no interior maximizer: f is not in G^o numerically")
    sigma = gn.arg
    g = f.power(sigma - 1.0)
    pairing = integrate_product(f, g)
    single = sl_upper_single(g, psi, extra=(sigma,))
    # Hölder equality certificate: the value at sigma itself
    at_sigma = float(psi(sigma)) * math.exp(float(log_lp_norms(g, conjugate_exponent(sigma))[0]))
    bound = min(single.value, at_sigma)
    rhs = gn.value * bound
    rel = abs(pairing - rhs) / max(abs(rhs), 1e-300)
    return Witness(sigma, g, pairing, gn.value, bound, rel,
                   {"single_search": single.value, "at_sigma": at_sigma, "ok": rel <= rtol})


def acn_check(g, psi, sets, space=None, level=1e-3, bound="single"):
    """Upper bounds of ||g I(E_n)||_SL along nested sets E_1 >= E_2 >= ...

    Returns a dict with the profile, the base norm bound, and flags for
    monotone decrease and for ending below ``level`` times the base.
    """
    if space is not None and space is not g.space:
        raise DomainError("function is not defined on the given space")
    est = sl_upper_single if bound == "single" else (lambda h, p: sl_norm_dual(h, p))
    base = est(g, psi).value
    vals = []
    for mask in sets:
        vals.append(est(g.restrict(mask), psi).value)
    vals = np.array(vals)
    mono = bool(np.all(np.diff(vals) <= 1e-12 * max(base, 1e-300)))
    below = bool(vals.size and vals[-1] <= level * base) or base == 0.0
    first = int(np.argmax(vals <= level * base)) if np.any(vals <= level * base) else None
    return {"values": vals, "base": base, "monotone": mono, "below": below,
            "first_below": first, "ok": mono and below}
