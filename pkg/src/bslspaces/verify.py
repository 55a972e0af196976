"""Seeded property batteries.  Each suite returns a SuiteResult whose
failure messages name the identity that was violated."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .chiest import chi_from_psi, chi_integral_simple, chi_power
from .fundamental import (delta_grid, log_phi_grand, phi_asymptote, phi_grand_closed,
                          phi_small)
from .grandnorm import grand_norm, holder_check
from .indices import index_report
from .measure import MeasureSpace, SampledFunction, integrate_product
from .psi import PsiFunction
from .smallnorm import (acn_check, sharpness_witness, sl_norm_dual, sl_norm_primal,
                        sl_upper_single, verify_decomposition, verify_feasible)

ZETA_CASES = [(1.0, 3.0, 1.0, 2.0), (1.5, 4.0, 1.0, 2.0), (1.0, 2.0, 1.0, 1.0),
              (1.0, math.inf, 1.0, -1.0), (2.0, 8.0, 1.0, 1.0)]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: " + ", ".join(
            f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in self.metrics.items())


def random_atomic(rng, n, signed=True):
    sp = MeasureSpace.atomic(rng.uniform(0.1, 2.0, n))
    lo = -1.0 if signed else 0.05
    return sp, SampledFunction.from_values(sp, rng.uniform(lo, 1.0, n))


# ---------------------------------------------------------------------------

def suite_closed_form(cases=((1, 2, 1, 1), (1.5, 4, 1, 2), (1, math.inf, 1, -1)), lo=1e-8, hi=1e8):
    d = delta_grid(lo, hi)
    worst, fails = 0.0, []
    for c in cases:
        cf = phi_grand_closed(*c, d)
        psi = PsiFunction.zeta(*c)
        num = np.exp(log_phi_grand(psi, np.log(d))[0])
        rel = float(np.max(np.abs(cf.value / num - 1.0)))
        worst = max(worst, rel)
        if cf.diagnostics or rel > 1e-4:
            fails.append(f"closed-form fundamental function deviates for {c}: rel {rel:.2e}")
    return SuiteResult("closed-form fundamental function", not fails, {"max_rel_dev": worst}, fails)


def suite_asymptotics(case=(1, 2, 1, 1)):
    a, b, al, be = case
    psi = PsiFunction.zeta(*case)
    d = delta_grid(1e-12, 1e-10)
    num = np.exp(log_phi_grand(psi, np.log(d))[0])
    ratio = num / phi_asymptote(a, b, al, be, d)
    dev = np.abs(ratio - 1.0)
    # ordered toward delta -> 0
    dev_to_zero = dev[::-1]
    mono = bool(np.all(np.diff(dev_to_zero) <= 1e-12))
    end = float(ratio[0])
    ok = 0.9 <= end <= 1.1 and mono
    fails = [] if ok else [f"small-delta asymptote of the fundamental function: ratio {end:.4f}, monotone={mono}"]
    return SuiteResult("fundamental function asymptote", ok, {"ratio_at_1e-12": end, "monotone": mono}, fails)


def suite_duality(seed=7, count=200, m=64, tol=1e-3):
    rng = np.random.default_rng(seed)
    worst, fails = 0.0, []
    for k in range(count):
        case = ZETA_CASES[k % len(ZETA_CASES)]
        psi = PsiFunction.zeta(*case)
        sp, g = random_atomic(rng, int(rng.integers(2, 5)))
        pr = sl_norm_primal(g, psi, m=m)
        du = sl_norm_dual(g, psi, m=m)
        gap = (du.value - pr.value) / du.value
        worst = max(worst, abs(gap))
        feas, _ = verify_feasible(pr.certificate["f"], psi, pr.certificate["grid"], rtol=1e-8)
        rec, cost, _ = verify_decomposition(du.certificate["decomposition"], g, psi)
        pairing = integrate_product(pr.certificate["f"], g)
        cert = feas and rec and abs(cost - du.value) <= 1e-9 * du.value and abs(pairing - pr.value) <= 1e-9 * du.value
        if abs(gap) > tol or not cert:
            fails.append(f"strong duality (associate norm = decomposition norm) instance {k}: "
                         f"gap {gap:.2e}, certificates ok={cert}")
    return SuiteResult("strong duality", not fails, {"instances": count, "max_rel_gap": worst}, fails)


def suite_indicator(psi=None, deltas=None):
    psi = psi or PsiFunction.zeta(1.0, 3.0, 1.0, 2.0)
    deltas = np.geomspace(1e-3, 1e2, 20) if deltas is None else deltas
    worst, fails = 0.0, []
    for d in deltas:
        sp = MeasureSpace.atomic([d, 1.0])
        g = SampledFunction.from_values(sp, [1.0, 0.0])
        chi = phi_small(psi, d)
        pr = sl_norm_primal(g, psi, exponent_cuts=True).value
        single = sl_upper_single(g, psi).value
        rel = abs(pr - chi) / chi
        worst = max(worst, rel)
        if rel > 1e-3 or single < chi * (1 - 1e-12):
            fails.append(f"indicator norm equals delta / phi(delta) at delta={d:.3g}: rel {rel:.2e}")
    return SuiteResult("indicator associate norm", not fails, {"max_rel_dev": worst}, fails)


def suite_example51():
    ex = catalog.discontinuity_exhibit((2, 10, 1000))
    worst = max(abs(r["chi_integral"] - r["expected"]) for r in ex["rows"])
    ok = worst <= 1e-12 and abs(ex["chi_integral_of_one"] - 1.0) <= 1e-12
    fails = [] if ok else [f"chi-integral of the two-step example: error {worst:.2e}"]
    return SuiteResult("two-step chi-integral example", ok,
                       {"max_abs_err": worst, "limit": ex["limit"], "of_one": ex["chi_integral_of_one"]}, fails)


def random_simple(rng, n):
    sp = MeasureSpace.atomic(rng.uniform(0.05, 2.0, n))
    vals = rng.integers(-3, 4, n).astype(float)
    if not np.any(vals):
        vals[0] = 1.0
    return SampledFunction.from_values(sp, vals)


def suite_chi_domination(seed=11, count=100, tol=1e-6):
    rng = np.random.default_rng(seed)
    worst, fails = -math.inf, []
    for k in range(count):
        psi = PsiFunction.zeta(*ZETA_CASES[k % len(ZETA_CASES)])
        f = random_simple(rng, int(rng.integers(2, 6)))
        chi_val = chi_integral_simple(f, chi_from_psi(psi))
        pr = sl_norm_primal(f, psi, exponent_cuts=True).value
        worst = max(worst, pr - chi_val)
        if chi_val < pr - tol:
            fails.append(f"associate norm <= chi-integral violated at instance {k}: {pr:.8g} > {chi_val:.8g}")
    return SuiteResult("chi-integral dominates the associate norm", not fails,
                       {"instances": count, "max_excess": worst}, fails)


def suite_holder(seed=3, count=10_000):
    rng = np.random.default_rng(seed)
    fails, min_slack = [], math.inf
    psis = [PsiFunction.zeta(*c) for c in ZETA_CASES]
    for k in range(count):
        psi = psis[k % len(psis)]
        n = int(rng.integers(1, 5))
        sp = MeasureSpace.atomic(rng.uniform(0.1, 2.0, n))
        f = SampledFunction.from_values(sp, rng.uniform(-1, 1, n))
        if k % 3 == 0:  # aligned pairs make the inequality nearly tight
            g = f.power(rng.uniform(0.2, 3.0))
        else:
            g = SampledFunction.from_values(sp, rng.uniform(-1, 1, n))
        ok, slack = holder_check(f, g, psi, sl_upper_single(g, psi))
        min_slack = min(min_slack, slack)
        if not ok:
            fails.append(f"generalized Hoelder inequality violated at instance {k}: slack {slack:.3e}")
    return SuiteResult("generalized Hoelder inequality", not fails,
                       {"pairs": count, "violations": len(fails), "min_slack": min_slack}, fails)


def _unimodal(f, psi, n=200):
    from .measure import log_lp_norms
    from .psi import exponent_grid
    ps = exponent_grid(psi, n)
    r = log_lp_norms(f, ps) - psi.log(ps)
    d = np.sign(np.diff(r))
    d = d[d != 0]
    return np.count_nonzero(np.diff(d)) <= 1


def suite_sharpness(seed=5, count=50, rtol=1e-6):
    rng = np.random.default_rng(seed)
    fails, worst, done = [], 0.0, 0
    cases = [c for c in ZETA_CASES if math.isfinite(c[1])]
    while done < count:
        psi = PsiFunction.zeta(*cases[done % len(cases)])
        sp, f = random_atomic(rng, 3, signed=False)
        if not _unimodal(f, psi):
            continue
        w = sharpness_witness(f, psi)
        worst = max(worst, w.rel_error)
        if w.rel_error > rtol:
            fails.append(f"sharpness of the Hoelder bound fails at instance {done}: rel {w.rel_error:.2e}")
        done += 1
    return SuiteResult("sharpness witness", not fails, {"instances": count, "max_rel_err": worst}, fails)


def suite_indices(cases=((1.5, 4.0, 1.0, 1.0), (2.0, 8.0, 1.0, 1.0)), tol=0.02, dual_tol=0.03):
    fails, metrics = [], {}
    for c in cases:
        rep = index_report(PsiFunction.zeta(*c))
        tg, ts = rep["targets"]["grand"], rep["targets"]["small"]
        got = {"G.g1": (rep["grand"]["gamma1"], tg[0]), "G.g2": (rep["grand"]["gamma2"], tg[1]),
               "SL.g1": (rep["small"]["gamma1"], ts[0]), "SL.g2": (rep["small"]["gamma2"], ts[1])}
        for k, (v, t) in got.items():
            rel = abs(v - t) / abs(t)
            metrics[f"{c[0]},{c[1]} {k}"] = v
            if rel > tol:
                fails.append(f"Boyd index {k} for {c}: {v:.4f} vs {t:.4f}")
        for k, v in rep["duality"].items():
            if abs(v - 1.0) > dual_tol:
                fails.append(f"index duality identity {k} for {c}: {v:.4f}")
    return SuiteResult("Boyd indices", not fails, metrics, fails)


def suite_catalog():
    fails, metrics = [], {}
    for nm in ("f_a_gamma", "g_b_nu", "h_m", "f_ab", "g_a_gamma_m", "orlicz_square"):
        err, _, _ = catalog.moment_agreement(catalog.get_entry(nm))
        metrics[f"{nm} moment err"] = err
        if err > 1e-6:
            fails.append(f"analytic vs quadrature moments of {nm}: {err:.2e}")
    for nm in ("f_ab", "g_a_gamma_m", "f_L", "g_L", "orlicz_square"):
        rep = catalog.catalog_membership_check(nm)
        for row in rep["claims"]:
            if not row["pass"]:
                fails.append(f"example membership claim '{row['claim']}' for {nm}")
    for nm in ("f_L", "g_L"):
        if not catalog.radial_divergence_check(catalog.get_entry(nm))["ok"]:
            fails.append(f"moment finiteness interval of {nm}")
    sad = catalog.saddle_asymptotic_check()
    metrics["saddle corridor"] = str(tuple(round(x, 3) for x in sad["corridor"]))
    if not sad["ok"]:
        fails.append("saddle-point growth of log-norms")
    return SuiteResult("example catalog", not fails, metrics, fails)


def acn_cases():
    """(label, g, psi, nested masks) for the absolute continuity battery."""
    out = []
    psi = PsiFunction.zeta(1.5, 4.0, 1.0, 2.0)
    sp = MeasureSpace.real_line()
    lr = sp.log_r
    ind = SampledFunction.indicator(sp, lr < 0.0)
    out.append(("indicator", ind, psi, [lr < -n * math.log(2.0) for n in range(1, 21)]))
    psi2 = PsiFunction.zeta(1.5, 3.0, 1.0, 1.0)
    for nm in ("g_b_nu", "h_m", "f_ab"):
        e = catalog.get_entry(nm)
        g = e.function(analytic=False)
        out.append((nm, g, psi2, [e.space.log_r < -2.0 * n for n in range(1, 21)]))
    return out


def suite_acn(level=1e-3):
    fails, metrics = [], {}
    for label, g, psi, sets in acn_cases():
        rep = acn_check(g, psi, sets, level=level)
        metrics[label] = float(rep["values"][-1] / rep["base"])
        if not rep["ok"]:
            fails.append(f"absolute continuity of the associate norm for {label}: "
                         f"monotone={rep['monotone']}, final ratio {metrics[label]:.2e}")
    return SuiteResult("absolute continuity", not fails, metrics, fails)


SUITES = {
    "closed-form": suite_closed_form,
    "asymptotics": suite_asymptotics,
    "duality": suite_duality,
    "indicator": suite_indicator,
    "example51": suite_example51,
    "chi": suite_chi_domination,
    "holder": suite_holder,
    "sharpness": suite_sharpness,
    "indices": suite_indices,
    "catalog": suite_catalog,
    "acn": suite_acn,
}

SEEDED = {"duality", "chi", "holder", "sharpness"}


def run_suite(name, seed=None, count=None):
    fn = SUITES[name]
    kw = {}
    if name in SEEDED:
        if seed is not None:
            kw["seed"] = seed
        if count is not None:
            kw["count"] = count
    return fn(**kw)
