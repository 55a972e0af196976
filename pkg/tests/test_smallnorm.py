import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bslspaces import catalog
from bslspaces.fundamental import phi_small
from bslspaces.grandnorm import grand_norm
from bslspaces.measure import (DomainError, MeasureSpace, SampledFunction, conjugate_exponent,
                               integrate_product)
from bslspaces.psi import PsiFunction
from bslspaces.smallnorm import (acn_check, sharpness_witness, sl_norm, sl_norm_dual,
                                 sl_norm_primal, sl_upper_single, solver_grid,
                                 verify_decomposition, verify_feasible)

PSI = PsiFunction.zeta(1.0, 3.0, 1.0, 2.0)
FLAT = PsiFunction.custom(1.0, 2.0, lambda p: np.zeros_like(p), log=True)


def brute_two_atoms(w, g, psi, n_dir=20001):
    """Exact associate norm on two atoms: sweep directions u >= 0 of f, scale
    each to the boundary min_p psi(p)/|u|_p over dense exponents."""
    hi = psi.b if math.isfinite(psi.b) else 200.0
    ps = np.concatenate([np.linspace(psi.a, hi, 4001)[1:-1], [psi.center],
                         psi.a + np.geomspace(1e-9, 0.5 * (hi - psi.a), 400),
                         hi - np.geomspace(1e-9, 0.5 * (hi - psi.a), 400)])
    lpsi = psi.log(ps)
    th = np.linspace(0, math.pi / 2, n_dir)
    u = np.stack([np.cos(th), np.sin(th)], axis=1)
    with np.errstate(divide="ignore"):
        lu = np.log(u)
    lw = np.log(w)
    lm = np.logaddexp(lw[0] + ps[None, :] * lu[:, :1], lw[1] + ps[None, :] * lu[:, 1:])
    t = np.exp(np.min(lpsi[None, :] - lm / ps[None, :], axis=1))
    return float(np.max(t * (u @ (w * np.abs(g)))))


def test_zero_function():
    sp = MeasureSpace.atomic([1.0, 2.0])
    z = SampledFunction.zero(sp)
    assert sl_upper_single(z, PSI).value == 0.0
    assert sl_norm_primal(z, PSI).value == 0.0
    du = sl_norm_dual(z, PSI)
    assert du.value == 0.0
    assert du.certificate["decomposition"].components.size == 0


def test_flat_psi_two_atoms():
    sp = MeasureSpace.atomic([1.0, 1.0])
    g = SampledFunction.from_values(sp, [1.0, 0.0])
    pr = sl_norm_primal(g, FLAT)
    assert pr.value == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(pr.certificate["f"].values, [1.0, 0.0], atol=1e-6)
    assert sl_norm_dual(g, FLAT).value == pytest.approx(1.0, abs=1e-9)
    assert sl_upper_single(g, FLAT).value == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("delta", [0.01, 0.3, 1.0, 5.0])
def test_indicator_matches_chi(delta):
    sp = MeasureSpace.atomic([delta, 1.0])
    g = SampledFunction.from_values(sp, [1.0, 0.0])
    chi = phi_small(PSI, delta)
    assert sl_norm_primal(g, PSI).value == pytest.approx(chi, rel=1e-3)
    assert sl_norm_dual(g, PSI).value == pytest.approx(chi, rel=1e-3)
    assert sl_norm_primal(g, PSI, exponent_cuts=True).value == pytest.approx(chi, rel=1e-6)


def test_single_bound_never_below_chi():
    for d in np.geomspace(1e-4, 1e3, 15):
        sp = MeasureSpace.atomic([d])
        g = SampledFunction.from_values(sp, [1.0])
        assert sl_upper_single(g, PSI).value >= phi_small(PSI, d) * (1 - 1e-12)


def test_isolated_exponent_bound_is_attained():
    psi = PsiFunction.zeta(1.2, 3.0, 1.0, 1.0)
    rep = catalog.example41_check(psi)
    assert rep["rel"] <= 1e-12
    assert rep["arg"] == pytest.approx(2.0)
    # |g|_2^2 = 2 * int_0^inf (1 + t)^-2 dt = 2
    assert rep["exact"] == pytest.approx(psi(2.0) * math.sqrt(2.0), rel=1e-6)


@pytest.mark.parametrize("psi", [PSI, PsiFunction.zeta(1.0, math.inf, 1.0, -1.0),
                                 PsiFunction.zeta(1.5, 4.0, 1.0, 2.0)])
def test_two_atom_brute_force(rng, psi):
    for _ in range(3):
        w = rng.uniform(0.1, 2.0, 2)
        v = rng.uniform(-1, 1, 2)
        g = SampledFunction.from_values(MeasureSpace.atomic(w), v)
        ref = brute_two_atoms(w, v, psi)
        pr = sl_norm_primal(g, psi, exponent_cuts=True).value
        du = sl_norm_dual(g, psi).value
        assert pr == pytest.approx(ref, rel=2e-5)
        assert du == pytest.approx(ref, rel=2e-5)


def test_solver_grid_contains_crossover():
    g = solver_grid(PSI)
    assert g.size == 64 and np.any(g == PSI.center)
    assert np.all((g > 1.0) & (g < 3.0))


def test_both_mode_reports_gap():
    sp = MeasureSpace.atomic([0.3, 1.1, 0.7])
    g = SampledFunction.from_values(sp, [0.5, -1.0, 0.2])
    rep = sl_norm(g, PSI)
    assert rep.lower <= rep.upper * (1 + 1e-9)
    assert abs(rep.diagnostics["duality_gap"]) <= 1e-3


def test_sharpness_for_indicator():
    d = 0.2
    sp = MeasureSpace.atomic([d, 1.0])
    f = SampledFunction.from_values(sp, [1.0, 0.0])
    w = sharpness_witness(f, PSI)
    assert w.rel_error <= 1e-9
    assert np.allclose(w.g.values, f.values)
    assert w.grand * phi_small(PSI, d) == pytest.approx(d, rel=1e-10)


def test_sharpness_rejects_zero_and_signed():
    sp = MeasureSpace.atomic([1.0, 1.0])
    with pytest.raises(DomainError):
        sharpness_witness(SampledFunction.zero(sp), PSI)
    with pytest.raises(DomainError):
        sharpness_witness(SampledFunction.from_values(sp, [1.0, -1.0]), PSI)


def test_acn_indicator_profile_is_chi():
    sp = MeasureSpace.atomic(np.full(40, 0.5) ** np.arange(1, 41))
    g = SampledFunction.from_values(sp, np.ones(40))
    sets = [np.arange(40) >= k for k in range(1, 20)]
    rep = acn_check(g, PSI, sets)
    expect = phi_small(PSI, np.array([sp.measure(s) for s in sets]))
    assert np.all(rep["values"] >= expect * (1 - 1e-12))
    assert rep["monotone"]


def test_acn_zero():
    sp = MeasureSpace.atomic([1.0, 1.0])
    rep = acn_check(SampledFunction.zero(sp), PSI, [np.array([True, False])])
    assert np.all(rep["values"] == 0.0) and rep["ok"]


def random_g(draw_vals, draw_w):
    sp = MeasureSpace.atomic(draw_w)
    return SampledFunction.from_values(sp, draw_vals)


vec = st.integers(2, 4).flatmap(lambda n: st.tuples(
    st.lists(st.floats(0.1, 2.0), min_size=n, max_size=n),
    st.lists(st.floats(-1, 1), min_size=n, max_size=n).filter(lambda v: max(map(abs, v)) > 1e-2)))


@settings(max_examples=15)
@given(vec)
def test_weak_duality_and_certificates(data):
    w, v = data
    g = random_g(v, w)
    pr = sl_norm_primal(g, PSI)
    du = sl_norm_dual(g, PSI)
    assert pr.value <= du.value * (1 + 1e-7)
    assert (du.value - pr.value) / du.value <= 1e-3
    ok, _ = verify_feasible(pr.certificate["f"], PSI, pr.certificate["grid"], rtol=1e-8)
    assert ok
    assert integrate_product(pr.certificate["f"], g) == pytest.approx(pr.value, rel=1e-9)
    ok, cost, _ = verify_decomposition(du.certificate["decomposition"], g, PSI)
    assert ok and cost == pytest.approx(du.value, rel=1e-9)
    assert du.value <= sl_upper_single(g, PSI).value * (1 + 1e-9)


@settings(max_examples=15)
@given(vec, st.floats(-4, 4).filter(lambda x: abs(x) > 1e-3))
def test_homogeneity(data, lam):
    w, v = data
    g = random_g(v, w)
    a = sl_norm_dual(g, PSI).value
    b = sl_norm_dual(g.scale(lam), PSI).value
    assert b == pytest.approx(abs(lam) * a, rel=1e-6)


@settings(max_examples=15)
@given(vec, vec)
def test_triangle_inequality(d1, d2):
    w, v = d1
    n = len(w)
    v2 = (list(d2[1]) * 2)[:n]
    g = random_g(v, w)
    h = SampledFunction.from_values(g.space, v2)
    lhs = sl_norm_primal(g + h, PSI).value
    assert lhs <= sl_norm_dual(g, PSI).value + sl_norm_dual(h, PSI).value + 1e-9


@settings(max_examples=15)
@given(vec, vec)
def test_generalized_holder(d1, d2):
    w, v = d1
    n = len(w)
    g = random_g(v, w)
    f = SampledFunction.from_values(g.space, (list(d2[1]) * 2)[:n])
    lhs = abs(integrate_product(f, g))
    assert lhs <= grand_norm(f, PSI).value * sl_norm_dual(g, PSI).value * (1 + 1e-9)
