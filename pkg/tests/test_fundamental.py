import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bslspaces.fundamental import (delta_grid, fundamental_profile, left_branch_counterexample,
                                   log_phi_grand, phi_asymptote, phi_grand_closed,
                                   phi_grand_numeric, phi_small, sqrt_model, stationary_residual)
from bslspaces.measure import DomainError, MeasureSpace
from bslspaces.psi import PsiFunction, zeta_root_h

CASES = [(1, 2, 1, 1), (1.5, 4, 1, 2), (1, math.inf, 1, -1)]


def dense_grid(psi, n=400001):
    """Dense exponents plus the crossover, where the objective has its kink."""
    hi = psi.b if math.isfinite(psi.b) else 400.0
    near = np.geomspace(1e-10, 0.5 * (hi - psi.a), n // 4)
    return np.concatenate([np.linspace(psi.a, hi, n)[1:-1], psi.a + near, hi - near, [psi.h]])


def dense_phi(psi, delta):
    ps = dense_grid(psi)
    return float(np.max(delta ** (1 / ps) / psi(ps)))


@pytest.mark.parametrize("case", CASES)
def test_closed_form_matches_numeric(case):
    d = delta_grid(1e-8, 1e8)
    cf = phi_grand_closed(*case, d)
    num = phi_grand_numeric(PsiFunction.zeta(*case), d)
    assert cf.diagnostics == []
    assert np.max(np.abs(cf.value / num - 1)) <= 1e-4


@pytest.mark.parametrize("case", CASES)
@pytest.mark.parametrize("delta", [1e-6, 0.01, 1.0, 3.0, 1e5])
def test_numeric_against_dense_grid(case, delta):
    psi = PsiFunction.zeta(*case)
    assert phi_grand_numeric(psi, delta) == pytest.approx(dense_phi(psi, delta), rel=1e-7)


def test_delta_one_is_reciprocal_of_inf_psi():
    psi = PsiFunction.zeta(1.5, 4, 1, 2)
    ps = dense_grid(psi)
    assert phi_grand_numeric(psi, 1.0) == pytest.approx(1 / psi(ps).min(), rel=1e-9)


def test_closed_form_at_one_hundredth():
    cf = phi_grand_closed(1, 2, 1, 1, np.array([0.01]))
    assert cf.value[0] == pytest.approx(phi_grand_numeric(PsiFunction.zeta(1, 2, 1, 1), 0.01), rel=1e-6)


def test_kink_branch_value():
    # where the maximizer sits at the crossover h, phi = delta^(1/h) (h - a)^alpha
    a, b, al, be = 1.5, 4, 1, 2
    h = zeta_root_h(a, b, al, be)
    psi = PsiFunction.zeta(a, b, al, be)
    d = delta_grid(1e-3, 1e3)
    _, arg = log_phi_grand(psi, np.log(d))
    at_h = np.abs(arg - h) < 1e-6
    assert at_h.sum() > 5
    assert np.allclose(phi_grand_numeric(psi, d[at_h]), d[at_h] ** (1 / h) * (h - a) ** al, rtol=1e-12)


def test_left_root_is_stationary():
    res, p1 = stationary_residual(1.0, 1.0, math.exp(10))
    assert abs(res) <= 1e-8
    # and it is the maximizer of log(delta^(1/p) (p - a)^alpha) near p1
    f = lambda p: 10 / p + math.log(p - 1)
    assert f(p1) >= max(f(p1 - 1e-4), f(p1 + 1e-4))


def test_printed_reading_disagrees_with_numeric():
    d = delta_grid(1e-8, 1e8)
    assert len(phi_grand_closed(1, 2, 1, 1, d, reading="printed").diagnostics) > 0


def test_left_branch_local_max_below_crossover():
    ex = left_branch_counterexample(1, 100, 1, 1, 10.0)
    psi = PsiFunction.zeta(1, 100, 1, 1)
    assert ex["resolved"] == pytest.approx(dense_phi(psi, math.exp(10.0)), rel=1e-6)
    assert ex["printed"] < 0.5 * ex["resolved"]


def test_small_delta_asymptote():
    d = np.array([1e-10, 1e-11, 1e-12])
    psi = PsiFunction.zeta(1, 2, 1, 1)
    r = phi_grand_numeric(psi, d) / phi_asymptote(1, 2, 1, 1, d)
    assert 0.9 <= r[-1] <= 1.1
    assert np.all(np.diff(np.abs(r - 1)) <= 0)


def test_infinite_b_asymptote_is_exact_past_the_crossover():
    # once |log delta| / |beta| > h the maximizer of delta^(1/p) p^beta is interior
    d = np.array([1e-3, 1e-40, 1e-160])
    psi = PsiFunction.zeta(1, math.inf, 1, -1)
    r = phi_grand_numeric(psi, d) / phi_asymptote(1, math.inf, 1, -1, d)
    assert np.allclose(r, 1.0, rtol=1e-12, atol=0)


def test_large_delta_asymptote_trend():
    d = np.array([1e20, 1e40, 1e80])
    psi = PsiFunction.zeta(1.5, 4, 1, 2)
    r = phi_grand_numeric(psi, d) / phi_asymptote(1.5, 4, 1, 2, d, end="large")
    assert np.all(np.diff(np.abs(r - 1)) < 0) and abs(r[-1] - 1) < 0.05


def test_sqrt_model_chi():
    d = np.array([0.01, 0.5, 1.0, 4.0])
    assert np.allclose(phi_small(sqrt_model, d), np.sqrt(d), rtol=1e-15)
    assert phi_small(sqrt_model, 0.5) == pytest.approx(math.sqrt(0.5))


def test_chi_vanishes_at_zero():
    psi = PsiFunction.zeta(1, 3, 1, 2)
    c = phi_small(psi, np.array([1e-4, 1e-8, 1e-16]))
    assert np.all(np.diff(c) < 0) and c[-1] < 1e-8


def test_chi_domain_checks():
    psi = PsiFunction.zeta(1, 3, 1, 2)
    with pytest.raises(DomainError):
        phi_small(psi, -1.0)
    with pytest.raises(DomainError):
        phi_small(psi, 0.5, space=MeasureSpace.atomic([1.0]))
    with pytest.raises(DomainError):
        phi_small(psi, 2.0, space=MeasureSpace.interval(0, 1))


zeta_params = st.tuples(st.floats(1.0, 3.0), st.floats(0.3, 6.0), st.floats(0.2, 3.0),
                        st.floats(0.2, 3.0)).map(lambda t: (t[0], t[0] + t[1], t[2], t[3]))


@given(zeta_params)
def test_profile_is_quasiconcave_and_chi_times_phi_is_delta(params):
    prof = fundamental_profile(PsiFunction.zeta(*params), 1e-6, 1e6, per_decade=8)
    assert prof.is_quasiconcave()
    assert np.allclose(prof.chi * prof.phi, prof.delta, rtol=1e-13)


@given(zeta_params, st.floats(-12, 12))
def test_closed_form_agrees_on_random_parameters(params, l10):
    d = np.array([10.0 ** l10])
    cf = phi_grand_closed(*params, d)
    assert cf.diagnostics == []
