import json
import os
import subprocess
import sys

import numpy as np
import pytest

from bslspaces import _kernels as K


def test_log_moments_twin_agreement(rng):
    n = 300
    logw = rng.normal(size=n)
    logabs = rng.normal(size=n)
    logabs[::17] = -np.inf
    edge = np.zeros(n, dtype=bool)
    edge[:10] = True
    ps = np.linspace(1.0, 12.0, 40)
    a = K.log_moments(logw, logabs, ps, edge)
    b = K.log_moments_np(logw, logabs, ps, edge)
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-13, atol=0)


def test_log_moments_direct_sum(rng):
    w = rng.uniform(0.1, 1, 6)
    v = rng.uniform(0.1, 2, 6)
    ps = np.array([1.0, 2.5, 7.0])
    total, _ = K.log_moments(np.log(w), np.log(v), ps, np.zeros(6, bool))
    assert np.allclose(total, np.log([(w * v ** p).sum() for p in ps]), rtol=1e-14)


def test_all_zero_function():
    total, tail = K.log_moments(np.zeros(3), np.full(3, -np.inf), np.array([2.0]), np.ones(3, bool))
    assert np.all(np.isneginf(total)) and np.all(np.isneginf(tail))


def test_norms_and_gradients_twin_agreement(rng):
    w = rng.uniform(0.1, 2, 50)
    y = np.abs(rng.normal(size=50))
    y[3] = 0.0
    ps = np.linspace(1.01, 9.0, 17)
    n1, g1 = K.norms_and_gradients(w, y, ps)
    n2, g2 = K.norms_and_gradients_np(w, y, ps)
    assert np.allclose(n1, n2, rtol=1e-13)
    assert np.allclose(g1, g2, rtol=1e-12, atol=1e-300)


def test_gradient_by_finite_differences(rng):
    w = rng.uniform(0.1, 2, 5)
    y = rng.uniform(0.2, 1, 5)
    ps = np.array([1.5, 3.0])
    _, g = K.norms_and_gradients_np(w, y, ps)
    h = 1e-6
    for i in range(5):
        e = np.zeros(5)
        e[i] = h
        fd = (K.norms_and_gradients_np(w, y + e, ps)[0] - K.norms_and_gradients_np(w, y - e, ps)[0]) / (2 * h)
        assert np.allclose(g[:, i], fd, rtol=1e-6)


def run_with_flag(flag):
    code = ("import bslspaces, json; from bslspaces import catalog, grand_norm, sl_norm_dual, PsiFunction;"
            "psi = PsiFunction.zeta(1, 3, 1, 2); f = catalog.get_entry('h_m', nodes=256).function();"
            "print(json.dumps([bslspaces.BACKEND, grand_norm(f, psi).value, sl_norm_dual(f, psi).value]))")
    env = dict(os.environ, BSLSPACES_PURE_NUMPY=flag)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_env_flag_selects_backend_with_same_results():
    fast = run_with_flag("0")
    slow = run_with_flag("1")
    assert fast[0] == K.BACKEND and slow[0] == "numpy"
    assert np.allclose(fast[1:], slow[1:], rtol=1e-9)
