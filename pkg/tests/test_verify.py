import pytest

from bslspaces import verify


@pytest.mark.parametrize("name", ["closed-form", "asymptotics", "indicator", "example51", "indices", "acn"])
def test_deterministic_suites_pass(name):
    res = verify.run_suite(name)
    assert res.passed, res.failures
    assert res.line().startswith("PASS")


@pytest.mark.parametrize("name", sorted(verify.SEEDED))
def test_seeded_suites_small_counts(name):
    res = verify.run_suite(name, seed=1, count=6)
    assert res.passed, res.failures


def test_seeded_replay_is_identical():
    a = verify.run_suite("duality", seed=4, count=4)
    b = verify.run_suite("duality", seed=4, count=4)
    assert a.metrics == b.metrics


def test_failure_messages_name_the_identity(monkeypatch):
    # a wrong chi makes the indicator suite fail; the message says which identity broke
    real = verify.phi_small
    monkeypatch.setattr(verify, "phi_small", lambda psi, d: 2 * real(psi, d))
    res = verify.suite_indicator(deltas=[0.5])
    assert not res.passed
    assert "indicator norm equals delta / phi(delta)" in res.failures[0]
    assert res.line().startswith("FAIL")


def test_unknown_suite():
    with pytest.raises(KeyError):
        verify.run_suite("nope")
