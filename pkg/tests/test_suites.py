import math

import numpy as np
import pytest

from entropion import run_suite, suite_names
from entropion import suites as suites_mod

EXPECTED_SUITES = [
    "adjoint_quadratic",
    "ancilla",
    "block_contraction",
    "concavity_channel",
    "concavity_condent",
    "condent_identity",
    "cp_schwarz",
    "dephase_z",
    "holevo_bound",
    "holevo_chain",
    "holevo_identities",
    "holevo_routes",
    "homogeneity",
    "joint_convexity",
    "klein",
    "monotonicity_dephase",
    "monotonicity_general",
    "monotonicity_ptrace",
    "monotonicity_unitary",
    "operator_schwarz",
    "pure_states",
    "relent_routes",
    "resolvent_oracle",
    "scalar_identity",
    "schwarz_quadratic",
    "ssa",
]


def test_suite_names_cover_every_check():
    names = suite_names()
    assert sorted(names) == sorted(set(names))  # no duplicates
    for expected in EXPECTED_SUITES:
        assert expected in names
    assert len(names) == 27


def test_unknown_suite_raises():
    with pytest.raises(ValueError):
        run_suite("nonexistent_suite")


def test_run_suite_argument_validation():
    with pytest.raises(ValueError):
        run_suite("klein", dims=())
    with pytest.raises(ValueError):
        run_suite("klein", dims=(0,))
    with pytest.raises(ValueError):
        run_suite("klein", trials=0)
    with pytest.raises(ValueError):
        run_suite("klein", tol=-1.0)


def test_report_fields_and_pass():
    rep = run_suite("klein", dims=(2, 3), trials=25, seed=5, tol=1e-9)
    assert rep.suite == "klein"
    assert rep.trials == 25
    assert rep.seed == 5
    assert rep.tol == 1e-9
    assert rep.passed
    assert rep.failures == ()
    assert rep.skipped_infinite == 0
    assert rep.worst_margin > -1e-9
    assert rep.runtime_ms > 0


def test_report_json_dict_key_order():
    rep = run_suite("homogeneity", trials=5, seed=1)
    d = rep.to_json_dict()
    assert list(d) == [
        "suite",
        "trials",
        "seed",
        "tol",
        "pass",
        "worst_margin",
        "skipped_infinite",
        "failures",
        "runtime_ms",
    ]
    assert d["pass"] is True
    assert isinstance(d["failures"], list)


def test_determinism_same_seed():
    a = run_suite("relent_routes", dims=(2, 3), trials=30, seed=11, tol=1e-8)
    b = run_suite("relent_routes", dims=(2, 3), trials=30, seed=11, tol=1e-8)
    da, db = a.to_json_dict(), b.to_json_dict()
    da.pop("runtime_ms")
    db.pop("runtime_ms")
    assert da == db  # bit-identical margins, not merely close


def test_different_seeds_differ():
    a = run_suite("relent_routes", trials=20, seed=1)
    b = run_suite("relent_routes", trials=20, seed=2)
    assert a.worst_margin != b.worst_margin


def test_dims_cycle_changes_instances():
    a = run_suite("klein", dims=(2,), trials=10, seed=3)
    b = run_suite("klein", dims=(5,), trials=10, seed=3)
    assert a.worst_margin != b.worst_margin


def test_failures_recorded_below_tolerance():
    # agreement suites report margins as -|gap|, so tol=0 flags every trial
    # whose routes differ at all -- a deterministic failure generator
    rep = run_suite("relent_routes", dims=(3,), trials=10, seed=13, tol=0.0)
    assert not rep.passed
    assert len(rep.failures) > 0
    d = rep.to_json_dict()
    assert d["pass"] is False
    for f in rep.failures:
        assert f.margin < 0
        assert 0 <= f.trial < 10
        assert len(f.digest) == 12
        int(f.digest, 16)  # hex string


def test_runner_accounting_with_synthetic_trial(monkeypatch):
    # exercise the skip and failure bookkeeping without relying on rare draws
    history = iter([math.inf, -0.5, 0.25, math.inf, -0.125])

    def fake_trial(rng, d):
        return next(history), (np.eye(2),)

    monkeypatch.setitem(suites_mod.SUITES, "fake", fake_trial)
    rep = run_suite("fake", dims=(2,), trials=5, seed=0, tol=1e-9)
    assert rep.skipped_infinite == 2
    assert rep.worst_margin == -0.5
    assert [f.trial for f in rep.failures] == [1, 4]
    assert not rep.passed


def test_every_suite_passes_briefly():
    # a smoke pass over the entire registry at small trial counts
    for name in suite_names():
        dims = (2,) if name in suites_mod.LOCAL_DIM_SUITES else (2, 3)
        rep = run_suite(name, dims=dims, trials=8, seed=42, tol=1e-8)
        assert rep.passed, f"{name}: worst={rep.worst_margin}"
