import math

import numpy as np
import pytest

from gammaq.errors import DimensionError
from gammaq.gamma import gamma
from gammaq.optimize import (
    OptimizerConfig,
    _LeanObjective,
    build_unitary,
    objective,
    optimize_gamma_sup,
    split_params,
    unitary_params,
)
from gammaq.state import product_state, random_state, zoo

HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
QUICK = OptimizerConfig(restarts=3, max_evaluations=300)


def unitarity_residual(u):
    return np.max(np.abs(u.conj().T @ u - np.eye(len(u))))


def test_zero_params_give_identity():
    np.testing.assert_array_equal(build_unitary(np.zeros(4), 2), np.eye(2))
    np.testing.assert_allclose(build_unitary(np.zeros(9), 3), np.eye(3), atol=1e-15)


@pytest.mark.parametrize("theta", [np.pi / 2, 0.3, 2.1])
def test_real_offdiagonal_generator(theta):
    # exp(i theta X) = cos(theta) I + i sin(theta) X
    u = build_unitary([0.0, 0.0, theta, 0.0], 2)
    expected = np.array([[math.cos(theta), 1j * math.sin(theta)], [1j * math.sin(theta), math.cos(theta)]])
    np.testing.assert_allclose(u, expected, atol=1e-14)
    assert unitarity_residual(u) < 1e-12


def test_random_generators_are_unitary():
    rng = np.random.default_rng(0)
    for n in (2, 3, 4):
        for _ in range(20):
            p = rng.uniform(-10, 10, n * n) / n
            assert unitarity_residual(build_unitary(p, n)) < 1e-12


def test_build_unitary_wrong_length():
    with pytest.raises(DimensionError):
        build_unitary(np.zeros(3), 2)


def test_parameterization_round_trip():
    rng = np.random.default_rng(42)
    for _ in range(100):
        u = build_unitary(rng.normal(0.0, 5.0, 4), 2)
        np.testing.assert_allclose(build_unitary(unitary_params(u), 2), u, atol=1e-9)


def test_objective_zero_params_is_raw_gamma():
    s = random_state(3, (2, 3, 2))
    params = [np.zeros(n * n) for n in s.dims]
    assert objective(s, params) == pytest.approx(gamma(s).gamma, abs=1e-14)


def test_objective_psi2_with_fourth_qubit_hadamard():
    params = [np.zeros(4)] * 3 + [unitary_params(HADAMARD)]
    norms = {2: 2.0, 3: 3.0, 4: 2.0}
    assert objective(zoo("psi2"), params, norms) == pytest.approx(math.sqrt(3.0) / 2, abs=1e-12)


def test_objective_product_state_stays_zero():
    rng = np.random.default_rng(1)
    s = product_state(2, (2, 3))
    for _ in range(10):
        params = [rng.normal(size=n * n) for n in s.dims]
        assert objective(s, params) < 1e-10


@pytest.mark.parametrize("dims", [(2, 2, 2), (2, 3, 2), (3, 3)])
def test_lean_objective_matches_reference(dims):
    s = random_state(5, dims)
    norms = {k: 1.0 + k for k in range(2, len(dims) + 1)}
    lean = _LeanObjective(s, norms)
    rng = np.random.default_rng(2)
    for _ in range(10):
        x = rng.normal(size=sum(n * n for n in dims))
        assert lean(x) == pytest.approx(objective(s, split_params(x, dims), norms), rel=1e-12)


def test_optimizer_includes_identity_start():
    s = random_state(7, (2, 2, 2))
    result = optimize_gamma_sup(s, config=QUICK)
    assert result.best_gamma >= gamma(s).gamma - 1e-12
    assert result.best_gamma == max(result.per_restart_bests)
    assert len(result.per_restart_bests) == 3
    assert result.report.gamma == pytest.approx(result.best_gamma, abs=1e-12)


def test_optimizer_ghz_keeps_paper_value():
    result = optimize_gamma_sup(zoo("ghz"), config=QUICK)
    assert result.best_gamma >= math.sqrt(2) / 2 - 1e-12


def test_optimizer_product_state():
    result = optimize_gamma_sup(product_state(4, (2, 2, 2)), config=QUICK)
    assert result.best_gamma < 1e-8


def test_optimizer_deterministic():
    s = random_state(1, (2, 3))
    a = optimize_gamma_sup(s, config=QUICK)
    b = optimize_gamma_sup(s, config=QUICK)
    assert a.per_restart_bests == b.per_restart_bests
    assert a.evaluations == b.evaluations
    for pa, pb in zip(a.best_parameters, b.best_parameters):
        np.testing.assert_array_equal(pa, pb)


def test_optimizer_seed_changes_restarts():
    s = random_state(1, (2, 2, 2))
    a = optimize_gamma_sup(s, config=OptimizerConfig(restarts=2, max_evaluations=50, seed=1))
    b = optimize_gamma_sup(s, config=OptimizerConfig(restarts=2, max_evaluations=50, seed=2))
    assert a.per_restart_bests[0] == b.per_restart_bests[0]
    assert a.per_restart_bests[1] != b.per_restart_bests[1]


def test_optimizer_2x2_reaches_schmidt_value():
    s = random_state(9, (2, 2))
    lam = np.linalg.svd(s.amplitudes.reshape(2, 2), compute_uv=False)
    result = optimize_gamma_sup(s, config=OptimizerConfig(restarts=2))
    assert result.best_gamma >= math.sqrt(2) * lam[0] * lam[1] - 1e-6


def test_opt_result_json():
    doc = optimize_gamma_sup(zoo("bell"), config=OptimizerConfig(restarts=1, max_evaluations=20)).to_json()
    assert set(doc) == {"gamma_sup_lower_bound", "restarts", "evaluations", "per_restart", "achieving_parameters"}
    assert doc["restarts"] == 1
    assert [len(p) for p in doc["achieving_parameters"]] == [4, 4]


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(tolerance=0)
