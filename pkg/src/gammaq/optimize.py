"""Lower bounds on the supremum of Gamma over local unitaries.

Each local unitary is ``exp(iH)`` for a Hermitian ``H`` packed into ``N**2``
real numbers: the diagonal, then the real parts of the strict upper
triangle (row-major), then their imaginary parts. Gamma is maximized with
multi-start Nelder-Mead; nested absolute values make the objective
non-smooth, so no gradients are used. The first restart always starts from
the identity.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from .errors import DimensionError
from .gamma import GammaReport, gamma, gamma_squared_value, normalization, probabilities
from .state import PureState, apply_local_unitaries


@lru_cache(maxsize=None)
def _upper(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, 1)


def _hermitian(params: np.ndarray, n: int) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape != (n * n,):
        raise DimensionError(f"expected {n * n} generator parameters, got shape {params.shape}")
    iu = _upper(n)
    m = len(iu[0])
    h = np.diag(params[:n]).astype(complex)
    h[iu] = params[n : n + m] + 1j * params[n + m :]
    h[iu[1], iu[0]] = np.conj(h[iu])
    return h


def build_unitary(params: Sequence[float], n: int) -> np.ndarray:
    """``exp(iH)`` for the Hermitian generator packed in ``params``."""
    w, v = np.linalg.eigh(_hermitian(np.asarray(params), n))
    return (v * np.exp(1j * w)) @ v.conj().T


def unitary_params(u: np.ndarray) -> np.ndarray:
    """Generator parameters reproducing ``u``, using the principal logarithm."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    t, q = scipy.linalg.schur(u, output="complex")
    h = (q * np.angle(np.diag(t))) @ q.conj().T
    h = (h + h.conj().T) / 2
    iu = np.triu_indices(n, 1)
    return np.concatenate([h.diagonal().real, h[iu].real, h[iu].imag])


def split_params(flat: np.ndarray, dims: Sequence[int]) -> list[np.ndarray]:
    out, start = [], 0
    for n in dims:
        out.append(np.asarray(flat[start : start + n * n], dtype=float))
        start += n * n
    if start != len(flat):
        raise DimensionError(f"expected {start} parameters for dims {tuple(dims)}, got {len(flat)}")
    return out


def transformed(state: PureState, params: Sequence[Sequence[float]]) -> PureState:
    if len(params) != state.num_parties:
        raise DimensionError(f"need parameters for {state.num_parties} subsystems")
    return apply_local_unitaries(state, [build_unitary(p, n) for p, n in zip(params, state.dims)])


def objective(state: PureState, params: Sequence[Sequence[float]], norms: Mapping[int, float] | None = None) -> float:
    """Gamma of the state after the local unitaries encoded by ``params``."""
    return gamma(transformed(state, params), norms).gamma


class _LeanObjective:
    """Same value as :func:`objective`, minus validation and report building."""

    def __init__(self, state: PureState, norms: Mapping[int, float]):
        self.dims = state.dims
        self.psi = state.tensor()
        self.norms = dict(norms)
        self.uniform = len(set(self.dims)) == 1

    def unitaries(self, flat: np.ndarray) -> list[np.ndarray]:
        params = split_params(flat, self.dims)
        if not self.uniform:
            return [build_unitary(p, n) for p, n in zip(params, self.dims)]
        # one batched eigh call when all subsystems share a dimension
        n = self.dims[0]
        w, v = np.linalg.eigh(np.stack([_hermitian(p, n) for p in params]))
        return list((v * np.exp(1j * w)[:, None, :]) @ np.conj(np.swapaxes(v, 1, 2)))

    def __call__(self, flat: np.ndarray) -> float:
        psi = self.psi
        for axis, u in enumerate(self.unitaries(flat)):
            psi = np.moveaxis(np.tensordot(u, psi, axes=([1], [axis])), 0, axis)
        probs = probabilities(psi.reshape(-1))
        return math.sqrt(gamma_squared_value(self.dims, probs, self.norms))


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    seed: int = 0
    max_evaluations: int = 2000
    tolerance: float = 1e-9
    spread: float = 0.5

    def __post_init__(self):
        if self.restarts < 1 or self.max_evaluations < 1:
            raise ValueError("restarts and max_evaluations must be >= 1")
        if not (self.tolerance > 0 and self.spread > 0):
            raise ValueError("tolerance and spread must be positive")


@dataclass
class OptResult:
    """Outcome of :func:`optimize_gamma_sup`.

    ``best_gamma`` is a lower bound on the supremum: local search cannot
    certify a global maximum.
    """

    best_gamma: float
    best_parameters: list[np.ndarray]
    evaluations: int
    per_restart_bests: list[float]
    report: GammaReport
    restarts: int = field(default=0)

    def to_json(self) -> dict:
        return {
            "gamma_sup_lower_bound": self.best_gamma,
            "restarts": self.restarts,
            "evaluations": self.evaluations,
            "per_restart": list(self.per_restart_bests),
            "achieving_parameters": [p.tolist() for p in self.best_parameters],
        }


def optimize_gamma_sup(
    state: PureState,
    norms: Mapping[int, float] | None = None,
    config: OptimizerConfig = OptimizerConfig(),
) -> OptResult:
    """Multi-start local maximization of Gamma over local unitaries."""
    if norms is None:
        norms = normalization(state.num_parties)
    dims = state.dims
    size = sum(n * n for n in dims)
    lean = _LeanObjective(state, norms)
    evaluations = 0
    per_restart = []
    best_value, best_x = -math.inf, np.zeros(size)

    for restart in range(config.restarts):
        if restart == 0:
            x0 = np.zeros(size)
        else:
            rng = np.random.default_rng([config.seed, restart])
            x0 = rng.normal(0.0, config.spread, size)

        run_best = [-math.inf, x0]

        def negated(x):
            value = lean(x)
            if value > run_best[0]:
                run_best[0], run_best[1] = value, np.array(x)
            return -value

        res = minimize(
            negated,
            x0,
            method="Nelder-Mead",
            options={
                "maxfev": config.max_evaluations,
                "xatol": config.tolerance,
                "fatol": config.tolerance,
                "adaptive": True,
                "initial_simplex": _initial_simplex(x0, config.spread),
            },
        )
        evaluations += res.nfev
        per_restart.append(run_best[0])
        if run_best[0] > best_value:
            best_value, best_x = run_best[0], run_best[1]

    best_params = split_params(best_x, dims)
    return OptResult(
        best_gamma=best_value,
        best_parameters=best_params,
        evaluations=evaluations,
        per_restart_bests=per_restart,
        report=gamma(transformed(state, best_params), norms),
        restarts=config.restarts,
    )


def _initial_simplex(x0: np.ndarray, step: float) -> np.ndarray:
    return np.vstack([x0, x0 + step * np.eye(len(x0))])
