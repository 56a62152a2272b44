"""Relative-phase POVM and a quadrature check of its Fourier coefficients.

Each subsystem carries one real phase per label pair ``k < l``; the matrix
entry ``(k, l)`` is ``exp(i phi_kl)`` with ``phi_lk = -phi_kl`` and a unit
diagonal. The joint POVM is the Kronecker product in subsystem order.

Integrating ``exp(-i sum phi) Tr(rho Delta)`` over one phase per target
subsystem isolates a single density coefficient, so the Fourier modulus
equals ``2 pi |rho_Pi|``. This module builds dense matrices and is a
verification path only; joint dimensions above 64 are refused.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, DimensionError, InvalidIndexError, InvalidTargetError
from .state import PureState, pi_index, rho

MAX_JOINT_DIM = 64
DEFAULT_NODES = 8

Pair = tuple[int, int]


@dataclass(frozen=True)
class PhaseAssignment:
    """Per-subsystem maps from 1-based pairs ``(k, l)``, ``k < l``, to phases."""

    phases: tuple[Mapping[Pair, float], ...]

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "PhaseAssignment":
        return cls(tuple({p: 0.0 for p in _upper_pairs(n)} for n in dims))

    @classmethod
    def random(cls, dims: Sequence[int], rng: np.random.Generator) -> "PhaseAssignment":
        return cls(
            tuple({p: float(rng.uniform(0.0, 2 * np.pi)) for p in _upper_pairs(n)} for n in dims)
        )

    def value(self, u: int, k: int, l: int) -> float:
        """Phase ``phi_kl`` of subsystem ``u`` (0-based), antisymmetric in k, l."""
        if k == l:
            return 0.0
        if k < l:
            return self.phases[u][(k, l)]
        return -self.phases[u][(l, k)]

    def replace(self, u: int, pair: Pair, phase: float) -> "PhaseAssignment":
        updated = list(self.phases)
        updated[u] = {**updated[u], pair: phase}
        return PhaseAssignment(tuple(updated))


def _upper_pairs(n: int) -> list[Pair]:
    return [(k, l) for k in range(1, n + 1) for l in range(k + 1, n + 1)]


def delta_subsystem(n: int, phases: Mapping[Pair, float]) -> np.ndarray:
    """Single-subsystem POVM matrix for the phases of its ``k < l`` pairs."""
    missing = [p for p in _upper_pairs(n) if p not in phases]
    if missing:
        raise ConfigurationError(f"missing phases for pairs {missing}")
    phi = np.zeros((n, n))
    for (k, l), value in phases.items():
        if not 1 <= k < l <= n:
            raise ConfigurationError(f"phase pair {(k, l)} is not a k < l pair in 1..{n}")
        phi[k - 1, l - 1] = value
        phi[l - 1, k - 1] = -value
    return np.exp(1j * phi)


def delta_joint(dims: Sequence[int], assignment: PhaseAssignment) -> np.ndarray:
    if len(assignment.phases) != len(dims):
        raise DimensionError(
            f"phase assignment covers {len(assignment.phases)} subsystems, dims has {len(dims)}"
        )
    return reduce(np.kron, [delta_subsystem(n, p) for n, p in zip(dims, assignment.phases)])


def phase_distribution(state: PureState, assignment: PhaseAssignment) -> float:
    """``Tr(rho Delta)`` for the given phases."""
    if state.joint_dim > MAX_JOINT_DIM:
        raise DimensionError(f"dense POVM path is limited to joint_dim <= {MAX_JOINT_DIM}")
    c = state.amplitudes
    # Tr(rho Delta) = sum_ab c_a conj(c_b) Delta_ba = <c|Delta|c>
    value = np.vdot(c, delta_joint(state.dims, assignment) @ c)
    return float(value.real)


def fourier_gamma(
    state: PureState,
    target: Mapping[int, Pair],
    nodes: int = DEFAULT_NODES,
    fixed: PhaseAssignment | None = None,
) -> float:
    """Fourier modulus of the phase distribution for one joint phase sum.

    ``target`` maps 1-based subsystem positions to a label pair ``(k, l)``
    with ``k != l``. The phase of each target pair is integrated over
    ``[0, 2 pi)`` with an equispaced rectangle rule of ``nodes`` points;
    every other phase keeps its value from ``fixed`` (zeros by default).
    The result is divided by ``(2 pi)**(n - 1)`` for ``n`` integrated
    phases. When every subsystem is in ``target`` this equals
    ``2 pi |rho_Pi(k, l)|`` for any choice of ``fixed``.
    """
    if not target:
        raise InvalidTargetError("target has no participating subsystem")
    if nodes < 4:
        raise ConfigurationError(f"need at least 4 quadrature nodes, got {nodes}")
    dims = state.dims
    if fixed is None:
        fixed = PhaseAssignment.zeros(dims)
    plan = []
    for u, (k, l) in sorted(target.items()):
        if not 1 <= u <= len(dims):
            raise InvalidTargetError(f"subsystem {u} is outside 1..{len(dims)}")
        if not (1 <= k <= dims[u - 1] and 1 <= l <= dims[u - 1]):
            raise InvalidIndexError(f"labels {(k, l)} are outside 1..{dims[u - 1]}")
        if k == l:
            raise InvalidTargetError(f"subsystem {u} has a diagonal pair {(k, l)}")
        plan.append((u - 1, (min(k, l), max(k, l)), 1.0 if k < l else -1.0))

    grid = 2 * np.pi * np.arange(nodes) / nodes
    acc = []
    for point in itertools.product(grid, repeat=len(plan)):
        phases = fixed
        phase_sum = 0.0
        for (u, pair, sign), theta in zip(plan, point):
            phases = phases.replace(u, pair, theta)
            phase_sum += sign * theta
        acc.append(np.exp(-1j * phase_sum) * phase_distribution(state, phases))
    n = len(plan)
    integral = (2 * np.pi / nodes) ** n * complex(math.fsum(z.real for z in acc), math.fsum(z.imag for z in acc))
    return abs(integral) / (2 * np.pi) ** (n - 1)


def full_targets(dims: Sequence[int]) -> list[dict[int, Pair]]:
    """Every target with one ``k < l`` pair on each subsystem."""
    return [
        dict(enumerate(choice, start=1))
        for choice in itertools.product(*[_upper_pairs(n) for n in dims])
    ]


def fourier_residual(
    state: PureState,
    target: Mapping[int, Pair],
    nodes: int = DEFAULT_NODES,
    fixed: PhaseAssignment | None = None,
) -> float:
    """``|fourier_gamma - 2 pi |rho_Pi||`` for a target covering all subsystems."""
    m = state.num_parties
    if sorted(target) != list(range(1, m + 1)):
        raise InvalidTargetError("the identity check needs a pair on every subsystem")
    ks = [target[u][0] for u in range(1, m + 1)]
    ls = [target[u][1] for u in range(1, m + 1)]
    expected = 2 * np.pi * abs(rho(state, pi_index(state.dims, ks, ls)))
    return abs(fourier_gamma(state, target, nodes, fixed) - expected)
