"""The relative-phase entanglement functional Gamma and its subset profile.

For a subset ``S = (u_1 < ... < u_s)`` of subsystems, a nested term fixes a
pair ``k_u < l_u`` for every ``u`` in ``S`` and a diagonal label for every
other subsystem. Starting from ``|rho_Pi|``, the label pair of ``u_s`` is
swapped and the absolute difference squared; each of ``u_{s-1}, ..., u_2``
then contributes one more absolute difference. ``u_1`` is never swapped, so a
term touches ``2**(s-1)`` density entries.

``Gamma**2 = sum_S N_|S| * contribution(S)``, where ``contribution(S)`` sums
every nested term of ``S``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, DimensionError, InvalidIndexError
from .state import PureState, pi_index, rho, strides

DEFAULT_NORM = 2.0
ZERO_TOL = 1e-10

IndexedFunction = Callable[[tuple[int, ...], tuple[int, ...]], float]


def normalization(m: int, overrides: Mapping[int, float] | None = None) -> dict[int, float]:
    """Normalization weights for subset sizes ``2..m``, defaulting to 2."""
    norms = {s: DEFAULT_NORM for s in range(2, m + 1)}
    for s, value in (overrides or {}).items():
        s = int(s)
        if s not in norms:
            raise ConfigurationError(f"normalization size {s} is outside 2..{m}")
        value = float(value)
        if not value >= 0.0:
            raise ConfigurationError(f"normalization N_{s} must be >= 0, got {value}")
        norms[s] = value
    return norms


def subsets(m: int) -> list[tuple[int, ...]]:
    """All subsets of size >= 2 as 1-based tuples, by size then lexicographic."""
    return [
        tuple(u + 1 for u in combo)
        for s in range(2, m + 1)
        for combo in itertools.combinations(range(m), s)
    ]


@dataclass(frozen=True)
class SubsetTermSpec:
    """One fully indexed nested term.

    ``pairs[i]`` is the ``(k, l)`` pair of ``subset[i]``; ``diagonal`` maps
    every other subsystem to its repeated label. All positions and labels
    are 1-based.
    """

    subset: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]
    diagonal: Mapping[int, int] = field(default_factory=dict)

    def labels(self, dims: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        m = len(dims)
        if len(self.subset) < 2 or list(self.subset) != sorted(set(self.subset)):
            raise InvalidIndexError(f"subset must be sorted, distinct, size >= 2: {self.subset}")
        if len(self.pairs) != len(self.subset):
            raise InvalidIndexError("need exactly one pair per subset member")
        if set(self.subset) | set(self.diagonal) != set(range(1, m + 1)) or set(
            self.subset
        ) & set(self.diagonal):
            raise InvalidIndexError("subset and diagonal must partition the subsystems")
        ks, ls = [0] * m, [0] * m
        for u, (k, l) in zip(self.subset, self.pairs):
            if not k < l:
                raise InvalidIndexError(f"pair for subsystem {u} must have k < l, got {(k, l)}")
            ks[u - 1], ls[u - 1] = k, l
        for v, k in self.diagonal.items():
            ks[v - 1] = ls[v - 1] = k
        return tuple(ks), tuple(ls)


def permutation_apply(f: IndexedFunction, j: int, ks: Sequence[int], ls: Sequence[int]) -> float:
    """``f(..., k_j, l_j, ...) - f(..., l_j, k_j, ...)`` for 1-based position ``j``."""
    ks, ls = tuple(ks), tuple(ls)
    ks2, ls2 = list(ks), list(ls)
    ks2[j - 1], ls2[j - 1] = ls[j - 1], ks[j - 1]
    return f(ks, ls) - f(tuple(ks2), tuple(ls2))


def nested_term(
    state: PureState,
    spec: SubsetTermSpec,
    coefficient: IndexedFunction | None = None,
) -> float:
    """Evaluate one nested term entry by entry.

    This is the slow, literal path; :func:`contribution` evaluates the same
    terms in bulk. ``coefficient`` replaces ``|rho_Pi|`` when given, which
    lets callers count or trace the entries touched.
    """
    ks, ls = spec.labels(state.dims)
    if coefficient is None:

        def coefficient(a, b):
            return abs(rho(state, pi_index(state.dims, a, b)))

    swap_order = spec.subset[1:][::-1]

    def innermost(a, b, f=coefficient, j=swap_order[0]):
        return permutation_apply(f, j, a, b) ** 2

    g = innermost
    for j in swap_order[1:]:

        def g(a, b, f=g, j=j):
            return abs(permutation_apply(f, j, a, b))

    return g(ks, ls)


@lru_cache(maxsize=64)
def _subset_plan(dims: tuple[int, ...], subset: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """0-based (row, col) arrays of shape ``(terms, 2**(s-1))`` for one subset.

    Column ``p`` of the result is the swap pattern whose bits, most
    significant first, say whether ``u_2, ..., u_s`` are swapped.
    """
    place = strides(dims)
    members = [u - 1 for u in subset]
    axes_k, axes_l = [], []
    for u, n in enumerate(dims):
        if u in members:
            k, l = np.triu_indices(n, 1)
        else:
            k = l = np.arange(n)
        axes_k.append(k)
        axes_l.append(l)
    grids = np.meshgrid(*[np.arange(len(k)) for k in axes_k], indexing="ij")
    kd = [axes_k[u][g.ravel()] for u, g in enumerate(grids)]
    ld = [axes_l[u][g.ravel()] for u, g in enumerate(grids)]

    base_row = sum(place[u] * kd[u] for u in range(len(dims)))
    base_col = sum(place[u] * ld[u] for u in range(len(dims)))
    shift = np.stack([place[u] * (ld[u] - kd[u]) for u in members[1:]], axis=1)
    bits = np.array(list(itertools.product((0, 1), repeat=len(members) - 1)), dtype=np.int64)
    offsets = shift @ bits.T
    rows = base_row[:, None] + offsets
    cols = base_col[:, None] - offsets
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def _reduce_nested(values: np.ndarray, s: int) -> np.ndarray:
    g = values.reshape((values.shape[0],) + (2,) * (s - 1))
    g = (g[..., 0] - g[..., 1]) ** 2
    for _ in range(s - 2):
        g = np.abs(g[..., 0] - g[..., 1])
    return g


def probabilities(amplitudes: np.ndarray) -> np.ndarray:
    """Basis probabilities, renormalized so equal-weight states are exact."""
    p = amplitudes.real**2 + amplitudes.imag**2
    return p / np.sum(p)


def _moduli(probs: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    # |rho_ab| = sqrt(p_a p_b) avoids the rounding of |c_a| |c_b|
    return np.sqrt(probs[rows] * probs[cols])


def _subset_terms(state: PureState, subset: tuple[int, ...], probs: np.ndarray):
    rows, cols = _subset_plan(state.dims, subset)
    terms = _reduce_nested(_moduli(probs, rows, cols), len(subset))
    return terms, rows.size


def _check_subset(state: PureState, subset: Sequence[int]) -> tuple[int, ...]:
    subset = tuple(sorted(int(u) for u in subset))
    if len(subset) < 2 or len(set(subset)) != len(subset):
        raise InvalidIndexError(f"subset needs at least two distinct subsystems: {subset}")
    if subset[0] < 1 or subset[-1] > state.num_parties:
        raise InvalidIndexError(f"subset {subset} is outside 1..{state.num_parties}")
    return subset


@lru_cache(maxsize=16)
def _size_plans(dims: tuple[int, ...]) -> list[tuple[int, np.ndarray, np.ndarray]]:
    plans = []
    for s in range(2, len(dims) + 1):
        parts = [_subset_plan(dims, S) for S in subsets(len(dims)) if len(S) == s]
        plans.append((s, np.concatenate([r for r, _ in parts]), np.concatenate([c for _, c in parts])))
    return plans


def gamma_squared_value(dims: tuple[int, ...], probs: np.ndarray, norms: Mapping[int, float]) -> float:
    """Bare ``Gamma**2`` from basis probabilities, for inner optimization loops.

    Uses plain pairwise summation; :func:`gamma` is the reference path.
    """
    total = 0.0
    for s, rows, cols in _size_plans(dims):
        weight = norms[s]
        if weight:
            total += weight * float(np.sum(_reduce_nested(_moduli(probs, rows, cols), s)))
    return total


def contribution(state: PureState, subset: Sequence[int]) -> float:
    """Sum of all nested terms for one subset (no normalization applied)."""
    subset = _check_subset(state, subset)
    terms, _ = _subset_terms(state, subset, probabilities(state.amplitudes))
    return math.fsum(terms)


@dataclass
class GammaReport:
    """Gamma together with its per-subset profile.

    ``contributions`` are normalization-free; ``term_counts`` and
    ``entry_counts`` record, per subset size, how many nested terms were
    evaluated and how many density entries they read.
    """

    gamma: float
    norms: dict[int, float]
    contributions: dict[tuple[int, ...], float]
    term_counts: dict[int, int]
    entry_counts: dict[int, int]

    @property
    def gamma_squared(self) -> float:
        return math.fsum(self.norms[len(S)] * v for S, v in self.contributions.items())

    def nonzero(self, tol: float = ZERO_TOL) -> dict[tuple[int, ...], float]:
        return {S: v for S, v in self.contributions.items() if v > tol}

    def is_entangled(self, tol: float = ZERO_TOL) -> bool:
        return self.gamma >= tol

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "norms": {str(s): v for s, v in sorted(self.norms.items())},
            "contributions": [
                {"subset": list(S), "value": v} for S, v in self.contributions.items()
            ],
            "term_counts": {str(s): n for s, n in sorted(self.term_counts.items())},
        }


def gamma(state: PureState, norms: Mapping[int, float] | None = None) -> GammaReport:
    """Evaluate Gamma and its profile. ``norms`` defaults to 2 for every size."""
    m = state.num_parties
    if norms is None:
        norms = normalization(m)
    norms = {int(s): float(v) for s, v in norms.items()}
    missing = [s for s in range(2, m + 1) if s not in norms]
    if missing:
        raise ConfigurationError(f"no normalization given for subset sizes {missing}")
    if any(norms[s] < 0 for s in range(2, m + 1)):
        raise ConfigurationError("normalization weights must be nonnegative")

    probs = probabilities(state.amplitudes)
    contributions: dict[tuple[int, ...], float] = {}
    term_counts = {s: 0 for s in range(2, m + 1)}
    entry_counts = {s: 0 for s in range(2, m + 1)}
    for S in subsets(m):
        terms, touched = _subset_terms(state, S, probs)
        contributions[S] = math.fsum(terms)
        term_counts[len(S)] += terms.size
        entry_counts[len(S)] += touched

    # fsum is correctly rounded, so the result does not depend on term order
    total = math.fsum(norms[len(S)] * v for S, v in contributions.items())
    return GammaReport(
        gamma=math.sqrt(total),
        norms={s: norms[s] for s in range(2, m + 1)},
        contributions=contributions,
        term_counts=term_counts,
        entry_counts=entry_counts,
    )


def expected_term_count(dims: Sequence[int], s: int) -> int:
    """Closed-form number of nested terms over all subsets of size ``s``."""
    total = 0
    for combo in itertools.combinations(range(len(dims)), s):
        n = 1
        for u, d in enumerate(dims):
            n *= d * (d - 1) // 2 if u in combo else d
        total += n
    return total


def gamma_bipartite_explicit(state: PureState, n2: float = DEFAULT_NORM) -> float:
    """Two-party Gamma written out with flat joint indices."""
    if state.num_parties != 2:
        raise DimensionError(f"expected 2 subsystems, got {state.num_parties}")
    n1_, n2_ = state.dims
    c = state.amplitudes

    def r(a, b):
        return abs(c[a - 1] * np.conj(c[b - 1]))

    total = 0.0
    for k1 in range(1, n1_ + 1):
        for l1 in range(k1 + 1, n1_ + 1):
            for k2 in range(1, n2_ + 1):
                for l2 in range(k2 + 1, n2_ + 1):
                    direct = r((k1 - 1) * n2_ + k2, (l1 - 1) * n2_ + l2)
                    crossed = r((k1 - 1) * n2_ + l2, (l1 - 1) * n2_ + k2)
                    total += (direct - crossed) ** 2
    return math.sqrt(n2 * total)


def gamma_tripartite_explicit(state: PureState, n2: float = DEFAULT_NORM, n3: float = DEFAULT_NORM) -> float:
    """Three-party Gamma written out block by block."""
    if state.num_parties != 3:
        raise DimensionError(f"expected 3 subsystems, got {state.num_parties}")
    d1, d2, d3 = state.dims
    c = state.amplitudes

    def r(a, b):
        ia = (a[0] - 1) * d2 * d3 + (a[1] - 1) * d3 + a[2]
        ib = (b[0] - 1) * d2 * d3 + (b[1] - 1) * d3 + b[2]
        return abs(c[ia - 1] * np.conj(c[ib - 1]))

    def upper(n):
        return [(k, l) for k in range(1, n + 1) for l in range(k + 1, n + 1)]

    q12 = q13 = q23 = q123 = 0.0
    for k1, l1 in upper(d1):
        for k2, l2 in upper(d2):
            for k3 in range(1, d3 + 1):
                q12 += (r((k1, k2, k3), (l1, l2, k3)) - r((k1, l2, k3), (l1, k2, k3))) ** 2
    for k1, l1 in upper(d1):
        for k3, l3 in upper(d3):
            for k2 in range(1, d2 + 1):
                q13 += (r((k1, k2, k3), (l1, k2, l3)) - r((k1, k2, l3), (l1, k2, k3))) ** 2
    for k2, l2 in upper(d2):
        for k3, l3 in upper(d3):
            for k1 in range(1, d1 + 1):
                q23 += (r((k1, k2, k3), (k1, l2, l3)) - r((k1, k2, l3), (k1, l2, k3))) ** 2
    for k1, l1 in upper(d1):
        for k2, l2 in upper(d2):
            for k3, l3 in upper(d3):
                first = r((k1, k2, k3), (l1, l2, l3)) - r((k1, k2, l3), (l1, l2, k3))
                second = r((k1, l2, k3), (l1, k2, l3)) - r((k1, l2, l3), (l1, k2, k3))
                q123 += abs(first**2 - second**2)
    return math.sqrt(n2 * (q12 + q13 + q23) + n3 * q123)
