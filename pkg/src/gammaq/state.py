"""Multipartite pure states and joint-basis index arithmetic.

Basis labels and joint indices are 1-based throughout the public API, so a
GHZ coherence reads ``rho(ghz, (1, 8))`` exactly as it is usually written.
Ket strings (``"0101"``) use 0-based digits; see :mod:`gammaq.statefile`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateStateError,
    DimensionError,
    DuplicateEntryError,
    InvalidIndexError,
    UnitarityError,
    UnknownStateError,
)

NORM_ATOL = 1e-9
UNITARY_ATOL = 1e-9


class JointIndexPair(NamedTuple):
    """A (row, col) pair of 1-based joint-basis indices."""

    row: int
    col: int


def check_dims(dims: Iterable[int]) -> tuple[int, ...]:
    """Validate local dimensions and return them as a tuple of ints."""
    out = tuple(int(n) for n in dims)
    if len(out) < 1:
        raise DimensionError("need at least one subsystem")
    if any(n < 2 for n in out):
        raise DimensionError(f"every local dimension must be >= 2, got {out}")
    return out


def strides(dims: Sequence[int]) -> tuple[int, ...]:
    """Mixed-radix place values, most significant subsystem first."""
    out = [1] * len(dims)
    for u in range(len(dims) - 2, -1, -1):
        out[u] = out[u + 1] * dims[u + 1]
    return tuple(out)


@dataclass(frozen=True, eq=False)
class PureState:
    """A normalized pure state on ``N_1 x ... x N_m``.

    The amplitude array is flagged read-only; build new states instead of
    mutating one.
    """

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = check_dims(self.dims)
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != math.prod(dims):
            raise DimensionError(
                f"expected {math.prod(dims)} amplitudes for dims {dims}, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise DegenerateStateError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, dims: Iterable[int], amplitudes, normalize: bool = True) -> "PureState":
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if normalize:
            norm = np.linalg.norm(amps)
            if not np.isfinite(norm) or norm == 0.0:
                raise DegenerateStateError("cannot normalize an all-zero amplitude vector")
            # leave unit vectors bit-for-bit alone so file round trips are exact
            if abs(norm - 1.0) > 4 * np.finfo(float).eps:
                amps = amps / norm
        return cls(tuple(dims), amps)

    @property
    def num_parties(self) -> int:
        return len(self.dims)

    @property
    def joint_dim(self) -> int:
        return self.amplitudes.size

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem."""
        return self.amplitudes.reshape(self.dims)

    def __repr__(self):
        return f"PureState(dims={self.dims}, joint_dim={self.joint_dim})"


def _check_labels(dims: Sequence[int], labels: Sequence[int], what: str) -> None:
    if len(labels) != len(dims):
        raise InvalidIndexError(f"{what} has {len(labels)} labels for {len(dims)} subsystems")
    for u, (k, n) in enumerate(zip(labels, dims)):
        if not 1 <= k <= n:
            raise InvalidIndexError(f"{what}[{u}] = {k} is outside 1..{n}")


def joint_index(dims: Sequence[int], labels: Sequence[int]) -> int:
    """1-based joint index of the basis ket with 1-based local ``labels``."""
    _check_labels(dims, labels, "labels")
    return 1 + sum((k - 1) * s for k, s in zip(labels, strides(dims)))


def split_index(dims: Sequence[int], index: int) -> tuple[int, ...]:
    """Inverse of :func:`joint_index`."""
    total = math.prod(dims)
    if not 1 <= index <= total:
        raise InvalidIndexError(f"joint index {index} is outside 1..{total}")
    digits = np.unravel_index(index - 1, tuple(dims))
    return tuple(int(d) + 1 for d in digits)


def pi_index(dims: Sequence[int], ks: Sequence[int], ls: Sequence[int]) -> JointIndexPair:
    """Map per-subsystem label pairs ``(k_u, l_u)`` to a joint (row, col) pair.

    >>> pi_index((2, 2, 2), (1, 1, 1), (2, 2, 2))
    JointIndexPair(row=1, col=8)
    """
    _check_labels(dims, ks, "ks")
    _check_labels(dims, ls, "ls")
    return JointIndexPair(joint_index(dims, ks), joint_index(dims, ls))


def rho(state: PureState, pair: tuple[int, int]) -> complex:
    """Density coefficient ``rho[row, col] = c_row * conj(c_col)``."""
    row, col = pair
    n = state.joint_dim
    if not (1 <= row <= n and 1 <= col <= n):
        raise InvalidIndexError(f"pair {tuple(pair)} is outside 1..{n}")
    a = state.amplitudes
    return complex(a[row - 1] * np.conj(a[col - 1]))


def make_state(dims: Iterable[int], entries: Iterable[tuple[Sequence[int], complex]]) -> PureState:
    """Build a normalized state from sparse ``(labels, amplitude)`` entries.

    Labels are 1-based per subsystem. Unlisted amplitudes are zero.
    """
    dims = check_dims(dims)
    amps = np.zeros(math.prod(dims), dtype=np.complex128)
    seen = set()
    for labels, value in entries:
        labels = tuple(int(k) for k in labels)
        if labels in seen:
            raise DuplicateEntryError(f"basis ket {labels} listed twice")
        seen.add(labels)
        amps[joint_index(dims, labels) - 1] = complex(value)
    return PureState.from_amplitudes(dims, amps)


def check_unitary(u: np.ndarray, n: int, atol: float = UNITARY_ATOL) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (n, n):
        raise DimensionError(f"expected a {n}x{n} matrix, got shape {u.shape}")
    resid = np.max(np.abs(u.conj().T @ u - np.eye(n)))
    if resid > atol:
        raise UnitarityError(f"matrix is not unitary (residual {resid:.3g})")
    return u


def apply_local_unitaries(state: PureState, unitaries: Sequence[np.ndarray]) -> PureState:
    """Apply ``U_1 x ... x U_m`` without forming the joint matrix."""
    if len(unitaries) != state.num_parties:
        raise DimensionError(
            f"need {state.num_parties} local unitaries, got {len(unitaries)}"
        )
    psi = state.tensor()
    for axis, (u, n) in enumerate(zip(unitaries, state.dims)):
        u = check_unitary(u, n)
        psi = np.moveaxis(np.tensordot(u, psi, axes=([1], [axis])), 0, axis)
    # renormalize to absorb rounding; unitarity was already checked
    return PureState.from_amplitudes(state.dims, psi)


def _random_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def product_state(seed: int, dims: Iterable[int]) -> PureState:
    dims = check_dims(dims)
    rng = np.random.default_rng(seed)
    factors = [_random_vector(rng, n) for n in dims]
    return PureState.from_amplitudes(dims, reduce(np.kron, factors))


def random_state(seed: int, dims: Iterable[int]) -> PureState:
    dims = check_dims(dims)
    rng = np.random.default_rng(seed)
    return PureState.from_amplitudes(dims, _random_vector(rng, math.prod(dims)))


def _from_kets(kets: Sequence[str]) -> PureState:
    m = len(kets[0])
    entries = [(tuple(int(d) + 1 for d in ket), 1.0) for ket in kets]
    return make_state((2,) * m, entries)


def cat_state(m: int) -> PureState:
    if m < 2:
        raise UnknownStateError(f"cat state needs m >= 2, got {m}")
    return _from_kets(["0" * m, "1" * m])


def w_state(m: int = 3) -> PureState:
    if m < 2:
        raise UnknownStateError(f"W state needs m >= 2, got {m}")
    return _from_kets(["0" * (m - 1 - j) + "1" + "0" * j for j in range(m)])


ZOO_NAMES = ("ghz", "w", "cat", "psi1", "psi2", "bell", "product", "random")


def zoo(name: str, m: int | None = None, seed: int = 0, dims: Iterable[int] | None = None) -> PureState:
    """Named example states.

    ``ghz`` and ``w`` default to three qubits, ``cat`` requires ``m``;
    ``product`` and ``random`` draw from ``seed`` on ``dims``.
    """
    name = name.lower()
    if name == "ghz":
        return cat_state(3 if m is None else m)
    if name == "cat":
        if m is None:
            raise UnknownStateError("cat state needs m")
        return cat_state(m)
    if name == "bell":
        return cat_state(2)
    if name == "w":
        return w_state(3 if m is None else m)
    if name == "psi1":
        return _from_kets(["0001", "0100", "1010", "1111"])
    if name == "psi2":
        return _from_kets(["0110", "1001", "0111", "1000"])
    if name in ("product", "random"):
        if dims is None:
            raise UnknownStateError(f"{name} state needs dims")
        return product_state(seed, dims) if name == "product" else random_state(seed, dims)
    raise UnknownStateError(f"unknown state {name!r}; choose from {', '.join(ZOO_NAMES)}")
