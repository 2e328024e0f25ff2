"""Walk construction: coins, shift sets, walk specs, lattice states.

A walk on Z^d with an N-dimensional coin space is fixed by a unitary coin
``A`` (N x N) and N integer shift vectors. One step applies ``A`` to the
internal vector at every site, then moves component ``J`` by ``shifts[J]``.
In momentum space that step is the matrix ``diag(exp(i eps_J . k)) @ A``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import (
    DimMismatch,
    NonSquare,
    NonUnitary,
    NormError,
    ParamOutOfRange,
    UnknownFamily,
    ValidationError,
)

__all__ = [
    "UNITARY_TOL",
    "NORM_TOL",
    "CoinMatrix",
    "ShiftSet",
    "WalkSpec",
    "PositionState",
    "MixedState",
    "Distribution",
    "MomentumGrid",
    "make_coin",
    "coin_family",
    "walk_family",
    "point_state",
    "mixed_state",
    "tensor_spec",
]

UNITARY_TOL = 1e-12
NORM_TOL = 1e-12

COIN_FAMILIES = ("hadamard", "unbiased", "biased", "hadamard2d", "identity", "grover")


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CoinMatrix:
    """Validated unitary coin. Build with :func:`make_coin`."""

    entries: NDArray[np.complex128]

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_diagonal(self) -> bool:
        off = self.entries - np.diag(np.diag(self.entries))
        return bool(np.all(off == 0))

    def __eq__(self, other):
        if not isinstance(other, CoinMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())


def unitarity_residual(a: np.ndarray) -> float:
    """Return ``max |A^H A - I|``."""
    n = a.shape[0]
    return float(np.max(np.abs(a.conj().T @ a - np.eye(n))))


def make_coin(entries: ArrayLike) -> CoinMatrix:
    """Validate a square complex array as a unitary coin.

    Raises
    ------
    NonSquare
        If ``entries`` is not a non-empty square 2-D array.
    NonUnitary
        If ``max |A^H A - I| > 1e-12``.
    """
    a = np.array(entries, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NonSquare(f"coin must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("coin entries must be finite")
    residual = unitarity_residual(a)
    if residual > UNITARY_TOL:
        raise NonUnitary(residual)
    return CoinMatrix(_readonly(a))


def coin_family(name: str, **params) -> CoinMatrix:
    """Return a named coin.

    Parameters
    ----------
    name : str
        ``hadamard``; ``unbiased`` (``phi``, ``psi``); ``biased`` (``rho`` in
        (0, 1)); ``hadamard2d``; ``identity`` (``n``, default 2);
        ``grover`` (``n``).
    """
    if name == "hadamard":
        a = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
    elif name == "unbiased":
        phi = float(params.get("phi", 0.0))
        psi = float(params.get("psi", 0.0))
        s, t = phi + psi, phi - psi
        a = np.array(
            [[np.exp(1j * s), np.exp(-1j * t)], [np.exp(1j * t), -np.exp(-1j * s)]]
        ) / np.sqrt(2.0)
    elif name == "biased":
        if "rho" not in params:
            raise ParamOutOfRange("biased coin requires parameter rho")
        rho = float(params["rho"])
        if not 0.0 < rho < 1.0:
            raise ParamOutOfRange(f"biased coin requires 0 < rho < 1, got {rho}")
        p, q = np.sqrt(rho), np.sqrt(1.0 - rho)
        a = np.array([[p, q], [q, -p]], dtype=np.complex128)
    elif name == "hadamard2d":
        a = np.array(
            [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]],
            dtype=np.complex128,
        ) / 2.0
    elif name == "identity":
        a = np.eye(int(params.get("n", 2)), dtype=np.complex128)
    elif name == "grover":
        n = int(params.get("n", 4))
        if n < 1:
            raise ParamOutOfRange(f"grover coin requires n >= 1, got {n}")
        a = 2.0 / n * np.ones((n, n), dtype=np.complex128) - np.eye(n)
    else:
        raise UnknownFamily(f"unknown coin family {name!r}; known: {', '.join(COIN_FAMILIES)}")
    return make_coin(a)


@dataclass(frozen=True)
class ShiftSet:
    """Ordered integer shift vectors, one per coin basis state (shape ``(N, d)``)."""

    vectors: NDArray[np.int64]

    def __post_init__(self):
        v = np.array(self.vectors, dtype=np.int64)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise ValidationError(f"shift vectors must form an (N, d) array, got shape {v.shape}")
        object.__setattr__(self, "vectors", _readonly(v))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ShiftSet):
            return NotImplemented
        return np.array_equal(self.vectors, other.vectors)

    def __hash__(self):
        return hash(self.vectors.tobytes())


@dataclass(frozen=True)
class WalkSpec:
    coin: CoinMatrix
    shifts: ShiftSet
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.shifts, ShiftSet):
            object.__setattr__(self, "shifts", ShiftSet(self.shifts))
        if self.coin.dim != len(self.shifts):
            raise DimMismatch(
                f"coin dimension {self.coin.dim} does not match {len(self.shifts)} shift vectors"
            )

    @property
    def dim(self) -> int:
        """Lattice dimension d."""
        return self.shifts.dim

    @property
    def n_states(self) -> int:
        """Coin dimension N."""
        return self.coin.dim

    @property
    def trivial(self) -> bool:
        # diagonal coin: every component just translates
        return self.coin.is_diagonal

    @property
    def max_abs_shift(self) -> int:
        return int(np.max(np.abs(self.shifts.vectors)))


def walk_family(name: str, **params) -> WalkSpec:
    """Named coin with its standard shift set.

    Two-state coins get shifts ``(+1, -1)``; ``hadamard2d`` gets
    ``(1,0), (0,1), (0,-1), (-1,0)`` so that its momentum matrix is
    ``diag(e^{ik1}, e^{ik2}, e^{-ik2}, e^{-ik1}) A``.
    """
    coin = coin_family(name, **params)
    if name == "hadamard2d":
        shifts = [[1, 0], [0, 1], [0, -1], [-1, 0]]
    elif coin.dim == 2:
        shifts = [[1], [-1]]
    else:
        raise ValidationError(f"no default shift set for {name!r} with N={coin.dim}; give shifts explicitly")
    label = name
    if params:
        label += "(" + ",".join(f"{k}={params[k]}" for k in sorted(params)) + ")"
    return WalkSpec(coin, ShiftSet(shifts), label)


def tensor_spec(a: WalkSpec, b: WalkSpec) -> WalkSpec:
    """Walk on Z^(dA+dB) whose coin is ``kron(A, B)``.

    Basis state ``J = jA * N_B + jB`` shifts by the concatenation
    ``(eps_A[jA], eps_B[jB])``.
    """
    coin = make_coin(np.kron(a.coin.entries, b.coin.entries))
    va, vb = a.shifts.vectors, b.shifts.vectors
    shifts = np.array([np.concatenate([x, y]) for x in va for y in vb], dtype=np.int64)
    label = f"({a.label or 'A'})x({b.label or 'B'})"
    return WalkSpec(coin, ShiftSet(shifts), label)


@dataclass(frozen=True)
class PositionState:
    """Coin-space amplitudes on a dense lattice box.

    ``amplitudes[i_1, ..., i_d, J]`` is the amplitude of component ``J`` at
    lattice point ``lo + (i_1, ..., i_d)``.
    """

    lo: tuple[int, ...]
    amplitudes: NDArray[np.complex128]

    def __post_init__(self):
        lo = tuple(int(v) for v in np.atleast_1d(self.lo))
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != len(lo) + 1:
            raise DimMismatch(f"amplitudes of rank {amps.ndim} do not fit a {len(lo)}-d window")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def n_states(self) -> int:
        return self.amplitudes.shape[-1]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.amplitudes.shape[:-1]

    @property
    def hi(self) -> tuple[int, ...]:
        return tuple(l + s - 1 for l, s in zip(self.lo, self.shape))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def positions(self) -> NDArray[np.int64]:
        """All window points in C order, shape ``(prod(shape), d)``."""
        axes = [np.arange(l, l + s) for l, s in zip(self.lo, self.shape)]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def translated(self, offset: Sequence[int]) -> "PositionState":
        return PositionState(tuple(l + int(o) for l, o in zip(self.lo, offset)), self.amplitudes)


@dataclass(frozen=True)
class MixedState:
    """Classical mixture of pure lattice states."""

    components: tuple[PositionState, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if len(self.components) != len(self.probabilities) or not self.components:
            raise ValidationError("mixture needs one probability per component")
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > NORM_TOL:
            raise NormError(f"mixture probabilities must be nonnegative and sum to 1, got {p.sum()}")
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "probabilities", tuple(float(x) for x in p))

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def n_states(self) -> int:
        return self.components[0].n_states


def point_state(position, coin_amplitudes: ArrayLike, spec: WalkSpec | None = None) -> PositionState:
    """State localized at ``position`` with internal vector ``coin_amplitudes``.

    Raises
    ------
    NormError
        If the internal vector does not have unit norm (to 1e-12).
    DimMismatch
        If sizes disagree with ``spec``.
    """
    pos = tuple(int(v) for v in np.atleast_1d(position))
    c = np.asarray(coin_amplitudes, dtype=np.complex128).ravel()
    if spec is not None:
        if c.size != spec.n_states:
            raise DimMismatch(f"expected {spec.n_states} coin amplitudes, got {c.size}")
        if len(pos) != spec.dim:
            raise DimMismatch(f"expected a {spec.dim}-d position, got {len(pos)}-d")
    norm = float(np.linalg.norm(c))
    if abs(norm - 1.0) > NORM_TOL:
        raise NormError(f"coin amplitudes must have unit norm, got {norm!r}")
    amps = c.reshape((1,) * len(pos) + (c.size,))
    return PositionState(pos, amps)


def mixed_state(spec: WalkSpec, position=None) -> MixedState:
    """Uniform mixture of the N coin basis states at ``position`` (origin by default)."""
    if position is None:
        position = (0,) * spec.dim
    basis = np.eye(spec.n_states)
    comps = tuple(point_state(position, basis[j], spec) for j in range(spec.n_states))
    return MixedState(comps, tuple([1.0 / spec.n_states] * spec.n_states))


def _row_keys(pos: np.ndarray) -> np.ndarray:
    """Integer keys that order lattice points lexicographically."""
    lo = pos.min(axis=0)
    span = pos.max(axis=0) - lo + 1
    strides = np.concatenate([np.cumprod(span[::-1])[::-1][1:], [1]])
    return (pos - lo) @ strides


@dataclass(frozen=True)
class Distribution:
    """Probability mass on lattice points.

    ``positions`` has shape ``(m, d)`` and is sorted lexicographically;
    points of exactly zero mass are not stored.
    """

    positions: NDArray[np.int64]
    probabilities: NDArray[np.float64]

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.int64)
        if pos.ndim == 1:
            pos = pos[:, None]
        p = np.asarray(self.probabilities, dtype=np.float64)
        keep = p != 0
        pos, p = pos[keep], p[keep]
        if len(pos) > 1:
            key = _row_keys(pos)
            if not np.all(np.diff(key) > 0):
                order = np.argsort(key, kind="stable")
                pos, p = pos[order], p[order]
        object.__setattr__(self, "positions", _readonly(pos))
        object.__setattr__(self, "probabilities", _readonly(p))

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def total(self) -> float:
        return float(np.sum(self.probabilities))

    def as_dict(self) -> dict:
        """Map position (int for d=1, tuple otherwise) to probability."""
        if self.dim == 1:
            return {int(x[0]): float(p) for x, p in zip(self.positions, self.probabilities)}
        return {tuple(int(v) for v in x): float(p) for x, p in zip(self.positions, self.probabilities)}

    def project(self, c: ArrayLike, scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
        """Values ``c . x / scale`` with their probabilities."""
        c = np.asarray(c, dtype=float).ravel()
        if c.size != self.dim:
            raise DimMismatch(f"projection of length {c.size} for a {self.dim}-d distribution")
        return self.positions @ c / scale, self.probabilities.copy()

    @staticmethod
    def mix(dists: Sequence["Distribution"], weights: Sequence[float]) -> "Distribution":
        pos = np.concatenate([d.positions for d in dists])
        p = np.concatenate([w * d.probabilities for d, w in zip(dists, weights)])
        _, first, inv = np.unique(_row_keys(pos), return_index=True, return_inverse=True)
        return Distribution(pos[first], np.bincount(inv.ravel(), weights=p, minlength=len(first)))


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform grid ``k = 2 pi m / M`` on the d-torus; every node has weight ``1/M^d``."""

    dim: int
    size: int

    def __post_init__(self):
        if self.size < 2:
            raise ValidationError(f"momentum grid needs at least 2 points per axis, got {self.size}")
        if self.dim < 1:
            raise ValidationError("momentum grid dimension must be positive")

    @property
    def n_nodes(self) -> int:
        return self.size**self.dim

    @property
    def weight(self) -> float:
        return 1.0 / self.n_nodes

    def axis(self) -> NDArray[np.float64]:
        return 2.0 * np.pi * np.arange(self.size) / self.size

    def indices(self) -> NDArray[np.int64]:
        """Integer node indices ``m``, shape ``(M^d, d)``, C order."""
        grids = np.meshgrid(*([np.arange(self.size)] * self.dim), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def nodes(self) -> NDArray[np.float64]:
        return 2.0 * np.pi * self.indices() / self.size
