"""Exact lattice evolution, position distributions and scaled moments.

Two independent paths are provided. :func:`evolve` applies single steps on a
dense window that grows with the light cone. :func:`evolve_spectral`
transforms the initial state to a momentum grid, multiplies by ``U(k)^n``
node by node, and transforms back; it is exact once the grid is wider than
the final window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import DimMismatch, GridTooSmall, NegativeSteps
from .walk import Distribution, MixedState, MomentumGrid, PositionState, WalkSpec

__all__ = [
    "EvolutionResult",
    "step",
    "evolve",
    "evolve_spectral",
    "distribution",
    "evolve_distribution",
    "scaled_moment",
    "u_matrices",
    "to_momentum",
    "from_momentum",
    "required_grid_size",
]

# node batch for matrix powers; bounds peak memory on 2-d grids
_CHUNK = 1 << 15


@dataclass(frozen=True)
class EvolutionResult:
    n: int
    state: PositionState
    distribution: Distribution


def _check_dims(state: PositionState, spec: WalkSpec) -> None:
    if state.dim != spec.dim or state.n_states != spec.n_states:
        raise DimMismatch(
            f"state (d={state.dim}, N={state.n_states}) does not match walk "
            f"(d={spec.dim}, N={spec.n_states})"
        )


def step(state: PositionState, spec: WalkSpec) -> PositionState:
    """Apply the coin at every site, then move component J by ``shifts[J]``."""
    _check_dims(state, spec)
    eps = spec.shifts.vectors
    lo_shift = eps.min(axis=0)
    hi_shift = eps.max(axis=0)
    box = state.shape
    coined = state.amplitudes @ spec.coin.entries.T
    out = np.zeros(tuple(b + int(h - l) for b, l, h in zip(box, lo_shift, hi_shift)) + (spec.n_states,),
                   dtype=np.complex128)
    for j in range(spec.n_states):
        offset = eps[j] - lo_shift
        window = tuple(slice(int(o), int(o) + b) for o, b in zip(offset, box))
        out[window + (j,)] = coined[..., j]
    lo = tuple(int(a + b) for a, b in zip(state.lo, lo_shift))
    return PositionState(lo, out)


def distribution(state: PositionState) -> Distribution:
    """Site probabilities ``sum_J |psi_J(x)|^2``."""
    probs = np.sum(np.abs(state.amplitudes) ** 2, axis=-1)
    return Distribution(state.positions(), probs.ravel())


def evolve(state0: PositionState, spec: WalkSpec, n: int) -> EvolutionResult:
    """Reference evolution by ``n`` repeated steps."""
    if n < 0:
        raise NegativeSteps(f"number of steps must be nonnegative, got {n}")
    _check_dims(state0, spec)
    state = state0
    for _ in range(n):
        state = step(state, spec)
    return EvolutionResult(n, state, distribution(state))


def u_matrices(spec: WalkSpec, ks: ArrayLike) -> np.ndarray:
    """Stack of ``diag(exp(i eps_J . k)) @ A`` for ``ks`` of shape ``(K, d)``."""
    ks = np.atleast_2d(np.asarray(ks, dtype=float))
    phases = np.exp(1j * (ks @ spec.shifts.vectors.T.astype(float)))
    return phases[:, :, None] * spec.coin.entries[None, :, :]


def to_momentum(state: PositionState, size: int) -> np.ndarray:
    """``Psi(k_m) = sum_x psi_x exp(i x . k_m)`` on an M^d grid.

    Returns an array of shape ``(M,) * d + (N,)``. Requires the state window
    to fit in ``M`` points per axis.
    """
    if any(s > size for s in state.shape):
        raise GridTooSmall(f"grid of {size} points cannot resolve a window of shape {state.shape}")
    d = state.dim
    buf = np.zeros((size,) * d + (state.n_states,), dtype=np.complex128)
    idx = np.ix_(*[np.arange(l, l + s) % size for l, s in zip(state.lo, state.shape)])
    buf[idx] = state.amplitudes
    axes = tuple(range(d))
    return np.fft.ifftn(buf, axes=axes) * float(size) ** d


def from_momentum(psik: np.ndarray, lo, shape) -> PositionState:
    """Inverse of :func:`to_momentum`, read out on the window ``lo + [0, shape)``."""
    d = len(lo)
    size = psik.shape[0]
    axes = tuple(range(d))
    full = np.fft.fftn(psik, axes=axes) / float(size) ** d
    idx = np.ix_(*[np.arange(l, l + s) % size for l, s in zip(lo, shape)])
    return PositionState(tuple(lo), full[idx])


def required_grid_size(state0: PositionState, spec: WalkSpec, n: int) -> int:
    """Smallest M satisfying ``M > 2 n max|eps| + window width`` on every axis."""
    return 2 * n * spec.max_abs_shift + max(state0.shape) + 1


def _grid_size(state0: PositionState, spec: WalkSpec, n: int, grid) -> int:
    need = required_grid_size(state0, spec, n)
    if grid is None:
        return 1 << int(np.ceil(np.log2(need)))
    if isinstance(grid, MomentumGrid) and grid.dim != spec.dim:
        raise DimMismatch(f"{grid.dim}-d grid for a {spec.dim}-d walk")
    size = grid.size if isinstance(grid, MomentumGrid) else int(grid)
    if size < need:
        raise GridTooSmall(f"grid of {size} points per axis is too small for n={n}; need at least {need}")
    return size


def _spectral_many(states: list[PositionState], spec: WalkSpec, n: int, size: int) -> list[PositionState]:
    # states share one window, so U(k)^n is formed once per node batch
    d, N = spec.dim, spec.n_states
    psik = np.stack([to_momentum(s, size).reshape(-1, N) for s in states], axis=2)
    if n > 0:
        ks = MomentumGrid(d, size).nodes()
        for start in range(0, psik.shape[0], _CHUNK):
            sl = slice(start, start + _CHUNK)
            un = np.linalg.matrix_power(u_matrices(spec, ks[sl]), n)
            psik[sl] = un @ psik[sl]

    eps = spec.shifts.vectors
    lo_shift, hi_shift = eps.min(axis=0), eps.max(axis=0)
    s0 = states[0]
    lo = tuple(int(l + n * a) for l, a in zip(s0.lo, lo_shift))
    shape = tuple(int(s + n * (b - a)) for s, a, b in zip(s0.shape, lo_shift, hi_shift))
    grid_shape = (size,) * d + (N,)
    return [from_momentum(psik[:, :, i].reshape(grid_shape), lo, shape) for i in range(len(states))]


def evolve_spectral(state0: PositionState, spec: WalkSpec, n: int,
                    grid: MomentumGrid | int | None = None) -> EvolutionResult:
    """Evolve through momentum space: ``Psi_n(k) = U(k)^n Psi_0(k)``.

    Parameters
    ----------
    grid : MomentumGrid or int, optional
        Points per axis. Defaults to the smallest power of two meeting
        :func:`required_grid_size`.

    Raises
    ------
    GridTooSmall
        If the grid cannot hold the light cone without aliasing.
    """
    if n < 0:
        raise NegativeSteps(f"number of steps must be nonnegative, got {n}")
    _check_dims(state0, spec)
    size = _grid_size(state0, spec, n, grid)
    state = _spectral_many([state0], spec, n, size)[0]
    return EvolutionResult(n, state, distribution(state))


def evolve_distribution(initial: PositionState | MixedState, spec: WalkSpec, n: int,
                        method: str = "direct") -> Distribution:
    """Distribution after ``n`` steps for a pure or mixed initial state."""
    comps = initial.components if isinstance(initial, MixedState) else (initial,)
    probs = initial.probabilities if isinstance(initial, MixedState) else (1.0,)
    if n < 0:
        raise NegativeSteps(f"number of steps must be nonnegative, got {n}")
    for s in comps:
        _check_dims(s, spec)
    same_window = all(s.lo == comps[0].lo and s.shape == comps[0].shape for s in comps)
    if method == "spectral" and same_window:
        size = _grid_size(comps[0], spec, n, None)
        states = _spectral_many(list(comps), spec, n, size)
    else:
        run = evolve if method == "direct" else evolve_spectral
        states = [run(s, spec, n).state for s in comps]
    if same_window:
        probs_grid = sum(p * np.sum(np.abs(s.amplitudes) ** 2, axis=-1) for p, s in zip(probs, states))
        return Distribution(states[0].positions(), probs_grid.ravel())
    return Distribution.mix([distribution(s) for s in states], probs)


def scaled_moment(result: EvolutionResult | Distribution, r: int, c: ArrayLike | None = None,
                  n: int | None = None) -> float:
    """``sum_x mu_n(x) (c . x / n)^r``.

    ``c`` defaults to the first axis. For ``n == 0`` positions are not
    rescaled, so the result is the moment of the initial point mass.
    """
    if isinstance(result, EvolutionResult):
        dist, n = result.distribution, result.n
    else:
        dist = result
        if n is None:
            raise ValueError("n is required when passing a bare Distribution")
    if r < 0:
        raise ValueError(f"moment order must be nonnegative, got {r}")
    if c is None:
        c = np.eye(dist.dim)[0]
    values, probs = dist.project(c, scale=float(n) if n > 0 else 1.0)
    # normalized by total mass so that r = 0 is exactly 1
    return float(np.sum(probs * values**r) / np.sum(probs))
