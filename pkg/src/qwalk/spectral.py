"""Momentum-space diagonalization, group velocities and the weak-limit law.

For every node ``k`` of a momentum grid the N x N unitary ``U(k)`` is
diagonalized. Branch ``J`` moves asymptotically with velocity

    h_i(k, J) = <v_J(k), E_i v_J(k)>,   E_i = diag(eps_{1,i}, ..., eps_{N,i}),

which equals ``-i d_i lambda_J / lambda_J`` (Hellmann-Feynman, since
``d_i U = i E_i U``) but needs no differentiation across nodes. The limit
law of ``X_n / n`` puts mass ``|<v_J(k), Psi_0(k)>|^2 / M^d`` on ``h(k, J)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .cdf import StepCDF
from .errors import AllNodesDegenerate, DegenerateBranch, DimMismatch, SolverFailure
from .evolution import to_momentum, u_matrices
from .walk import MixedState, MomentumGrid, PositionState, ShiftSet, WalkSpec

__all__ = [
    "DEGENERACY_TOL",
    "UkMatrix",
    "Eigensystem",
    "LimitLaw",
    "u_of_k",
    "eigensystem",
    "eigen_batch",
    "velocity",
    "velocities",
    "omega_measure",
    "law_from_eigensystem",
    "limit_cdf",
    "limit_moment",
]

DEGENERACY_TOL = 1e-8
_RESIDUAL_TOL = 1e-8
_CHUNK = 1 << 14


@dataclass(frozen=True)
class UkMatrix:
    k: np.ndarray
    matrix: np.ndarray


@dataclass(frozen=True)
class Eigensystem:
    """Eigenpairs of one ``U(k)``; ``eigenvectors[:, J]`` belongs to ``eigenvalues[J]``."""

    k: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    gap: float


def u_of_k(spec: WalkSpec, k: ArrayLike) -> UkMatrix:
    """``diag(exp(i eps_J . k)) @ A`` at a single momentum."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.size != spec.dim:
        raise DimMismatch(f"momentum of length {k.size} for a {spec.dim}-d walk")
    return UkMatrix(k, u_matrices(spec, k[None, :])[0])


def _eig2(m: np.ndarray):
    a, b, c, d = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
    half = 0.5 * (a + d)
    disc = np.sqrt(half * half - (a * d - b * c))
    lam = np.stack([half + disc, half - disc], axis=1)

    # candidate eigenvectors (b, l - a) and (l - d, c) for each root; the
    # longest one is the best conditioned, its orthogonal complement is the
    # other eigenvector because U(k) is normal
    cands = np.stack([
        np.stack([b, lam[:, 0] - a], axis=1),
        np.stack([lam[:, 0] - d, c], axis=1),
        np.stack([b, lam[:, 1] - a], axis=1),
        np.stack([lam[:, 1] - d, c], axis=1),
    ], axis=1)
    norms = np.linalg.norm(cands, axis=2)
    best = np.argmax(norms, axis=1)
    rows = np.arange(len(m))
    v = cands[rows, best] / np.where(norms[rows, best] > 0, norms[rows, best], 1.0)[:, None]
    scalar = norms[rows, best] == 0
    v[scalar] = [1.0, 0.0]
    w = np.stack([-np.conj(v[:, 1]), np.conj(v[:, 0])], axis=1)

    first_root = best < 2
    vecs = np.empty((len(m), 2, 2), dtype=np.complex128)
    vecs[:, :, 0] = np.where(first_root[:, None], v, w)
    vecs[:, :, 1] = np.where(first_root[:, None], w, v)
    return lam, vecs


def _eig_general(m: np.ndarray):
    lam, vecs = np.linalg.eig(m)
    if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(vecs))):
        raise SolverFailure("eigensolver returned non-finite values")
    # nearest unitary to the computed frame removes the O(eps/gap) skew
    uu, _, vvh = np.linalg.svd(vecs)
    vecs = uu @ vvh
    lam = np.einsum("kaj,kab,kbj->kj", vecs.conj(), m, vecs)
    return lam, vecs


def _min_gap(lam: np.ndarray) -> np.ndarray:
    n = lam.shape[1]
    if n < 2:
        return np.full(lam.shape[0], np.inf)
    diff = np.abs(lam[:, :, None] - lam[:, None, :])
    diff[:, np.arange(n), np.arange(n)] = np.inf
    return diff.min(axis=(1, 2))


def eigen_batch(mats: np.ndarray):
    """Diagonalize a stack of unitary matrices.

    Returns ``(eigenvalues, eigenvectors, gap)`` with shapes ``(K, N)``,
    ``(K, N, N)`` (columns are eigenvectors) and ``(K,)``. Eigenvalues are
    ordered by principal argument in ``[0, 2 pi)``; exact ties are broken by
    the modulus of the leading eigenvector component.

    Two-state matrices use the closed-form quadratic; larger ones use LAPACK
    followed by re-orthonormalization and a residual check.

    Raises
    ------
    SolverFailure
        If a non-degenerate node fails the residual check.
    """
    mats = np.asarray(mats, dtype=np.complex128)
    k, n, _ = mats.shape
    if n == 1:
        lam = mats[:, :, 0].copy()
        vecs = np.ones((k, 1, 1), dtype=np.complex128)
    elif n == 2:
        lam, vecs = _eig2(mats)
    else:
        lam, vecs = _eig_general(mats)

    arg = np.mod(np.angle(lam), 2 * np.pi)
    arg[arg >= 2 * np.pi] = 0.0
    lead = -np.abs(vecs[:, 0, :])
    # row-wise lexsort: stable sort on the secondary key, then the primary
    o1 = np.argsort(lead, axis=1, kind="stable")
    o2 = np.argsort(np.take_along_axis(arg, o1, axis=1), axis=1, kind="stable")
    order = np.take_along_axis(o1, o2, axis=1)
    rows = np.arange(k)[:, None]
    lam = lam[rows, order]
    vecs = vecs[rows, :, order].transpose(0, 2, 1)
    gap = _min_gap(lam)

    if n > 2:
        resid = np.linalg.norm(mats @ vecs - vecs * lam[:, None, :], axis=1).max(axis=1)
        bad = (resid > _RESIDUAL_TOL) & (gap >= DEGENERACY_TOL)
        if np.any(bad):
            raise SolverFailure(
                f"eigen-decomposition residual {resid[bad].max():.2e} exceeds {_RESIDUAL_TOL:g} "
                f"at {int(bad.sum())} node(s)"
            )
    return lam, vecs, gap


def eigensystem(u: UkMatrix | np.ndarray) -> Eigensystem:
    """Eigen-decomposition of a single ``U(k)``."""
    if isinstance(u, UkMatrix):
        k, m = u.k, u.matrix
    else:
        k, m = np.array([np.nan]), np.asarray(u)
    lam, vecs, gap = eigen_batch(m[None, :, :])
    return Eigensystem(k, lam[0], vecs[0], float(gap[0]))


def velocities(vecs: np.ndarray, shifts: ShiftSet | np.ndarray) -> np.ndarray:
    """Batched velocities ``h[K, J, i] = sum_a |v_{aJ}|^2 eps_{a,i}``."""
    eps = shifts.vectors if isinstance(shifts, ShiftSet) else np.asarray(shifts)
    return np.einsum("kaj,ai->kji", np.abs(vecs) ** 2, eps.astype(float))


def velocity(eig: Eigensystem, shifts: ShiftSet | np.ndarray) -> np.ndarray:
    """Velocity vector of every branch, shape ``(N, d)``.

    Raises
    ------
    DegenerateBranch
        If two eigenvalues are closer than ``DEGENERACY_TOL``.
    """
    if eig.gap < DEGENERACY_TOL:
        raise DegenerateBranch(f"eigenvalue gap {eig.gap:.2e} at k={eig.k} is below {DEGENERACY_TOL:g}")
    return velocities(eig.eigenvectors[None], shifts)[0]


@dataclass(frozen=True)
class LimitLaw:
    """Weighted atoms ``(k, J) -> h(k, J)`` describing the law of ``lim X_n / n``.

    Atoms are sorted by grid index, then branch. Nodes whose eigenvalue gap
    fell below the degeneracy threshold are excluded and counted in
    ``n_dropped``; the remaining weights are renormalized.
    """

    k: np.ndarray  # (A, d) radians
    index: np.ndarray  # (A, d) grid indices
    branch: np.ndarray  # (A,)
    h: np.ndarray  # (A, d)
    weight: np.ndarray  # (A,)
    eigenvalue: np.ndarray  # (A,)
    grid_size: int
    n_dropped: int = 0
    label: str = ""

    @property
    def dim(self) -> int:
        return self.h.shape[1]

    def __len__(self) -> int:
        return len(self.weight)

    def project(self, c: ArrayLike) -> np.ndarray:
        c = np.asarray(c, dtype=float).ravel()
        if c.size != self.dim:
            raise DimMismatch(f"projection of length {c.size} for a {self.dim}-d law")
        return self.h @ c

    def support(self, c: ArrayLike | None = None) -> tuple[float, float]:
        """Range of ``c . h`` over atoms of positive weight."""
        if c is None:
            c = np.eye(self.dim)[0]
        v = self.project(c)[self.weight > 0]
        return float(v.min()), float(v.max())


def _initial_momentum(initial: PositionState | MixedState, size: int):
    comps = initial.components if isinstance(initial, MixedState) else (initial,)
    probs = initial.probabilities if isinstance(initial, MixedState) else (1.0,)
    return [to_momentum(s, size).reshape(-1, s.n_states) for s in comps], list(probs)


def law_from_eigensystem(ks, lam, vecs, gap, psi0k, probs, shifts: ShiftSet, grid_size: int,
                         tol: float = DEGENERACY_TOL, label: str = "") -> LimitLaw:
    """Assemble a :class:`LimitLaw` from per-node eigendata.

    ``psi0k`` is a list of initial momentum amplitudes (one ``(K, N)``
    array per mixture component) with mixture probabilities ``probs``.
    """
    ks = np.asarray(ks, dtype=float)
    nodes, n = lam.shape
    w = np.zeros((nodes, n))
    for p, amp in zip(probs, psi0k):
        w += p * np.abs(np.einsum("kaj,ka->kj", vecs.conj(), amp)) ** 2
    w /= nodes

    keep = gap >= tol
    dropped = int(nodes - keep.sum())
    if not keep.any():
        raise AllNodesDegenerate(f"all {nodes} grid nodes have eigenvalue gap below {tol:g}")
    h = velocities(vecs[keep], shifts)
    w = w[keep]
    total = w.sum()
    if total <= 0:
        raise AllNodesDegenerate("initial state has no weight on non-degenerate nodes")
    w = w / total

    kk = ks[keep]
    d = kk.shape[1]
    index = np.rint(kk * grid_size / (2 * np.pi)).astype(np.int64)
    return LimitLaw(
        k=np.repeat(kk, n, axis=0),
        index=np.repeat(index, n, axis=0),
        branch=np.tile(np.arange(n), len(kk)),
        h=h.reshape(-1, d),
        weight=w.ravel(),
        eigenvalue=lam[keep].ravel(),
        grid_size=grid_size,
        n_dropped=dropped,
        label=label,
    )


def omega_measure(spec: WalkSpec, initial: PositionState | MixedState,
                  grid: MomentumGrid | int, tol: float = DEGENERACY_TOL) -> LimitLaw:
    """Weak-limit law for ``initial`` evolved under ``spec``.

    Raises
    ------
    GridTooSmall
        If the grid cannot resolve the initial window.
    AllNodesDegenerate
        If every node is dropped by the degeneracy policy.
    """
    size = grid.size if isinstance(grid, MomentumGrid) else int(grid)
    g = MomentumGrid(spec.dim, size)
    if initial.dim != spec.dim or initial.n_states != spec.n_states:
        raise DimMismatch("initial state does not match the walk")
    psi0k, probs = _initial_momentum(initial, size)
    ks = g.nodes()
    lam = np.empty((len(ks), spec.n_states), dtype=np.complex128)
    vecs = np.empty((len(ks), spec.n_states, spec.n_states), dtype=np.complex128)
    gap = np.empty(len(ks))
    for start in range(0, len(ks), _CHUNK):
        sl = slice(start, start + _CHUNK)
        lam[sl], vecs[sl], gap[sl] = eigen_batch(u_matrices(spec, ks[sl]))
    return law_from_eigensystem(ks, lam, vecs, gap, psi0k, probs, spec.shifts, size, tol, spec.label)


def limit_cdf(law: LimitLaw, c: ArrayLike | None = None) -> StepCDF:
    """Right-continuous CDF of ``c . h`` under the atom weights."""
    if c is None:
        c = np.eye(law.dim)[0]
    return StepCDF(law.project(c), law.weight)


def limit_moment(law: LimitLaw, r: int, c: ArrayLike | None = None) -> float:
    """``sum_atoms weight * (c . h)^r``."""
    if r < 0:
        raise ValueError(f"moment order must be nonnegative, got {r}")
    if c is None:
        c = np.eye(law.dim)[0]
    return float(np.sum(law.weight * law.project(c) ** r) / np.sum(law.weight))
