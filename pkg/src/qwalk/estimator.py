"""scikit-learn style front end for the weak-limit computation."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted, check_random_state

from .spectral import DEGENERACY_TOL, limit_cdf, limit_moment, omega_measure
from .walk import (
    MixedState,
    PositionState,
    ShiftSet,
    WalkSpec,
    coin_family,
    make_coin,
    mixed_state,
    point_state,
    walk_family,
)


class QuantumWalkLimit(BaseEstimator):
    """Weak limit of ``X_n / n`` for a coined quantum walk.

    Parameters
    ----------
    coin : str or array-like, default="hadamard"
        Family name understood by :func:`qwalk.walk.coin_family`, or explicit
        unitary entries.
    coin_params : dict, optional
        Family parameters, e.g. ``{"rho": 0.25}``.
    shifts : array-like of shape (N, d), optional
        Shift vectors. Required for explicit coins without a default.
    grid_size : int, default=1024
        Momentum points per axis.
    degeneracy_tol : float, default=1e-8
        Nodes with a smaller eigenvalue gap are dropped.

    Attributes
    ----------
    walk_ : WalkSpec
    law_ : LimitLaw
    n_dropped_ : int
    support_ : tuple of float
        Range of the first coordinate of the limit law.

    Examples
    --------
    >>> est = QuantumWalkLimit(coin="biased", coin_params={"rho": 0.25}).fit()
    >>> [round(v, 6) for v in est.support_]
    [-0.5, 0.5]
    """

    def __init__(self, coin="hadamard", coin_params=None, shifts=None, grid_size=1024,
                 degeneracy_tol=DEGENERACY_TOL):
        self.coin = coin
        self.coin_params = coin_params
        self.shifts = shifts
        self.grid_size = grid_size
        self.degeneracy_tol = degeneracy_tol

    def _build_walk(self) -> WalkSpec:
        params = dict(self.coin_params or {})
        if isinstance(self.coin, str):
            if self.shifts is None:
                return walk_family(self.coin, **params)
            return WalkSpec(coin_family(self.coin, **params), ShiftSet(self.shifts), self.coin)
        if self.shifts is None:
            raise ValueError("explicit coins need explicit shifts")
        return WalkSpec(make_coin(self.coin), ShiftSet(self.shifts), "explicit")

    def fit(self, X=None, y=None):
        """Compute the limit law for initial state ``X``.

        ``X`` may be a :class:`PositionState`, a :class:`MixedState`, a coin
        vector (placed at the origin) or ``None`` / ``"mixed"`` for the
        uniform coin mixture at the origin.
        """
        del y
        walk = self._build_walk()
        if X is None or (isinstance(X, str) and X == "mixed"):
            initial = mixed_state(walk)
        elif isinstance(X, (PositionState, MixedState)):
            initial = X
        else:
            initial = point_state((0,) * walk.dim, np.asarray(X, dtype=complex), walk)
        self.walk_ = walk
        self.law_ = omega_measure(walk, initial, self.grid_size, tol=self.degeneracy_tol)
        self.n_dropped_ = self.law_.n_dropped
        self.support_ = self.law_.support()
        return self

    def _projection(self, projection):
        if projection is None:
            return np.eye(self.walk_.dim)[0]
        return np.asarray(projection, dtype=float)

    def cdf(self, y, projection=None):
        """Limit CDF of ``projection . Y`` at ``y``."""
        check_is_fitted(self, "law_")
        return limit_cdf(self.law_, self._projection(projection))(y)

    def moment(self, r, projection=None):
        check_is_fitted(self, "law_")
        return limit_moment(self.law_, r, self._projection(projection))

    def sample(self, n_samples=1, random_state=None):
        """Draw velocity vectors from the limit law, shape ``(n_samples, d)``."""
        check_is_fitted(self, "law_")
        rng = check_random_state(random_state)
        idx = rng.choice(len(self.law_), size=n_samples, p=self.law_.weight / self.law_.weight.sum())
        return self.law_.h[idx]
