"""Right-continuous step CDFs of finite weighted samples."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike


class StepCDF:
    """CDF of a discrete law given by ``values`` and nonnegative ``weights``.

    Equal values are merged. Weights are normalized to total mass one.
    """

    def __init__(self, values: ArrayLike, weights: ArrayLike | None = None):
        v = np.asarray(values, dtype=float).ravel()
        w = np.ones_like(v) if weights is None else np.asarray(weights, dtype=float).ravel()
        if v.shape != w.shape:
            raise ValueError("values and weights must have the same length")
        if v.size == 0:
            raise ValueError("a step CDF needs at least one atom")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        total = w.sum()
        if total <= 0:
            raise ValueError("weights must have positive total mass")
        jumps, inv = np.unique(v, return_inverse=True)
        mass = np.bincount(inv.ravel(), weights=w, minlength=len(jumps)) / total
        self.jumps = jumps
        self.masses = mass
        cum = np.cumsum(mass)
        cum[-1] = 1.0
        self.cumulative = cum

    def __call__(self, y: ArrayLike) -> np.ndarray:
        idx = np.searchsorted(self.jumps, np.asarray(y, dtype=float), side="right")
        return np.where(idx > 0, self.cumulative[np.maximum(idx - 1, 0)], 0.0)

    def left_limit(self, y: ArrayLike) -> np.ndarray:
        """``F(y-)``."""
        idx = np.searchsorted(self.jumps, np.asarray(y, dtype=float), side="left")
        return np.where(idx > 0, self.cumulative[np.maximum(idx - 1, 0)], 0.0)

    @property
    def support(self) -> tuple[float, float]:
        """Smallest and largest atoms carrying positive mass."""
        pos = self.jumps[self.masses > 0]
        return float(pos[0]), float(pos[-1])

    def moment(self, r: int) -> float:
        return float(np.sum(self.masses * self.jumps**r) / np.sum(self.masses))
