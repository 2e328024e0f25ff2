"""Distances and moment errors between ``X_n / n`` and its weak limit."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .cdf import StepCDF
from .errors import EvalOutsideSupport, ValidationError, WrongCoinDim
from .evolution import evolve_distribution
from .spectral import LimitLaw, limit_cdf, limit_moment, omega_measure
from .walk import Distribution, MixedState, MomentumGrid, PositionState, WalkSpec, mixed_state

__all__ = [
    "ClosedFormLaw",
    "ConvergenceReport",
    "ReportRow",
    "DEFAULT_PROJECTIONS_2D",
    "empirical_cdf",
    "kolmogorov_distance",
    "hadamard_closed_form",
    "biased_support",
    "mixed_coin_distribution",
    "compare_to_limit",
    "cramer_wold_suite",
]

MOMENT_ORDERS = (1, 2, 3, 4)

_S = 1.0 / math.sqrt(2.0)
DEFAULT_PROJECTIONS_2D = ((1.0, 0.0), (0.0, 1.0), (_S, _S), (_S, -_S))


def empirical_cdf(dist: Distribution, n: int, c: ArrayLike | None = None) -> StepCDF:
    """Step CDF of ``c . X_n / n`` (no rescaling when ``n == 0``)."""
    if c is None:
        c = np.eye(dist.dim)[0]
    values, probs = dist.project(c, scale=float(n) if n > 0 else 1.0)
    return StepCDF(values, probs)


def kolmogorov_distance(empirical: StepCDF, reference: StepCDF | Callable) -> float:
    """``sup_y |F(y) - G(y)|``, exact.

    With a step reference both CDFs are constant between consecutive jump
    points of their union, so evaluating there is exact. With a continuous
    reference the sup is attained at a jump of ``empirical``, on one side or
    the other.
    """
    if isinstance(reference, StepCDF):
        pts = np.union1d(empirical.jumps, reference.jumps)
        return float(np.max(np.abs(empirical(pts) - reference(pts))))
    pts = empirical.jumps
    ref = np.asarray(reference(pts), dtype=float)
    gap_right = np.abs(ref - empirical(pts))
    gap_left = np.abs(ref - empirical.left_limit(pts))
    return float(max(gap_right.max(), gap_left.max()))


@dataclass(frozen=True)
class ClosedFormLaw:
    family: str
    lower: float
    upper: float
    density: Callable[[ArrayLike], np.ndarray] | None = None
    cdf: Callable[[ArrayLike], np.ndarray] | None = None


def hadamard_closed_form() -> ClosedFormLaw:
    """Limit law of the Hadamard walk started at the origin with a random coin.

    Density ``1 / (pi (1 - y^2) sqrt(1 - 2 y^2))`` on ``(-1/sqrt2, 1/sqrt2)``,
    CDF ``1 - arccos(y / sqrt(1 - y^2)) / pi``. The density refuses points
    outside the open support; the CDF is clamped to 0 and 1 outside it.
    """
    a = _S

    def density(y):
        y = np.asarray(y, dtype=float)
        if np.any(np.abs(y) >= a):
            raise EvalOutsideSupport(f"density is defined on (-{a:.6f}, {a:.6f}) only")
        return 1.0 / (np.pi * (1.0 - y * y) * np.sqrt(1.0 - 2.0 * y * y))

    def cdf(y):
        y = np.asarray(y, dtype=float)
        inside = np.clip(y, -a, a)
        u = np.clip(inside / np.sqrt(1.0 - inside * inside), -1.0, 1.0)
        out = 1.0 - np.arccos(u) / np.pi
        return np.where(y <= -a, 0.0, np.where(y >= a, 1.0, out))

    return ClosedFormLaw("hadamard-mixed", -a, a, density, cdf)


def biased_support(rho: float) -> ClosedFormLaw:
    """Only the support ``[-sqrt(rho), sqrt(rho)]`` is known in closed form."""
    s = math.sqrt(rho)
    return ClosedFormLaw(f"biased({rho})-support-only", -s, s)


def mixed_coin_distribution(spec: WalkSpec, n: int, position=None, method: str = "direct") -> Distribution:
    """Average of the runs started from each coin basis state.

    Raises
    ------
    WrongCoinDim
        If the walk is not a two-state walk.
    """
    if spec.n_states != 2:
        raise WrongCoinDim(f"mixed-coin runs are defined for two-state coins, got N={spec.n_states}")
    return evolve_distribution(mixed_state(spec, position), spec, n, method=method)


@dataclass(frozen=True)
class ReportRow:
    n: int
    kolmogorov: float
    moment_err: tuple[float, ...]
    scaled_moment: tuple[float, ...]
    kolmogorov_closed_form: float | None = None


@dataclass(frozen=True)
class ConvergenceReport:
    spec: str
    grid: int
    projection: tuple[float, ...]
    rows: tuple[ReportRow, ...]
    limit_moment: tuple[float, ...]
    n_dropped: int = 0
    notes: str = "thresholds on these distances are empirical gates; no convergence rate is claimed"

    def to_dict(self) -> dict:
        out = {
            "spec": self.spec,
            "grid": self.grid,
            "projection": list(self.projection),
            "limit_moment": {str(r): m for r, m in zip(MOMENT_ORDERS, self.limit_moment)},
            "dropped_nodes": self.n_dropped,
            "notes": self.notes,
            "rows": [],
        }
        for row in self.rows:
            d = {
                "n": row.n,
                "kolmogorov": row.kolmogorov,
                "moment_err": {str(r): e for r, e in zip(MOMENT_ORDERS, row.moment_err)},
                "scaled_moment": {str(r): m for r, m in zip(MOMENT_ORDERS, row.scaled_moment)},
            }
            if row.kolmogorov_closed_form is not None:
                d["kolmogorov_closed_form"] = row.kolmogorov_closed_form
            out["rows"].append(d)
        return out

    def table(self) -> tuple[list[str], list[list]]:
        """Header and rows for CSV output."""
        header = ["n", "kolmogorov"] + [f"moment_err_{r}" for r in MOMENT_ORDERS] \
            + [f"scaled_moment_{r}" for r in MOMENT_ORDERS]
        closed = any(r.kolmogorov_closed_form is not None for r in self.rows)
        if closed:
            header.append("kolmogorov_closed_form")
        rows = []
        for r in self.rows:
            line = [r.n, r.kolmogorov, *r.moment_err, *r.scaled_moment]
            if closed:
                line.append(r.kolmogorov_closed_form)
            rows.append(line)
        return header, rows


def _report(spec, law, dists, schedule, c, closed_form=None) -> ConvergenceReport:
    c = tuple(float(x) for x in np.asarray(c, dtype=float).ravel())
    ref = limit_cdf(law, c)
    lim = tuple(limit_moment(law, r, c) for r in MOMENT_ORDERS)
    rows = []
    for n in schedule:
        emp = empirical_cdf(dists[n], n, c)
        scaled = tuple(emp.moment(r) for r in MOMENT_ORDERS)
        rows.append(ReportRow(
            n=int(n),
            kolmogorov=kolmogorov_distance(emp, ref),
            moment_err=tuple(abs(s - m) for s, m in zip(scaled, lim)),
            scaled_moment=scaled,
            kolmogorov_closed_form=None if closed_form is None else kolmogorov_distance(emp, closed_form.cdf),
        ))
    return ConvergenceReport(spec.label, law.grid_size, c, tuple(rows), lim, law.n_dropped)


def _distributions(spec, initial, schedule, method, threads):
    def run(n):
        return evolve_distribution(initial, spec, n, method=method)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, schedule))
    else:
        results = [run(n) for n in schedule]
    return dict(zip(schedule, results))


def _check_schedule(schedule: Sequence[int]) -> list[int]:
    sched = [int(n) for n in schedule]
    if not sched:
        raise ValidationError("n-schedule is empty")
    if any(n < 0 for n in sched) or sched != sorted(sched):
        raise ValidationError(f"n-schedule must be nonnegative and ascending, got {sched}")
    return sched


def compare_to_limit(spec: WalkSpec, initial: PositionState | MixedState, schedule: Sequence[int],
                     grid: MomentumGrid | int, projection: ArrayLike | None = None, *,
                     closed_form: ClosedFormLaw | None = None, law: LimitLaw | None = None,
                     method: str = "spectral", threads: int = 1) -> ConvergenceReport:
    """Kolmogorov distance and moment errors of ``c . X_n / n`` against the limit law."""
    sched = _check_schedule(schedule)
    if projection is None:
        projection = np.eye(spec.dim)[0]
    if law is None:
        law = omega_measure(spec, initial, grid)
    dists = _distributions(spec, initial, sched, method, threads)
    return _report(spec, law, dists, sched, projection, closed_form)


def cramer_wold_suite(spec: WalkSpec, initial: PositionState | MixedState, n: int | Sequence[int],
                      grid: MomentumGrid | int, projections: Sequence[ArrayLike] | None = None, *,
                      method: str = "spectral", threads: int = 1) -> list[ConvergenceReport]:
    """One report per projection; the walk is evolved once per ``n``."""
    sched = _check_schedule([n] if np.isscalar(n) else n)
    if spec.dim != 2:
        raise ValidationError(f"the default projection suite is for 2-d walks, got d={spec.dim}")
    projections = DEFAULT_PROJECTIONS_2D if projections is None else projections
    law = omega_measure(spec, initial, grid)
    dists = _distributions(spec, initial, sched, method, threads)
    return [_report(spec, law, dists, sched, c) for c in projections]
