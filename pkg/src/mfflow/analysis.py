"""Decay-rate diagnostics and audits over recorded trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MIN_FIT_POINTS = 5


def decay_rate(t: float, risk: float) -> float | None:
    """``gamma(t) = -ln R / ln t``, so that ``R = t ** -gamma``.

    Returns None where undefined (``t <= 1`` or ``risk <= 0``).
    """
    if not (t > 1 and risk > 0):
        return None
    return -math.log(risk) / math.log(t)


def _column(records, name: str) -> np.ndarray:
    return np.array([getattr(r, name) for r in records], dtype=float)


def fit_power_law(
    records: Sequence,
    window: tuple[float, float],
    column: str = "risk_pop",
) -> float:
    """Least-squares slope of ``-ln R`` against ``ln t`` over ``t_lo <= t <= t_hi``."""
    t_lo, t_hi = window
    if not t_lo > 0:
        raise ValueError("window must start at t > 0")
    t = _column(records, "t")
    risk = _column(records, column)
    sel = (t >= t_lo) & (t <= t_hi)
    if sel.sum() < MIN_FIT_POINTS:
        raise ValueError(f"need >= {MIN_FIT_POINTS} records in window {window}, found {int(sel.sum())}")
    if np.any(risk[sel] <= 0):
        raise ValueError("risks must be positive inside the fit window")
    slope, _ = np.polyfit(np.log(t[sel]), -np.log(risk[sel]), 1)
    return float(slope)


@dataclass(frozen=True)
class RateReport:
    gamma_at: list[tuple[float, float]]
    fitted_exponent: float
    window: tuple[float, float]


def rate_report(records: Sequence, window: tuple[float, float], column: str = "risk_pop") -> RateReport:
    if not window[0] > 1:
        raise ValueError("rate windows must start after t = 1")
    gammas = []
    for r in records:
        g = decay_rate(r.t, getattr(r, column))
        if g is not None:
            gammas.append((r.t, g))
    return RateReport(gammas, fit_power_law(records, window, column), tuple(window))


def late_window(t_end: float) -> tuple[float, float]:
    """Final decade of the run in log-time, ``[t_end / 10, t_end]``."""
    return (t_end / 10.0, t_end)


@dataclass(frozen=True)
class AuditInterval:
    t1: float
    t2: float
    lhs: float
    rhs: float
    passed: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def moment_audit(records: Sequence, h: float, column: str = "risk_emp") -> list[AuditInterval]:
    """Check ``sqrt N(t2) - sqrt N(t1) <= sqrt((t2 - t1) (R(t1) - R(t2))) + 10 h``.

    ``column`` names the risk actually being minimized.  A risk increase
    counts as zero dissipation.  Failures are reported, never raised.
    """
    out = []
    for r1, r2 in zip(records, records[1:]):
        if r2.t < r1.t:
            raise ValueError("records must be sorted by t")
        lhs = math.sqrt(r2.second_moment) - math.sqrt(r1.second_moment)
        drop = max(getattr(r1, column) - getattr(r2, column), 0.0)
        rhs = math.sqrt((r2.t - r1.t) * drop) + 10.0 * h
        out.append(AuditInterval(r1.t, r2.t, lhs, rhs, lhs <= rhs))
    return out


@dataclass(frozen=True)
class SublinearTrend:
    ratios: list[tuple[float, float]]
    tail_slope: float

    @property
    def tail_nonincreasing(self) -> bool:
        return self.tail_slope <= 0


def sublinear_check(records: Sequence) -> SublinearTrend:
    """``N(t)/t`` at checkpoints with ``t > 1`` and the slope over its last quarter.

    Only a trend indicator: ``N(t)/t -> 0`` cannot be decided from a finite run.
    """
    pts = [(r.t, r.second_moment / r.t) for r in records if r.t > 1]
    if len(pts) < 2:
        raise ValueError("need at least two records with t > 1")
    tail = pts[-max(2, len(pts) // 4) :]
    tt = np.array([p[0] for p in tail])
    vv = np.array([p[1] for p in tail])
    slope = float(np.polyfit(tt, vv, 1)[0])
    return SublinearTrend(pts, slope)


def relative_change(records: Sequence, column: str, start_fraction: float = 0.5) -> float:
    """``|v(end) - v(start)| / |v(start)|`` where start is the first record at
    ``t >= start_fraction * t_end``."""
    t_end = records[-1].t
    first = next(r for r in records if r.t >= start_fraction * t_end)
    v0 = getattr(first, column)
    return abs(getattr(records[-1], column) - v0) / abs(v0)


def is_nonincreasing(records: Sequence, column: str = "risk_emp") -> bool:
    v = _column(records, column)
    return bool(np.all(np.diff(v) <= 0))
