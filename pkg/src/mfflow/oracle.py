"""Scalar gradient flow of ``F(x) = x**-alpha`` with a closed-form solution.

Starting from ``x(0) = 1`` the flow ``x' = -F'(x) = alpha x**-(alpha+1)`` is
solved by ``x(t) = (1 + alpha (alpha + 2) t) ** (1 / (alpha + 2))``, so the
energy decays like ``t ** (-alpha / (alpha + 2))``.  Used to check the Euler
stepping discipline and the rate-fitting pipeline.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScalarFlow:
    alpha: float
    x0: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.x0 > 0:
            raise ValueError("x0 must be positive")

    def energy(self, x):
        return np.asarray(x, dtype=float) ** -self.alpha

    def velocity(self, x):
        return self.alpha * np.asarray(x, dtype=float) ** -(self.alpha + 1)

    @property
    def rate(self) -> float:
        return self.alpha / (self.alpha + 2)


def closed_form(flow: ScalarFlow, t) -> tuple:
    if flow.x0 != 1.0:
        raise ValueError("closed form only available for x0 = 1")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    a = flow.alpha
    x = (1.0 + a * (a + 2.0) * t) ** (1.0 / (a + 2.0))
    if x.ndim == 0:
        return float(x), float(x**-a)
    return x, x**-a


@dataclass(frozen=True)
class ScalarPoint:
    t: float
    x: float
    energy: float


def integrate_scalar(flow: ScalarFlow, h: float, steps: int, record_every: int | None = None) -> list[ScalarPoint]:
    """Forward Euler ``x <- x + h * alpha * x**-(alpha+1)``, all steps from one snapshot."""
    if not h > 0:
        raise ValueError("h must be positive")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    every = record_every or max(steps, 1)
    x = flow.x0
    out = [ScalarPoint(0.0, x, float(flow.energy(x)))]
    for k in range(1, steps + 1):
        x = x + h * float(flow.velocity(x))
        if not x > 0:
            raise FloatingPointError(f"iterate left the domain at step {k}")
        if k % every == 0 or k == steps:
            out.append(ScalarPoint(k * h, x, float(flow.energy(x))))
    return out


def terminal_error(flow: ScalarFlow, h: float, steps: int) -> float:
    last = integrate_scalar(flow, h, steps)[-1]
    return abs(last.x - closed_form(flow, steps * h)[0])


def richardson_ratio(flow: ScalarFlow, h: float, t_end: float) -> float:
    """Terminal error at step ``h`` over the error at ``h / 2``; ~2 for a first-order method."""
    steps = int(round(t_end / h))
    return terminal_error(flow, h, steps) / terminal_error(flow, h / 2, 2 * steps)


@dataclass(frozen=True)
class EnergyRecord:
    """Adapter so closed-form traces can be fed to ``fit_power_law``."""

    t: float
    risk_pop: float


def closed_form_trace(flow: ScalarFlow, t_lo: float, t_hi: float, num: int = 200) -> list[EnergyRecord]:
    ts = np.geomspace(t_lo, t_hi, num)
    _, e = closed_form(flow, ts)
    return [EnergyRecord(float(t), float(v)) for t, v in zip(ts, e)]


def comparison_table(flow: ScalarFlow, h: float, steps: int, record_every: int | None = None) -> str:
    """CSV text ``t,x_euler,x_exact,energy_euler,energy_exact,abs_error``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "x_euler", "x_exact", "energy_euler", "energy_exact", "abs_error"])
    for p in integrate_scalar(flow, h, steps, record_every):
        x_ex, e_ex = closed_form(flow, p.t)
        writer.writerow([f"{v:.17g}" for v in (p.t, p.x, x_ex, p.energy, e_ex, abs(p.x - x_ex))])
    return buf.getvalue()
