"""Forward-Euler integration of the particle gradient flow.

Each particle moves with the mean-field velocity ``-G_i`` so that time ``t``
is independent of the width ``m``.  All particles are updated from the same
gradient snapshot.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, fields
from typing import Callable

import numpy as np

from . import analysis
from .ensemble import ParticleEnsemble, path_norm, second_moment
from .risk_grad import GradientField, force_split, population_risk_estimate, risk_and_gradient
from .sampling import Dataset

log = logging.getLogger(__name__)

MODES = ("mean_field_nn", "random_feature")
TRAIN_ON = ("empirical", "population_estimate")


class DivergenceError(RuntimeError):
    def __init__(self, msg: str, records: list | None = None, step: int | None = None):
        super().__init__(msg)
        self.records = records or []
        self.step = step


@dataclass(frozen=True)
class TrainerConfig:
    h: float
    total_steps: int
    record_every: int = 1
    train_on: str = "empirical"
    mode: str = "mean_field_nn"

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step size h must be positive")
        if self.total_steps < 0:
            raise ValueError("total_steps must be >= 0")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.train_on not in TRAIN_ON:
            raise ValueError(f"train_on must be one of {TRAIN_ON}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class TrajectoryRecord:
    t: float
    risk_emp: float
    risk_pop: float
    path_norm: float
    second_moment: float
    gamma: float | None
    radial_norm: float
    angular_norm: float


CSV_COLUMNS = [f.name for f in fields(TrajectoryRecord)]


def format_record(rec: TrajectoryRecord) -> list[str]:
    return ["" if v is None else f"{v:.17g}" for v in (getattr(rec, c) for c in CSV_COLUMNS)]


def write_trajectory(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(format_record(r) for r in records)


def read_trajectory(path) -> list[TrajectoryRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        vals = {k: (None if row[k] == "" else float(row[k])) for k in CSV_COLUMNS}
        out.append(TrajectoryRecord(**vals))
    return out


def apply_step(ens: ParticleEnsemble, grad: GradientField, h: float) -> ParticleEnsemble:
    a = ens.a - h * grad.g_a
    if ens.trainable_inner:
        new = ens.replace(a, ens.w - h * grad.g_w, ens.b - h * grad.g_b)
    else:
        new = ens.replace(a=a)
    if not new.is_finite():
        raise DivergenceError("non-finite parameters after Euler step")
    return new


def euler_step(ens: ParticleEnsemble, data: Dataset, h: float) -> ParticleEnsemble:
    """``theta_i <- theta_i - h G_i`` for every particle simultaneously."""
    if not h > 0:
        raise ValueError("h must be positive")
    _, grad = risk_and_gradient(ens, data)
    return apply_step(ens, grad, h)


@dataclass
class TrainResult:
    records: list[TrajectoryRecord]
    final: ParticleEnsemble


def train(
    ens0: ParticleEnsemble,
    data: Dataset,
    eval_set: Dataset,
    config: TrainerConfig,
    on_record: Callable[[TrajectoryRecord], None] | None = None,
) -> TrainResult:
    """Run ``config.total_steps`` Euler steps, recording every ``record_every``.

    The final step is always recorded.  ``on_record`` sees each record as soon
    as it exists, so a caller can flush partial output before a divergence
    aborts the run.
    """
    if data.d != ens0.d or eval_set.d != ens0.d:
        raise ValueError("dataset and ensemble dimensions differ")
    if (config.mode == "random_feature") == ens0.trainable_inner:
        raise ValueError(f"ensemble trainability does not match mode {config.mode!r}")
    objective = data if config.train_on == "empirical" else eval_set

    records: list[TrajectoryRecord] = []
    ens = ens0
    steps = config.total_steps
    for k in range(steps + 1):
        risk_obj, grad = risk_and_gradient(ens, objective)
        if not (np.isfinite(risk_obj) and np.all(np.isfinite(grad.g_a))):
            raise DivergenceError(f"non-finite risk/gradient at step {k}", records, k)
        if k % config.record_every == 0 or k == steps:
            t = k * config.h
            risk_emp = risk_obj if objective is data else population_risk_estimate(ens, data)
            risk_pop = risk_obj if objective is eval_set else population_risk_estimate(ens, eval_set)
            split = force_split(ens, grad)
            rec = TrajectoryRecord(
                t=t,
                risk_emp=risk_emp,
                risk_pop=risk_pop,
                path_norm=path_norm(ens),
                second_moment=second_moment(ens),
                gamma=analysis.decay_rate(t, risk_pop),
                radial_norm=split.radial_norm,
                angular_norm=split.angular_norm,
            )
            records.append(rec)
            if on_record is not None:
                on_record(rec)
        if k == steps:
            break
        try:
            ens = apply_step(ens, grad, config.h)
        except DivergenceError as exc:
            log.error("divergence at step %d (t=%g)", k, k * config.h)
            raise DivergenceError(str(exc), records, k) from None
    return TrainResult(records, ens)
