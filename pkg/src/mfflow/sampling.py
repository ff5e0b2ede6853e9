"""Seeded data sampling and parameter initialization.

All randomness comes from numpy's PCG64 bit generator.  A run seed is expanded
with ``SeedSequence(seed).spawn(3)`` into three independent sub-streams, used
for the training set, the initialization and the population evaluation set
respectively, so each can be regenerated on its own.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ensemble import RELU, ActivationKind, ParticleEnsemble
from .targets import TargetFunction, eval_target

ALGORITHM_ID = "numpy.PCG64+SeedSequence.spawn"
STREAMS = ("dataset", "init", "population")


@dataclass(frozen=True)
class RngSpec:
    seed: int
    stream: str | None = None
    algorithm_id: str = ALGORITHM_ID

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.stream is not None and self.stream not in STREAMS:
            raise ValueError(f"unknown stream {self.stream!r}")

    def substream(self, name: str) -> "RngSpec":
        return RngSpec(self.seed, name)

    def seed_sequence(self) -> np.random.SeedSequence:
        root = np.random.SeedSequence(self.seed)
        if self.stream is None:
            return root
        return root.spawn(len(STREAMS))[STREAMS.index(self.stream)]

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))

    def describe(self) -> dict:
        ss = self.seed_sequence()
        return {
            "seed": self.seed,
            "stream": self.stream,
            "algorithm": self.algorithm_id,
            "spawn_key": list(ss.spawn_key),
        }


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    labels: np.ndarray
    seed: int
    half_width: float

    def __post_init__(self):
        if self.points.ndim != 2 or self.labels.shape != (self.points.shape[0],):
            raise ValueError("points must be (n, d) and labels (n,)")
        self.points.setflags(write=False)
        self.labels.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([*[f"x_{k}" for k in range(1, self.d + 1)], "y"])
            for x, y in zip(self.points, self.labels):
                writer.writerow([*(f"{v:.17g}" for v in x), f"{y:.17g}"])


def sample_uniform_cube(n: int, d: int, half_width: float, rng: RngSpec) -> np.ndarray:
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    if not half_width > 0:
        raise ValueError("half_width must be positive")
    return rng.generator().uniform(-half_width, half_width, size=(n, d))


def make_dataset(target: TargetFunction, n: int, half_width: float, rng: RngSpec) -> Dataset:
    points = sample_uniform_cube(n, target.d, half_width, rng)
    return Dataset(points, eval_target(target, points), rng.seed, float(half_width))


def init_ensemble(
    m: int,
    d: int,
    rng: RngSpec,
    activation: ActivationKind = RELU,
    trainable_inner: bool = True,
) -> ParticleEnsemble:
    """a ~ N(0, 1), w ~ N(0, 2/(d+1) I), b = 1/(2(d+1))."""
    if m < 1 or d < 1:
        raise ValueError("m and d must be positive")
    gen = rng.generator()
    a = gen.standard_normal(m)
    w = gen.standard_normal((m, d)) * np.sqrt(2.0 / (d + 1))
    b = np.full(m, 1.0 / (2.0 * (d + 1)))
    return ParticleEnsemble(a, w, b, activation, trainable_inner)
