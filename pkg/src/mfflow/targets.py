"""Closed-form target functions on the cube ``[-h, h]^d``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TARGET_NAMES = ("norm-difference", "max-difference", "single-neuron")


def offset_vector(d: int) -> np.ndarray:
    """``a_i = 2 i / d - 1`` for ``i = 1..d``."""
    return 2.0 * np.arange(1, d + 1) / d - 1.0


@dataclass(frozen=True)
class TargetFunction:
    name: str
    d: int
    offset: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.name not in TARGET_NAMES:
            raise ValueError(f"unknown target {self.name!r}; expected one of {TARGET_NAMES}")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        object.__setattr__(self, "offset", offset_vector(self.d))

    @property
    def is_barron(self) -> bool:
        return self.name != "max-difference"

    def __call__(self, x):
        return eval_target(self, x)


def eval_target(t: TargetFunction, x):
    """Evaluate the target at a point (returns float) or an (n, d) batch."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != t.d:
        raise ValueError(f"dimension mismatch: point has {x.shape[-1]} coordinates, target has d={t.d}")
    single = x.ndim == 1
    xb = np.atleast_2d(x)
    a = t.offset
    if t.name == "norm-difference":
        y = math.sqrt(1.5) * (np.linalg.norm(xb - a, axis=1) - np.linalg.norm(xb + a, axis=1))
    elif t.name == "max-difference":
        y = math.sqrt(t.d / math.pi) * (np.max(xb - a, axis=1) - np.max(-xb - a, axis=1))
    else:
        y = np.maximum(xb[:, 0], 0.0)
    return float(y[0]) if single else y


@dataclass(frozen=True)
class TargetStats:
    mean: float
    variance: float
    lipschitz_probe: float


def target_stats(t: TargetFunction, n: int, seed: int, half_width: float = 1.0) -> TargetStats:
    """Monte Carlo mean/variance on the cube plus a sampled Lipschitz quotient.

    The Lipschitz probe takes the largest ``|f(x) - f(y)| / |x - y|`` over
    ``n // 2`` disjoint random pairs and over ``n // 2`` pairs of nearby points
    (``y = x + small perturbation``), which is where quotients are largest.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    x = rng.uniform(-half_width, half_width, size=(n, t.d))
    y = eval_target(t, x)
    mean = float(np.mean(y))
    variance = float(np.var(y, ddof=1))

    half = n // 2
    p, q = x[:half], x[half : 2 * half]
    quot = np.abs(y[:half] - y[half : 2 * half]) / np.linalg.norm(p - q, axis=1)
    step = rng.normal(size=(half, t.d))
    step *= 1e-4 * half_width / np.linalg.norm(step, axis=1, keepdims=True)
    near = np.abs(eval_target(t, p + step) - y[:half]) / np.linalg.norm(step, axis=1)
    lip = float(max(np.max(quot), np.max(near)))
    return TargetStats(mean, variance, lip)
