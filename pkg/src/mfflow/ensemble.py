"""Particle representation of the parameter measure of a two-layer network.

An ensemble of ``m`` particles ``theta_i = (a_i, w_i, b_i)`` stands for the
empirical measure ``(1/m) sum_i delta_{theta_i}``.  The network it induces is
the mean-field average

    f(x) = (1/m) sum_i a_i * sigma(w_i . x + b_i)

Particles are stored column-wise (``a``: (m,), ``w``: (m, d), ``b``: (m,)) so
that every functional is a vectorized reduction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ActivationKind:
    """ReLU, or the smooth surrogate ``(z + sqrt(z^2 + eps^2)) / 2``.

    The smoothed variant exists for finite-difference gradient checks only.
    """

    tag: str = "relu"
    eps: float = 0.0

    def __post_init__(self):
        if self.tag not in ("relu", "smoothed_relu"):
            raise ValueError(f"unknown activation tag {self.tag!r}")
        if self.tag == "smoothed_relu" and not self.eps > 0:
            raise ValueError("SmoothedReLU needs eps > 0")

    @classmethod
    def relu(cls) -> "ActivationKind":
        return cls("relu")

    @classmethod
    def smoothed(cls, eps: float) -> "ActivationKind":
        return cls("smoothed_relu", float(eps))


RELU = ActivationKind.relu()


def activation(kind: ActivationKind, z):
    z = np.asarray(z, dtype=float)
    if kind.tag == "relu":
        return np.maximum(z, 0.0)
    return 0.5 * (z + np.sqrt(z * z + kind.eps**2))


def activation_derivative(kind: ActivationKind, z):
    """Derivative of the activation; for ReLU the value at 0 is taken to be 0."""
    z = np.asarray(z, dtype=float)
    if kind.tag == "relu":
        return (z > 0).astype(float)
    return 0.5 * (1.0 + z / np.sqrt(z * z + kind.eps**2))


@dataclass(frozen=True)
class Particle:
    a: float
    w: np.ndarray
    b: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).reshape(-1)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not (math.isfinite(self.a) and math.isfinite(self.b) and np.all(np.isfinite(w))):
            raise ValueError("particle entries must be finite")

    @property
    def d(self) -> int:
        return self.w.shape[0]

    def as_vector(self) -> np.ndarray:
        return np.concatenate(([self.a], self.w, [self.b]))

    @classmethod
    def from_vector(cls, theta) -> "Particle":
        theta = np.asarray(theta, dtype=float)
        return cls(theta[0], theta[1:-1], theta[-1])

    def scaled(self, lam: float) -> "Particle":
        return Particle(lam * self.a, lam * self.w, lam * self.b)


@dataclass(frozen=True)
class ParticleEnsemble:
    a: np.ndarray
    w: np.ndarray
    b: np.ndarray
    activation: ActivationKind = field(default=RELU)
    trainable_inner: bool = True

    def __post_init__(self):
        a = np.ascontiguousarray(self.a, dtype=float).reshape(-1)
        w = np.ascontiguousarray(self.w, dtype=float)
        b = np.ascontiguousarray(self.b, dtype=float).reshape(-1)
        if w.ndim != 2:
            raise ValueError("w must be an (m, d) array")
        m = a.shape[0]
        if m < 1:
            raise ValueError("ensemble needs at least one particle")
        if w.shape[0] != m or b.shape[0] != m:
            raise ValueError(f"inconsistent particle counts: a={m}, w={w.shape[0]}, b={b.shape[0]}")
        for arr in (a, w, b):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def d(self) -> int:
        return self.w.shape[1]

    @classmethod
    def from_particles(
        cls,
        particles: Sequence[Particle],
        activation: ActivationKind = RELU,
        trainable_inner: bool = True,
    ) -> "ParticleEnsemble":
        if not particles:
            raise ValueError("ensemble needs at least one particle")
        d = particles[0].d
        if any(p.d != d for p in particles):
            raise ValueError("all particles must share the input dimension")
        return cls(
            np.array([p.a for p in particles]),
            np.stack([p.w for p in particles]),
            np.array([p.b for p in particles]),
            activation,
            trainable_inner,
        )

    @property
    def particles(self) -> list[Particle]:
        return [Particle(self.a[i], self.w[i], self.b[i]) for i in range(self.m)]

    def theta(self) -> np.ndarray:
        """All particles as rows ``(a, w_1..w_d, b)`` of an (m, d+2) array."""
        return np.column_stack((self.a, self.w, self.b))

    def with_theta(self, theta: np.ndarray) -> "ParticleEnsemble":
        return ParticleEnsemble(
            theta[:, 0], theta[:, 1:-1], theta[:, -1], self.activation, self.trainable_inner
        )

    def replace(self, a=None, w=None, b=None) -> "ParticleEnsemble":
        return ParticleEnsemble(
            self.a if a is None else a,
            self.w if w is None else w,
            self.b if b is None else b,
            self.activation,
            self.trainable_inner,
        )

    def duplicated(self, k: int) -> "ParticleEnsemble":
        """Every particle repeated ``k`` times; represents the same measure."""
        return self.replace(np.repeat(self.a, k), np.repeat(self.w, k, axis=0), np.repeat(self.b, k))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.w)) and np.all(np.isfinite(self.b)))


def _check_point(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != d:
        raise ValueError(f"dimension mismatch: point has {x.shape[-1]} coordinates, expected {d}")
    return x


def feature(particle: Particle, x, kind: ActivationKind = RELU):
    """``a * sigma(w . x + b)`` for one particle; ``x`` may be a point or a batch."""
    x = _check_point(x, particle.d)
    return particle.a * activation(kind, x @ particle.w + particle.b)


def feature_gradient(particle: Particle, x, kind: ActivationKind = RELU) -> np.ndarray:
    """Gradient of ``feature`` w.r.t. ``(a, w, b)`` at a single point ``x``."""
    x = _check_point(x, particle.d)
    z = float(x @ particle.w + particle.b)
    s = float(activation(kind, z))
    ds = float(activation_derivative(kind, z))
    return np.concatenate(([s], particle.a * ds * x, [particle.a * ds]))


def preactivations(ens: ParticleEnsemble, x: np.ndarray) -> np.ndarray:
    """(n, m) matrix of ``w_i . x_j + b_i``."""
    return x @ ens.w.T + ens.b


def eval_network(ens: ParticleEnsemble, x):
    """Mean-field network output at a point (scalar) or a batch of points (n,)."""
    x = _check_point(x, ens.d)
    single = x.ndim == 1
    xb = np.atleast_2d(x)
    out = activation(ens.activation, preactivations(ens, xb)) @ ens.a / ens.m
    return float(out[0]) if single else out


def second_moment(ens: ParticleEnsemble) -> float:
    sq = ens.a**2 + np.einsum("ij,ij->i", ens.w, ens.w) + ens.b**2
    return float(np.mean(sq))


def path_norm(ens: ParticleEnsemble) -> float:
    """Path norm of this particular representation.

    This is an upper bound for the Barron norm of the represented function,
    which is an infimum over all representing measures.
    """
    return float(np.mean(np.abs(ens.a) * (np.abs(ens.w).sum(axis=1) + np.abs(ens.b))))


def moment_bound_constant(d: int) -> float:
    """Constant ``c_d`` with ``path_norm <= c_d * second_moment``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return 6.0 + 4.0 * math.sqrt(d)


def _header(d: int) -> list[str]:
    return ["a", *[f"w_{k}" for k in range(1, d + 1)], "b"]


def write_snapshot(ens: ParticleEnsemble, path: str | Path) -> None:
    """Write ``a,w_1..w_d,b`` rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_header(ens.d))
        for row in ens.theta():
            writer.writerow([f"{v:.17g}" for v in row])


def read_snapshot(
    path: str | Path, activation: ActivationKind = RELU, trainable_inner: bool = True
) -> ParticleEnsemble:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    d = len(header) - 2
    if header != _header(d):
        raise ValueError(f"unexpected snapshot header in {path}")
    theta = np.array(rows, dtype=float).reshape(-1, d + 2)
    return ParticleEnsemble(theta[:, 0], theta[:, 1:-1], theta[:, -1], activation, trainable_inner)

