"""Risk functionals, per-particle velocity fields and the radial/angular split.

Every reduction over data samples is done in fixed-size blocks whose partial
results are combined by a fixed pairwise tree, so values do not depend on the
number of BLAS threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import ParticleEnsemble, activation, activation_derivative, preactivations
from .sampling import Dataset

BLOCK = 512
ORIGIN_TOL = 1e-12


def pairwise_reduce(parts: list):
    """Sum a list of equally shaped arrays along a balanced binary tree."""
    if not parts:
        raise ValueError("nothing to reduce")
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def _blocks(n: int):
    return [slice(s, min(s + BLOCK, n)) for s in range(0, n, BLOCK)]


def _check(ens: ParticleEnsemble, data: Dataset) -> None:
    if data.n < 1:
        raise ValueError("empty dataset")
    if data.d != ens.d:
        raise ValueError(f"dimension mismatch: data d={data.d}, ensemble d={ens.d}")


def residuals(ens: ParticleEnsemble, data: Dataset) -> np.ndarray:
    """``f(x_j) - y_j`` for all samples, computed block by block."""
    _check(ens, data)
    out = np.empty(data.n)
    for sl in _blocks(data.n):
        act = activation(ens.activation, preactivations(ens, data.points[sl]))
        out[sl] = act @ ens.a / ens.m - data.labels[sl]
    return out


def _half_mean_square(r: np.ndarray) -> float:
    parts = [np.sum(r[sl] * r[sl]) for sl in _blocks(r.shape[0])]
    return float(pairwise_reduce(parts) / (2.0 * r.shape[0]))


def empirical_risk(ens: ParticleEnsemble, data: Dataset) -> float:
    """``(1/2n) sum_j (f(x_j) - y_j)^2``."""
    return _half_mean_square(residuals(ens, data))


def population_risk_estimate(ens: ParticleEnsemble, eval_set: Dataset) -> float:
    """Empirical risk on the frozen evaluation sample standing in for the population."""
    return empirical_risk(ens, eval_set)


@dataclass(frozen=True)
class GradientField:
    """Per-particle velocities ``G_i = m * grad_{theta_i} R_n``."""

    g_a: np.ndarray
    g_w: np.ndarray
    g_b: np.ndarray

    def as_matrix(self) -> np.ndarray:
        return np.column_stack((self.g_a, self.g_w, self.g_b))

    def sq_norm(self) -> float:
        """Mean over particles of ``|G_i|^2``."""
        return float(np.mean(np.sum(self.as_matrix() ** 2, axis=1)))


def risk_and_gradient(ens: ParticleEnsemble, data: Dataset) -> tuple[float, GradientField]:
    """Empirical risk and velocity field from a single pass over the data."""
    _check(ens, data)
    trainable = ens.trainable_inner
    sq_parts, ga_parts, gw_parts, gb_parts = [], [], [], []
    for sl in _blocks(data.n):
        x = data.points[sl]
        z = preactivations(ens, x)
        act = activation(ens.activation, z)
        r = act @ ens.a / ens.m - data.labels[sl]
        sq_parts.append(np.sum(r * r))
        ga_parts.append(act.T @ r)
        if trainable:
            weighted = activation_derivative(ens.activation, z) * r[:, None]
            gw_parts.append(weighted.T @ x)
            gb_parts.append(weighted.sum(axis=0))
    n = data.n
    risk = float(pairwise_reduce(sq_parts) / (2.0 * n))
    g_a = pairwise_reduce(ga_parts) / n
    if trainable:
        g_w = ens.a[:, None] * pairwise_reduce(gw_parts) / n
        g_b = ens.a * pairwise_reduce(gb_parts) / n
    else:
        g_w = np.zeros_like(ens.w)
        g_b = np.zeros_like(ens.b)
    return risk, GradientField(g_a, g_w, g_b)


def per_particle_gradient(ens: ParticleEnsemble, data: Dataset) -> GradientField:
    """Mean-field velocity ``G_i = (1/n) sum_j r_j grad_theta phi(theta_i, x_j)``.

    ``r_j`` is the residual ``f(x_j) - y_j``; ``G_i`` equals ``m`` times the
    gradient of the empirical risk w.r.t. particle ``i``.  Frozen inner
    coordinates (random feature mode) get zero velocity.
    """
    return risk_and_gradient(ens, data)[1]


@dataclass(frozen=True)
class ForceSplit:
    radial_norm: float
    angular_norm: float
    per_particle_radial: np.ndarray
    at_origin: np.ndarray  # particles whose radial part was not defined


def force_split(ens: ParticleEnsemble, grad: GradientField) -> ForceSplit:
    """Split each velocity into its component along ``theta_i`` and the rest.

    Norms are root-mean-square over particles, so
    ``radial_norm**2 + angular_norm**2 == grad.sq_norm()``.
    """
    theta = ens.theta()
    g = grad.as_matrix()
    norms = np.linalg.norm(theta, axis=1)
    at_origin = norms < ORIGIN_TOL
    safe = np.where(at_origin, 1.0, norms)
    radial = np.where(at_origin, 0.0, np.einsum("ij,ij->i", theta, g) / safe)
    unit = theta / safe[:, None]
    unit[at_origin] = 0.0
    angular = g - radial[:, None] * unit
    return ForceSplit(
        float(np.sqrt(np.mean(radial**2))),
        float(np.sqrt(np.mean(np.sum(angular**2, axis=1)))),
        radial,
        at_origin,
    )
