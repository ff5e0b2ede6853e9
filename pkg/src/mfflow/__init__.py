"""Mean-field gradient-flow training of two-layer ReLU networks."""

__version__ = "0.1.0"

from .ensemble import (  # noqa: E402
    RELU,
    ActivationKind,
    Particle,
    ParticleEnsemble,
    activation,
    activation_derivative,
    eval_network,
    feature,
    moment_bound_constant,
    path_norm,
    second_moment,
)
from .risk_grad import (  # noqa: E402
    empirical_risk,
    force_split,
    per_particle_gradient,
    population_risk_estimate,
)
from .sampling import Dataset, RngSpec, init_ensemble, make_dataset, sample_uniform_cube  # noqa: E402
from .targets import TargetFunction, eval_target, target_stats  # noqa: E402
