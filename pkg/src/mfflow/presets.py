"""Shipped experiment presets, scaled down to run on a laptop in minutes.

Full-scale values were m = 1500 neurons, n = 20000 training samples and
100000 population samples; the figure presets use m = 200, n = 2000 and
20000 population samples, with d capped at 32.  Step size ``h = 0.05`` keeps
the empirical risk monotone on every preset.

Rates are fitted over the final log-decade ``[t_end / 10, t_end]``.  The
``fig1-*`` presets stop at ``t = 12``: just past the end of the fast initial
phase (around ``t ~ 7``) and before finite-width effects dominate.  Barron
rates measured later drift upward with ``d`` at this width (the max/min ratio
of the three fitted exponents grows from about 1.15 at ``t_end = 10`` to about
1.35 at ``t_end = 30``).  ``fig2-norms`` runs to ``t = 40`` to show the norm
traces past the transition; the random-feature and small-sample presets run
to ``t = 20``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import OracleConfig, RunConfig


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    runs: tuple  # ((subname, config), ...); subname "" for single-run presets

    @property
    def configs(self) -> list:
        return [cfg for _, cfg in self.runs]


FIG = dict(m=200, n=2000, N_pop=20_000, h=0.05, T=240, record_every=2, seed=1)
LONG = dict(FIG, T=400, record_every=4)


def _fig1(target: str, d: int) -> RunConfig:
    return RunConfig(d=d, target=target, **FIG)


def _build() -> dict[str, Preset]:
    out: list[Preset] = []
    for d in (8, 16, 32):
        out.append(
            Preset(
                f"fig1-barron-d{d}",
                f"norm-difference (Barron) target, d={d}",
                (("", _fig1("norm-difference", d)),),
            )
        )
    for d in (8, 16, 32):
        out.append(
            Preset(
                f"fig1-nonbarron-d{d}",
                f"max-difference (Lipschitz, non-Barron) target, d={d}",
                (("", _fig1("max-difference", d)),),
            )
        )
    long = dict(FIG, T=800, record_every=8)
    out.append(
        Preset(
            "fig2-norms",
            "path norm / second moment traces to t=40 for both target classes, d=16",
            (
                ("barron", RunConfig(d=16, target="norm-difference", **long)),
                ("nonbarron", RunConfig(d=16, target="max-difference", **long)),
            ),
        )
    )
    rf = dict(LONG, N_pop=10_000)
    for d in (8, 32):
        nn = RunConfig(d=d, target="single-neuron", mode="mean_field_nn", **rf)
        out.append(
            Preset(
                f"rf-vs-nn-d{d}",
                f"single-neuron target, network vs random features, d={d}",
                (("mean_field_nn", nn), ("random_feature", nn.replace(mode="random_feature"))),
            )
        )
    small = dict(LONG, n=400)
    out.append(
        Preset(
            "overfit-smalln",
            "non-Barron target with only n=400 samples; train/population gap vs d",
            (
                ("d8", RunConfig(d=8, target="max-difference", **small)),
                ("d32", RunConfig(d=32, target="max-difference", **small)),
            ),
        )
    )
    for tag, alpha in (("05", 0.5), ("1", 1.0), ("2", 2.0)):
        out.append(
            Preset(
                f"oracle-alpha{tag}",
                f"Euler vs closed form for F(x)=x^-{alpha}, h=1e-4 to t=1",
                (("", OracleConfig(alpha=alpha)),),
            )
        )
    return {p.name: p for p in out}


PRESETS = _build()


def presets() -> list[Preset]:
    return list(PRESETS.values())


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; see `mfflow presets`") from None
