"""Run configuration: flat ``key = value`` files plus flag overrides."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .dynamics import MODES, TRAIN_ON
from .targets import TARGET_NAMES

OUTPUT_ROOT_ENV = "MFFLOW_OUTPUT_ROOT"


class ConfigError(ValueError):
    pass


def default_output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs"))


@dataclass(frozen=True)
class RunConfig:
    d: int
    m: int
    n: int
    N_pop: int
    target: str
    mode: str = "mean_field_nn"
    half_width: float = 1.0
    h: float = 0.05
    T: int = 400
    record_every: int = 4
    seed: int = 0
    train_on: str = "empirical"
    fit_t_lo: float | None = None
    fit_t_hi: float | None = None
    output_dir: str | None = None

    kind = "train"

    def __post_init__(self):
        for key in ("d", "m", "n", "N_pop", "record_every"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be >= 1")
        if self.T < 0:
            raise ConfigError("T must be >= 0")
        if self.target not in TARGET_NAMES:
            raise ConfigError(f"unknown target {self.target!r}; choose from {', '.join(TARGET_NAMES)}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        if self.train_on not in TRAIN_ON:
            raise ConfigError(f"unknown train_on {self.train_on!r}")
        if not self.h > 0:
            raise ConfigError("h must be > 0")
        if not self.half_width > 0:
            raise ConfigError("half_width must be > 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if (self.fit_t_lo is None) != (self.fit_t_hi is None):
            raise ConfigError("fit_t_lo and fit_t_hi must be given together")
        if self.fit_t_lo is not None and not 1 < self.fit_t_lo < self.fit_t_hi:
            raise ConfigError("fit window needs 1 < fit_t_lo < fit_t_hi")

    @property
    def t_end(self) -> float:
        return self.T * self.h

    @property
    def fit_window(self) -> tuple[float, float]:
        if self.fit_t_lo is not None:
            return (self.fit_t_lo, self.fit_t_hi)
        return (self.t_end / 10.0, self.t_end)

    def replace(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def run_id(self) -> str:
        """Content hash of every field that affects the numbers."""
        payload = {k: v for k, v in self.to_dict().items() if k != "output_dir"}
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha1(blob).hexdigest()[:12]


@dataclass(frozen=True)
class OracleConfig:
    alpha: float
    h: float = 1e-4
    T: int = 10_000
    record_every: int = 1000
    tolerance: float = 1e-3
    output_dir: str | None = None

    kind = "oracle"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError("alpha must be > 0")
        if not self.h > 0:
            raise ConfigError("h must be > 0")
        if self.T < 0 or self.record_every < 1:
            raise ConfigError("T must be >= 0 and record_every >= 1")

    def replace(self, **kw) -> "OracleConfig":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def run_id(self) -> str:
        payload = {k: v for k, v in self.to_dict().items() if k != "output_dir"}
        return hashlib.sha1(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:12]


def _field_types(cls) -> dict:
    hints = {"int": int, "float": float, "str": str}
    out = {}
    for f in dataclasses.fields(cls):
        base = str(f.type).split("|")[0].strip()
        out[f.name] = hints[base]
    return out


def coerce(cls, raw: dict) -> dict:
    """Convert string values to the field types of ``cls``; unknown keys are errors."""
    types = _field_types(cls)
    out = {}
    for key, value in raw.items():
        if key not in types:
            raise ConfigError(f"unknown config key {key!r}")
        if value is None or isinstance(value, types[key]):
            out[key] = value
            continue
        try:
            out[key] = types[key](value)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    return out


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def load_config_file(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


def build_config(raw: dict, base=None):
    """Build a RunConfig/OracleConfig from raw values layered over ``base``."""
    kind = raw.pop("kind", None) or (base.kind if base is not None else "train")
    cls = {"train": RunConfig, "oracle": OracleConfig}.get(kind)
    if cls is None:
        raise ConfigError(f"unknown kind {kind!r}")
    if base is not None and base.kind != kind:
        raise ConfigError(f"cannot apply {kind} settings to a {base.kind} preset")
    values = coerce(cls, raw)
    try:
        if base is not None:
            return base.replace(**values)
        return cls(**values)
    except TypeError as exc:
        raise ConfigError(f"incomplete config: {exc}") from None


def format_config(cfg) -> str:
    """Inverse of ``parse_config_text`` for a config object."""
    lines = [f"kind = {cfg.kind}"]
    for key, value in cfg.to_dict().items():
        if value is not None:
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
