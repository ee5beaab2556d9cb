"""Flat key-value experiment configuration.

Config files hold one ``key = value`` pair per line; ``#`` starts a
comment.  Lists are comma-separated.  ``schema_version = 1`` is required.
See README for the per-experiment key schema.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace

import numpy as np

__all__ = ["ConfigError", "ExperimentConfig", "parse_config_file", "parse_config_text"]

SCHEMA_VERSION = 1

EXPERIMENT_KINDS = (
    "histogram",
    "sweep",
    "estimate-noise",
    "multiclass",
    "real-data",
    "theory",
)

KNOWN_VARIANTS = ("naive", "unbiased", "optimized", "oracle", "custom")

SWEEP_PARAMS = ("eps_plus", "rho_plus", "gamma")


class ConfigError(Exception):
    """Raised for malformed or inconsistent configuration input."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved configuration for one experiment run."""

    experiment: str
    schema_version: int = SCHEMA_VERSION
    # data model
    n: int = 1000
    p: int = 200
    pi1: float = 1 / 3
    snr: float = 2.0
    eps_plus: float = 0.0
    eps_minus: float = 0.0
    gamma: float | str = 1.0  # positive float or "optimal"
    # variants and sweeps
    variants: tuple[str, ...] = ("naive", "unbiased", "optimized", "oracle")
    custom_rho_plus: float = 0.0
    custom_rho_minus: float = 0.0
    sweep_param: str = "eps_plus"
    grid: tuple[float, ...] = ()
    # replicates / outputs
    seeds: tuple[int, ...] = (0,)
    n_test: int = 10_000
    bins: int = 60
    out: str = ""
    threads: int = 1
    # noise estimation
    probe1_rho_plus: float = 0.0
    probe1_rho_minus: float = 0.1
    probe2_rho_plus: float = 0.0
    probe2_rho_minus: float = 0.4
    # real data
    data_path: str = ""
    label_column: str = "0"
    has_header: bool = False
    n_train: int = 1600
    # multiclass
    k: int = 3
    means: tuple[float, ...] = (-2.0, 0.0, 2.0)
    eps_rows: tuple[tuple[float, ...], ...] = ()
    pis: tuple[float, ...] = ()
    grid_size: int = 5000
    box_low: float = -2.0
    box_high: float = 2.0
    tau_points: int = 11
    search_seed: int = 0

    def __post_init__(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(
                f"unsupported schema_version {self.schema_version}; expected {SCHEMA_VERSION}"
            )
        if self.experiment not in EXPERIMENT_KINDS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENT_KINDS}"
            )
        if not self.seeds:
            raise ConfigError("seeds must be nonempty")
        if not self.variants:
            raise ConfigError("variants must be nonempty")
        for v in self.variants:
            if v not in KNOWN_VARIANTS:
                raise ConfigError(f"unknown variant {v!r}; expected one of {KNOWN_VARIANTS}")
        if self.sweep_param not in SWEEP_PARAMS:
            raise ConfigError(
                f"unknown sweep_param {self.sweep_param!r}; expected one of {SWEEP_PARAMS}"
            )
        if self.grid:
            diffs = np.diff(np.asarray(self.grid))
            if np.any(diffs <= 0):
                raise ConfigError("grid values must be strictly increasing")
        elif self.experiment == "sweep" or (
            self.experiment == "estimate-noise" and not self.data_path
        ):
            raise ConfigError(f"experiment {self.experiment!r} needs a nonempty grid")
        if isinstance(self.gamma, str):
            if self.gamma != "optimal":
                raise ConfigError(f"gamma must be a positive number or 'optimal', got {self.gamma!r}")
        elif self.gamma <= 0:
            raise ConfigError(f"gamma must be > 0, got {self.gamma}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.experiment == "multiclass":
            if len(self.means) != self.k:
                raise ConfigError(f"means needs k={self.k} entries, got {len(self.means)}")
            if self.eps_rows and len(self.eps_rows) != self.k:
                raise ConfigError(f"eps matrix needs k={self.k} rows")
            if self.pis and len(self.pis) != self.k:
                raise ConfigError(f"pis needs k={self.k} entries")

    def resolved_out(self) -> str:
        return self.out or f"runs/{self.experiment}"

    def config_hash(self) -> str:
        """Hash of the semantically meaningful fields (output location and
        worker count excluded)."""
        skip = {"out", "threads"}
        parts = [
            f"{f.name}={getattr(self, f.name)!r}"
            for f in fields(self)
            if f.name not in skip
        ]
        return hashlib.sha256("\n".join(parts).encode()).hexdigest()[:16]

    def echo_lines(self) -> list[str]:
        lines = [f"config_hash = {self.config_hash()}"]
        for f in sorted(fields(self), key=lambda f: f.name):
            lines.append(f"{f.name} = {_echo_value(getattr(self, f.name))}")
        return lines


def _echo_value(v) -> str:
    if isinstance(v, tuple):
        if v and isinstance(v[0], tuple):
            return ";".join(",".join(repr(x) for x in row) for row in v)
        return ",".join(repr(x) for x in v)
    return repr(v) if isinstance(v, float) else str(v)


_INT_KEYS = {
    "schema_version", "n", "p", "n_test", "bins", "threads", "n_train",
    "k", "grid_size", "tau_points", "search_seed",
}
_FLOAT_KEYS = {
    "pi1", "snr", "eps_plus", "eps_minus", "custom_rho_plus", "custom_rho_minus",
    "probe1_rho_plus", "probe1_rho_minus", "probe2_rho_plus", "probe2_rho_minus",
    "box_low", "box_high",
}
_STR_KEYS = {"experiment", "sweep_param", "out", "data_path", "label_column"}
_BOOL_KEYS = {"has_header"}
_FLOAT_LIST_KEYS = {"grid", "means", "pis"}
_INT_LIST_KEYS = {"seeds"}
_STR_LIST_KEYS = {"variants"}


def parse_config_text(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse flat ``key = value`` text into an :class:`ExperimentConfig`."""
    raw: dict[str, str] = {}
    eps_rows: dict[int, tuple[float, ...]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("eps_row_"):
            try:
                idx = int(key.removeprefix("eps_row_"))
                eps_rows[idx] = tuple(float(v) for v in value.split(","))
            except ValueError:
                raise ConfigError(f"line {lineno}: bad eps row {line!r}") from None
            continue
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        raw[key] = value

    kwargs: dict = {}
    for key, value in raw.items():
        try:
            kwargs[key] = _coerce(key, value)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: {exc}") from None
    if eps_rows:
        expected = sorted(eps_rows)
        if expected != list(range(1, len(expected) + 1)):
            raise ConfigError(f"eps rows must be numbered 1..k, got {expected}")
        kwargs["eps_rows"] = tuple(eps_rows[i] for i in expected)
    if "experiment" not in kwargs:
        raise ConfigError("missing required key 'experiment'")
    if "schema_version" not in kwargs:
        raise ConfigError("missing required key 'schema_version'")
    try:
        cfg = ExperimentConfig(**kwargs)
        if overrides:
            cfg = replace(cfg, **overrides)
    except TypeError as exc:
        raise ConfigError(f"unknown config key: {exc}") from None
    return cfg


def _coerce(key: str, value: str):
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _STR_KEYS:
        return value
    if key in _BOOL_KEYS:
        if value.lower() in ("true", "1", "yes"):
            return True
        if value.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"expected a boolean, got {value!r}")
    if key in _FLOAT_LIST_KEYS:
        return tuple(float(v) for v in value.split(","))
    if key in _INT_LIST_KEYS:
        return tuple(int(v) for v in value.split(","))
    if key in _STR_LIST_KEYS:
        return tuple(v.strip() for v in value.split(","))
    # key == "gamma", the only remaining member of _ALL_KEYS
    return value if value == "optimal" else float(value)


_ALL_KEYS = (
    _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _BOOL_KEYS
    | _FLOAT_LIST_KEYS | _INT_LIST_KEYS | _STR_LIST_KEYS | {"gamma"}
)


def parse_config_file(path, overrides: dict | None = None) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, overrides)
