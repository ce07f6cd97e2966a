"""Flat key-value experiment configuration.

Grammar, one setting per line::

    # comment
    key = value

Keys are the fields of :class:`ExperimentConfig`.  ``lambda_spec`` has
the form ``name:arg,arg,...`` with name one of ``lacunary`` (count,
ratio[, offset]), ``cantor`` (level, ratio[, lo, hi]) and ``grid``
(count, origin_gap).
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .lambda_sets import (
    LambdaSet,
    make_arithmetic_grid,
    make_cantor,
    make_lacunary,
)

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "build_lambda_set"]


class ConfigError(ValueError):
    """Invalid or unknown configuration field."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    alpha: float = 0.5
    seed: int = 0
    window_exponent: int = 8
    m_max_exponent: int = 10
    lambda_spec: str = "lacunary:8,0.5"
    grid_exponent: int = 14
    trials: int = 20
    r: float = 1.5
    output_path: str = "result.csv"

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"invalid field 'alpha': {self.alpha} not in (0, 1)")
        for name in ("window_exponent", "m_max_exponent", "grid_exponent"):
            v = getattr(self, name)
            if not 1 <= v <= 20:
                raise ConfigError(f"invalid field '{name}': {v} not in 1..20")
        if not 1.0 <= self.r < 2.0:
            raise ConfigError(f"invalid field 'r': {self.r} not in [1, 2)")
        if self.trials < 1:
            raise ConfigError(f"invalid field 'trials': {self.trials} < 1")
        if self.seed < 0:
            raise ConfigError(f"invalid field 'seed': must be nonnegative")


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"invalid field '{name}': {raw!r}") from exc


def parse_config(text: str, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Parse the flat key-value format, then apply overrides."""
    values: dict[str, object] = {}
    for lineno, ln in enumerate(text.splitlines(), 1):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if "=" not in ln:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {ln!r}")
        key, raw = (tok.strip() for tok in ln.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown field '{key}'")
        values[key] = _coerce(key, raw)
    for key, raw in (overrides or {}).items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown field '{key}'")
        values[key] = _coerce(key, raw)
    if "experiment" not in values:
        raise ConfigError("missing required field 'experiment'")
    return ExperimentConfig(**values)


def build_lambda_set(spec: str) -> LambdaSet:
    """Construct the frequency set named by a lambda_spec string."""
    try:
        name, _, argstr = spec.partition(":")
        args = [float(a) for a in argstr.split(",")] if argstr else []
        if name == "lacunary":
            count, ratio, *rest = args
            return make_lacunary(int(count), ratio, rest[0] if rest else 0.0)
        if name == "cantor":
            level, ratio, *rest = args
            base = (rest[0], rest[1]) if len(rest) == 2 else (0.0, 0.5)
            return make_cantor(int(level), ratio, base)
        if name == "grid":
            count, gap = args
            return make_arithmetic_grid(int(count), gap)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid field 'lambda_spec': {spec!r}") from exc
    raise ConfigError(f"invalid field 'lambda_spec': unknown constructor {name!r}")
