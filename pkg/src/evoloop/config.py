"""Run configuration: every tunable of the loop, with documented defaults.

The on-disk format is flat ``key = value`` text with dotted section
prefixes (``sampling.ucb_c = 1.414``). Unknown keys are an error, not a
warning: a silent typo would quietly corrupt an ablation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

from evoloop.errors import ConfigError, ValidationError

SAMPLING_ALGORITHMS = ("ucb1", "random", "greedy", "map_elites_island")
GENERATION_MODES = ("full", "diff")


@dataclass(frozen=True)
class SamplingConfig:
    algorithm: str = "map_elites_island"
    ucb_c: float = 1.414
    islands: int = 5
    migration_interval: int = 10
    migration_rate: float = 0.1
    exploration_ratio: float = 0.2
    exploitation_ratio: float = 0.6
    feature_dims: tuple[str, ...] = ("complexity", "diversity")
    bins_per_feature: int = 10
    # optional overlay: restrict parent selection to the top-N nodes by
    # score (0 disables the filter)
    candidate_pool: int = 0


@dataclass(frozen=True)
class CognitionConfig:
    top_k: int = 5
    threshold: float = 0.4
    dim: int = 384


@dataclass(frozen=True)
class RunConfig:
    task_description: str = ""
    max_db_size: int = 70
    sample_n: int = 3
    workers: int = 4
    engineer_timeout_s: int = 300
    engineer_retries: int = 2
    researcher_retries: int = 3
    max_code_length: int = 100000
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    cognition: CognitionConfig = field(default_factory=CognitionConfig)
    judge_enabled: bool = False
    judge_weight: float = 0.0
    generation_mode: str = "full"
    seed: int = 0
    decoding: dict[str, Any] = field(
        default_factory=lambda: {"temperature": 0.7, "top_p": 0.95, "max_tokens": 32768}
    )
    quick_test: bool = False
    analyzer_log_cap: int = 20000
    template_dir: str = ""
    max_failure_streak: int = 0


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_str_tuple(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def _parse_scalar(raw: str) -> Any:
    # Decoding parameters pass through untyped: ints, then floats, then text.
    for caster in (int, float):
        try:
            return caster(raw)
        except ValueError:
            continue
    try:
        return _parse_bool(raw)
    except ValueError:
        return raw


# key -> (target, field name, parser). target "" is RunConfig itself.
_KEYS: dict[str, tuple[str, str, Callable[[str], Any]]] = {
    "task_description": ("", "task_description", str),
    "max_db_size": ("", "max_db_size", int),
    "sample_n": ("", "sample_n", int),
    "workers": ("", "workers", int),
    "engineer_timeout_s": ("", "engineer_timeout_s", int),
    "engineer_retries": ("", "engineer_retries", int),
    "researcher_retries": ("", "researcher_retries", int),
    "max_code_length": ("", "max_code_length", int),
    "judge_enabled": ("", "judge_enabled", _parse_bool),
    "judge_weight": ("", "judge_weight", float),
    "generation_mode": ("", "generation_mode", str),
    "seed": ("", "seed", int),
    "quick_test": ("", "quick_test", _parse_bool),
    "analyzer_log_cap": ("", "analyzer_log_cap", int),
    "template_dir": ("", "template_dir", str),
    "max_failure_streak": ("", "max_failure_streak", int),
    "sampling.algorithm": ("sampling", "algorithm", str),
    "sampling.ucb_c": ("sampling", "ucb_c", float),
    "sampling.islands": ("sampling", "islands", int),
    "sampling.migration_interval": ("sampling", "migration_interval", int),
    "sampling.migration_rate": ("sampling", "migration_rate", float),
    "sampling.exploration_ratio": ("sampling", "exploration_ratio", float),
    "sampling.exploitation_ratio": ("sampling", "exploitation_ratio", float),
    "sampling.feature_dims": ("sampling", "feature_dims", _parse_str_tuple),
    "sampling.bins_per_feature": ("sampling", "bins_per_feature", int),
    "sampling.candidate_pool": ("sampling", "candidate_pool", int),
    "cognition.top_k": ("cognition", "top_k", int),
    "cognition.threshold": ("cognition", "threshold", float),
    "cognition.dim": ("cognition", "dim", int),
}


def validate_config(config: RunConfig) -> RunConfig:
    """Raise ValidationError naming the first field violating an invariant."""
    checks: list[tuple[str, bool]] = [
        ("max_db_size", config.max_db_size >= 1),
        ("sample_n", config.sample_n >= 1),
        ("workers", config.workers >= 1),
        ("engineer_timeout_s", config.engineer_timeout_s >= 1),
        ("engineer_retries", config.engineer_retries >= 0),
        ("researcher_retries", config.researcher_retries >= 0),
        ("max_code_length", config.max_code_length >= 1),
        ("judge_weight", 0.0 <= config.judge_weight <= 1.0),
        ("generation_mode", config.generation_mode in GENERATION_MODES),
        ("analyzer_log_cap", config.analyzer_log_cap >= 64),
        ("max_failure_streak", config.max_failure_streak >= 0),
        ("sampling.algorithm", config.sampling.algorithm in SAMPLING_ALGORITHMS),
        ("sampling.ucb_c", config.sampling.ucb_c >= 0.0),
        ("sampling.islands", config.sampling.islands >= 1),
        ("sampling.migration_interval", config.sampling.migration_interval >= 1),
        ("sampling.migration_rate", 0.0 <= config.sampling.migration_rate <= 1.0),
        (
            "sampling.exploration_ratio",
            config.sampling.exploration_ratio >= 0.0
            and config.sampling.exploitation_ratio >= 0.0
            and config.sampling.exploration_ratio + config.sampling.exploitation_ratio <= 1.0 + 1e-12,
        ),
        ("sampling.bins_per_feature", config.sampling.bins_per_feature >= 1),
        ("sampling.feature_dims", len(config.sampling.feature_dims) >= 1),
        ("sampling.candidate_pool", config.sampling.candidate_pool >= 0),
        ("cognition.top_k", config.cognition.top_k >= 1),
        ("cognition.threshold", -1.0 <= config.cognition.threshold <= 1.0),
        ("cognition.dim", config.cognition.dim >= 1),
    ]
    for name, ok in checks:
        if not ok:
            raise ValidationError(name, "invalid value")
    return config


def parse_config(text: str) -> RunConfig:
    """Parse flat key-value config text; unset keys keep their defaults."""
    top: dict[str, Any] = {}
    sections: dict[str, dict[str, Any]] = {"sampling": {}, "cognition": {}}
    decoding: dict[str, Any] = {}
    saw_decoding = False

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key.startswith("decoding."):
            decoding[key[len("decoding."):]] = _parse_scalar(value)
            saw_decoding = True
            continue
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        target, fieldname, parser = _KEYS[key]
        try:
            parsed = parser(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: key {key!r}: {exc}") from exc
        if target == "":
            top[fieldname] = parsed
        else:
            sections[target][fieldname] = parsed

    config = RunConfig(
        sampling=SamplingConfig(**sections["sampling"]),
        cognition=CognitionConfig(**sections["cognition"]),
        **top,
    )
    if saw_decoding:
        merged = dict(config.decoding)
        merged.update(decoding)
        config = replace(config, decoding=merged)
    return validate_config(config)


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)


def dump_config(config: RunConfig) -> str:
    """Canonical text form; ``parse_config(dump_config(c)) == c``."""
    flat: dict[str, Any] = {}
    for key, (target, fieldname, _) in _KEYS.items():
        obj = config if target == "" else getattr(config, target)
        value = getattr(obj, fieldname)
        if isinstance(value, tuple):
            value = ",".join(value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        flat[key] = value
    for name, value in config.decoding.items():
        flat[f"decoding.{name}"] = value
    lines = [f"{key} = {flat[key]}" for key in sorted(flat)]
    return "\n".join(lines) + "\n"


def config_as_flat_dict(config: RunConfig) -> dict[str, Any]:
    """Flat JSON-friendly snapshot used in trace headers."""
    out: dict[str, Any] = {}
    for key, (target, fieldname, _) in _KEYS.items():
        obj = config if target == "" else getattr(config, target)
        value = getattr(obj, fieldname)
        out[key] = list(value) if isinstance(value, tuple) else value
    for name, value in config.decoding.items():
        out[f"decoding.{name}"] = value
    return dict(sorted(out.items()))


def config_from_flat_dict(flat: dict[str, Any]) -> RunConfig:
    """Inverse of :func:`config_as_flat_dict` (used when resuming)."""
    top: dict[str, Any] = {}
    sections: dict[str, dict[str, Any]] = {"sampling": {}, "cognition": {}}
    decoding: dict[str, Any] = {}
    for key, value in flat.items():
        if key.startswith("decoding."):
            decoding[key[len("decoding."):]] = value
            continue
        target, fieldname, _ = _KEYS[key]
        if isinstance(value, list):
            value = tuple(value)
        if target == "":
            top[fieldname] = value
        else:
            sections[target][fieldname] = value
    config = RunConfig(
        sampling=SamplingConfig(**sections["sampling"]),
        cognition=CognitionConfig(**sections["cognition"]),
        decoding=decoding,
        **top,
    )
    return validate_config(config)
