# engine/run_config.py
# Loads config.yaml and merges it with command-line flags into a RunConfig.

import copy
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

from core.errors import UsageError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config.yaml"


@dataclass
class Budgets:
    omega: int = 10 ** 7
    subsets_max_n: int = 20
    box: int = 10 ** 6
    topples: int = 10 ** 6
    arborescence_choices: int = 10 ** 6


@dataclass
class SelftestSettings:
    random_matrices: int = 200
    max_n: int = 4
    max_diagonal: int = 5
    oracle_max_n: int = 3
    oracle_omega_cap: int = 10 ** 5
    confluence_pairs: int = 100
    confluence_orders: int = 20
    abelian_configurations: int = 50
    arborescence_matrices: int = 20
    arborescence_max_rate: int = 2
    law_matrices: int = 20
    law_max_rate: int = 3
    representatives: int = 100
    representative_range: int = 10


@dataclass
class LoggingSettings:
    level: str = "WARNING"
    save_logs: bool = False
    log_path: str = "logs/"


# Section defaults live on the dataclasses above
DEFAULT_CONFIG: Dict[str, Dict[str, Any]] = {
    "budgets": asdict(Budgets()),
    "run": {
        "seed": 0,
        "output_format": "text",
        "policy": "lowest",
    },
    "selftest": asdict(SelftestSettings()),
    "logging": asdict(LoggingSettings()),
}


@dataclass
class RunConfig:
    """Everything one CLI invocation needs; identical configs give identical output."""
    input_path: Optional[str] = None
    rate: Optional[Tuple[int, ...]] = None
    budgets: Budgets = field(default_factory=Budgets)
    seed: int = 0
    output_format: str = "text"
    policy: str = "lowest"
    witness: bool = False
    dot_path: Optional[str] = None
    selftest: SelftestSettings = field(default_factory=SelftestSettings)
    logging: LoggingSettings = field(default_factory=LoggingSettings)

    @property
    def as_json(self) -> bool:
        return self.output_format == "json"


def load_config(path: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
    """
    Read a YAML config and lay it over the built-in defaults.

    A missing file at the default location falls back to the defaults; a
    missing file that was asked for explicitly is a usage error.
    """
    merged = copy.deepcopy(DEFAULT_CONFIG)
    config_path = Path(path or DEFAULT_CONFIG_PATH)
    if not config_path.exists():
        if path:
            raise UsageError(f"config file {config_path} not found")
        logger.debug("No config.yaml found, using built-in defaults")
        return merged

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            loaded = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise UsageError(f"{config_path} contains invalid YAML: {e}") from e

    if not isinstance(loaded, dict):
        raise UsageError(f"{config_path} must hold a mapping of sections")
    for section, values in loaded.items():
        if section not in merged:
            logger.warning(f"Ignoring unknown config section '{section}'")
            continue
        if not isinstance(values, dict):
            raise UsageError(f"config section '{section}' must be a mapping")
        merged[section].update(values)
    return merged


def _section(cls, values: Dict[str, Any]):
    known = {f.name for f in fields(cls)}
    return cls(**{k: v for k, v in values.items() if k in known})


def _check_positive(name: str, value: Any) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
        raise UsageError(f"{name} must be a positive integer, got {value!r}")


def build_run_config(config: Dict[str, Dict[str, Any]], overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Combine loaded config sections with flag overrides (None means "not given")."""
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    budgets = _section(Budgets, config["budgets"])
    if "budget_omega" in overrides:
        budgets.omega = overrides["budget_omega"]
    if "budget_box" in overrides:
        budgets.box = overrides["budget_box"]
    if "budget_topples" in overrides:
        budgets.topples = overrides["budget_topples"]
    for f in fields(Budgets):
        _check_positive(f"budgets.{f.name}", getattr(budgets, f.name))

    selftest = _section(SelftestSettings, config["selftest"])
    for f in fields(SelftestSettings):
        _check_positive(f"selftest.{f.name}", getattr(selftest, f.name))

    run = config["run"]
    output_format = "json" if overrides.get("json") else run.get("output_format", "text")
    if output_format not in ("text", "json"):
        raise UsageError(f"output_format must be text or json, got {output_format!r}")

    logging_settings = _section(LoggingSettings, config["logging"])
    if "log_level" in overrides:
        logging_settings.level = overrides["log_level"]

    return RunConfig(
        input_path=overrides.get("matrix"),
        rate=overrides.get("rate"),
        budgets=budgets,
        seed=overrides.get("seed", run.get("seed", 0)),
        output_format=output_format,
        policy=overrides.get("policy", run.get("policy", "lowest")),
        witness=bool(overrides.get("witness", False)),
        dot_path=overrides.get("dot"),
        selftest=selftest,
        logging=logging_settings,
    )
