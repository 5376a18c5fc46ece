"""Run configuration: built-in defaults, an optional JSON file, then flags.

Later sources win. The merged values are what every output file echoes in
its header, so a run can be repeated from that echo alone.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from errors import ConfigError

logger = logging.getLogger(__name__)

COMMANDS = ("train", "scan", "simulate", "sensors", "generate")

DEFAULTS: dict[str, dict[str, Any]] = {
    "train": {
        "donor": None,
        "acceptor": None,
        "record": None,
        "donor_record": None,
        "acceptor_record": None,
        "window": 300,
        "step": 30,
        "hidden": [5],
        "fragments": 10000,
        "seed": 0,
        "lr": 0.1,
        "momentum": 0.9,
        "epochs": 500,
        "init_scale": 0.5,
        "early_stop": None,
        "log_every": 50,
        "workers": 1,
        "out": "model",
    },
    "scan": {
        "model": None,
        "query": None,
        "record": None,
        "window": None,
        "step": None,
        "smooth_k": 9,
        "min_seg_windows": 10,
        "min_seg_score": 0.75,
        "workers": 1,
        "out": "scan",
    },
    "simulate": {
        "donor": None,
        "acceptor": None,
        "record": None,
        "donor_record": None,
        "acceptor_record": None,
        "insert_length": 30000,
        "insert_pos": None,
        "seed": 0,
        "out": "chimera",
    },
    "sensors": {
        "input": None,
        "record": None,
        "window": 300,
        "step": 30,
        "workers": 1,
        "out": "sensors.tsv",
    },
    "generate": {
        "gc": None,
        "template": None,
        "record": None,
        "markov_order": 3,
        "length": 1_000_000,
        "seed": 0,
        "id": "synthetic",
        "out": "synthetic.fasta",
    },
}

# flags that shape a run but are not echoed as parameters
_NON_CONFIG = {"command", "config", "overlap", "verbose", "quiet", "log_file", "func"}


@dataclass
class RunConfig:
    command: str
    values: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)

    def echo(self) -> dict[str, Any]:
        return dict(self.values)


def load_config_file(path: str | Path, command: str) -> dict[str, Any]:
    """Read a JSON config. Either flat, or keyed by subcommand name."""
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must hold a JSON object")

    if any(key in COMMANDS for key in data):
        section = data.get(command, {})
        if not isinstance(section, dict):
            raise ConfigError(f"Config section '{command}' must be an object")
        return section
    return data


def parse_hidden(value) -> list[int]:
    """'5' or '10,5' (or a list) into hidden layer sizes."""
    if isinstance(value, int):
        sizes = [value]
    elif isinstance(value, str):
        try:
            sizes = [int(v) for v in value.split(",") if v.strip()]
        except ValueError as e:
            raise ConfigError(f"Hidden layer sizes must be integers, got '{value}'") from e
    else:
        sizes = [int(v) for v in value]
    if not sizes or any(n < 1 for n in sizes):
        raise ConfigError(f"Hidden layer sizes must be positive, got {value}")
    return sizes


def resolve(command: str, flags: dict[str, Any], config_path: str | Path | None = None) -> RunConfig:
    """Merge defaults, config file and command-line flags (None means 'not given')."""
    if command not in DEFAULTS:
        raise ConfigError(f"Unknown command '{command}'")
    values = dict(DEFAULTS[command])

    from_file = set()
    if config_path is not None:
        for key, value in load_config_file(config_path, command).items():
            if key not in values:
                logger.warning("Ignoring unknown config key '%s' for %s", key, command)
                continue
            values[key] = value
            from_file.add(key)

    for key, value in flags.items():
        if key in _NON_CONFIG or value is None or key not in values:
            continue
        if key in from_file and values[key] != value:
            logger.info("Flag overrides config file: %s = %r", key, value)
        values[key] = value

    overlap = flags.get("overlap")
    if overlap is not None:
        if flags.get("step") is not None:
            raise ConfigError("Give either --step or --overlap, not both")
        length = values.get("window")
        if length is None:
            # scan without --window: resolved against the model's window later
            values["overlap"] = overlap
        else:
            if not 0 <= overlap < length:
                raise ConfigError(f"Overlap must be in [0, {length}), got {overlap}")
            values["step"] = length - overlap

    if command in ("train", "simulate") and values["record"] is not None:
        # one id for both inputs; a per-input id still wins
        for key in ("donor_record", "acceptor_record"):
            if values[key] is None:
                values[key] = values["record"]

    if "hidden" in values:
        values["hidden"] = parse_hidden(values["hidden"])
    if "workers" in values and int(values["workers"]) < 1:
        raise ConfigError(f"workers must be at least 1, got {values['workers']}")
    if command == "generate" and (values["gc"] is None) == (values["template"] is None):
        raise ConfigError("generate needs exactly one of --gc or --template")

    return RunConfig(command=command, values=values)
