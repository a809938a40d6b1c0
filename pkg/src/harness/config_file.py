"""
Flat key-value experiment config files.

    # comment
    graph_kind = star
    measurement_model = sparse_rows(0.5)     # or: measurement_model = sparse_rows + theta = 0.5
    n = 5
    sigma = 1
    S_T_rule = sqrt(T)
    T_grid = 50, 100, 200, 400
    trials = 50
    base_seed = 7
    mu_rule = corollary_auto                 # or: fixed(0.1)
"""

from pathlib import Path
from typing import Any, Dict, Union
import re

from src.core.exceptions import ConfigError
from src.harness.schemas import ExperimentConfig, parse_config

PathLike = Union[str, Path]

KNOWN_KEYS = {
    "name", "graph_kind", "measurement_model", "theta", "p", "n", "sigma", "S_T_rule",
    "T_grid", "trials", "base_seed", "mu_rule", "mu", "c1", "delta",
}
_CALL = re.compile(r"^(?P<head>[a-z_]+)\(\s*(?P<arg>[^)]*)\)$")


def _expand_call(key: str, value: str, data: Dict[str, Any]):
    match = _CALL.match(value)
    if not match:
        data[key] = value
        return
    head, arg = match.group("head"), match.group("arg").strip()
    data[key] = head
    if key == "measurement_model":
        data["theta" if head == "sparse_rows" else "p"] = arg
    elif key == "mu_rule" and head == "fixed":
        data["mu"] = arg
    else:
        raise ConfigError(f"{key} = {value!r} does not take an argument")


def parse_config_text(text: str) -> ExperimentConfig:
    data: Dict[str, Any] = {}
    for line_number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_number}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {line_number}: unknown key {key!r}")
        if key in data:
            raise ConfigError(f"line {line_number}: duplicate key {key!r}")
        if key == "T_grid":
            try:
                data[key] = [int(v) for v in re.split(r"[,\s]+", value) if v]
            except ValueError:
                raise ConfigError(f"line {line_number}: T_grid must be a list of integers")
        elif key in ("measurement_model", "mu_rule"):
            _expand_call(key, value, data)
        else:
            data[key] = value
    return parse_config(data)


def read_config(path: PathLike) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc}")
    config = parse_config_text(text)
    if config.name is None:
        config = config.model_copy(update={"name": path.stem})
    return config


def format_config(config: ExperimentConfig) -> str:
    lines = []
    for key, value in config.model_dump(exclude_none=True).items():
        if key == "T_grid":
            value = ", ".join(str(T) for T in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
