"""
Named experiment presets for the weak-consistency sweeps.

Sparse-random-measurement presets use n = 5, sigma = 1 and T in {50, 100, 200, 400};
Erdos-Renyi synchronization presets use n = 50, sigma = 1 and T in {20, 40, 80}.
The smoothness budget of each preset is stated in its description.
"""

from typing import Dict, List

from src.core.exceptions import ConfigError
from src.harness.schemas import ExperimentConfig, PresetInfo

PRESET_SEED = 20240917


def _sparse(kind: str, theta: float, rule: str) -> dict:
    return {
        "graph_kind": kind,
        "measurement_model": "sparse_rows",
        "theta": theta,
        "n": 5,
        "sigma": 1.0,
        "S_T_rule": rule,
        "T_grid": [50, 100, 200, 400],
        "trials": 50,
        "base_seed": PRESET_SEED,
        "mu_rule": "corollary_auto",
    }


def _layers(kind: str, p: float) -> dict:
    return {
        "graph_kind": kind,
        "measurement_model": "er_layers",
        "p": p,
        "n": 50,
        "sigma": 1.0,
        "S_T_rule": "1",
        "T_grid": [20, 40, 80],
        "trials": 50,
        "base_seed": PRESET_SEED,
        "mu_rule": "corollary_auto",
    }


PRESETS: Dict[str, dict] = {
    "fig1-star-theta02": {
        "description": "Star graph, sparse rows theta=0.2, S_T = sqrt(T)",
        "config": _sparse("star", 0.2, "sqrt(T)"),
    },
    "fig1-star-theta05": {
        "description": "Star graph, sparse rows theta=0.5, S_T = sqrt(T)",
        "config": _sparse("star", 0.5, "sqrt(T)"),
    },
    "fig1-complete-theta02": {
        "description": "Complete graph, sparse rows theta=0.2, S_T = T^0.8",
        "config": _sparse("complete", 0.2, "T^0.8"),
    },
    "fig1-complete-theta05": {
        "description": "Complete graph, sparse rows theta=0.5, S_T = T^0.8",
        "config": _sparse("complete", 0.5, "T^0.8"),
    },
    "fig2-star-p002": {
        "description": "Star graph, Erdos-Renyi layers p=0.02, constant S_T = 1",
        "config": _layers("star", 0.02),
    },
    "fig2-star-p0004": {
        "description": "Star graph, Erdos-Renyi layers p=0.004, constant S_T = 1",
        "config": _layers("star", 0.004),
    },
    "fig2-complete-p002": {
        "description": "Complete graph, Erdos-Renyi layers p=0.02, constant S_T = 1",
        "config": _layers("complete", 0.02),
    },
    "fig2-complete-p0004": {
        "description": "Complete graph, Erdos-Renyi layers p=0.004, constant S_T = 1",
        "config": _layers("complete", 0.004),
    },
}


def preset_names() -> List[str]:
    return list(PRESETS)


def get_preset(name: str) -> ExperimentConfig:
    """Build the ExperimentConfig of a named preset."""
    try:
        entry = PRESETS[name]
    except KeyError:
        raise ConfigError(f"Unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return ExperimentConfig(name=name, **entry["config"])


def list_presets() -> List[PresetInfo]:
    return [
        PresetInfo(name=name, description=entry["description"], config=get_preset(name))
        for name, entry in PRESETS.items()
    ]
