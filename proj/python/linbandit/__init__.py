"""Linear contextual bandit simulations (LinUCB, batched greedy policies)."""

import csv
import io
import json

from ._core import (
    ConfigError,
    Error,
    bayes_posterior_mean,
    default_config,
    greedy_select,
    interval_width,
    ks_two_sample,
    linucb_select,
    list_experiments,
    min_eigenvalue,
    ols_estimate,
    simulation_weights,
    suggested_batch_size,
    two_bridge_rounds,
    verify_simulation,
)
from ._core import run_experiment as _run_experiment

__all__ = [
    "ConfigError",
    "Error",
    "bayes_posterior_mean",
    "default_config",
    "greedy_select",
    "interval_width",
    "ks_two_sample",
    "linucb_select",
    "list_experiments",
    "min_eigenvalue",
    "ols_estimate",
    "run",
    "run_experiment",
    "simulation_weights",
    "suggested_batch_size",
    "two_bridge_rounds",
    "verify_simulation",
]


def run_experiment(config_text):
    """Raw result: dict with `csv`, `summary_json` and `curves_csv` strings."""
    return _run_experiment(config_text)


def run(config_text):
    """Parsed result: (rows as list of dicts, summary dict)."""
    out = _run_experiment(config_text)
    rows = list(csv.DictReader(io.StringIO(out["csv"])))
    return rows, json.loads(out["summary_json"])
