"""Federated learning over wireless links: link analysis, Monte Carlo and resource planning."""

import csv
import io
import json

from ._core import (
    Config,
    DomainError,
    IoError,
    NumericalError,
    PreconditionError,
    UnknownParameterError,
    analyze_links,
    downlink_success_probability,
    estimate_downlink_success,
    estimate_resources,
    estimate_uplink_success,
    expected_resources,
    interferer_count_pmf,
    mean_interferers,
    min_local_iterations,
    min_rounds,
    plan_for_compute_ratio,
    plan_for_round_cap,
    uplink_success_probability,
)
from ._core import run_experiment as _run_experiment
from ._core import train as _train

__all__ = [
    "Config",
    "DomainError",
    "IoError",
    "NumericalError",
    "PreconditionError",
    "UnknownParameterError",
    "analyze_links",
    "config",
    "downlink_success_probability",
    "estimate_downlink_success",
    "estimate_resources",
    "estimate_uplink_success",
    "expected_resources",
    "interferer_count_pmf",
    "mean_interferers",
    "min_local_iterations",
    "min_rounds",
    "parse_csv",
    "plan_for_compute_ratio",
    "plan_for_round_cap",
    "run_experiment",
    "train",
    "uplink_success_probability",
]


def config(overrides=None, **params):
    """Config from a nested dict in the JSON layout, then scalar overrides by name."""
    cfg = Config.from_json(json.dumps(overrides or {}))
    for name, value in params.items():
        cfg.set(name, float(value))
    return cfg


def parse_csv(text):
    """Split experiment output into (preamble dict, list of row dicts)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# flwin v1"):
        raise ValueError("missing flwin CSV preamble")
    meta = {}
    for part in lines[0][len("# flwin v1"):].split(","):
        if "=" in part:
            key, value = part.strip().split("=", 1)
            meta[key] = value
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    return meta, rows


def run_experiment(kind, cfg=None, *, seed, trials=100000, sweep=None, plan_case=1,
                   stochastic_links=False, max_rounds=100, workers=0):
    """Run one experiment kind; returns (csv_text, infeasible_plan, summary)."""
    return _run_experiment(kind, cfg if cfg is not None else Config(), seed, trials, sweep,
                           plan_case, stochastic_links, max_rounds, workers)


def train(cfg=None, *, seed, stochastic=False, max_rounds=100):
    """Federated training trace as a dict."""
    return json.loads(_train(cfg if cfg is not None else Config(), seed, stochastic, max_rounds))
