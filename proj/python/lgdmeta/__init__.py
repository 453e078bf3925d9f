"""Python access to the lgd library: LGD and GD predictors, task generation,
experiments and theory bounds."""

import json

from ._lgd import (
    ConfigError,
    CurveRow,
    DivergenceError,
    ParseError,
    bounds as _bounds,
    format_results_csv,
    gd_predict,
    generate_tasks as _generate_tasks,
    lgd_predict,
    parse_results_csv,
    preset_config as _preset_config,
    render_svg,
    ridge,
    run_experiment as _run_experiment,
)


def preset(name):
    """Preset experiment config as a dict."""
    return json.loads(_preset_config(name))


def generate_tasks(config=None):
    return _generate_tasks(json.dumps(config or {}))


def run_experiment(config):
    """Returns (rows, failures); rows are dicts with method, n_train, mean_mse, stderr, n_tasks, diverged."""
    return _run_experiment(json.dumps(config))


def bounds(formula, **inputs):
    return json.loads(_bounds(json.dumps({"formula": formula, "inputs": inputs})))


__all__ = [
    "ConfigError",
    "CurveRow",
    "DivergenceError",
    "ParseError",
    "bounds",
    "format_results_csv",
    "gd_predict",
    "generate_tasks",
    "lgd_predict",
    "parse_results_csv",
    "preset",
    "render_svg",
    "ridge",
    "run_experiment",
]
