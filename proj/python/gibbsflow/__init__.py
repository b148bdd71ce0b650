"""Python access to the gibbsflow simulation core."""

import csv
import io
import json

from ._core import (
    ConfigError,
    GeneratorMatrix,
    InteractionSpec,
    LatticeModel,
    Trajectory,
    Window,
    birth_rate,
    de_bruijn_check,
    entropy_production,
    evolve,
    fisher,
    kappa_bound,
    philox4x32,
    rate_bounds,
    rel_entropy,
    sample_poisson,
    simulate,
    spectral_gap,
    stationary,
    version,
)
from . import _core

__version__ = version()


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def experiments():
    """Catalogue entries as dicts with their default parameters."""
    return [
        {"name": n, "criterion": c, "summary": s, "params": json.loads(p)}
        for n, c, s, p in _core.list_experiments()
    ]


def run_experiment(name, params=None, seed=0x5EED, threads=1):
    """Run one experiment in memory. Tables come back as lists of row dicts."""
    raw = _core.run_experiment(name, json.dumps(params or {}), seed, threads)
    return {
        "criterion": raw["criterion"],
        "params": json.loads(raw["params"]),
        "passed": raw["passed"],
        "results": _rows(raw["results"]),
        "verdicts": [
            {"property": p, "pass": ok, "detail": d} for p, ok, d in raw["verdicts"]
        ],
        "curves": {k: _rows(v) for k, v in raw["curves"].items()},
    }
