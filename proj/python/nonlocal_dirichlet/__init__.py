"""Nonlocal Dirichlet problems for Levy generators.

Thin wrapper over the compiled core. ``run`` mirrors the ``nld`` command line tool and
takes the same JSON configurations, as dicts.
"""

import json

from . import _core
from ._core import (
    QuadratureError,
    char_exponent as _char_exponent,
    counterexample,
    exit_radius_cdf,
    exit_samples,
    kernel_profile as _kernel_profile,
    subcommands,
)

__all__ = [
    "QuadratureError",
    "char_exponent",
    "counterexample",
    "exit_radius_cdf",
    "exit_samples",
    "kernel_profile",
    "run",
    "subcommands",
]


def _model_json(model):
    return model if isinstance(model, str) else json.dumps(model)


def run(subcommand, config, seed=None, threads=None):
    """Run one pipeline. Returns (report dict, csv text)."""
    report, csv = _core.run(subcommand, json.dumps(config), seed, threads)
    return json.loads(report), csv


def char_exponent(model, xi):
    """psi(xi) for each row of xi, shape (n, dim)."""
    return _char_exponent(_model_json(model), xi)


def kernel_profile(model, r, force_numeric=False):
    """Radial potential kernel G and its first two derivatives at radii r."""
    return _kernel_profile(_model_json(model), r, force_numeric)
