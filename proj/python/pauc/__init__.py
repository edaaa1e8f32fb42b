"""Simultaneous inference for partial areas under ROC curves."""

import json

import numpy as np

from . import _core
from ._core import (
    dunnett,
    estimate_covariance,
    holm_adjust,
    interaction,
    spearman_to_pearson,
    true_pauc,
    tukey,
)

__all__ = [
    "dunnett",
    "estimate_covariance",
    "estimate_pauc",
    "estimate_pauc_trimmed_mw",
    "holm_adjust",
    "interaction",
    "preset",
    "run_cli",
    "run_mct",
    "simulate",
    "spearman_to_pearson",
    "true_pauc",
    "tukey",
]


def _matrix(x):
    a = np.asarray(x, dtype=float)
    return a.reshape(-1, 1) if a.ndim == 1 else a


def estimate_pauc(xi, eta, p=1.0, q=0.0):
    return _core.estimate_pauc(_matrix(xi), _matrix(eta), p, q)


def estimate_pauc_trimmed_mw(xi, eta, p=1.0, q=0.0):
    return _core.estimate_pauc_trimmed_mw(_matrix(xi), _matrix(eta), p, q)


def run_mct(xi, eta, contrast=None, p=1.0, q=0.0, delta=0.05, bootstrap_reps=2000, seed=1,
            workers=1, assume_independent_groups=True):
    """Multiple contrast test; contrast is a matrix or a (rows, labels) pair."""
    xi, eta = _matrix(xi), _matrix(eta)
    if contrast is None:
        contrast = tukey(xi.shape[1])
    if isinstance(contrast, tuple):
        rows, labels = contrast
    else:
        rows, labels = contrast, []
    out = _core.run_mct(xi, eta, np.asarray(rows, dtype=float), list(labels), p, q, delta,
                        bootstrap_reps, seed, workers, assume_independent_groups)
    return json.loads(out)


def preset(name):
    return json.loads(_core.preset(name))


def simulate(plan=None, workers=1, **overrides):
    """Run a simulation plan: a preset name, a plan dict, or a scenario dict."""
    if plan is None or isinstance(plan, str):
        cfg = {"preset": plan or "table1"}
    else:
        cfg = dict(plan)
    cfg.update(overrides)
    return json.loads(_core.run_plan(json.dumps(cfg), workers))


def run_cli(*args):
    """Run the command-line front end in-process; returns (exit code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])
