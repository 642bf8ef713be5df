# Copyright 2026 The dbmmd Authors
# SPDX-License-Identifier: Apache-2.0

"""Decision-boundary aware domain adaptation (JDA, CDDA, DGA-DA, MEDA)."""

import json

from ._core import (
    DbmmdError,
    gen_eig_smallest,
    generate_synthetic,
    mmd_matrices,
    propagate_labels,
)
from . import _core

__all__ = [
    "DbmmdError",
    "adapt",
    "gen_eig_smallest",
    "generate_synthetic",
    "mmd_matrices",
    "propagate_labels",
    "run_experiment",
]


def adapt(xs, ys, xt, model="JDA", config=None, yt=None):
    """Runs one adaptation model. Rows of xs and xt are samples.

    `config` takes the same keys as the "config" block of an experiment spec.
    """
    return _core._adapt(xs, list(ys), xt, model, json.dumps(config or {}),
                        None if yt is None else list(yt))


def run_experiment(spec, base_dir=""):
    """Runs an experiment spec (dict); returns (summary_csv, any_failed)."""
    return _core._run_experiment(json.dumps(spec), str(base_dir))
