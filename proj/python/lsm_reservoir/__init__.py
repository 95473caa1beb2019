"""Python access to the liquid state machine simulator."""

import json

from ._lsm import (
    IoError,
    SingularSystemError,
    ValidationError,
    analyze_grid_csv,
    cost,
    cost_table,
    filter_response,
    kernel,
    kfold_evaluate,
    solve_readout,
    step_neuron,
)
from ._lsm import Session as _Session

__all__ = [
    "IoError",
    "SingularSystemError",
    "ValidationError",
    "Session",
    "analyze_grid_csv",
    "cost",
    "cost_table",
    "filter_response",
    "kernel",
    "kfold_evaluate",
    "solve_readout",
    "step_neuron",
]


class Session(_Session):
    """Dataset and reservoir resolved from a run configuration.

    `config` uses the same keys as the CLI's JSON config file; missing keys
    take their defaults.
    """

    def __init__(self, config=None):
        super().__init__(json.dumps(config or {}))
