"""String-to-context transducers: evaluation, determinisation and a sequentiality test."""

from .context import EMPTY, Context, lcc, strip_lcc
from .machine import (
    Machine,
    RunBundle,
    Track,
    Transition,
    check_functional_bounded,
    delta_act_run,
    delta_step,
    eval_machine,
    power,
    project_left,
    project_right,
    trim,
    validate,
)

__all__ = [
    "EMPTY", "Context", "lcc", "strip_lcc",
    "Machine", "RunBundle", "Track", "Transition",
    "check_functional_bounded", "delta_act_run", "delta_step", "eval_machine",
    "power", "project_left", "project_right", "trim", "validate",
]

__version__ = "0.1.0"
