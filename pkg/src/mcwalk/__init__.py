"""Multi-coin discrete-time quantum walks for entanglement generation."""

from .kernels import BACKEND
from .statevec import (
    DensityMatrix,
    GeneralizedBellLabel,
    MeasurementRecord,
    PureState,
    apply_unitary,
    make_generalized_bell,
    make_ghz,
    make_pair,
    measure_enumerate,
    partial_trace,
    sample_shots,
    tensor,
)
from .walk import CoinOp, GraphKind, WalkSchedule, build_coin, build_shift, run_schedule, walk_step

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CoinOp",
    "DensityMatrix",
    "GeneralizedBellLabel",
    "GraphKind",
    "MeasurementRecord",
    "PureState",
    "WalkSchedule",
    "apply_unitary",
    "build_coin",
    "build_shift",
    "make_generalized_bell",
    "make_ghz",
    "make_pair",
    "measure_enumerate",
    "partial_trace",
    "run_schedule",
    "sample_shots",
    "tensor",
    "walk_step",
]
