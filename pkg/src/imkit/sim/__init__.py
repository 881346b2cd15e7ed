"""Numerical integration and the simulation-side verification operations."""

from .backend import BACKEND, available_backends
from .tape import TapeProgram, compile_exprs
from .integrate import (
    IntegratorControls,
    Trace,
    cascade_exprs,
    integrate,
    integrate_autonomous,
    integrate_cascade,
)
from .analysis import (
    AdaptationReport,
    AdaptationTrial,
    OmegaSample,
    ReproductionVerdict,
    ZeroingCheck,
    ZeroingVerdict,
    check_adaptation,
    omega_limit_sample,
    verify_im_reproduction,
    verify_output_zeroing,
)

__all__ = [
    "AdaptationReport",
    "AdaptationTrial",
    "BACKEND",
    "IntegratorControls",
    "OmegaSample",
    "ReproductionVerdict",
    "Trace",
    "TapeProgram",
    "ZeroingCheck",
    "ZeroingVerdict",
    "available_backends",
    "cascade_exprs",
    "check_adaptation",
    "compile_exprs",
    "integrate",
    "integrate_autonomous",
    "integrate_cascade",
    "omega_limit_sample",
    "verify_im_reproduction",
    "verify_output_zeroing",
]
