"""Central-subspace estimation toolkit.

Estimators for sufficient dimension reduction built on inverse conditional
mean and variance independence, with projection (average-angle) and
translation-invariant kernel weightings, alongside the classical SIR, SAVE,
CUME and MDDM baselines.  Includes seedable simulation designs, a Monte
Carlo benchmark runner, bootstrap stability evaluation and a CLI.
"""

__version__ = "0.1.0"

from .errors import SdrkitError
from .estimators import (
    DataSet,
    MethodSpec,
    candidate_matrix,
    center,
    estimate_subspace,
    icmi_id,
    icmi_kernel,
    icmi_pr,
    icvi_kernel,
    icvi_pr,
    mddm,
    save,
    sir,
    subspace_from_candidate,
)
from .evaluate import (
    BootstrapReport,
    ExperimentPlan,
    SimResult,
    bootstrap_eval,
    run_monte_carlo,
    runtime_bench,
)
from .kernels import KernelSpec, ang, angle_aggregate, kernel_eval, kernel_gram
from .linalg import (
    EigenDecomposition,
    SubspaceEstimate,
    projection_matrix,
    spd_inv_sqrt,
    subspace_distance,
    sym_eig,
    trace_correlation,
)
from .simgen import GeneratedSample, SimSpec, generate, sample_error

__all__ = [
    "__version__",
    "SdrkitError",
    "DataSet",
    "MethodSpec",
    "KernelSpec",
    "SimSpec",
    "GeneratedSample",
    "ExperimentPlan",
    "SimResult",
    "BootstrapReport",
    "EigenDecomposition",
    "SubspaceEstimate",
    "ang",
    "angle_aggregate",
    "bootstrap_eval",
    "candidate_matrix",
    "center",
    "estimate_subspace",
    "generate",
    "icmi_id",
    "icmi_kernel",
    "icmi_pr",
    "icvi_kernel",
    "icvi_pr",
    "kernel_eval",
    "kernel_gram",
    "mddm",
    "projection_matrix",
    "run_monte_carlo",
    "runtime_bench",
    "sample_error",
    "save",
    "sir",
    "spd_inv_sqrt",
    "subspace_distance",
    "subspace_from_candidate",
    "sym_eig",
    "trace_correlation",
]
