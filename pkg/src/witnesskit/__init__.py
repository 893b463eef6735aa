"""Entanglement detection: separability criteria, witnesses, Bell operators
and bound-entanglement certificates for finite-dimensional states.
"""

__version__ = "0.1.0"

from witnesskit.tensor import (  # noqa: E402
    Bipartition,
    DensityMatrix,
    LayoutError,
    PureState,
    StateError,
    partial_trace,
    partial_transpose,
    schmidt,
)
from witnesskit.criteria import Status, Verdict, run_criteria  # noqa: E402
from witnesskit.witness import (  # noqa: E402
    MeasurementPlan,
    Witness,
    WitnessError,
    evaluate,
    indecomposable_witness,
    low_dim_optimal_witness,
    pauli_decompose,
    product_infimum,
    pure_state_witness,
    robustness_radius,
)
from witnesskit.bell import (  # noqa: E402
    DirectionSet,
    StabilizerSpec,
    bell_optimize,
    chsh_operator,
    janzing_witness,
    klyshko_operator,
    lhv_assignment_search,
)
from witnesskit.multiparty import certify_nondistillable, cut_report, enumerate_cuts, upb_check  # noqa: E402
from witnesskit.sos import biquadratic_from_witness, sos_certificate, verify_sos  # noqa: E402
from witnesskit.kernels import BACKEND  # noqa: E402

__all__ = [
    "BACKEND",
    "Bipartition",
    "DensityMatrix",
    "DirectionSet",
    "LayoutError",
    "MeasurementPlan",
    "PureState",
    "StabilizerSpec",
    "StateError",
    "Status",
    "Verdict",
    "Witness",
    "WitnessError",
    "bell_optimize",
    "biquadratic_from_witness",
    "certify_nondistillable",
    "chsh_operator",
    "cut_report",
    "enumerate_cuts",
    "evaluate",
    "indecomposable_witness",
    "janzing_witness",
    "klyshko_operator",
    "lhv_assignment_search",
    "low_dim_optimal_witness",
    "partial_trace",
    "partial_transpose",
    "pauli_decompose",
    "product_infimum",
    "pure_state_witness",
    "robustness_radius",
    "run_criteria",
    "schmidt",
    "sos_certificate",
    "upb_check",
    "verify_sos",
]
