"""Feasibility and explicit solutions for non-strict projection inequalities."""

__version__ = "0.1.0"

from .dilation import DilationProblem, check_dilation_conditions, complete, verify_dilation
from .estimators import (
    DilationCompleter,
    Interpolator,
    MultiplierSearch,
    ProjectionSolver,
    StabilityCertifier,
)
from .exceptions import (
    ConditionsViolated,
    DimensionMismatch,
    HypothesisViolated,
    IndefiniteInput,
    InfeasibleProblem,
    NotMarginallyStable,
    NspkitError,
    NumericalBreakdown,
    SingularX,
    SlaterViolated,
)
from .linalg import Tolerances
from .projection import (
    ProjectionProblem,
    build_partition_basis,
    check_conditions,
    construct_witness,
    strict_check,
    verify_witness,
)
from .quadratic import (
    QuadraticForm,
    SLemmaPair,
    finsler,
    interpolate,
    matrix_s_lemma,
    scalar_s_lemma,
)
from .stability import (
    certificate_P_form,
    certificate_S_form,
    construct_P,
    extract_gain,
    is_marginally_stable,
    verify_certificate,
)
