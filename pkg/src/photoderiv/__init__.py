"""photoderiv: analytic functions from photon-subtraction statistics.

Simulates mixing a single-mode squeezed vacuum with a 0/1/2-photon Fock
state on a beam splitter, evaluates the resulting photon-count
distributions in closed form, inverts sampled frequencies into values of
Z-derivatives and polynomial differential functions, and verifies every
closed form against a brute-force truncated Fock-space oracle.
"""

from .errors import (
    IncompatibleTruncation,
    NotFinite,
    OutOfRange,
    Overflow,
    PhotoderivError,
    SingularPoint,
    TruncationFailure,
    TruncationTooSmall,
    UnsupportedK,
    UsageError,
    ZeroProbabilityOutcome,
)
from .params import (
    ReducedScheme,
    SplitterSpec,
    SqueezeSpec,
    invert_scheme,
    make_squeeze,
    reduce_scheme,
)
from .series import (
    DEFAULT_POLICY,
    PrecisionPolicy,
    SeriesValue,
    euler_apply,
    z_derivative,
    z_derivative_series,
    z_value,
)
from .functions import FamilyPoint, FamilyValue, amplitude_c, norm_g, weight_f
from .distribution import OutcomeDistribution, analytic_distribution, outcome_probability
from .fock_oracle import (
    HeraldedState,
    TwoModeState,
    analytic_heralded_state,
    apply_beam_splitter,
    build_two_mode_input,
    exact_beam_splitter,
    exact_input,
    exact_marginal,
    fidelity,
    heralded_state,
    minimal_n_max,
    mode2_marginal,
    oracle_distribution,
    oracle_state,
)
from .estimator import (
    EmpiricalCounts,
    FunctionEstimate,
    GENERATOR_ID,
    estimate_exact,
    estimate_functions,
    sample_outcomes,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # params
    "SqueezeSpec", "SplitterSpec", "ReducedScheme",
    "make_squeeze", "reduce_scheme", "invert_scheme",
    # series
    "PrecisionPolicy", "SeriesValue", "DEFAULT_POLICY",
    "z_value", "z_derivative", "z_derivative_series", "euler_apply",
    # functions
    "FamilyPoint", "FamilyValue", "weight_f", "norm_g", "amplitude_c",
    # distribution
    "OutcomeDistribution", "outcome_probability", "analytic_distribution",
    # fock oracle
    "TwoModeState", "HeraldedState", "build_two_mode_input", "apply_beam_splitter",
    "mode2_marginal", "heralded_state", "analytic_heralded_state", "fidelity",
    "minimal_n_max", "oracle_state", "oracle_distribution",
    "exact_input", "exact_beam_splitter", "exact_marginal",
    # estimator
    "EmpiricalCounts", "FunctionEstimate", "GENERATOR_ID",
    "sample_outcomes", "estimate_functions", "estimate_exact", "sweep",
    # errors
    "PhotoderivError", "OutOfRange", "NotFinite", "Overflow", "TruncationFailure",
    "UnsupportedK", "SingularPoint", "TruncationTooSmall", "ZeroProbabilityOutcome",
    "IncompatibleTruncation", "UsageError",
]
