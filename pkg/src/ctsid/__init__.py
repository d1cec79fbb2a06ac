"""Experiment design and generalized-filtering identification for
continuous-time LTI systems under piecewise-constant inputs."""

from .config import DEFAULT_CONFIG, NumericConfig
from .design import (
    CyclingPolicy,
    DesignResult,
    KernelCertificate,
    ReplayPlant,
    SeededRandomPolicy,
    SimulatedPlant,
    choose_input,
    hankel,
    image_membership,
    kernel_certificate,
    pe_check,
    rank_condition,
    run_online_design,
    verify_intersample,
)
from .errors import (
    DesignFailureError,
    NumericalError,
    ValidationError,
    VerificationError,
)
from .filtering import (
    FilteredDataset,
    RelationMatrices,
    build_relation_matrices,
    factorization_residual,
    filter_lti_dataset,
    filter_signal,
    filtered_derivative_data,
    filtered_input_data,
    lowpass_derivative_identity,
    lowpass_realization,
    quad_piece,
    verify_algebraic,
)
from .filters import (
    Decomposition,
    FilterBank,
    build_F_bar,
    decompose,
    eval_g,
    eval_g_deriv,
    left_limit_g,
    make_filter_bank,
)
from .linalg import (
    RankReport,
    expm,
    frobenius_distance,
    left_kernel_basis,
    pinv,
    svd_rank,
)
from .ltisim import (
    DiscreteSystem,
    LtiSystem,
    PiecewiseConstantInput,
    SampledDataset,
    Trajectory,
    check_nonpathological,
    dense_trajectory,
    discretize,
    rk4_oracle,
    simulate_sampled,
    state_at,
    state_fn,
    step,
)
from .sysid import (
    IdentificationResult,
    identify,
    identify_discrete,
    informativity_check,
)

__version__ = "0.1.0"
