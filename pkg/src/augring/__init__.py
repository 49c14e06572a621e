"""Distributed widely linear affine projection adaptive filtering on a ring.

A toolkit for simulating an incremental network of nodes that jointly
estimate the coefficients of a widely linear model from complex-valued
observations, together with the closed-form steady-state mean-square
prediction, the mean-square stability bound, and a CLI harness that writes
CSV/JSON reports with matplotlib figures.
"""

from .config import ConfigError, ExperimentConfig, config_from_dict, load_config
from .filters import (
    EnergyAudit,
    FilterUpdateError,
    LearningCurve,
    NodeState,
    UpdateRecord,
    augmented_regressor,
    energy_audit,
    gram,
    incremental_cycle,
    local_update,
    noncooperative_update,
)
from .harness import (
    build_dataset,
    check_stability,
    run_experiment,
    simulate,
    sweep_t,
    trial_average,
)
from .network import (
    AugmentedCovariance,
    NetworkConfig,
    RegressorBlock,
    build_regressors,
    estimate_augmented_covariance,
    generate_observations,
    model_residual,
    widely_linear_output,
)
from .signals import (
    CircularityReport,
    ComplexSequence,
    NoiseProfile,
    SignalKind,
    SignalModel,
    complex_gaussian,
    estimate_circularity,
    gen_circular_ar1,
    gen_doubly_white,
    gen_ikeda,
    gen_noncircular_arma,
    generate,
    generate_batch,
    log_uniform_profile,
    write_sequence_csv,
)
from .theory import (
    MomentSet,
    MsdPrediction,
    StabilityMatrices,
    TransferMatrix,
    build_transfer,
    estimate_moments,
    noise_term,
    predict_msd,
    stability_bound,
    unvec,
    vec,
)

__version__ = "0.1.0"
