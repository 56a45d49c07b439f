"""Zeroth-order stochastic optimization of transmon pulse shapes.

The package pairs simultaneous-perturbation style gradient estimators and
an annealed-momentum Adam with a few-level pulse simulator, calibration
losses, randomized benchmarking, and a reproducible experiment runner.
"""

from .estimators import (
    EstimatorConfig,
    GradientEstimate,
    ObjectiveError,
    averaged_gradient,
    estimate_gradient,
    fdsa_gradient,
    rsgf_gradient,
    spsa_gradient,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    FinalRBConfig,
    ScanConfig,
    SummaryRecord,
    TuneupResult,
    experiment_config_from_dict,
    landscape_scan,
    read_summary_jsonl,
    read_trajectory_csv,
    run_experiment,
    run_single,
    scan_config_from_dict,
    summarize_csv_files,
    summarize_trajectories,
    tuneup_configs_from_dict,
    two_stage_tuneup,
    write_scan_csv,
    write_summary_jsonl,
    write_trajectory_csv,
)
from .objectives import (
    LossValue,
    ObjectiveConfig,
    loss_combined,
    loss_rb,
    loss_x,
    loss_y,
    make_pulse_objective,
    synthetic_objective,
)
from .optimizers import (
    AdamState,
    OptimizationAborted,
    Trajectory,
    TrajectoryRecord,
    adam_step,
    momentum_step,
    run_optimization,
    sgd_step,
)
from .rb import (
    CliffordGroup,
    RBData,
    RBFitError,
    RBFitResult,
    clifford_group,
    fit_rb_decay,
    interleaved_gate_fidelity,
    run_rb,
)
from .schedules import (
    ConditionCheck,
    ScheduleSet,
    ValidationReport,
    power_law_value,
    validate_schedules,
)
from .transmon import (
    HannPulseParams,
    PopulationMeasurement,
    PulseSequence,
    TransmonParams,
    UnitarityError,
    average_gate_fidelity,
    embed_qubit_gate,
    evolve,
    hann_basis,
    hann_waveform,
    measure_population,
    rotation_unitary,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "CliffordGroup",
    "ConditionCheck",
    "ConfigError",
    "EstimatorConfig",
    "ExperimentConfig",
    "ExperimentResult",
    "FinalRBConfig",
    "GradientEstimate",
    "HannPulseParams",
    "LossValue",
    "ObjectiveConfig",
    "ObjectiveError",
    "OptimizationAborted",
    "PopulationMeasurement",
    "PulseSequence",
    "RBData",
    "RBFitError",
    "RBFitResult",
    "ScanConfig",
    "ScheduleSet",
    "SummaryRecord",
    "Trajectory",
    "TrajectoryRecord",
    "TransmonParams",
    "TuneupResult",
    "UnitarityError",
    "ValidationReport",
    "adam_step",
    "average_gate_fidelity",
    "averaged_gradient",
    "clifford_group",
    "embed_qubit_gate",
    "estimate_gradient",
    "evolve",
    "experiment_config_from_dict",
    "fdsa_gradient",
    "fit_rb_decay",
    "hann_basis",
    "hann_waveform",
    "interleaved_gate_fidelity",
    "landscape_scan",
    "loss_combined",
    "loss_rb",
    "loss_x",
    "loss_y",
    "make_pulse_objective",
    "measure_population",
    "momentum_step",
    "power_law_value",
    "read_summary_jsonl",
    "read_trajectory_csv",
    "rotation_unitary",
    "rsgf_gradient",
    "run_experiment",
    "run_optimization",
    "run_rb",
    "run_single",
    "scan_config_from_dict",
    "sgd_step",
    "spsa_gradient",
    "summarize_csv_files",
    "summarize_trajectories",
    "synthetic_objective",
    "tuneup_configs_from_dict",
    "two_stage_tuneup",
    "validate_schedules",
    "write_scan_csv",
    "write_summary_jsonl",
    "write_trajectory_csv",
]
