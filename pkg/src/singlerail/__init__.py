"""Multimode Fock-space simulation of heralded single-rail photonic gates."""

from .detection import (
    Branch,
    BranchEnsemble,
    DetectionPattern,
    HeraldedResult,
    condition,
    herald_with_losses,
    lossy_detect,
    lossy_outcomes,
    outcome_distribution,
    reported_count_distribution,
)
from .experiment import (
    ConfigError,
    ExperimentConfig,
    SweepResult,
    run_phase_sweep,
    run_test_circuit,
    visibility,
)
from .fock import (
    CutoffError,
    ModeMismatchError,
    PureState,
    ZeroStateError,
    coherent_state,
    fidelity,
    inner_product,
    make_basis_state,
    norm_squared,
    normalize,
    tensor,
    vacuum,
)
from .gates import (
    MeasurementVerdict,
    cs_gate,
    hadamard_gate,
    phase_gate,
    qubit,
    reflectivity_for_chi,
    superposition_measurement,
    superposition_producer,
    working_point,
)
from .transforms import ModeTransform, apply, beamsplitter, compose, cs_network, embed, phase_shift

__version__ = "0.1.0"
