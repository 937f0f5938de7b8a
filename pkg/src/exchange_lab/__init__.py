"""Exact simulator for exchange-phase interference on small mode registers.

Second-quantized occupation registers with exact sign bookkeeping:
controlled swaps, bidirectional half-swaps, ring rotations and pulsed
transport, each attributing every acquired -1 to a specific local hop,
with an independent dense-matrix oracle validating the fast path.
"""

__version__ = "0.1.0"

from .fock import (
    BasisState,
    Hop,
    LadderOp,
    OperatorString,
    RegisterLayout,
    SignLedger,
    SignLedgerEntry,
    StateVector,
    StatisticsMatrix,
    annihilate,
    apply_hop,
    apply_hop_sequence,
    apply_ladder,
    apply_operator_string,
    create,
    enumerate_sector,
    inner_product,
    jw_sign,
)
from .protocols import (
    BranchProgram,
    ControlledExperiment,
    ExperimentResult,
    RingConfig,
    ancilla_measure,
    experiment_full_controlled_swap,
    experiment_half_swap_interference,
    experiment_ring_rotation,
    extract_phase,
    run_controlled,
)
from .dynamics import (
    HamiltonianSpec,
    HopPulse,
    exact_evolve,
    hop_rotation,
    run_pulse_interference,
    trotter_evolve,
)
from .oracle import cross_check, dense_expm_hermitian, dense_ladder, dense_string
from .reference import COWParams, PathSegment, cow_phase, optical_path_phase
