"""Ancilla-controlled interference experiments and phase extraction.

Each experiment prepares one register state, evolves it along two branch
programs (the ancilla's |0⟩ and |1⟩ arms), and reads the relative phase
off the branch overlap.  Because the ancilla-controlled evolution of a
product state factorizes, the two branches are simulated as independent
register vectors; the ancilla X/Y statistics follow from the overlap
exactly.  Every branch carries a sign ledger attributing each acquired
-1 to the elementary operation that produced it.

Branch programs evaluate in one of two modes: ``sequential`` applies a
hop list as physical transport, step by step; ``literal`` evaluates an
operator string exactly as written.  For the four-mode swap the two
conventions disagree on the sign of the return step, which is why both
are exposed (see ``checks.equation_audit``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .fock import (
    BasisState,
    Hop,
    OperatorString,
    RegisterLayout,
    SignLedger,
    StateVector,
    annihilate,
    apply_hop,
    apply_operator_string,
    create,
    inner_product,
)

PHASE_VISIBILITY_FLOOR = 1e-9

# Half-swap routes as operator strings (identical to their hop-derived
# products): forward transports 1->2 and 3->4, backward 1->4 and 3->2.
HALF_SWAP_FORWARD_STRING = OperatorString((create(4), annihilate(3), create(2), annihilate(1)))
HALF_SWAP_BACKWARD_STRING = OperatorString((create(2), annihilate(3), create(4), annihilate(1)))

# Return step |0101⟩ -> |1010⟩ in the creator-first literal ordering.  This
# differs by a sign from the transport-ordered product (f1+ f4- f3+ f2-);
# the verify report audits both against the dense oracle.
RETURN_STEP_LITERAL_STRING = OperatorString((annihilate(4), create(3), annihilate(2), create(1)))

FULL_SWAP_HOPS = (Hop(1, 2), Hop(3, 4), Hop(2, 3), Hop(4, 1))
HALF_SWAP_FORWARD_HOPS = (Hop(1, 2), Hop(3, 4))
HALF_SWAP_BACKWARD_HOPS = (Hop(1, 4), Hop(3, 2))


@dataclass(frozen=True)
class BranchProgram:
    """One ancilla arm: a hop list (sequential) or operator string (literal)."""

    label: str
    steps: tuple[Hop, ...] | OperatorString


@dataclass(frozen=True)
class ControlledExperiment:
    """Two branch programs sharing one initial register state."""

    name: str
    layout: RegisterLayout
    initial: BasisState
    branch0: BranchProgram
    branch1: BranchProgram
    params: dict = field(default_factory=dict)


@dataclass
class ExperimentResult:
    """Phase, visibility and sign attribution of one interference run.

    ``phase_rad`` is None when the branch overlap magnitude is at or below
    1e-9 (no fringe to read a phase from).  ``valid`` is False when a
    branch annihilated to the zero vector.
    """

    experiment: str
    params: dict
    phase_rad: float | None
    visibility: float
    branch_final: tuple[str, str]
    ledgers: tuple[SignLedger, SignLedger]
    probabilities: dict
    seed: int | None
    version: str
    valid: bool = True

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "params": self.params,
            "phase_rad": self.phase_rad,
            "visibility": self.visibility,
            "branch_final": list(self.branch_final),
            "ledgers": [ledger.to_rows() for ledger in self.ledgers],
            "probabilities": self.probabilities,
            "seed": self.seed,
            "version": self.version,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


@dataclass(frozen=True)
class RingConfig:
    """n particles on a 2n-mode circle, odd modes initially occupied."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ring needs at least one particle")

    @property
    def modes(self) -> int:
        return 2 * self.n

    def initial_state(self) -> BasisState:
        return BasisState.from_occupations([1, 0] * self.n)


def _phase_from_overlap(z: complex) -> tuple[float | None, float]:
    visibility = abs(z)
    if visibility <= PHASE_VISIBILITY_FLOOR:
        return None, visibility
    phase = math.atan2(z.imag, z.real)
    if phase == -math.pi:
        phase = math.pi
    return phase, visibility


def extract_phase(psi0: StateVector, psi1: StateVector) -> tuple[float | None, float]:
    """Overlap phase in (-pi, pi] and visibility of two branch states.

    Inputs are normalized internally; a zero-norm input gives (None, 0).
    """
    if psi0.is_zero or psi1.is_zero:
        return None, 0.0
    z = inner_product(psi0, psi1) / (psi0.norm * psi1.norm)
    return _phase_from_overlap(z)


def assemble_result(
    name: str,
    params: dict,
    branches: tuple[tuple[StateVector, SignLedger], tuple[StateVector, SignLedger]],
    seed: int | None = None,
) -> ExperimentResult:
    """Build an ExperimentResult from two evaluated (state, ledger) branches."""
    (psi0, ledger0), (psi1, ledger1) = branches
    valid = not (psi0.is_zero or psi1.is_zero)
    if valid:
        z = inner_product(psi0.normalized(), psi1.normalized())
        phase, visibility = _phase_from_overlap(z)
    else:
        z = 0j
        phase, visibility = None, 0.0

    def clamp(p):
        return min(max(p, 0.0), 1.0)

    probabilities = {
        "x_plus": clamp((1.0 + z.real) / 2.0),
        "x_minus": clamp((1.0 - z.real) / 2.0),
        "y_plus": clamp((1.0 + z.imag) / 2.0),
        "y_minus": clamp((1.0 - z.imag) / 2.0),
    }
    return ExperimentResult(
        experiment=name,
        params=params,
        phase_rad=phase,
        visibility=visibility,
        branch_final=(psi0.format(), psi1.format()),
        ledgers=(ledger0, ledger1),
        probabilities=probabilities,
        seed=seed,
        version=__version__,
        valid=valid,
    )


def _evaluate_branch(
    layout: RegisterLayout, initial: BasisState, branch: BranchProgram
) -> tuple[StateVector, SignLedger]:
    psi = StateVector.from_basis_state(layout, initial)
    ledger = SignLedger()
    if isinstance(branch.steps, OperatorString):
        psi = apply_operator_string(branch.steps, psi, ledger)
    else:
        for hop in branch.steps:
            psi = apply_hop(hop, psi, ledger)
    return psi, ledger


def run_controlled(experiment: ControlledExperiment, seed: int | None = None) -> ExperimentResult:
    """Evaluate both branches from the shared initial state."""
    branches = (
        _evaluate_branch(experiment.layout, experiment.initial, experiment.branch0),
        _evaluate_branch(experiment.layout, experiment.initial, experiment.branch1),
    )
    params = dict(experiment.params)
    params.setdefault("statistics", experiment.layout.describe())
    params.setdefault("modes", experiment.layout.modes)
    params.setdefault("initial", str(experiment.initial))
    params.setdefault("branches", [experiment.branch0.label, experiment.branch1.label])
    return assemble_result(experiment.name, params, branches, seed=seed)


def hops_to_operator_string(hops) -> OperatorString:
    """Operator string whose right-to-left evaluation replays the hop order."""
    ops = []
    for hop in reversed(tuple(hops)):
        ops.append(create(hop.dst))
        ops.append(annihilate(hop.src))
    return OperatorString(tuple(ops))


def _swap_layout(layout: RegisterLayout | None) -> RegisterLayout:
    if layout is None:
        layout = RegisterLayout.fermionic(4)
    if layout.modes != 4:
        raise ValueError("swap experiments need a 4-mode layout")
    return layout


def experiment_full_controlled_swap(
    layout: RegisterLayout | None = None,
    evaluation: str = "sequential",
    seed: int | None = None,
) -> ExperimentResult:
    """Controlled full swap on |1010⟩: hold vs transport around the square.

    Sequential evaluation applies the four hops 1->2, 3->4, 2->3, 4->1 and
    yields phase pi for anticommuting statistics.  Literal evaluation
    composes the forward string with the creator-first return string,
    whose sign differs from the transport product; the phase it reports
    (0) documents exactly that discrepancy.
    """
    layout = _swap_layout(layout)
    initial = BasisState.from_ket("1010")
    if evaluation == "sequential":
        branch0 = BranchProgram("hold", ())
        branch1 = BranchProgram("swap", FULL_SWAP_HOPS)
    elif evaluation == "literal":
        branch0 = BranchProgram("hold", OperatorString())
        branch1 = BranchProgram(
            "swap", OperatorString(RETURN_STEP_LITERAL_STRING.ops + HALF_SWAP_FORWARD_STRING.ops)
        )
    else:
        raise ValueError(f"unknown evaluation mode {evaluation!r}")
    experiment = ControlledExperiment(
        name="full-swap",
        layout=layout,
        initial=initial,
        branch0=branch0,
        branch1=branch1,
        params={"evaluation": evaluation},
    )
    return run_controlled(experiment, seed=seed)


def experiment_half_swap_interference(
    layout: RegisterLayout | None = None,
    evaluation: str = "sequential",
    seed: int | None = None,
) -> ExperimentResult:
    """Interfere the two half-way transport routes |1010⟩ -> |0101⟩.

    Forward hops 1->2, 3->4 against backward hops 1->4, 3->2; both
    branches end in the same configuration, and anticommuting statistics
    put the whole relative pi on the backward route's 1->4 hop.
    """
    layout = _swap_layout(layout)
    initial = BasisState.from_ket("1010")
    if evaluation == "sequential":
        branch0 = BranchProgram("forward", HALF_SWAP_FORWARD_HOPS)
        branch1 = BranchProgram("backward", HALF_SWAP_BACKWARD_HOPS)
    elif evaluation == "literal":
        branch0 = BranchProgram("forward", HALF_SWAP_FORWARD_STRING)
        branch1 = BranchProgram("backward", HALF_SWAP_BACKWARD_STRING)
    else:
        raise ValueError(f"unknown evaluation mode {evaluation!r}")
    experiment = ControlledExperiment(
        name="half-swap",
        layout=layout,
        initial=initial,
        branch0=branch0,
        branch1=branch1,
        params={"evaluation": evaluation},
    )
    return run_controlled(experiment, seed=seed)


def _ring_forward_step(occupied: set[int], modes: int) -> list[Hop]:
    return [Hop(m, m % modes + 1) for m in sorted(occupied)]


def _ring_backward_step(occupied: set[int], modes: int) -> list[Hop]:
    hops = []
    if 1 in occupied:
        hops.append(Hop(1, modes))
    hops.extend(Hop(m, m - 1) for m in sorted(occupied) if m != 1)
    return hops


def _ring_branch_hops(n: int, forward: bool, steps: int) -> tuple[Hop, ...]:
    modes = 2 * n
    occupied = set(range(1, modes + 1, 2))
    hops: list[Hop] = []
    for _ in range(steps):
        step = _ring_forward_step(occupied, modes) if forward else _ring_backward_step(occupied, modes)
        hops.extend(step)
        occupied = {h.dst for h in step} | (occupied - {h.src for h in step})
    return tuple(hops)


def experiment_ring_rotation(
    cfg: RingConfig | int,
    layout: RegisterLayout | None = None,
    revolution: bool = False,
    seed: int | None = None,
) -> ExperimentResult:
    """Rotate n particles on a 2n-mode circle one site each way and interfere.

    Forward moves every particle to its higher neighbour (hops 2i-1 -> 2i);
    backward moves to the lower neighbour, the mode-1 particle wrapping to
    mode 2n first.  Both branches end with all even modes occupied; the
    relative phase comes out pi for even n and 0 for odd n, carried by the
    wrap hop's interval count.  With ``revolution=True`` each branch makes
    a full 2n-step turn instead, returning every particle to its start.
    """
    if isinstance(cfg, int):
        cfg = RingConfig(cfg)
    if layout is None:
        layout = RegisterLayout.fermionic(cfg.modes)
    if layout.modes != cfg.modes:
        raise ValueError(f"ring of {cfg.n} particles needs {cfg.modes} modes")
    steps = cfg.modes if revolution else 1
    branch0 = BranchProgram("forward", _ring_branch_hops(cfg.n, True, steps))
    branch1 = BranchProgram("backward", _ring_branch_hops(cfg.n, False, steps))
    experiment = ControlledExperiment(
        name="ring",
        layout=layout,
        initial=cfg.initial_state(),
        branch0=branch0,
        branch1=branch1,
        params={"n": cfg.n, "revolution": revolution, "evaluation": "sequential"},
    )
    return run_controlled(experiment, seed=seed)


def ancilla_measure(
    result: ExperimentResult,
    basis: str = "X",
    shots: int | None = None,
    seed: int | None = None,
) -> dict:
    """Ancilla readout statistics in the X or Y basis.

    Without ``shots`` returns the exact +/- probabilities; with ``shots``
    returns seeded binomial counts (a seed is required so runs are
    reproducible).
    """
    if not result.valid:
        raise ValueError("cannot measure an invalid experiment result")
    key = basis.strip().upper()
    if key not in ("X", "Y"):
        raise ValueError(f"basis must be X or Y, got {basis!r}")
    p_plus = result.probabilities["x_plus" if key == "X" else "y_plus"]
    if shots is None:
        return {"+": p_plus, "-": 1.0 - p_plus}
    if seed is None:
        raise ValueError("shot-based measurement requires a seed")
    if shots < 0:
        raise ValueError("shots must be nonnegative")
    hits = int(np.random.default_rng(seed).binomial(shots, p_plus))
    return {"+": hits, "-": shots - hits}
