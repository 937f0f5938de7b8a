"""Exact Fock-space register with statistics-aware ladder operators.

A register holds M globally ordered modes, numbered 1..M.  Basis states
are occupation bitstrings encoded as integers with mode k stored in bit
k-1, so ``|n1 n2 ... nM⟩`` has index ``sum_k n_k * 2**(k-1)`` and kets
render mode 1 leftmost.  Applying a ladder operator on mode k multiplies
each basis term by -1 for every occupied lower mode whose species
anticommutes with mode k's species.  Hops (annihilate then create)
additionally report the occupied anticommuting count strictly between
their endpoints, and a :class:`SignLedger` collects one record per
elementary operation so every acquired sign can be attributed.

All operations are pure: they return new values and never mutate their
inputs.  Annihilating an empty mode (or creating into an occupied one)
sends that term to zero; a state whose every term vanished is the flagged
zero vector, which is a legal value rather than an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import kernels

PRUNE_THRESHOLD = 1e-15
DEFAULT_MAX_MODES = 28

CREATE = "create"
ANNIHILATE = "annihilate"


class StatisticsMatrix:
    """Symmetric matrix of +/-1 commutation signs over particle species.

    Entry -1 means ladder operators of the two species anticommute, +1
    that they commute.  A -1 diagonal marks an exclusion (fermionic)
    species; +1 diagonal species are hardcore bosons, which the register
    also caps at single occupancy.
    """

    def __init__(self, signs, labels: Sequence[str] | None = None):
        signs = np.asarray(signs, dtype=np.int8)
        if signs.ndim != 2 or signs.shape[0] != signs.shape[1]:
            raise ValueError("statistics matrix must be square")
        if not np.array_equal(signs, signs.T):
            raise ValueError("statistics matrix must be symmetric")
        if not np.all(np.isin(signs, (-1, 1))):
            raise ValueError("statistics entries must be +1 or -1")
        self.signs = signs
        self.signs.setflags(write=False)
        if labels is None:
            labels = tuple(f"s{i}" for i in range(signs.shape[0]))
        self.labels = tuple(labels)
        if len(self.labels) != signs.shape[0]:
            raise ValueError("one label per species required")

    @classmethod
    def fermionic(cls) -> "StatisticsMatrix":
        return cls([[-1]], labels=("f",))

    @classmethod
    def hardcore_bosonic(cls) -> "StatisticsMatrix":
        return cls([[1]], labels=("b",))

    @property
    def n_species(self) -> int:
        return self.signs.shape[0]

    def sign(self, a: int, b: int) -> int:
        return int(self.signs[a, b])

    def __eq__(self, other):
        return (
            isinstance(other, StatisticsMatrix)
            and self.labels == other.labels
            and np.array_equal(self.signs, other.signs)
        )

    def __repr__(self):
        return f"StatisticsMatrix({self.signs.tolist()}, labels={self.labels})"


class RegisterLayout:
    """Immutable register of modes with a species assignment and statistics.

    The global 1..M mode ordering is the sign convention: every ladder
    operator on mode k strings a -1 over each occupied mode below k whose
    species anticommutes with mode k's species.
    """

    def __init__(
        self,
        species_of: Sequence[int],
        statistics: StatisticsMatrix,
        max_modes: int = DEFAULT_MAX_MODES,
    ):
        species = np.asarray(species_of, dtype=np.int64)
        if species.ndim != 1 or species.shape[0] < 1:
            raise ValueError("species_of must be a nonempty 1-d sequence")
        modes = int(species.shape[0])
        if modes > max_modes:
            raise ValueError(f"register of {modes} modes exceeds the fast-path cap of {max_modes}")
        if species.min() < 0 or species.max() >= statistics.n_species:
            raise ValueError("species id out of range of the statistics matrix")
        self.modes = modes
        self.species_of = species
        self.species_of.setflags(write=False)
        self.statistics = statistics
        anti = np.zeros(statistics.n_species, dtype=np.int64)
        for s in range(statistics.n_species):
            mask = 0
            for k in range(modes):
                if statistics.signs[species[k], s] == -1:
                    mask |= 1 << k
            anti[s] = mask
        self._anti_by_species = anti
        self.prefix_anti_mask = np.array(
            [anti[species[k]] & ((1 << k) - 1) for k in range(modes)], dtype=np.int64
        )
        self.prefix_anti_mask.setflags(write=False)

    @classmethod
    def fermionic(cls, modes: int) -> "RegisterLayout":
        """Single anticommuting species on every mode."""
        return cls([0] * modes, StatisticsMatrix.fermionic())

    @classmethod
    def hardcore_bosonic(cls, modes: int) -> "RegisterLayout":
        """Single commuting species, still capped at one particle per mode."""
        return cls([0] * modes, StatisticsMatrix.hardcore_bosonic())

    @classmethod
    def mixed(
        cls,
        assignment: str,
        overrides: dict[tuple[str, str], int] | None = None,
    ) -> "RegisterLayout":
        """Multi-species register from a one-letter-per-mode assignment.

        Every species pair (diagonal included) anticommutes by default;
        ``overrides`` flips chosen pairs to +1/-1, e.g.
        ``mixed("aabb", {("a", "b"): +1})``.
        """
        if not assignment or not assignment.isalpha():
            raise ValueError("assignment must be one letter per mode")
        labels: list[str] = []
        for ch in assignment:
            if ch not in labels:
                labels.append(ch)
        signs = -np.ones((len(labels), len(labels)), dtype=np.int8)
        for (a, b), value in (overrides or {}).items():
            if a not in labels or b not in labels:
                raise ValueError(f"override names unknown species: {(a, b)}")
            if value not in (-1, 1):
                raise ValueError("override values must be +1 or -1")
            ia, ib = labels.index(a), labels.index(b)
            signs[ia, ib] = value
            signs[ib, ia] = value
        statistics = StatisticsMatrix(signs, labels=tuple(labels))
        return cls([labels.index(ch) for ch in assignment], statistics)

    def check_mode(self, mode: int) -> None:
        if not 1 <= mode <= self.modes:
            raise ValueError(f"mode {mode} outside register 1..{self.modes}")

    def mode_species(self, mode: int) -> int:
        self.check_mode(mode)
        return int(self.species_of[mode - 1])

    def species_label(self, mode: int) -> str:
        return self.statistics.labels[self.mode_species(mode)]

    def between_anti_mask(self, src: int, dst: int) -> int:
        """Bits strictly between two modes that anticommute with dst's species."""
        self.check_mode(src)
        self.check_mode(dst)
        lo, hi = sorted((src - 1, dst - 1))
        window = ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)
        return int(self._anti_by_species[self.species_of[dst - 1]]) & window

    @property
    def dimension(self) -> int:
        return 1 << self.modes

    def describe(self) -> str:
        if self.statistics.n_species == 1:
            kind = "fermion" if self.statistics.sign(0, 0) == -1 else "hardcore-boson"
            return f"{kind} x{self.modes}"
        assignment = "".join(self.statistics.labels[s] for s in self.species_of)
        pairs = ",".join(
            f"{self.statistics.labels[a]}{self.statistics.labels[b]}={self.statistics.sign(a, b):+d}"
            for a in range(self.statistics.n_species)
            for b in range(a, self.statistics.n_species)
        )
        return f"mixed:{assignment}[{pairs}]"

    def __eq__(self, other):
        return (
            isinstance(other, RegisterLayout)
            and self.modes == other.modes
            and np.array_equal(self.species_of, other.species_of)
            and self.statistics == other.statistics
        )

    def __repr__(self):
        return f"RegisterLayout({self.describe()})"


def format_ket(index: int, modes: int) -> str:
    bits = "".join("1" if (index >> k) & 1 else "0" for k in range(modes))
    return f"|{bits}⟩"


def parse_ket(text: str) -> tuple[int, int]:
    """Parse ``|1010⟩`` or bare ``1010`` into (index, modes); mode 1 leftmost."""
    raw = text.strip()
    if raw.startswith("|"):
        raw = raw[1:]
    if raw.endswith("⟩") or raw.endswith(">"):
        raw = raw[:-1]
    if not raw or any(ch not in "01" for ch in raw):
        raise ValueError(f"not an occupation ket: {text!r}")
    index = 0
    for k, ch in enumerate(raw):
        if ch == "1":
            index |= 1 << k
    return index, len(raw)


@dataclass(frozen=True)
class BasisState:
    """Definite occupation pattern, e.g. ``|1010⟩``."""

    index: int
    modes: int

    def __post_init__(self):
        if self.modes < 1:
            raise ValueError("modes must be positive")
        if not 0 <= self.index < (1 << self.modes):
            raise ValueError(f"index {self.index} out of range for {self.modes} modes")

    @classmethod
    def from_ket(cls, text: str, modes: int | None = None) -> "BasisState":
        index, width = parse_ket(text)
        if modes is not None and modes != width:
            raise ValueError(f"ket {text!r} has {width} modes, expected {modes}")
        return cls(index, width)

    @classmethod
    def from_occupations(cls, bits: Sequence[int]) -> "BasisState":
        index = 0
        for k, n in enumerate(bits):
            if n not in (0, 1):
                raise ValueError("occupations must be 0 or 1")
            if n:
                index |= 1 << k
        return cls(index, len(bits))

    def occupations(self) -> tuple[int, ...]:
        return tuple((self.index >> k) & 1 for k in range(self.modes))

    def occupied_modes(self) -> tuple[int, ...]:
        return tuple(k + 1 for k in range(self.modes) if (self.index >> k) & 1)

    @property
    def particle_count(self) -> int:
        return bin(self.index).count("1")

    def __str__(self):
        return format_ket(self.index, self.modes)


@dataclass(frozen=True)
class LadderOp:
    """One creation or annihilation operator on a mode."""

    kind: str
    mode: int

    def __post_init__(self):
        if self.kind not in (CREATE, ANNIHILATE):
            raise ValueError(f"unknown ladder kind {self.kind!r}")
        if self.mode < 1:
            raise ValueError("mode indices are 1-based")

    def symbol(self) -> str:
        return f"f{self.mode}+" if self.kind == CREATE else f"f{self.mode}-"


def create(mode: int) -> LadderOp:
    return LadderOp(CREATE, mode)


def annihilate(mode: int) -> LadderOp:
    return LadderOp(ANNIHILATE, mode)


@dataclass(frozen=True)
class OperatorString:
    """Product of ladder operators written left to right.

    As in operator-product notation, the rightmost factor acts first:
    ``OperatorString((create(2), annihilate(1)))`` applies ``f1-`` and
    then ``f2+``.  The empty string is the identity.
    """

    ops: tuple[LadderOp, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))

    def __len__(self):
        return len(self.ops)

    def __iter__(self) -> Iterator[LadderOp]:
        return iter(self.ops)

    def __str__(self):
        return " ".join(op.symbol() for op in self.ops) if self.ops else "1"


@dataclass(frozen=True)
class Hop:
    """Transport of one particle: annihilate at src, then create at dst."""

    src: int
    dst: int

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError("hop endpoints must differ")
        if self.src < 1 or self.dst < 1:
            raise ValueError("mode indices are 1-based")

    def __str__(self):
        return f"{self.src}->{self.dst}"


@dataclass(frozen=True)
class SignLedgerEntry:
    """Sign acquired by one elementary operation.

    ``interval_parity`` counts the occupied anticommuting modes strictly
    between a hop's endpoints at application time (for ladder operators,
    below the operator's mode); ``wrap`` flags hops joining the first and
    last mode of the register.  ``src``/``dst`` are populated for hops
    only and are not part of the serialized row.
    """

    step: int
    op: str
    sign: int
    interval_parity: int
    wrap: bool
    src: int | None = None
    dst: int | None = None

    def to_row(self) -> dict:
        return {
            "step": self.step,
            "op": self.op,
            "sign": self.sign,
            "interval_parity": self.interval_parity,
            "wrap": self.wrap,
        }


class SignLedger:
    """Ordered record of the +/-1 factors acquired along one branch."""

    def __init__(self):
        self.entries: list[SignLedgerEntry] = []
        self._steps = 0

    def new_step(self) -> int:
        self._steps += 1
        return self._steps

    def record(self, **kwargs) -> None:
        self.entries.append(SignLedgerEntry(**kwargs))

    def sign_product(self) -> int:
        product = 1
        for entry in self.entries:
            product *= entry.sign
        return product

    def to_rows(self) -> list[dict]:
        return [entry.to_row() for entry in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self) -> Iterator[SignLedgerEntry]:
        return iter(self.entries)


def _format_amplitude(amp: complex) -> str:
    if amp == 1:
        return ""
    if amp == -1:
        return "-"
    if amp.imag == 0:
        return f"({amp.real:.12g})"
    if amp.real == 0:
        return f"({amp.imag:.12g}j)"
    return f"({amp:.12g})"


class StateVector:
    """Sparse complex amplitudes over basis indices of one register.

    Entries are kept sorted by basis index with magnitudes >= 1e-15;
    duplicates passed to the constructor are merged.  A vector whose every
    entry vanished is the zero vector, flagged by :attr:`is_zero`.
    """

    __slots__ = ("layout", "indices", "amplitudes", "norm")

    def __init__(self, layout: RegisterLayout, indices, amplitudes):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.size and not np.all(np.isfinite(amplitudes)):
            raise ValueError("amplitudes must be finite")
        idx, amp = kernels.coalesce(indices, amplitudes, PRUNE_THRESHOLD)
        if idx.shape[0]:
            if idx[0] < 0 or idx[-1] >= layout.dimension:
                raise ValueError("basis index out of range for layout")
        idx.setflags(write=False)
        amp.setflags(write=False)
        self.layout = layout
        self.indices = idx
        self.amplitudes = amp
        self.norm = float(np.linalg.norm(amp))

    @classmethod
    def zero(cls, layout: RegisterLayout) -> "StateVector":
        return cls(layout, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.complex128))

    @classmethod
    def from_basis_state(cls, layout: RegisterLayout, state: "BasisState | str | int") -> "StateVector":
        if isinstance(state, str):
            state = BasisState.from_ket(state, modes=layout.modes)
        if isinstance(state, BasisState):
            if state.modes != layout.modes:
                raise ValueError("basis state width does not match layout")
            index = state.index
        else:
            index = int(state)
        return cls(layout, np.array([index], dtype=np.int64), np.array([1.0 + 0j]))

    @classmethod
    def from_terms(cls, layout: RegisterLayout, terms: dict[int, complex]) -> "StateVector":
        idx = np.fromiter(terms.keys(), dtype=np.int64, count=len(terms))
        amp = np.fromiter(terms.values(), dtype=np.complex128, count=len(terms))
        return cls(layout, idx, amp)

    @classmethod
    def from_dense(cls, layout: RegisterLayout, vector) -> "StateVector":
        vector = np.asarray(vector, dtype=np.complex128)
        if vector.shape != (layout.dimension,):
            raise ValueError("dense vector length must be 2**modes")
        idx = np.flatnonzero(np.abs(vector) >= PRUNE_THRESHOLD)
        return cls(layout, idx.astype(np.int64), vector[idx])

    @property
    def is_zero(self) -> bool:
        return self.indices.shape[0] == 0

    @property
    def support_size(self) -> int:
        return int(self.indices.shape[0])

    def amplitude(self, state: "BasisState | int") -> complex:
        index = state.index if isinstance(state, BasisState) else int(state)
        pos = np.searchsorted(self.indices, index)
        if pos < self.indices.shape[0] and self.indices[pos] == index:
            return complex(self.amplitudes[pos])
        return 0j

    def terms(self) -> Iterator[tuple[BasisState, complex]]:
        for index, amp in zip(self.indices.tolist(), self.amplitudes.tolist()):
            yield BasisState(index, self.layout.modes), amp

    def normalized(self) -> "StateVector":
        if self.is_zero:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.layout, self.indices, self.amplitudes / self.norm)

    def to_dense(self, max_modes: int = 24) -> np.ndarray:
        if self.layout.modes > max_modes:
            raise ValueError(f"dense conversion capped at {max_modes} modes")
        dense = np.zeros(self.layout.dimension, dtype=np.complex128)
        dense[self.indices] = self.amplitudes
        return dense

    def format(self, max_terms: int = 8) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for index, amp in zip(self.indices.tolist(), self.amplitudes.tolist()):
            parts.append(_format_amplitude(amp) + format_ket(index, self.layout.modes))
            if len(parts) == max_terms and self.support_size > max_terms:
                parts.append(f"... ({self.support_size} terms)")
                break
        return " + ".join(parts)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"StateVector({self.format(max_terms=4)})"


def _require_same_layout(a: StateVector, b: StateVector) -> None:
    if a.layout != b.layout:
        raise ValueError("state vectors live on different layouts")


def jw_sign(state: "BasisState | int", mode: int, layout: RegisterLayout) -> int:
    """String sign a ladder operator on ``mode`` picks up from ``state``.

    The product of the statistics signs between mode's species and every
    occupied lower mode; +1 when nothing below anticommutes.
    """
    layout.check_mode(mode)
    index = state.index if isinstance(state, BasisState) else int(state)
    prefix = index & int(layout.prefix_anti_mask[mode - 1])
    return -1 if bin(prefix).count("1") & 1 else 1


def apply_ladder(op: LadderOp, psi: StateVector, ledger: SignLedger | None = None) -> StateVector:
    """Apply one ladder operator; illegal terms vanish, zero vector allowed."""
    layout = psi.layout
    layout.check_mode(op.mode)
    bit_mask = 1 << (op.mode - 1)
    prefix_mask = int(layout.prefix_anti_mask[op.mode - 1])
    out_idx, out_amp, counts = kernels.ladder_contributions(
        psi.indices, psi.amplitudes, bit_mask, prefix_mask, op.kind == CREATE
    )
    result = StateVector(layout, out_idx, out_amp)
    if ledger is not None:
        step = ledger.new_step()
        for count in sorted(set(counts.tolist())):
            ledger.record(
                step=step,
                op=op.symbol(),
                sign=-1 if count & 1 else 1,
                interval_parity=int(count),
                wrap=False,
            )
    return result


def apply_operator_string(s: OperatorString, psi: StateVector, ledger: SignLedger | None = None) -> StateVector:
    """Apply an operator string, rightmost factor first."""
    for op in reversed(s.ops):
        psi = apply_ladder(op, psi, ledger)
    return psi


def apply_hop(hop: Hop, psi: StateVector, ledger: SignLedger | None = None) -> StateVector:
    """Move one particle from hop.src to hop.dst.

    Records one ledger entry per surviving (sign, interval count) class;
    for the registers used by the named experiments the recorded sign
    always equals ``(-1)**interval_parity``.
    """
    layout = psi.layout
    layout.check_mode(hop.src)
    layout.check_mode(hop.dst)
    src_mask = 1 << (hop.src - 1)
    dst_mask = 1 << (hop.dst - 1)
    out_idx, out_amp, counts, signs = kernels.hop_contributions(
        psi.indices,
        psi.amplitudes,
        src_mask,
        dst_mask,
        int(layout.prefix_anti_mask[hop.src - 1]),
        int(layout.prefix_anti_mask[hop.dst - 1]),
        layout.between_anti_mask(hop.src, hop.dst),
    )
    result = StateVector(layout, out_idx, out_amp)
    if ledger is not None:
        step = ledger.new_step()
        wrap = {hop.src, hop.dst} == {1, layout.modes}
        for sign, count in sorted(set(zip(signs.tolist(), counts.tolist()))):
            ledger.record(
                step=step,
                op=f"hop {hop}",
                sign=int(sign),
                interval_parity=int(count),
                wrap=wrap,
                src=hop.src,
                dst=hop.dst,
            )
    return result


def apply_hop_sequence(hops: Sequence[Hop], psi: StateVector) -> tuple[StateVector, SignLedger]:
    """Apply hops strictly in list order, recording every acquired sign."""
    ledger = SignLedger()
    for hop in hops:
        psi = apply_hop(hop, psi, ledger)
    return psi, ledger


def inner_product(psi: StateVector, phi: StateVector) -> complex:
    """⟨psi|phi⟩ with conjugation on psi; exact over stored entries."""
    _require_same_layout(psi, phi)
    common, ia, ib = np.intersect1d(
        psi.indices, phi.indices, assume_unique=True, return_indices=True
    )
    if common.shape[0] == 0:
        return 0j
    return complex(np.vdot(psi.amplitudes[ia], phi.amplitudes[ib]))


def _next_combination(v: int) -> int:
    # Gosper's hack: next integer with the same popcount.
    t = (v | (v - 1)) + 1
    return t | ((((t & -t) // (v & -v)) >> 1) - 1)


def sector_indices(modes: int, particles: int) -> np.ndarray:
    """Ascending basis indices of the fixed-particle-number sector."""
    if not 0 <= particles <= modes:
        raise ValueError(f"particle count {particles} outside 0..{modes}")
    if particles == 0:
        return np.zeros(1, dtype=np.int64)
    out = np.empty(math.comb(modes, particles), dtype=np.int64)
    v = (1 << particles) - 1
    limit = 1 << modes
    i = 0
    while v < limit:
        out[i] = v
        i += 1
        v = _next_combination(v)
    return out


def enumerate_sector(modes: int, particles: int) -> list[BasisState]:
    """All C(modes, particles) basis states, ascending by index."""
    return [BasisState(int(i), modes) for i in sector_indices(modes, particles)]
