"""Independent dense-matrix reference for small registers.

Ladder operators are built as explicit 2^M x 2^M matrices (string factor
on every lower anticommuting mode, local raise/lower on the target,
identity elsewhere) with exactly the bit ordering of the fast path, so
every fast-path result can be re-derived by plain matrix algebra.  Slow
by design; capped at 12 modes unless EXCHANGE_LAB_ORACLE_MAX_MODES says
otherwise.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .fock import (
    ANNIHILATE,
    CREATE,
    OperatorString,
    RegisterLayout,
    StateVector,
    annihilate,
    apply_operator_string,
    create,
)

DEFAULT_MAX_ORACLE_MODES = 12
ENV_ORACLE_CAP = "EXCHANGE_LAB_ORACLE_MAX_MODES"

_LOWER = np.array([[0, 1], [0, 0]], dtype=np.complex128)
_RAISE = np.array([[0, 0], [1, 0]], dtype=np.complex128)
_PARITY = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_ID2 = np.eye(2, dtype=np.complex128)


def oracle_mode_cap() -> int:
    """Dense-matrix mode cap; overridable via EXCHANGE_LAB_ORACLE_MAX_MODES."""
    raw = os.environ.get(ENV_ORACLE_CAP)
    if raw is None:
        return DEFAULT_MAX_ORACLE_MODES
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_ORACLE_CAP} must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ValueError(f"{ENV_ORACLE_CAP} must be positive, got {cap}")
    return cap


def _check_cap(modes: int) -> None:
    cap = oracle_mode_cap()
    if modes > cap:
        raise ValueError(
            f"{modes} modes exceeds the dense-oracle cap of {cap} "
            f"(override with {ENV_ORACLE_CAP})"
        )


class DenseOracle:
    """Dense ladder matrices for one layout, with per-instance caching."""

    def __init__(self, layout: RegisterLayout):
        _check_cap(layout.modes)
        self.layout = layout
        self._cache: dict[tuple[str, int], np.ndarray] = {}

    def ladder_matrix(self, mode: int, kind: str) -> np.ndarray:
        self.layout.check_mode(mode)
        if kind not in (CREATE, ANNIHILATE):
            raise ValueError(f"unknown ladder kind {kind!r}")
        key = (kind, mode)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        layout = self.layout
        local = _RAISE if kind == CREATE else _LOWER
        target_species = layout.species_of[mode - 1]
        matrix = np.ones((1, 1), dtype=np.complex128)
        # kron from the highest mode down so mode k lands on bit k-1
        for q in range(layout.modes, 0, -1):
            if q > mode:
                factor = _ID2
            elif q == mode:
                factor = local
            elif layout.statistics.signs[layout.species_of[q - 1], target_species] == -1:
                factor = _PARITY
            else:
                factor = _ID2
            matrix = np.kron(matrix, factor)
        self._cache[key] = matrix
        return matrix

    def string_matrix(self, string: OperatorString) -> np.ndarray:
        matrix = np.eye(self.layout.dimension, dtype=np.complex128)
        for op in string.ops:
            matrix = matrix @ self.ladder_matrix(op.mode, op.kind)
        return matrix

    def apply_string(self, string: OperatorString, vector: np.ndarray) -> np.ndarray:
        out = np.asarray(vector, dtype=np.complex128)
        for op in reversed(string.ops):
            out = self.ladder_matrix(op.mode, op.kind) @ out
        return out

    def apply_hops(self, hops, vector: np.ndarray) -> np.ndarray:
        out = np.asarray(vector, dtype=np.complex128)
        for hop in hops:
            out = self.ladder_matrix(hop.src, ANNIHILATE) @ out
            out = self.ladder_matrix(hop.dst, CREATE) @ out
        return out


def dense_ladder(layout: RegisterLayout, mode: int, kind: str) -> np.ndarray:
    """Dense matrix of one ladder operator in the fast path's bit ordering."""
    return DenseOracle(layout).ladder_matrix(mode, kind)


def dense_string(layout: RegisterLayout, string: OperatorString) -> np.ndarray:
    """Right-to-left matrix product of the string's ladder factors."""
    return DenseOracle(layout).string_matrix(string)


@dataclass
class CrossCheckReport:
    """Outcome of the random string/state fast-vs-dense comparison."""

    modes: int
    trials: int
    seed: int
    max_deviation: float
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "modes": self.modes,
            "trials": self.trials,
            "seed": self.seed,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def cross_check(
    modes: int,
    trials: int,
    seed: int,
    layout: RegisterLayout | None = None,
    max_string_length: int = 8,
) -> CrossCheckReport:
    """Compare the fast path against dense matrices on random workloads.

    Each trial draws a random operator string (length <= 8) and a random
    normalized state, evaluates both routes and tracks the worst amplitude
    deviation.  Deterministic per seed.
    """
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    if layout is None:
        layout = RegisterLayout.fermionic(modes)
    elif layout.modes != modes:
        raise ValueError("layout width disagrees with modes")
    _check_cap(modes)
    oracle = DenseOracle(layout)
    rng = np.random.default_rng(seed)
    dim = layout.dimension
    max_deviation = 0.0
    for _ in range(trials):
        length = int(rng.integers(1, max_string_length + 1))
        ops = tuple(
            create(int(m)) if k else annihilate(int(m))
            for k, m in zip(
                rng.integers(0, 2, size=length), rng.integers(1, modes + 1, size=length)
            )
        )
        string = OperatorString(ops)
        vector = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        vector /= np.linalg.norm(vector)
        fast = apply_operator_string(string, StateVector.from_dense(layout, vector))
        dense = oracle.apply_string(string, vector)
        deviation = float(np.max(np.abs(fast.to_dense() - dense))) if dim else 0.0
        max_deviation = max(max_deviation, deviation)
    return CrossCheckReport(modes=modes, trials=trials, seed=seed, max_deviation=max_deviation)


def dense_expm_hermitian(matrix: np.ndarray) -> np.ndarray:
    """exp(-iH) of a Hermitian matrix via eigendecomposition.

    Rejects non-Hermitian input (max deviation above 1e-12); the result is
    unitary by construction.
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("expected a square matrix")
    hermiticity = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if hermiticity > 1e-12:
        raise ValueError(f"matrix is not Hermitian (deviation {hermiticity:.3e})")
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    phases = np.exp(-1j * eigenvalues)
    return (eigenvectors * phases) @ eigenvectors.conj().T
