import time

import numpy as np
import pytest

from exchange_lab.fock import (
    ANNIHILATE,
    CREATE,
    Hop,
    OperatorString,
    RegisterLayout,
    StateVector,
    annihilate,
    apply_hop_sequence,
    apply_operator_string,
    create,
)
from exchange_lab.oracle import (
    DenseOracle,
    ENV_ORACLE_CAP,
    cross_check,
    dense_expm_hermitian,
    dense_ladder,
    dense_string,
    oracle_mode_cap,
)
from exchange_lab.protocols import (
    HALF_SWAP_BACKWARD_STRING,
    HALF_SWAP_FORWARD_STRING,
)

FERMI4 = RegisterLayout.fermionic(4)


def ket_index(text):
    from exchange_lab.fock import parse_ket

    return parse_ket(text)[0]


# ------------------------------------------------------------- dense ladder


def test_single_mode_annihilation_matrix():
    layout = RegisterLayout.fermionic(1)
    matrix = dense_ladder(layout, 1, ANNIHILATE)
    expected = np.zeros((2, 2))
    expected[0, 1] = 1.0
    assert np.array_equal(matrix, expected)


def test_two_mode_annihilation_carries_the_string_sign():
    layout = RegisterLayout.fermionic(2)
    matrix = dense_ladder(layout, 2, ANNIHILATE)
    # f2 |11⟩ = -|10⟩ and f2 |01⟩ = +|00⟩  (mode 1 leftmost in kets)
    assert matrix[ket_index("10"), ket_index("11")] == -1.0
    assert matrix[ket_index("00"), ket_index("01")] == 1.0
    assert np.count_nonzero(matrix) == 2


def test_dense_anticommutators_vanish():
    layout = RegisterLayout.fermionic(2)
    f1 = dense_ladder(layout, 1, ANNIHILATE)
    f2dag = dense_ladder(layout, 2, CREATE)
    anticommutator = f1 @ f2dag + f2dag @ f1
    assert np.max(np.abs(anticommutator)) <= 1e-14


def test_dense_relations_follow_the_statistics_matrix():
    layouts = (
        RegisterLayout.fermionic(3),
        RegisterLayout.hardcore_bosonic(3),
        RegisterLayout.mixed("aba", {("a", "b"): +1}),
    )
    for layout in layouts:
        oracle = DenseOracle(layout)
        identity = np.eye(layout.dimension)
        for i in range(1, layout.modes + 1):
            for j in range(1, layout.modes + 1):
                sign = layout.statistics.sign(
                    layout.mode_species(i), layout.mode_species(j)
                )
                a = oracle.ladder_matrix(i, ANNIHILATE)
                b_dag = oracle.ladder_matrix(j, CREATE)
                if i == j:
                    # two-level on-site algebra for fermions and hardcore bosons alike
                    relation = a @ b_dag + b_dag @ a - identity
                elif sign == -1:
                    relation = a @ b_dag + b_dag @ a
                else:
                    relation = a @ b_dag - b_dag @ a
                assert np.max(np.abs(relation)) <= 1e-13, (layout.describe(), i, j)


# ------------------------------------------------------------- dense string


def test_dense_string_reproduces_the_transport_routes():
    oracle = DenseOracle(FERMI4)
    start = ket_index("1010")
    end = ket_index("0101")
    forward = oracle.string_matrix(HALF_SWAP_FORWARD_STRING)
    column = forward[:, start]
    assert column[end] == 1.0 and np.count_nonzero(column) == 1
    backward = oracle.string_matrix(HALF_SWAP_BACKWARD_STRING)
    column = backward[:, start]
    assert column[end] == -1.0 and np.count_nonzero(column) == 1


def test_dense_empty_string_is_identity():
    assert np.array_equal(dense_string(FERMI4, OperatorString()), np.eye(16))


def test_dense_route_confirms_every_small_example():
    oracle = DenseOracle(FERMI4)
    cases = [
        (OperatorString((annihilate(2),)), "0100"),
        (OperatorString((annihilate(2),)), "1100"),
        (OperatorString((create(2),)), "0100"),
        (HALF_SWAP_FORWARD_STRING, "1010"),
        (HALF_SWAP_BACKWARD_STRING, "1010"),
        (OperatorString((annihilate(4), create(3), annihilate(2), create(1))), "0101"),
    ]
    for string, ket in cases:
        start = StateVector.from_basis_state(FERMI4, ket)
        fast = apply_operator_string(string, start).to_dense()
        dense = oracle.apply_string(string, start.to_dense())
        assert np.max(np.abs(fast - dense)) <= 1e-12
    hop_cases = [
        ([Hop(1, 2)], "1010"),
        ([Hop(1, 4)], "1010"),
        ([Hop(2, 3)], "0101"),
        ([Hop(1, 2), Hop(3, 4), Hop(2, 3), Hop(4, 1)], "1010"),
    ]
    for hops, ket in hop_cases:
        start = StateVector.from_basis_state(FERMI4, ket)
        fast, _ = apply_hop_sequence(hops, start)
        dense = oracle.apply_hops(hops, start.to_dense())
        assert np.max(np.abs(fast.to_dense() - dense)) <= 1e-12


# -------------------------------------------------------------- cross check


def test_cross_check_small_register():
    report = cross_check(4, 1000, seed=7)
    assert report.passed
    assert report.max_deviation <= 1e-12
    assert report.to_dict()["trials"] == 1000


def test_cross_check_ten_modes_within_budget():
    start = time.perf_counter()
    report = cross_check(10, 200, seed=11)
    elapsed = time.perf_counter() - start
    assert report.passed
    assert elapsed < 60.0


def test_cross_check_zero_trials_trivially_passes():
    report = cross_check(6, 0, seed=1)
    assert report.passed and report.max_deviation == 0.0


def test_cross_check_mixed_statistics():
    layout = RegisterLayout.mixed("abab", {("a", "b"): +1})
    report = cross_check(4, 200, seed=13, layout=layout)
    assert report.passed


# -------------------------------------------------------------------- expm


def test_expm_of_zero_is_identity():
    assert np.allclose(dense_expm_hermitian(np.zeros((4, 4))), np.eye(4), atol=1e-14)


def test_expm_two_level_closed_form():
    coupling = np.array([[0, 1], [1, 0]], dtype=complex)
    for t in (0.3, 1.0, 2.2):
        unitary = dense_expm_hermitian(t * coupling)
        expected = np.cos(t) * np.eye(2) - 1j * np.sin(t) * coupling
        assert np.max(np.abs(unitary - expected)) <= 1e-12


def test_expm_result_is_unitary():
    rng = np.random.default_rng(17)
    raw = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
    hermitian = (raw + raw.conj().T) / 2
    unitary = dense_expm_hermitian(hermitian)
    assert np.max(np.abs(unitary.conj().T @ unitary - np.eye(32))) <= 1e-10


def test_expm_rejects_non_hermitian_input():
    with pytest.raises(ValueError):
        dense_expm_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


def test_expm_agrees_with_composed_rotation_limit():
    # six-mode hopping Hamiltonian: the dense exponential matches the
    # fine-step composition of two-level rotations within the order bound
    from exchange_lab.dynamics import HamiltonianSpec, sector_hamiltonian, trotter_evolve

    layout = RegisterLayout.fermionic(6)
    ham = HamiltonianSpec(((1, 2, 1.0), (2, 3, 0.7), (3, 4, 0.4)))
    matrix, basis = sector_hamiltonian(ham, layout, 3)
    unitary = dense_expm_hermitian(matrix * 1.0)
    psi = StateVector.from_basis_state(layout, "101010")
    coefficients = np.zeros(len(basis), dtype=complex)
    coefficients[np.searchsorted(basis, psi.indices)] = psi.amplitudes
    dense_result = unitary @ coefficients

    steps = 1024
    approx = trotter_evolve(ham, 1.0, steps, 2, psi)
    approx_coefficients = np.zeros(len(basis), dtype=complex)
    approx_coefficients[np.searchsorted(basis, approx.indices)] = approx.amplitudes
    deviation = float(np.max(np.abs(approx_coefficients - dense_result)))
    assert deviation <= (1.0 / steps) ** 2  # measured ~2.5e-8 against 9.5e-7


# --------------------------------------------------------------------- cap


def test_oracle_cap_rejects_large_registers():
    layout = RegisterLayout.fermionic(13)
    with pytest.raises(ValueError):
        DenseOracle(layout)
    with pytest.raises(ValueError):
        cross_check(13, 1, seed=1)


def test_oracle_cap_env_override(monkeypatch):
    monkeypatch.setenv(ENV_ORACLE_CAP, "14")
    assert oracle_mode_cap() == 14
    DenseOracle(RegisterLayout.fermionic(13))  # constructs without raising
    monkeypatch.setenv(ENV_ORACLE_CAP, "zero")
    with pytest.raises(ValueError):
        oracle_mode_cap()
    monkeypatch.setenv(ENV_ORACLE_CAP, "0")
    with pytest.raises(ValueError):
        oracle_mode_cap()
