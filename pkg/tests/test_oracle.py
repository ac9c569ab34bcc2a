import math

import numpy as np
import pytest

from sppf.circuit import CNOT, Circuit, Rz, S, V
from sppf.oracle import (
    CNOT_MAT,
    MAX_QUBITS,
    S_MAT,
    V_MAT,
    X,
    Z,
    circuit_unitary,
    decode_pauli,
    equiv_up_to_phase,
    exponential_unitary,
    gadget_unitary,
    pauli_matrix,
    rz_matrix,
    verify_synthesis,
)
from sppf.pauli import PauliExponential, PauliGadget


def test_gate_matrices_are_unitary_and_square_roots():
    for m in (V_MAT, S_MAT, CNOT_MAT):
        assert np.allclose(m @ m.conj().T, np.eye(len(m)))
    assert np.allclose(V_MAT @ V_MAT, X)
    assert np.allclose(S_MAT @ S_MAT, Z)


def test_rz_convention():
    # Rz(theta) = exp(-i theta Z / 2)
    theta = 0.7
    assert np.allclose(rz_matrix(theta), np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]))


def test_qubit_zero_is_leftmost_factor():
    u = circuit_unitary(Circuit(2, [CNOT(0, 1)]))
    assert np.allclose(u, CNOT_MAT)
    assert np.allclose(pauli_matrix("XZ"), np.kron(X, Z))
    u = circuit_unitary(Circuit(2, [V(0)]))
    assert np.allclose(u, np.kron(V_MAT, np.eye(2)))


def test_gadget_unitary_closed_form():
    g = PauliGadget("ZZ", 0.3)
    p = pauli_matrix("ZZ")
    eig, vec = np.linalg.eigh(p)
    expm = vec @ np.diag(np.exp(-0.3j * eig)) @ vec.conj().T
    assert np.allclose(gadget_unitary(g), expm)


def test_single_z_gadget_is_rz():
    u = circuit_unitary(Circuit(1, [Rz(0, 2 * 0.4)]))
    assert equiv_up_to_phase(u, gadget_unitary(PauliGadget("Z", 0.4)))


def test_exponential_order():
    e = PauliExponential([PauliGadget("X", 0.3), PauliGadget("Z", 0.5)], 1)
    a, b = gadget_unitary(e[0]), gadget_unitary(e[1])
    assert np.allclose(exponential_unitary(e), b @ a)
    assert np.allclose(exponential_unitary(e, [1, 0]), a @ b)
    with pytest.raises(ValueError):
        exponential_unitary(e, [0, 0])


def test_equiv_up_to_phase():
    u = pauli_matrix("XY")
    assert equiv_up_to_phase(np.exp(0.4j) * u, u)
    assert not equiv_up_to_phase(0.5 * u, u)
    assert not equiv_up_to_phase(pauli_matrix("XZ"), u)
    with pytest.raises(ValueError):
        equiv_up_to_phase(np.eye(2), np.eye(4))


def test_decode_pauli():
    assert decode_pauli(-pauli_matrix("YI"), 2) == ("YI", -1)
    with pytest.raises(ValueError):
        decode_pauli(np.eye(2) * 1j, 1)


def test_size_guard():
    with pytest.raises(ValueError):
        pauli_matrix("I" * (MAX_QUBITS + 1))


def test_verify_synthesis_hand_built():
    # exp(-i a ZZ) = CNOT . Rz(2a) on target . CNOT
    a = math.pi / 8
    e = PauliExponential([PauliGadget("ZZ", a)], 2)
    good = Circuit(2, [CNOT(0, 1), Rz(1, 2 * a), CNOT(0, 1)])
    assert verify_synthesis(e, good)
    assert not verify_synthesis(e, Circuit(2, [CNOT(0, 1), Rz(1, 2 * a)]))
    # placed on physical qubits 3 and 1 of a larger register
    placed = good.relabel({0: 3, 1: 1}, 5)
    assert verify_synthesis(e, placed, {0: 3, 1: 1})
    assert not verify_synthesis(e, placed)


def test_verify_synthesis_errors():
    e = PauliExponential([PauliGadget("ZZ", 0.1), PauliGadget("XX", 0.1)], 2)
    c = Circuit(2, [S(0)])
    with pytest.raises(ValueError):
        verify_synthesis(e, c, order=[0])
    with pytest.raises(ValueError):
        verify_synthesis(e, c, mapping={0: 0, 1: 0})
