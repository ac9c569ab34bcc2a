"""Dense-matrix ground truth for circuits and Pauli exponentials.

Qubit 0 is the leftmost Kronecker factor, so ``"XZ"`` is ``kron(X, Z)``.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from .circuit import Circuit, Gate
from .pauli import PauliExponential, PauliGadget

MAX_QUBITS = 12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

V_MAT = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
S_MAT = np.array([[1, 0], [0, 1j]], dtype=complex)
CNOT_MAT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def gate_matrix(gate: Gate) -> np.ndarray:
    if gate.kind == "V":
        return V_MAT
    if gate.kind == "Vdg":
        return V_MAT.conj().T
    if gate.kind == "S":
        return S_MAT
    if gate.kind == "Sdg":
        return S_MAT.conj().T
    if gate.kind == "CNOT":
        return CNOT_MAT
    return rz_matrix(gate.angle)


def _guard(n: int) -> None:
    if n > MAX_QUBITS:
        raise ValueError(f"dense oracle limited to {MAX_QUBITS} qubits, got {n}")


def apply_gate(u: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Left-multiply the 2^n x 2^n matrix ``u`` by ``gate`` embedded on its qubits."""
    k = len(gate.qubits)
    dim = u.shape[1]
    t = u.reshape((2,) * n + (dim,))
    g = gate_matrix(gate).reshape((2,) * (2 * k))
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), list(gate.qubits)))
    # tensordot puts the gate's output axes first; move them back into place
    t = np.moveaxis(t, list(range(k)), list(gate.qubits))
    return t.reshape(2**n, dim)


def circuit_unitary(c: Circuit) -> np.ndarray:
    _guard(c.n_qubits)
    u = np.eye(2**c.n_qubits, dtype=complex)
    for g in c.gates:
        u = apply_gate(u, g, c.n_qubits)
    return u


def pauli_matrix(string: str) -> np.ndarray:
    _guard(len(string))
    return reduce(np.kron, (PAULI[c] for c in string), np.eye(1, dtype=complex))


def gadget_unitary(g: PauliGadget) -> np.ndarray:
    p = pauli_matrix(g.string)
    return np.cos(g.angle) * np.eye(p.shape[0]) - 1j * np.sin(g.angle) * p


def exponential_unitary(e: PauliExponential, order: Sequence[int] | None = None) -> np.ndarray:
    """Product of gadget unitaries, ``order[0]`` applied first (leftmost factor applied last)."""
    _guard(e.n_qubits)
    if order is None:
        order = range(len(e.gadgets))
    order = list(order)
    if sorted(order) != sorted(set(order)) or any(not 0 <= i < len(e.gadgets) for i in order):
        raise ValueError(f"bad gadget order {order}")
    u = np.eye(2**e.n_qubits, dtype=complex)
    for i in order:
        u = gadget_unitary(e.gadgets[i]) @ u
    return u


def equiv_up_to_phase(u: np.ndarray, w: np.ndarray, tol: float = 1e-9) -> bool:
    if u.shape != w.shape:
        raise ValueError(f"shape mismatch {u.shape} vs {w.shape}")
    k = np.unravel_index(np.argmax(np.abs(w)), w.shape)
    if abs(w[k]) == 0:
        return bool(np.max(np.abs(u)) <= tol)
    lam = u[k] / w[k]
    if abs(lam) == 0:
        return False
    lam /= abs(lam)  # a pure phase; a rescaled u must not pass
    return bool(np.max(np.abs(u - lam * w)) <= tol)


def decode_pauli(m: np.ndarray, n: int, tol: float = 1e-12) -> tuple[str, int]:
    """Identify ``m`` as ``sign * P`` by exhaustive comparison against all 4^n strings."""
    strings = [""]
    for _ in range(n):
        strings = [s + c for s in strings for c in "IXYZ"]
    for s in strings:
        p = pauli_matrix(s)
        for sign in (1, -1):
            if np.max(np.abs(m - sign * p)) <= tol:
                return s, sign
    raise ValueError("matrix is not a signed Pauli string")


def verify_synthesis(
    e: PauliExponential,
    circuit: Circuit,
    mapping: dict[int, int] | None = None,
    order: Sequence[int] | None = None,
    tol: float = 1e-9,
) -> bool:
    """Check a physical circuit against ``e`` applied in ``order``.

    Only physical qubits that are mapped or touched by a gate are simulated;
    the rest are idle by construction. Gadgets missing from ``order`` must be
    all-identity (they only add a global phase).
    """
    n_log = e.n_qubits
    mapping = {l: l for l in range(n_log)} if mapping is None else dict(mapping)
    if sorted(mapping) != list(range(n_log)):
        raise ValueError(f"mapping covers logical qubits {sorted(mapping)}, expected 0..{n_log - 1}")
    phys = list(mapping.values())
    if len(set(phys)) != len(phys) or any(not 0 <= p < circuit.n_qubits for p in phys):
        raise ValueError(f"mapping {mapping} is not injective into {circuit.n_qubits} qubits")
    order = list(range(len(e.gadgets))) if order is None else [int(i) for i in order]
    listed = set(order)
    for i, g in enumerate(e.gadgets):
        if i not in listed and any(c != "I" for c in g.string):
            raise ValueError(f"gadget {i} is missing from the order")

    active = sorted(set(phys) | {q for gate in circuit.gates for q in gate.qubits})
    _guard(len(active))
    local = {p: i for i, p in enumerate(active)}
    small = circuit.relabel(local, len(active)) if active else Circuit(0, [])
    embedded = []
    for g in e.gadgets:
        s = ["I"] * len(active)
        for l, c in enumerate(g.string):
            s[local[mapping[l]]] = c
        embedded.append(PauliGadget("".join(s), g.angle, g.original_index))
    if not active:
        return True
    target = exponential_unitary(PauliExponential(embedded, len(active)), order)
    return equiv_up_to_phase(circuit_unitary(small), target, tol)
