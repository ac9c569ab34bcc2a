"""Binary-symplectic Clifford tableau.

Row ``i`` holds the image of ``X_i`` and row ``n + i`` the image of ``Z_i``
under conjugation ``P -> U P U^dag`` by the represented Clifford ``U``.
Each row is ``(-1)^r`` times a Pauli string whose ``(1, 1)`` letters are ``Y``.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate
from .pauli import _fwd_cnot, _fwd_single, letter_from_bits
from .topology import CouplingGraph


def _phase_g(x1, z1, x2, z2):
    """Exponent e with P1 . P2 == i^e P3, per qubit (Aaronson-Gottesman)."""
    x1, z1, x2, z2 = (a.astype(np.int64) for a in (x1, z1, x2, z2))
    return np.where(
        x1 & z1,
        z2 - x2,
        np.where(x1 == 1, z2 * (2 * x2 - 1), np.where(z1 == 1, x2 * (1 - 2 * z2), 0)),
    )


class CliffordTableau:
    def __init__(self, x: np.ndarray, z: np.ndarray, r: np.ndarray):
        self.x = np.asarray(x, dtype=np.uint8)
        self.z = np.asarray(z, dtype=np.uint8)
        self.r = np.asarray(r, dtype=np.uint8)
        self.n = self.x.shape[1]

    @classmethod
    def identity(cls, n: int) -> CliffordTableau:
        if n < 1:
            raise ValueError("tableau needs n >= 1")
        eye = np.eye(2 * n, dtype=np.uint8)
        return cls(eye[:, :n].copy(), eye[:, n:].copy(), np.zeros(2 * n, dtype=np.uint8))

    @classmethod
    def from_circuit(cls, circuit: Circuit, n: int | None = None) -> CliffordTableau:
        t = cls.identity(circuit.n_qubits if n is None else n)
        for g in circuit.gates:
            if not g.is_clifford:
                raise ValueError(f"non-Clifford gate {g!r} in circuit")
            t.append(g)
        return t

    def copy(self) -> CliffordTableau:
        return CliffordTableau(self.x.copy(), self.z.copy(), self.r.copy())

    @property
    def matrix(self) -> np.ndarray:
        return np.hstack([self.x, self.z])

    @property
    def signs(self) -> np.ndarray:
        return self.r

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CliffordTableau)
            and self.n == other.n
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
            and np.array_equal(self.r, other.r)
        )

    def __repr__(self) -> str:
        rows = [self.row_label(i) for i in range(2 * self.n)]
        return f"CliffordTableau(n={self.n}, rows={rows})"

    def row_label(self, i: int) -> str:
        letters = "".join(letter_from_bits(a, b) for a, b in zip(self.x[i], self.z[i]))
        return ("-" if self.r[i] else "+") + letters

    def is_identity(self) -> bool:
        return self == CliffordTableau.identity(self.n)

    def is_symplectic(self) -> bool:
        n = self.n
        m = self.matrix.astype(np.int64)
        omega = np.zeros((2 * n, 2 * n), dtype=np.int64)
        omega[:n, n:] = np.eye(n, dtype=np.int64)
        omega[n:, :n] = np.eye(n, dtype=np.int64)
        return bool(np.array_equal((m @ omega @ m.T) % 2, omega))

    def _check(self, gate: Gate) -> None:
        if not gate.is_clifford:
            raise ValueError(f"non-Clifford gate {gate!r}")
        if max(gate.qubits) >= self.n:
            raise IndexError(f"{gate!r} out of range for {self.n}-qubit tableau")

    def append(self, gate: Gate) -> CliffordTableau:
        """In place: ``U <- gate . U`` (gate applied after). Column update."""
        self._check(gate)
        if gate.kind == "CNOT":
            c, t = gate.qubits
            xc, zc, xt, zt, flip = _fwd_cnot(self.x[:, c], self.z[:, c], self.x[:, t], self.z[:, t])
            self.x[:, c], self.z[:, c], self.x[:, t], self.z[:, t] = xc, zc, xt, zt
        else:
            q = gate.qubits[0]
            self.x[:, q], self.z[:, q], flip = _fwd_single(gate.kind, self.x[:, q], self.z[:, q])
        self.r ^= flip
        return self

    def _rowmul(self, dest: int, a: int, b: int, i_power: int) -> None:
        """row[dest] <- i^i_power . row[a] . row[b]."""
        e = i_power + 2 * int(self.r[a]) + 2 * int(self.r[b])
        e += int(_phase_g(self.x[a], self.z[a], self.x[b], self.z[b]).sum())
        e %= 4
        if e % 2:
            raise ArithmeticError("row product is not Hermitian; tableau is corrupt")
        self.x[dest] = self.x[a] ^ self.x[b]
        self.z[dest] = self.z[a] ^ self.z[b]
        self.r[dest] = e // 2

    def prepend(self, gate: Gate) -> CliffordTableau:
        """In place: ``U <- U . gate`` (gate applied before). Row update."""
        self._check(gate)
        n = self.n
        if gate.kind == "CNOT":
            c, t = gate.qubits
            # CNOT maps X_c -> X_c X_t and Z_t -> Z_c Z_t
            self._rowmul(c, c, t, 0)
            self._rowmul(n + t, n + c, n + t, 0)
            return self
        q = gate.qubits[0]
        # Y = i X Z; S: X -> Y, Sdg: X -> -Y, V: Z -> -Y, Vdg: Z -> Y
        if gate.kind == "S":
            self._rowmul(q, q, n + q, 1)
        elif gate.kind == "Sdg":
            self._rowmul(q, q, n + q, 3)
        elif gate.kind == "V":
            self._rowmul(n + q, q, n + q, 3)
        else:
            self._rowmul(n + q, q, n + q, 1)
        return self

    def synthesize(self, graph: CouplingGraph) -> Circuit:
        return synthesize(self, graph)


def identity(n: int) -> CliffordTableau:
    return CliffordTableau.identity(n)


def append_gate(t: CliffordTableau, gate: Gate) -> CliffordTableau:
    return t.copy().append(gate)


def prepend_gate(t: CliffordTableau, gate: Gate) -> CliffordTableau:
    return t.copy().prepend(gate)


def from_circuit(c: Circuit) -> CliffordTableau:
    return CliffordTableau.from_circuit(c)


# -- architecture-aware synthesis ---------------------------------------------

# single-qubit rotations (time order) taking a letter, as (x, z) bits, onto Z or X
_TO_Z = {(1, 0): ("S", "V"), (1, 1): ("V",), (0, 1): ()}
_TO_X = {(0, 1): ("V", "S"), (1, 1): ("S",), (1, 0): ()}


def _is_connected_without(graph: CouplingGraph, nodes: set[int], v: int) -> bool:
    rest = nodes - {v}
    if not rest:
        return True
    start = min(rest)
    return len(graph.bfs_order(start, allowed=rest)) == len(rest)


def _pick_pivot(graph: CouplingGraph, nodes: set[int]) -> int:
    def local_degree(v):
        return sum(1 for w in graph.neighbors(v) if w in nodes)

    for v in sorted(nodes, key=lambda v: (local_degree(v), v)):
        if _is_connected_without(graph, nodes, v):
            return v
    raise AssertionError("a connected graph always has a non-cut vertex")


def _reduce_row(work: CliffordTableau, row: int, pivot: int, parent: dict, emit, basis: str) -> None:
    """Turn ``row`` into a single ``basis`` letter on ``pivot`` (sign aside).

    Every support qubit is first rotated onto ``basis``, then parities are
    pushed up the BFS tree toward ``pivot`` with CNOTs; empty interior nodes
    are filled first. In the X basis the CNOT directions flip.
    """
    rotate, bits = (_TO_Z, work.z) if basis == "Z" else (_TO_X, work.x)
    for q in list(parent):
        key = (int(work.x[row, q]), int(work.z[row, q]))
        for kind in rotate.get(key, ()):
            emit(Gate(kind, (q,)))
    marked = {pivot}
    for q in parent:
        if bits[row, q]:
            while q not in marked:
                marked.add(q)
                q = parent[q]
    for v in reversed(list(parent)):
        if v == pivot or v not in marked:
            continue
        u = parent[v]
        fill, clear = ((u, v), (v, u)) if basis == "Z" else ((v, u), (u, v))
        if not bits[row, u]:
            emit(Gate("CNOT", fill))
        emit(Gate("CNOT", clear))


def synthesize(t: CliffordTableau, graph: CouplingGraph) -> Circuit:
    """Circuit whose tableau equals ``t`` exactly, with every CNOT on an edge of ``graph``.

    Qubits are eliminated one at a time, always a non-cut vertex of the still
    active subgraph, so the CNOT ladders never leave it. Signs are fixed by a
    final layer of Pauli gates.
    """
    if graph.n_qubits != t.n:
        raise ValueError(f"graph has {graph.n_qubits} qubits, tableau has {t.n}")
    if not t.is_symplectic():
        raise ValueError("tableau is not symplectic")
    n = t.n
    work = t.copy()
    applied: list[Gate] = []

    def emit(g: Gate) -> None:
        work.append(g)
        applied.append(g)

    active = set(range(n))
    while active:
        p = _pick_pivot(graph, active)
        parent = graph.bfs_order(p, allowed=active)
        _reduce_row(work, p, p, parent, emit, "X")
        # the Z row now anticommutes with X_p, so it carries Z or Y on p;
        # V and CNOTs targeting p both leave X_p alone
        _reduce_row(work, n + p, p, parent, emit, "Z")
        active.discard(p)

    body = Circuit(n, [g.inverse() for g in reversed(applied)])
    got = CliffordTableau.from_circuit(body)
    flips = (got.r ^ t.r).astype(np.int64)
    m = got.matrix.astype(np.int64)
    # M^-1 = Omega M^T Omega over GF(2); solve M Omega p = flips
    omega_f = np.concatenate([flips[n:], flips[:n]])
    v = (m.T @ omega_f) % 2
    px, pz = v[:n], v[n:]
    for q in range(n):
        if px[q]:
            body.extend([Gate("V", (q,)), Gate("V", (q,))])
        if pz[q]:
            body.extend([Gate("S", (q,)), Gate("S", (q,))])
    return body
