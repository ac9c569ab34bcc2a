"""Initial logical-to-physical placement and the connectivity tree it induces."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliExponential
from .topology import CouplingGraph


@dataclass(frozen=True)
class QubitMapping:
    log_to_phys: dict[int, int]

    def __post_init__(self):
        phys = list(self.log_to_phys.values())
        if len(set(phys)) != len(phys):
            raise ValueError(f"mapping is not injective: {self.log_to_phys}")

    def __getitem__(self, logical: int) -> int:
        return self.log_to_phys[logical]

    def __len__(self) -> int:
        return len(self.log_to_phys)

    @property
    def phys_to_log(self) -> dict[int, int]:
        return {p: l for l, p in self.log_to_phys.items()}

    def as_list(self) -> list[int]:
        return [self.log_to_phys[l] for l in range(len(self.log_to_phys))]

    def to_json(self) -> str:
        return json.dumps({str(l): p for l, p in sorted(self.log_to_phys.items())})

    @classmethod
    def from_json(cls, text: str) -> QubitMapping:
        data = json.loads(text)
        return cls({int(k): int(v) for k, v in data.items()})


@dataclass
class ConnectivityTree:
    root: int
    parent: dict[int, int | None] = field(default_factory=dict)

    def __post_init__(self):
        if not self.parent:
            self.parent = {self.root: None}

    @property
    def nodes(self) -> list[int]:
        return sorted(self.parent)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted((min(v, p), max(v, p)) for v, p in self.parent.items() if p is not None)

    def add(self, node: int, parent: int) -> None:
        if node in self.parent:
            raise ValueError(f"node {node} already in tree")
        if parent not in self.parent:
            raise ValueError(f"parent {parent} not in tree")
        self.parent[node] = parent

    def neighbors(self, v: int) -> list[int]:
        out = [c for c, p in self.parent.items() if p == v]
        if self.parent[v] is not None:
            out.append(self.parent[v])
        return sorted(out)

    def to_parent_array(self, n_physical: int) -> list[int | None]:
        """``-1`` marks the root, ``None`` a physical qubit outside the tree."""
        arr: list[int | None] = [None] * n_physical
        for v, p in self.parent.items():
            arr[v] = -1 if p is None else p
        return arr


def score_pairs(e: PauliExponential) -> np.ndarray:
    """``S[i, j]`` = number of gadgets non-identity on both ``i`` and ``j``."""
    supp = np.array([[c != "I" for c in g.string] for g in e.gadgets], dtype=np.int64)
    if supp.size == 0:
        return np.zeros((e.n_qubits, e.n_qubits), dtype=np.int64)
    return supp.T @ supp


def find_root_physical(g: CouplingGraph, d: np.ndarray | None = None) -> int:
    """Max-degree vertex farthest (in min-distance) from the min-degree vertices."""
    d = g.distances if d is None else d
    degrees = [g.degree(v) for v in range(g.n_qubits)]
    v_max = [v for v in range(g.n_qubits) if degrees[v] == max(degrees)]
    v_min = [v for v in range(g.n_qubits) if degrees[v] == min(degrees)]
    # max() keeps the first (lowest-index) maximiser
    return max(v_max, key=lambda v: min(d[v, u] for u in v_min))


def find_root_logical(e: PauliExponential) -> int:
    counts = [sum(1 for g in e.gadgets if g.string[i] != "I") for i in range(e.n_qubits)]
    return max(range(e.n_qubits), key=lambda i: counts[i])


def build_mapping(e: PauliExponential, g: CouplingGraph) -> tuple[QubitMapping, ConnectivityTree]:
    """Greedy placement that grows a tree from the central physical qubit.

    Each round maps the (logical, physical, mapped-neighbour) triple with the
    highest pair score; ties go to the lexicographically smallest triple. If
    nothing left scores above zero, the frontier qubit nearest the root wins.
    """
    n_log = e.n_qubits
    if n_log > g.n_qubits:
        raise ValueError(f"{n_log} logical qubits exceed {g.n_qubits} physical qubits")
    scores = score_pairs(e)
    d = g.distances
    root_p = find_root_physical(g, d)
    root_l = find_root_logical(e)
    f = {root_l: root_p}
    inv = {root_p: root_l}
    tree = ConnectivityTree(root_p)
    while len(f) < n_log:
        best = None
        for p in sorted(inv):
            lp = inv[p]
            for q in g.neighbors(p):
                if q in inv:
                    continue
                for l in range(n_log):
                    if l in f:
                        continue
                    s = int(scores[l, lp])
                    key = (-s, 0 if s else int(d[root_p, q]), l, q, p)
                    if best is None or key < best:
                        best = key
        _, _, l, q, p = best
        f[l] = q
        inv[q] = l
        tree.add(q, p)
    return QubitMapping(f), tree


def spanning_tree_for(mapping: QubitMapping, g: CouplingGraph) -> ConnectivityTree:
    """BFS tree from the central qubit, pruned to the part that reaches mapped qubits."""
    root = find_root_physical(g)
    parent = g.bfs_order(root)
    used = set(mapping.log_to_phys.values())
    keep = {root}
    for v in used:
        while v not in keep:
            keep.add(v)
            v = parent[v]
    return ConnectivityTree(root, {v: parent[v] for v in parent if v in keep})


def identity_mapping(n_logical: int, g: CouplingGraph) -> tuple[QubitMapping, ConnectivityTree]:
    if n_logical > g.n_qubits:
        raise ValueError(f"{n_logical} logical qubits exceed {g.n_qubits} physical qubits")
    m = QubitMapping({l: l for l in range(n_logical)})
    return m, spanning_tree_for(m, g)


def random_mapping(
    n_logical: int, g: CouplingGraph, seed: int | None
) -> tuple[QubitMapping, ConnectivityTree]:
    """Uniformly random injective placement drawn from ``numpy.random.default_rng(seed)``."""
    if n_logical > g.n_qubits:
        raise ValueError(f"{n_logical} logical qubits exceed {g.n_qubits} physical qubits")
    perm = np.random.default_rng(seed).permutation(g.n_qubits)[:n_logical]
    m = QubitMapping({l: int(p) for l, p in enumerate(perm)})
    return m, spanning_tree_for(m, g)
