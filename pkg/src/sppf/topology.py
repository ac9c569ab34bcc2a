"""Hardware coupling graphs and hop distances."""

from __future__ import annotations

import re
from collections import deque
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable

import numpy as np

DEVICES = ("quito", "nairobi", "guadalupe", "mumbai", "brisbane")


class TopologyError(ValueError):
    pass


class CouplingGraph:
    """Undirected, connected coupling graph on qubits ``0..n_qubits-1``."""

    def __init__(self, n_qubits: int, edges: Iterable[tuple[int, int]], name: str = ""):
        if n_qubits < 1:
            raise TopologyError("a topology needs at least one qubit")
        self.n_qubits = int(n_qubits)
        self.name = name
        seen: set[tuple[int, int]] = set()
        adj: list[list[int]] = [[] for _ in range(self.n_qubits)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise TopologyError(f"self-loop on qubit {u}")
            if not (0 <= u < self.n_qubits and 0 <= v < self.n_qubits):
                raise TopologyError(f"edge ({u}, {v}) out of range for {self.n_qubits} qubits")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise TopologyError(f"duplicate edge {key}")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        self.edges = frozenset(seen)
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        if len(self.bfs_order(0)) != self.n_qubits:
            raise TopologyError("coupling graph is disconnected")

    def __repr__(self) -> str:
        label = self.name or f"{self.n_qubits} qubits"
        return f"CouplingGraph({label}, {len(self.edges)} edges)"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CouplingGraph)
            and self.n_qubits == other.n_qubits
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.n_qubits, self.edges))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def bfs_order(self, source: int, allowed: set[int] | None = None) -> dict[int, int | None]:
        """Parent map of a BFS from ``source``, visiting neighbours in index order."""
        parent: dict[int, int | None] = {source: None}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in self._adj[u]:
                if w not in parent and (allowed is None or w in allowed):
                    parent[w] = u
                    queue.append(w)
        return parent

    def bfs_distances(self, source: int) -> np.ndarray:
        dist = np.full(self.n_qubits, -1, dtype=np.int64)
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in self._adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    @cached_property
    def distances(self) -> np.ndarray:
        return all_pairs_distances(self)

    def subgraph(self, nodes: Iterable[int]) -> tuple[CouplingGraph, list[int]]:
        """Induced subgraph relabelled to ``0..k-1`` in sorted order of ``nodes``."""
        order = sorted(set(nodes))
        local = {v: i for i, v in enumerate(order)}
        edges = [(local[u], local[v]) for u, v in self.edges if u in local and v in local]
        return CouplingGraph(len(order), edges, name=f"{self.name}[sub]"), order


def all_pairs_distances(g: CouplingGraph) -> np.ndarray:
    """Hop-count matrix from one BFS per source."""
    return np.stack([g.bfs_distances(s) for s in range(g.n_qubits)])


def parse_edge_list(text: str, name: str = "") -> CouplingGraph:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise TopologyError("empty edge list")
    lineno, first = rows[0]
    if len(first) != 1 or not first[0].isdigit():
        raise TopologyError(f"line {lineno}: expected qubit count, got {' '.join(first)!r}")
    edges = []
    for lineno, parts in rows[1:]:
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise TopologyError(f"line {lineno}: expected 'u v', got {' '.join(parts)!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return CouplingGraph(int(first[0]), edges, name=name)


def line(n: int) -> CouplingGraph:
    return CouplingGraph(n, [(i, i + 1) for i in range(n - 1)], name=f"line:{n}")


def grid(rows: int, cols: int) -> CouplingGraph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return CouplingGraph(rows * cols, edges, name=f"grid:{rows}x{cols}")


def complete(n: int) -> CouplingGraph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return CouplingGraph(n, edges, name=f"complete:{n}")


def builtin(name: str) -> CouplingGraph:
    """Resolve ``line:N``, ``grid:RxC``, ``complete:N`` or a bundled device name."""
    key = name.strip().lower()
    if key in DEVICES:
        text = resources.files("sppf").joinpath("data").joinpath(f"{key}.txt").read_text()
        return parse_edge_list(text, name=key)
    m = re.fullmatch(r"(line|complete):(\d+)", key)
    if m:
        n = int(m.group(2))
        if n < 1:
            raise TopologyError(f"bad size in {name!r}")
        return line(n) if m.group(1) == "line" else complete(n)
    m = re.fullmatch(r"grid:(\d+)x(\d+)", key)
    if m:
        r, c = int(m.group(1)), int(m.group(2))
        if r < 1 or c < 1:
            raise TopologyError(f"bad size in {name!r}")
        return grid(r, c)
    if key.split(":")[0] in ("line", "grid", "complete"):
        raise TopologyError(f"malformed size spec in {name!r}")
    raise TopologyError(f"unknown topology {name!r}")


def load_topology(spec: str) -> CouplingGraph:
    """A builtin name, or a path to an edge-list file."""
    path = Path(spec)
    if path.is_file():
        return parse_edge_list(path.read_text(), name=path.stem)
    return builtin(spec)
