"""Greedy gadget-by-gadget synthesis on a connectivity tree.

Every Clifford gate appended to the circuit prefix has its adjoint prepended
to a trailing Clifford tableau and is conjugated through all gadgets still
waiting, so at any moment

    target == U(trailing) . prod(remaining gadgets) . U(prefix)

A gadget's distance to being decomposable is counted on its Steiner subtree
of the connectivity tree: ``(nodes - 1) + (identity nodes)``, equivalently
``2 * edges + 1 - weight``. Distances of all remaining gadgets are kept as
per-gadget subtree counts so that a candidate step can be scored for every
gadget at once with numpy.
"""

from __future__ import annotations

import json
import logging
import time
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .circuit import Circuit, Gate, cnot_count, cnot_depth
from .mapper import (
    ConnectivityTree,
    QubitMapping,
    build_mapping,
    identity_mapping,
    random_mapping,
)
from .pauli import (
    PauliExponential,
    PauliGadget,
    _fwd_cnot,
    _fwd_single,
    letter_bits,
    mutually_commuting,
)
from .tableau import CliffordTableau
from .tableau import synthesize as synthesize_tableau
from .topology import CouplingGraph

log = logging.getLogger(__name__)

MAPPING_MODES = ("sppf", "random", "identity")

# Gate sequences in time order. Control side: I, V, SV; target side: V, S, VS.
CONTROL_GATES = ((), ("V",), ("S", "V"))
TARGET_GATES = (("V",), ("S",), ("V", "S"))
COMBOS = tuple((c, t) for c in CONTROL_GATES for t in TARGET_GATES)

# Letter codes are x + 2z: I=0, X=1, Z=2, Y=3.
_LETTER = "IXZY"


def _code(letter: str) -> int:
    x, z = letter_bits(letter)
    return x + 2 * z


def _single_table(kind: str) -> tuple[np.ndarray, np.ndarray]:
    new = np.zeros(4, dtype=np.uint8)
    flip = np.zeros(4, dtype=np.uint8)
    for code in range(4):
        x2, z2, f = _fwd_single(kind, code & 1, code >> 1)
        new[code], flip[code] = x2 + 2 * z2, f
    return new, flip


_SINGLE = {k: _single_table(k) for k in ("V", "Vdg", "S", "Sdg")}


def _build_combo_tables():
    shape = (len(COMBOS), 4, 4)
    new_c = np.zeros(shape, dtype=np.uint8)
    new_t = np.zeros(shape, dtype=np.uint8)
    flip = np.zeros(shape, dtype=np.uint8)
    for k, (cg, tg) in enumerate(COMBOS):
        for a0 in range(4):
            for b0 in range(4):
                a, b, f = a0, b0, 0
                for kind in cg:
                    f ^= int(_SINGLE[kind][1][a])
                    a = int(_SINGLE[kind][0][a])
                for kind in tg:
                    f ^= int(_SINGLE[kind][1][b])
                    b = int(_SINGLE[kind][0][b])
                xc, zc, xt, zt, fc = _fwd_cnot(a & 1, a >> 1, b & 1, b >> 1)
                new_c[k, a0, b0] = xc + 2 * zc
                new_t[k, a0, b0] = xt + 2 * zt
                flip[k, a0, b0] = f ^ fc
    return new_c, new_t, flip


COMBO_NEW_C, COMBO_NEW_T, COMBO_FLIP = _build_combo_tables()


def combo_gates(combo: int, control: int, target: int) -> list[Gate]:
    cg, tg = COMBOS[combo]
    gates = [Gate(k, (control,)) for k in cg]
    gates += [Gate(k, (target,)) for k in tg]
    gates.append(Gate("CNOT", (control, target)))
    return gates


# -- gadget trees -------------------------------------------------------------

@dataclass
class GadgetTree:
    """Steiner subtree of the connectivity tree spanning a gadget's support."""

    nodes: frozenset[int]
    edges: list[tuple[int, int]]
    letters: dict[int, str]

    @property
    def leaves(self) -> list[int]:
        if len(self.nodes) < 2:
            return sorted(self.nodes)
        deg = {v: 0 for v in self.nodes}
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return sorted(v for v, d in deg.items() if d == 1)

    @property
    def identity_nodes(self) -> list[int]:
        return sorted(v for v in self.nodes if self.letters[v] == "I")


def prune_tree(tree: ConnectivityTree, g: PauliGadget, f: QubitMapping) -> GadgetTree:
    """Strip identity leaves off the connectivity tree until every leaf carries a letter."""
    letters = {v: "I" for v in tree.nodes}
    for l, c in enumerate(g.string):
        if c != "I":
            if l not in f.log_to_phys or f[l] not in letters:
                raise ValueError(f"logical qubit {l} of {g.string!r} is not on the tree")
            letters[f[l]] = c
    if all(c == "I" for c in g.string):
        return GadgetTree(frozenset(), [], {})
    nodes = set(tree.nodes)
    edges = set(tree.edges)
    changed = True
    while changed:
        changed = False
        deg = {v: 0 for v in nodes}
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        for v in sorted(nodes):
            if deg[v] <= 1 and letters[v] == "I":
                nodes.discard(v)
                edges = {e for e in edges if v not in e}
                changed = True
    return GadgetTree(frozenset(nodes), sorted(edges), {v: letters[v] for v in nodes})


def gadget_distance(t: GadgetTree) -> int:
    if not t.nodes:
        raise ValueError("pure identity gadget has no distance")
    return (len(t.nodes) - 1) + len(t.identity_nodes)


# -- synthesis state ----------------------------------------------------------

@dataclass(frozen=True, order=True)
class Step:
    control: int
    target: int
    combo: int
    bridge: bool = field(default=False, compare=False)

    def gates(self) -> list[Gate]:
        return combo_gates(self.combo, self.control, self.target)


class SynthState:
    """Mutable synthesis state over the connectivity tree's qubits.

    Internally qubits are renumbered ``0..m-1`` in increasing physical index
    (``self.nodes``), so lexicographic tie-breaks agree with physical order.
    Steps, trees and gadgets reported by the public methods use these local
    indices; ``self.nodes[i]`` recovers the physical qubit.
    """

    def __init__(
        self,
        exponential: PauliExponential,
        tree: ConnectivityTree,
        mapping: QubitMapping,
    ):
        self.nodes = tree.nodes
        self.m = len(self.nodes)
        local = {p: i for i, p in enumerate(self.nodes)}
        self.root = local[tree.root]
        self.parent = np.full(self.m, -1, dtype=np.int64)
        for v, p in tree.parent.items():
            if p is not None:
                self.parent[local[v]] = local[p]
        # desc[v, u] == 1 iff v lies in the subtree rooted at u
        self.desc = np.zeros((self.m, self.m), dtype=np.int32)
        for v in range(self.m):
            u = v
            while u >= 0:
                self.desc[v, u] = 1
                u = self.parent[u]
        self._edge_cols = np.array([u for u in range(self.m) if u != self.root], dtype=np.int64)

        self.local_of_logical = {l: local[p] for l, p in mapping.log_to_phys.items()}
        codes, angles, index = [], [], []
        for g in exponential.gadgets:
            if all(c == "I" for c in g.string):
                if g.angle != 0:
                    log.info("gadget %d is the identity; contributes only a global phase", g.original_index)
                continue
            row = np.zeros(self.m, dtype=np.uint8)
            for l, c in enumerate(g.string):
                row[self.local_of_logical[l]] = _code(c)
            codes.append(row)
            angles.append(g.angle)
            index.append(g.original_index)
        self.codes = np.array(codes, dtype=np.uint8).reshape(len(codes), self.m)
        self.angles = np.array(angles, dtype=float)
        self.index = np.array(index, dtype=np.int64)

        self.prefix: list[Gate] = []
        self.tableau = CliffordTableau.identity(self.m)
        self.order: list[int] = []
        self.history: list[tuple[int, int, int]] = []  # (original index, distance, steps)
        self._refresh()

    # distance bookkeeping

    def _refresh(self) -> None:
        self.sup = (self.codes != 0).astype(np.int32)
        self.cnt = self.sup.sum(axis=1)
        self.sub = self.sup @ self.desc
        self._recount()

    def _recount(self) -> None:
        s = self.sub[:, self._edge_cols]
        edges = ((s > 0) & (s < self.cnt[:, None])).sum(axis=1)
        self.dist = 2 * edges + 1 - self.cnt

    def __len__(self) -> int:
        return len(self.index)

    def distance(self, j: int) -> int:
        return int(self.dist[j])

    def gadget(self, j: int) -> PauliGadget:
        """Remaining gadget ``j`` as a local-index gadget (current frame)."""
        s = "".join(_LETTER[c] for c in self.codes[j])
        return PauliGadget(s, float(self.angles[j]), int(self.index[j]))

    def remaining(self) -> list[PauliGadget]:
        return [self.gadget(j) for j in range(len(self))]

    def gadget_tree(self, j: int) -> GadgetTree:
        nodes = set()
        edges = []
        for u in self._edge_cols:
            if 0 < self.sub[j, u] < self.cnt[j]:
                p = int(self.parent[u])
                edges.append((min(int(u), p), max(int(u), p)))
                nodes.update((int(u), p))
        if not edges:
            nodes = {int(v) for v in np.flatnonzero(self.codes[j])}
        letters = {v: _LETTER[self.codes[j, v]] for v in nodes}
        return GadgetTree(frozenset(nodes), sorted(edges), letters)

    # greedy choices

    def select_next_gadget(self) -> int:
        """Row of the nearest remaining gadget; rows are kept in input order."""
        if not len(self):
            raise ValueError("no gadgets left")
        return int(np.argmin(self.dist))

    def enumerate_steps(self, j: int) -> list[Step]:
        t = self.gadget_tree(j)
        if len(t.nodes) < 2:
            return []
        nbr = {v: [] for v in t.nodes}
        for u, v in t.edges:
            nbr[u].append(v)
            nbr[v].append(u)
        steps = []
        for qc in t.leaves:
            (qt,) = nbr[qc]
            a, b = self.codes[j, qc], self.codes[j, qt]
            if b:
                ok = np.flatnonzero(COMBO_NEW_C[:, a, b] == 0)
                steps += [Step(qc, qt, int(k)) for k in ok]
            else:
                ok = np.flatnonzero(COMBO_NEW_T[:, a, b] != 0)
                steps += [Step(qc, qt, int(k), bridge=True) for k in ok]
        return sorted(steps)

    def _pair_terms(self, qc: int, qt: int):
        """Per-gadget terms for the distance as a function of support on (qc, qt).

        With S0 the support away from the pair, the Steiner edge count is
        ``const + k*[qc or qt] + [(A0 or qc) and (B0 or qt)]`` where ``k`` is
        the hop count from the pair to S0's subtree and A0/B0 say whether S0
        meets the qc/qt side of the pair's edge.
        """
        lo, hi = (qc, qt) if self.parent[qc] == qt else (qt, qc)
        if self.parent[lo] != hi:
            raise ValueError(f"({qc}, {qt}) is not a tree edge")
        sc = self.sup[:, qc]
        st = self.sup[:, qt]
        sub0 = self.sub - sc[:, None] * self.desc[qc] - st[:, None] * self.desc[qt]
        cnt0 = self.cnt - sc - st
        cols = self._edge_cols[self._edge_cols != lo]
        s = sub0[:, cols]
        inside = self.desc[lo, cols].astype(bool)
        k = np.where(inside, (s == 0) & (cnt0[:, None] > 0), (s > 0) & (s == cnt0[:, None])).sum(axis=1)
        lo_side = sub0[:, lo] > 0
        hi_side = (cnt0 - sub0[:, lo]) > 0
        a0, b0 = (lo_side, hi_side) if lo == qc else (hi_side, lo_side)
        return k, a0, b0

    def _delta(self, qc, qt, combos, terms) -> np.ndarray:
        """Distance change of every gadget (rows) under each combo (columns)."""
        k, a0, b0 = terms
        ac = self.codes[:, qc]
        at = self.codes[:, qt]
        oc, ot = ac != 0, at != 0
        combos = np.asarray(combos)
        nc = COMBO_NEW_C[combos[None, :], ac[:, None], at[:, None]] != 0
        nt = COMBO_NEW_T[combos[None, :], ac[:, None], at[:, None]] != 0
        k = k[:, None]
        a0 = a0[:, None]
        b0 = b0[:, None]
        oc, ot = oc[:, None], ot[:, None]
        e_new = k * (nc | nt) + ((a0 | nc) & (b0 | nt))
        e_old = k * (oc | ot) + ((a0 | oc) & (b0 | ot))
        return 2 * (e_new - e_old).astype(np.int64) - (nc.astype(np.int64) + nt - oc - ot)

    def score_steps(self, steps: Iterable[Step]) -> list[float]:
        """Mean distance change over all remaining gadgets for each step."""
        steps = list(steps)
        out = [0.0] * len(steps)
        groups: dict[tuple[int, int], list[int]] = {}
        for i, s in enumerate(steps):
            groups.setdefault((s.control, s.target), []).append(i)
        for (qc, qt), idx in groups.items():
            terms = self._pair_terms(qc, qt)
            d = self._delta(qc, qt, [steps[i].combo for i in idx], terms)
            means = d.sum(axis=0) / len(self)
            for i, v in zip(idx, means):
                out[i] = float(v)
        return out

    def score_step(self, step: Step) -> float:
        return self.score_steps([step])[0]

    def best_step(self, j: int) -> Step:
        steps = self.enumerate_steps(j)
        scores = self.score_steps(steps)
        # steps are sorted, so min() keeps the lexicographically first on ties
        return min(zip(scores, steps), key=lambda p: p[0])[1]

    # state updates

    def _emit(self, gates: list[Gate]) -> None:
        for g in gates:
            self.prefix.append(g)
            self.tableau.prepend(g.inverse())

    def apply_step(self, step: Step) -> None:
        qc, qt, k = step.control, step.target, step.combo
        ac = self.codes[:, qc].copy()
        at = self.codes[:, qt].copy()
        self.codes[:, qc] = COMBO_NEW_C[k, ac, at]
        self.codes[:, qt] = COMBO_NEW_T[k, ac, at]
        flip = COMBO_FLIP[k, ac, at].astype(bool)
        self.angles[flip] = -self.angles[flip]
        self._emit(step.gates())
        dc = (self.codes[:, qc] != 0).astype(np.int32) - self.sup[:, qc]
        dt = (self.codes[:, qt] != 0).astype(np.int32) - self.sup[:, qt]
        self.sup[:, qc] += dc
        self.sup[:, qt] += dt
        self.cnt += dc + dt
        self.sub += dc[:, None] * self.desc[qc] + dt[:, None] * self.desc[qt]
        self._recount()

    def _apply_single(self, kind: str, q: int) -> None:
        new, flip = _SINGLE[kind]
        col = self.codes[:, q]
        f = flip[col].astype(bool)
        self.codes[:, q] = new[col]
        self.angles[f] = -self.angles[f]
        self._emit([Gate(kind, (q,))])

    def finalize_gadget(self, j: int) -> None:
        """Rotate the last letter of gadget ``j`` onto Z and emit its Rz."""
        if self.dist[j] != 0:
            raise ValueError(f"gadget row {j} still has distance {self.dist[j]}")
        (q,) = np.flatnonzero(self.codes[j])
        letter = _LETTER[self.codes[j, q]]
        for kind in {"X": ("S", "V"), "Y": ("V",), "Z": ()}[letter]:
            self._apply_single(kind, int(q))
        assert self.codes[j, q] == _code("Z")
        self.prefix.append(Gate("Rz", (int(q),), 2.0 * float(self.angles[j])))
        self.order.append(int(self.index[j]))
        keep = np.arange(len(self)) != j
        for name in ("codes", "angles", "index", "sup", "cnt", "sub", "dist"):
            setattr(self, name, getattr(self, name)[keep])

    def run(self) -> None:
        while len(self):
            j = self.select_next_gadget()
            start = self.distance(j)
            steps = 0
            while self.dist[j] > 0:
                self.apply_step(self.best_step(j))
                steps += 1
            self.history.append((int(self.index[j]), start, steps))
            self.finalize_gadget(j)


# -- top level ----------------------------------------------------------------

@dataclass
class Stats:
    cnot_count: int
    cnot_depth: int
    total_gates: int
    runtime_ms: float
    gadget_order: list[int]
    mapping: dict[int, int]
    gadget_cnots: int = 0
    tree: list[int | None] = field(default_factory=list)

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "cnot_count": self.cnot_count,
            "cnot_depth": self.cnot_depth,
            "total_gates": self.total_gates,
            "runtime_ms": self.runtime_ms if timing else None,
            "gadget_order": self.gadget_order,
            "mapping": {str(k): v for k, v in sorted(self.mapping.items())},
            "gadget_cnots": self.gadget_cnots,
            "tree": self.tree,
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2)


@dataclass
class SynthResult:
    circuit: Circuit
    stats: Stats
    mapping: QubitMapping
    tree: ConnectivityTree
    prefix: Circuit
    suffix: Circuit
    history: list[tuple[int, int, int]]


def place(
    e: PauliExponential, g: CouplingGraph, mapping_mode: str = "sppf", seed: int | None = None
) -> tuple[QubitMapping, ConnectivityTree]:
    if mapping_mode == "sppf":
        return build_mapping(e, g)
    if mapping_mode == "identity":
        return identity_mapping(e.n_qubits, g)
    if mapping_mode == "random":
        return random_mapping(e.n_qubits, g, seed)
    raise ValueError(f"unknown mapping mode {mapping_mode!r}; expected one of {MAPPING_MODES}")


def synthesize_full(
    e: PauliExponential,
    g: CouplingGraph,
    mapping_mode: str = "sppf",
    seed: int | None = None,
    allow_reorder: bool = False,
) -> SynthResult:
    if not e.gadgets:
        raise ValueError("exponential has no gadgets")
    if not mutually_commuting(e):
        if not allow_reorder:
            raise ValueError(
                "gadgets do not mutually commute; processing order changes the operator "
                "(pass allow_reorder=True to accept this)"
            )
        warnings.warn(
            "non-commuting gadgets: the circuit implements the product in processed order",
            stacklevel=2,
        )
    t0 = time.perf_counter()
    mapping, tree = place(e, g, mapping_mode, seed)
    state = SynthState(e, tree, mapping)
    state.run()
    local_graph, nodes = g.subgraph(tree.nodes)
    trailing = synthesize_tableau(state.tableau, local_graph)
    prefix = Circuit(state.m, state.prefix).relabel(nodes, g.n_qubits)
    suffix = trailing.relabel(nodes, g.n_qubits)
    circuit = prefix + suffix
    runtime_ms = (time.perf_counter() - t0) * 1e3

    off = [c for c in circuit.cnots() if not g.has_edge(*c)]
    if off:
        raise AssertionError(f"CNOTs off the coupling graph: {off}")
    stats = Stats(
        cnot_count=cnot_count(circuit),
        cnot_depth=cnot_depth(circuit),
        total_gates=len(circuit),
        runtime_ms=runtime_ms,
        gadget_order=state.order,
        mapping=dict(mapping.log_to_phys),
        gadget_cnots=cnot_count(prefix),
        tree=tree.to_parent_array(g.n_qubits),
    )
    return SynthResult(circuit, stats, mapping, tree, prefix, suffix, state.history)


def synthesize(
    e: PauliExponential,
    g: CouplingGraph,
    mapping_mode: str = "sppf",
    seed: int | None = None,
    allow_reorder: bool = False,
) -> tuple[Circuit, Stats]:
    """Compile ``e`` for topology ``g``; returns the physical circuit and its stats."""
    r = synthesize_full(e, g, mapping_mode, seed, allow_reorder)
    return r.circuit, r.stats
