import itertools
import math
import random
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_strings
from sppf.circuit import Circuit, Rz, to_qasm
from sppf.mapper import ConnectivityTree, QubitMapping, build_mapping, identity_mapping
from sppf.oracle import (
    circuit_unitary,
    decode_pauli,
    equiv_up_to_phase,
    exponential_unitary,
    gadget_unitary,
    pauli_matrix,
    verify_synthesis,
)
from sppf.pauli import PauliExponential, PauliGadget, commute_through_gadget, mutually_commuting
from sppf.synth import (
    COMBOS,
    SynthState,
    combo_gates,
    gadget_distance,
    prune_tree,
    synthesize,
    synthesize_full,
)
from sppf.tableau import synthesize as synthesize_tableau
from sppf.topology import builtin, line


def identity_tree(n):
    m, tree = identity_mapping(n, line(n))
    return m, tree


def distance_on_line(s):
    m, tree = identity_tree(len(s))
    return gadget_distance(prune_tree(tree, PauliGadget(s, 0.1), m))


def test_nine_combos():
    assert len(COMBOS) == 9
    assert len(set(COMBOS)) == 9


def test_prune_tree_examples():
    m, tree = identity_tree(3)
    t = prune_tree(tree, PauliGadget("ZZI", 0.1), m)
    assert t.nodes == {0, 1} and t.identity_nodes == []
    t = prune_tree(tree, PauliGadget("ZIZ", 0.1), m)
    assert t.nodes == {0, 1, 2} and t.identity_nodes == [1]
    assert t.leaves == [0, 2]
    m4, tree4 = identity_tree(4)
    assert prune_tree(tree4, PauliGadget("IIII", 0.1), m4).nodes == frozenset()
    with pytest.raises(ValueError):
        gadget_distance(prune_tree(tree4, PauliGadget("IIII", 0.1), m4))


def test_distance_examples():
    assert distance_on_line("ZZI") == 1
    assert distance_on_line("ZIZ") == 3
    # four qubits on a line with one bridge in the middle
    assert distance_on_line("XIZY") == 4
    assert distance_on_line("IIZI") == 0


@given(st.text(alphabet="IXYZ", min_size=1, max_size=7).filter(lambda s: s.strip("I")))
def test_distance_closed_form_on_line(s):
    # on a line the Steiner tree is the span from first to last letter
    first = min(i for i, c in enumerate(s) if c != "I")
    last = max(i for i, c in enumerate(s) if c != "I")
    span = s[first : last + 1]
    assert distance_on_line(s) == (len(span) - 1) + span.count("I")


def test_pruned_leaves_carry_letters():
    rng = random.Random(2)
    g = builtin("guadalupe")
    for s in random_strings(rng, 8, 50):
        e = PauliExponential.from_terms([(s, 0.1)])
        m, tree = build_mapping(e, g)
        t = prune_tree(tree, e[0], m)
        assert all(t.letters[v] != "I" for v in t.leaves)
        assert {m[i] for i, c in enumerate(s) if c != "I"} <= t.nodes


def _oracle_conjugate(gates, s):
    """Pauli (sign, string) of C P C^dag for the time-ordered gates."""
    c = circuit_unitary(Circuit(len(s), gates))
    letters, sign = decode_pauli(c @ pauli_matrix(s) @ c.conj().T, len(s), 1e-9)
    return letters, sign


def test_enumerate_zz_on_line_two():
    e = PauliExponential.from_terms([("ZZ", 0.3)])
    m, tree = identity_tree(2)
    state = SynthState(e, tree, m)
    steps = state.enumerate_steps(0)
    for qc, qt in [(0, 1), (1, 0)]:
        expect = sorted(
            k for k in range(9) if _oracle_conjugate(combo_gates(k, qc, qt), "ZZ")[0][qc] == "I"
        )
        got = sorted(s.combo for s in steps if (s.control, s.target) == (qc, qt))
        assert got == expect and len(got) == 2


def test_enumerate_bridge_steps():
    e = PauliExponential.from_terms([("ZIZ", 0.3)])
    m, tree = identity_tree(3)
    state = SynthState(e, tree, m)
    steps = state.enumerate_steps(0)
    assert {(s.control, s.target) for s in steps} == {(0, 1), (2, 1)}
    assert all(s.bridge for s in steps)
    for s in steps:
        letters, _ = _oracle_conjugate(s.gates(), "ZIZ")
        assert letters[1] != "I"


@pytest.mark.parametrize("a,b", list(itertools.product("XYZ", repeat=2)))
def test_every_leaf_letter_can_be_zeroed(a, b):
    e = PauliExponential.from_terms([(a + b, 0.3)])
    m, tree = identity_tree(2)
    steps = SynthState(e, tree, m).enumerate_steps(0)
    assert sum(1 for s in steps if s.control == 0) == 2


def test_select_next_gadget():
    e = PauliExponential.from_terms([("ZIZ", 0.1), ("ZZI", 0.2)])
    m, tree = identity_tree(3)
    state = SynthState(e, tree, m)
    assert state.index[state.select_next_gadget()] == 1
    e = PauliExponential.from_terms([("IZZ", 0.1), ("ZZI", 0.2)])
    state = SynthState(e, tree, m)
    assert state.index[state.select_next_gadget()] == 0


def _brute_distance(state, string):
    local = ConnectivityTree(
        state.root,
        {v: (None if p < 0 else int(p)) for v, p in enumerate(state.parent)},
    )
    ident = QubitMapping({i: i for i in range(state.m)})
    return gadget_distance(prune_tree(local, PauliGadget(string, 0.1), ident))


@pytest.mark.parametrize("seed", range(25))
def test_scores_and_steps_match_recomputation(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    topo = rng.choice([f"line:{n}", "grid:3x3", "guadalupe"])
    g = builtin(topo)
    e = PauliExponential.from_terms([(s, 0.2) for s in random_strings(rng, n, rng.randint(1, 8))])
    m, tree = build_mapping(e, g)
    state = SynthState(e, tree, m)
    while len(state):
        j = state.select_next_gadget()
        while state.dist[j] > 0:
            steps = state.enumerate_steps(j)
            scores = state.score_steps(steps)
            before = [_brute_distance(state, x.string) for x in state.remaining()]
            assert before == list(state.dist)
            for step, score in zip(steps, scores):
                after = []
                for x in state.remaining():
                    for gate in step.gates():
                        x = commute_through_gadget(gate.inverse(), x)
                    after.append(_brute_distance(state, x.string))
                assert score == pytest.approx((sum(after) - sum(before)) / len(before), abs=1e-12)
            best = state.best_step(j)
            assert best == min(zip(scores, steps), key=lambda p: p[0])[1]
            d0 = state.dist[j]
            state.apply_step(best)
            assert state.dist[j] == d0 - 1
        state.finalize_gadget(j)


@pytest.mark.parametrize("seed", range(15))
def test_state_sandwich_invariant(seed):
    rng = random.Random(100 + seed)
    n = rng.randint(2, 4)
    g = builtin(rng.choice([f"line:{n}", f"complete:{n}"]))
    e = PauliExponential.from_terms(
        [(s, rng.uniform(-2, 2)) for s in random_strings(rng, n, rng.randint(1, 5))]
    )
    m, tree = build_mapping(e, g)
    state = SynthState(e, tree, m)
    local = {p: i for i, p in enumerate(state.nodes)}
    embed = [local[m[l]] for l in range(n)]
    sub, _ = g.subgraph(state.nodes)

    def check():
        prefix = circuit_unitary(Circuit(state.m, state.prefix))
        trailing = circuit_unitary(synthesize_tableau(state.tableau, sub))
        rest = np.eye(2**state.m, dtype=complex)
        for x in state.remaining():
            rest = gadget_unitary(x) @ rest
        full = []
        for gd in e.gadgets:
            letters = ["I"] * state.m
            for l, c in enumerate(gd.string):
                letters[embed[l]] = c
            full.append(PauliGadget("".join(letters), gd.angle))
        target = exponential_unitary(
            PauliExponential(full, state.m), state.order + [int(i) for i in state.index]
        )
        assert equiv_up_to_phase(trailing @ rest @ prefix, target)

    check()
    while len(state):
        j = state.select_next_gadget()
        while state.dist[j] > 0:
            state.apply_step(state.best_step(j))
            check()
        state.finalize_gadget(j)
        check()


@pytest.mark.parametrize("letter", "XYZ")
def test_finalize_single_letter(letter):
    a = 0.37
    e = PauliExponential.from_terms([(letter, a)])
    c, stats = synthesize(e, line(1))
    assert stats.cnot_count == 0
    rz = [gt for gt in c.gates if gt.kind == "Rz"]
    assert len(rz) == 1 and abs(abs(rz[0].angle) - 2 * a) < 1e-15
    assert equiv_up_to_phase(circuit_unitary(c), gadget_unitary(e[0]))
    if letter == "Z":
        assert c.gates == [Rz(0, 2 * a)]


def test_finalize_requires_zero_distance():
    e = PauliExponential.from_terms([("ZZ", 0.1)])
    m, tree = identity_tree(2)
    with pytest.raises(ValueError):
        SynthState(e, tree, m).finalize_gadget(0)


def test_zzi_uses_one_cnot_for_the_gadget():
    e = PauliExponential.from_terms([("ZZI", math.pi / 4)])
    r = synthesize_full(e, line(3), mapping_mode="identity")
    assert r.stats.gadget_cnots == 1
    assert r.history == [(0, 1, 1)]
    # undoing the basis change in the trailing Clifford costs one more
    assert r.stats.cnot_count == 2
    assert verify_synthesis(e, r.circuit, r.stats.mapping, r.stats.gadget_order)


@pytest.mark.parametrize("mode", ["sppf", "identity", "random"])
@pytest.mark.parametrize("seed", range(12))
def test_random_commuting_end_to_end(mode, seed):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    g = builtin(rng.choice([f"line:{n}", f"complete:{n}", "grid:2x3"]))
    # Z-only strings always commute
    strings = ["".join(rng.choice("IZ") for _ in range(n)) for _ in range(rng.randint(1, 8))]
    strings = [s if s.strip("I") else "Z" + s[1:] for s in strings]
    e = PauliExponential.from_terms([(s, rng.uniform(-3, 3)) for s in strings])
    assert mutually_commuting(e)
    r = synthesize_full(e, g, mapping_mode=mode, seed=seed)
    assert all(g.has_edge(*cn) for cn in r.circuit.cnots())
    assert verify_synthesis(e, r.circuit, r.stats.mapping, r.stats.gadget_order)
    # order-independence: input order gives the same operator
    assert verify_synthesis(e, r.circuit, r.stats.mapping)
    for idx, start, steps in r.history:
        assert steps == start


def test_structure_prefix_holds_all_rz():
    rng = random.Random(9)
    e = PauliExponential.from_terms([(s, 0.4) for s in random_strings(rng, 6, 12)])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = synthesize_full(e, builtin("grid:2x3"), allow_reorder=True)
    assert all(gt.is_clifford for gt in r.suffix.gates)
    assert sum(gt.kind == "Rz" for gt in r.prefix.gates) == len(e)
    assert r.circuit.gates == r.prefix.gates + r.suffix.gates


def test_identity_gadget_skipped(caplog):
    e = PauliExponential.from_terms([("III", 0.5), ("ZZI", 0.2)])
    with caplog.at_level("INFO", logger="sppf.synth"):
        r = synthesize_full(e, line(3))
    assert r.stats.gadget_order == [1]
    assert "global phase" in caplog.text
    assert verify_synthesis(e, r.circuit, r.stats.mapping, r.stats.gadget_order)


def test_input_validation():
    with pytest.raises(ValueError):
        synthesize(PauliExponential([], 2), line(2))
    e = PauliExponential.from_terms([("XI", 0.1), ("ZI", 0.1)])
    with pytest.raises(ValueError, match="commute"):
        synthesize(e, line(2))
    with pytest.warns(UserWarning):
        synthesize(e, line(2), allow_reorder=True)
    with pytest.raises(ValueError):
        synthesize(PauliExponential.from_terms([("ZZZ", 0.1)]), line(2))
    with pytest.raises(ValueError):
        synthesize(PauliExponential.from_terms([("ZZ", 0.1)]), line(2), mapping_mode="nope")


def test_deterministic_output():
    rng = random.Random(4)
    e = PauliExponential.from_terms([(s, 0.25) for s in random_strings(rng, 5, 10)])
    outs = set()
    for _ in range(3):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            c, st_ = synthesize(e, builtin("nairobi"), mapping_mode="random", seed=11, allow_reorder=True)
        outs.add((to_qasm(c), st_.to_json(timing=False)))
    assert len(outs) == 1


def test_stats_json_fields():
    e = PauliExponential.from_terms([("ZZ", 0.1)])
    _, stats = synthesize(e, line(2))
    d = stats.to_dict()
    for key in ("cnot_count", "cnot_depth", "total_gates", "runtime_ms", "gadget_order", "mapping"):
        assert key in d
    assert stats.to_dict(timing=False)["runtime_ms"] is None
    assert d["runtime_ms"] >= 0
