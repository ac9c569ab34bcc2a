import numpy as np
import pytest

from sppf.topology import (
    DEVICES,
    CouplingGraph,
    TopologyError,
    all_pairs_distances,
    builtin,
    complete,
    grid,
    line,
    load_topology,
    parse_edge_list,
)


def floyd_warshall(g: CouplingGraph) -> np.ndarray:
    n = g.n_qubits
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0)
    for u, v in g.edges:
        d[u, v] = d[v, u] = 1
    for k in range(n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d.astype(int)


@pytest.mark.parametrize("name", ["line:5", "grid:3x4", "complete:5", *DEVICES])
def test_distances_match_floyd_warshall(name):
    g = builtin(name)
    assert np.array_equal(all_pairs_distances(g), floyd_warshall(g))
    assert np.array_equal(g.distances, g.distances.T)


def test_builtin_shapes():
    assert len(line(4).edges) == 3
    g = grid(2, 3)
    assert g.n_qubits == 6 and len(g.edges) == 7
    assert g.has_edge(0, 3) and g.has_edge(4, 5) and not g.has_edge(2, 3)
    assert len(complete(5).edges) == 10


@pytest.mark.parametrize(
    "name,n,m",
    [("quito", 5, 4), ("nairobi", 7, 6), ("guadalupe", 16, 16), ("mumbai", 27, 28), ("brisbane", 127, 144)],
)
def test_devices(name, n, m):
    g = builtin(name)
    assert g.n_qubits == n
    assert len(g.edges) == m
    # heavy-hex style layouts never exceed degree 3
    assert max(g.degree(v) for v in range(n)) <= 3


def test_validation():
    with pytest.raises(TopologyError):
        CouplingGraph(3, [(0, 1)])
    with pytest.raises(TopologyError):
        CouplingGraph(2, [(0, 0), (0, 1)])
    with pytest.raises(TopologyError):
        CouplingGraph(2, [(0, 1), (1, 0)])
    with pytest.raises(TopologyError):
        CouplingGraph(2, [(0, 2)])
    for bad in ["ring:4", "line:x", "grid:3", "line:0"]:
        with pytest.raises(TopologyError):
            builtin(bad)


def test_parse_edge_list(tmp_path):
    text = "# a triangle\n3\n0 1\n1 2  # last\n2 0\n"
    g = parse_edge_list(text)
    assert g.n_qubits == 3 and len(g.edges) == 3
    path = tmp_path / "tri.txt"
    path.write_text(text)
    assert load_topology(str(path)) == g
    with pytest.raises(TopologyError):
        parse_edge_list("3\n0 1 2\n")
    with pytest.raises(TopologyError):
        parse_edge_list("")


def test_bfs_respects_allowed_set():
    g = line(5)
    parent = g.bfs_order(2, allowed={1, 2, 3})
    assert parent == {2: None, 1: 2, 3: 2}


def test_subgraph_relabels():
    sub, order = grid(2, 3).subgraph([5, 1, 2, 4])
    assert order == [1, 2, 4, 5]
    assert sub.edges == frozenset({(0, 1), (0, 2), (1, 3), (2, 3)})


def test_small_examples():
    assert line(4).edges == frozenset({(0, 1), (1, 2), (2, 3)})
    g = grid(4, 4)
    assert len(g.edges) == 24
    assert g.distances[0, 15] == 6
    assert line(3).distances[0, 2] == 2
    assert parse_edge_list("3\n0 1\n1 2") == line(3)
    with pytest.raises(TopologyError, match="self-loop"):
        parse_edge_list("2\n0 0")
    with pytest.raises(TopologyError, match="disconnected"):
        parse_edge_list("4\n0 1\n2 3")
