import numpy as np
import pytest

from conftest import FIXTURES, load_fixture
from sscnet.errors import ShapeError
from sscnet.generate import random_network, random_node_any
from sscnet.graph import full_row_rank, graph_of
from sscnet.io import load_network
from sscnet.network import (
    DIRECT,
    REDUCED,
    StructuredNetwork,
    assemble,
    is_controllable,
    node_conditions,
    reduce,
    reduced_matrices,
    validate_network,
    verdict_report,
)
from sscnet.node import Condition, NodeSystem, bar_node, classify, standard_node
from sscnet.pattern import PatternMatrix, bar, block_diag, concat_cols, membership, pat_add, pat_mul



def pm(*rows):
    return PatternMatrix.from_rows(rows)


def single(a, w="0", h="*"):
    return StructuredNetwork((NodeSystem.from_strings([a], ["*"], ["*"]),), pm(w), pm(h))


def _node_name(v, net, n):
    if v > n:
        return f"u{v - n}"
    for k, off in enumerate(net.offsets()):
        if off < v <= off + net.nodes[k].n:
            return f"{k + 1}.{v - off}"


def _named_graph(m, net):
    g = graph_of(m)

    def names(edges):
        return sorted([_node_name(i, net, m.rows), _node_name(j, net, m.rows)] for i, j in edges)

    return {"nodes": g.node_count, "star_edges": names(g.star_edges), "quest_edges": names(g.quest_edges)}


def _frozen(entry):
    return {k: sorted(v) if isinstance(v, list) else v for k, v in entry.items()}


def test_validate_examples(example_net):
    assert validate_network(example_net) == []
    with pytest.raises(ShapeError):
        validate_network(StructuredNetwork(example_net.nodes, PatternMatrix.zeros(6, 7), example_net.H))
    with pytest.raises(ShapeError):
        validate_network(StructuredNetwork(example_net.nodes, example_net.W, PatternMatrix.zeros(6, 4)))
    nodes = list(example_net.nodes)
    nodes[0] = NodeSystem(nodes[0].A, pm("?", "0", "0", "0"), nodes[0].C)
    diags = validate_network(StructuredNetwork(tuple(nodes), example_net.W, example_net.H))
    assert [(d.code, d.node) for d in diags] == [("assumption_2", 1)]


def test_validate_flags_uncontrollable_node():
    net = StructuredNetwork((NodeSystem.from_strings(["0 0", "0 0"], ["*", "0"], ["* 0"]),), pm("0"), pm("*"))
    codes = [d.code for d in validate_network(net)]
    assert "node_uncontrollable" in codes and "network_uncontrollable_by_corollary_1" in codes


def test_assemble_example(example_net):
    m = assemble(example_net)
    assert m.shape == (28, 32)
    graphs = load_fixture("example_graphs.json")
    assert _named_graph(m, example_net) == _frozen(graphs["direct"])
    mb = assemble(example_net, use_bar=True)
    assert _named_graph(mb, example_net) == _frozen(graphs["direct_bar"])


def test_assemble_formula_and_bar_commutation(rng):
    for _ in range(100):
        net = random_network(rng)
        a = block_diag([node.A for node in net.nodes])
        b = block_diag([node.B for node in net.nodes])
        c = block_diag([node.C for node in net.nodes])
        bwc = pat_mul(pat_mul(b, net.W), c)
        expected = concat_cols([pat_add(bar(a), bwc), pat_mul(b, net.H)])
        assert assemble(net, use_bar=True) == expected
        plain = assemble(net)
        closed = PatternMatrix(plain.codes[:, : net.n])
        assert bar(closed) == PatternMatrix(expected.codes[:, : net.n])


def test_assemble_single_node():
    net = single("?")
    assert assemble(net) == pm("? *")
    net = StructuredNetwork((NodeSystem.from_strings(["0 *", "* 0"], ["*", "0"], ["* 0"]),), pm("0"), pm("*"))
    assert assemble(net) == pm("0 * *", "* 0 0")


def test_reduce_example(example_net):
    net_hat, net_bar_hat = reduce(example_net)
    assert net_hat.nodes[0] == standard_node(Condition.C1)
    assert net_hat.W == example_net.W and net_hat.H == example_net.H
    assert net_hat.n <= 14 and net_bar_hat.n <= 14
    assert net_hat.n == 12 and net_bar_hat.n == 10
    a, ab = reduced_matrices(example_net)
    assert a == assemble(net_hat) and ab == assemble(net_bar_hat)
    graphs = load_fixture("example_graphs.json")
    assert _named_graph(a, net_hat) == _frozen(graphs["reduced"])
    assert _named_graph(ab, net_bar_hat) == _frozen(graphs["reduced_bar"])


def test_reduce_integrator_network(rng):
    for _ in range(20):
        n = int(rng.integers(1, 6))
        nodes = tuple(NodeSystem.from_strings(["0"], ["*"], ["*"]) for _ in range(n))
        w = PatternMatrix(rng.choice(3, size=(n, n), p=(0.6, 0.3, 0.1)).astype(np.int8))
        h = PatternMatrix(rng.choice(3, size=(n, 2), p=(0.6, 0.3, 0.1)).astype(np.int8))
        net = StructuredNetwork(nodes, w, h)
        net_hat, _ = reduce(net)
        assert net_hat == net
        assert assemble(net) == concat_cols([w, h])
        assert assemble(net, use_bar=True) == concat_cols([bar(w), h])


def test_example_is_controllable(example_net):
    for method in (DIRECT, REDUCED):
        v = is_controllable(example_net, method)
        assert v.controllable and v.rank_A and v.rank_Abar and v.witness is None
    v = is_controllable(example_net, REDUCED)
    assert v.reduced_rows == 12 <= 2 * example_net.N
    assert len(v.per_node_conditions) == 7
    assert v.per_node_conditions[0] == (Condition.C1, Condition.C5)


def test_single_node_examples():
    v = is_controllable(single("?"))
    assert v.controllable and v.rank_A and v.rank_Abar
    v = is_controllable(single("*", h="0"), short_circuit=False)
    assert not v.controllable


def test_network_without_first_input():
    net = load_network(FIXTURES / "network_without_u1.json")
    expected = load_fixture("network_without_u1.verdict.json")
    verdicts = [is_controllable(net, m) for m in (DIRECT, REDUCED)]
    for v in verdicts:
        assert v.controllable is expected["controllable"]
        assert v.rank_A is expected["rank_A"] and v.rank_Abar is expected["rank_Abar"]
        assert v.witness.matrix == "Abar"
        assert membership(v.witness.pattern, v.witness.T)
        assert v.witness.z.any() and not (v.witness.z @ v.witness.T).any()
    assert verdicts[1].reduced_rows == expected["reduced_rows"]
    assert [list(m.shape) for m in reduced_matrices(net)] == expected["reduced_shapes"]


def test_short_circuit_names_the_node(example_net):
    nodes = list(example_net.nodes)
    nodes[2] = NodeSystem.from_strings(["0 0", "0 0"], ["*", "0"], ["* 0"])
    net = StructuredNetwork(tuple(nodes), example_net.W, example_net.H)
    for method in (DIRECT, REDUCED):
        v = is_controllable(net, method)
        assert not v.controllable and v.witness.culprit == 3
        w = v.witness
        assert membership(w.pattern, w.T) and w.z.any() and not (w.z @ w.T).any()
    v = is_controllable(net, DIRECT, short_circuit=False)
    assert not v.controllable and v.witness.culprit is None


def test_methods_agree_on_random_networks(rng):
    for _ in range(300):
        net = random_network(rng)
        d, r = is_controllable(net, DIRECT), is_controllable(net, REDUCED)
        assert d.controllable == r.controllable
        assert d.rank_A == r.rank_A and d.rank_Abar == r.rank_Abar
        if d.controllable:
            for node in net.nodes:
                assert full_row_rank(concat_cols([node.A, node.B]))
                assert full_row_rank(concat_cols([bar(node.A), node.B]))
        if r.reduced_rows:
            assert r.reduced_rows <= 2 * net.N
            conds = {c for pair in r.per_node_conditions for c in pair}
            short = {Condition.C2, Condition.C3, Condition.C5}
            plain = {c for c, _ in r.per_node_conditions}
            if plain & short:
                assert reduced_matrices(net)[0].rows < 2 * net.N
            assert conds


def test_unfiltered_nodes_never_crash(rng):
    """Nodes failing the standing assumption get a negative verdict, not an exception."""
    for _ in range(200):
        n = int(rng.integers(1, 4))
        nodes = tuple(random_node_any(rng, int(rng.integers(1, 4))) for _ in range(n))
        net = StructuredNetwork(nodes, PatternMatrix.zeros(n, n), PatternMatrix.from_rows(["*"] * n))
        d, r = is_controllable(net, DIRECT), is_controllable(net, REDUCED)
        assert d.controllable == r.controllable


def test_verdict_report(example_net):
    text = verdict_report(is_controllable(example_net, REDUCED))
    assert text.count("full row rank: yes") == 2
    assert sum(1 for ln in text.splitlines() if ln.strip()[:6] in {f"node {k}" for k in range(1, 8)}) == 7
    net = load_network(FIXTURES / "network_without_u1.json")
    v = is_controllable(net)
    text = verdict_report(v)
    assert "violated matrix: [bar(A) + BWC, BH]" in text
    assert "witness z: " + " ".join(str(int(x)) for x in v.witness.z) in text
    d = v.as_dict()
    assert d["controllable"] is False and d["witness"]["matrix"] == "Abar"


def test_node_conditions_match_classify(example_net):
    pairs = node_conditions(example_net)
    assert pairs == tuple((classify(n), classify(bar_node(n))) for n in example_net.nodes)


def test_unknown_method(example_net):
    with pytest.raises(ValueError):
        is_controllable(example_net, "fast")
