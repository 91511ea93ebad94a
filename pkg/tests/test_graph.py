import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sscnet.errors import ShapeError
from sscnet.graph import (
    derived_set,
    export_dot,
    full_row_rank,
    graph_of,
    interconnection_dot,
    is_independent,
    rank_deficiency_witness,
)
from sscnet.pattern import PatternMatrix, concat_cols, membership, stack_rows


def pm(*rows):
    return PatternMatrix.from_rows(rows)


def col_a1_c1(net):
    node = net.nodes[0]
    return stack_rows([node.A, node.C])


codes_strategy = st.tuples(st.integers(1, 5), st.integers(1, 5)).flatmap(
    lambda rc: st.lists(st.integers(0, 2), min_size=rc[0] * rc[1], max_size=rc[0] * rc[1]).map(
        lambda v: PatternMatrix(np.array(v, dtype=np.int8).reshape(rc))
    )
)


def test_graph_of_examples(example_net):
    g = graph_of(pm("*"))
    assert g.node_count == 1 and g.star_edges == {(1, 1)} and not g.quest_edges
    g = graph_of(col_a1_c1(example_net))
    assert g.node_count == 5
    assert g.star_edges == {(1, 2), (1, 4), (1, 5), (2, 1), (2, 2), (3, 2), (4, 3)}
    assert not g.quest_edges
    g = graph_of(PatternMatrix.zeros(2, 2))
    assert g.node_count == 2 and not g.edges


def test_graph_edges_follow_transposed_entries():
    g = graph_of(pm("0 ?", "* 0", "0 0"))
    assert g.node_count == 3
    assert g.star_edges == {(1, 2)}
    assert g.quest_edges == {(2, 1)}


def test_derived_set_of_example_node(example_net):
    s = derived_set(col_a1_c1(example_net))
    assert s.black == {1, 2, 3}
    assert s.trace == ((3, 2), (2, 1), (4, 3))


def test_derived_set_small_cases():
    assert derived_set(pm("* 0")).black == {1}
    m = pm("* ?", "? *")
    assert derived_set(m, {1, 2}).black == {1, 2}
    assert derived_set(m, {1, 2}).trace == ()
    with pytest.raises(ValueError):
        derived_set(m, {3})


def test_trace_steps_obey_the_rule(rng):
    for _ in range(200):
        p, q = rng.integers(1, 6, 2)
        m = PatternMatrix(rng.choice(3, size=(p, q), p=(0.5, 0.35, 0.15)).astype(np.int8))
        black = set()
        for i, j in derived_set(m).trace:
            white_out = [r + 1 for r in range(p) if m.codes[r, i - 1] != 0 and (r + 1) not in black]
            assert white_out == [j]
            assert m.codes[j - 1, i - 1] == 1
            black.add(j)


def test_order_invariance(rng):
    for _ in range(100):
        p, q = rng.integers(1, 6, 2)
        m = PatternMatrix(rng.choice(3, size=(p, q), p=(0.5, 0.35, 0.15)).astype(np.int8))
        ref = derived_set(m).black
        for _ in range(20):
            order = (rng.permutation(max(p, q)) + 1).tolist()
            assert derived_set(m, order=order).black == ref
    with pytest.raises(ValueError):
        derived_set(pm("* 0"), order=[1, 1])


@settings(max_examples=200, deadline=None)
@given(codes_strategy, st.data())
def test_monotone_in_seed(m, data):
    nv = max(m.shape)
    s2 = set(data.draw(st.sets(st.integers(1, nv))))
    s1 = set(data.draw(st.sets(st.sampled_from(sorted(s2))))) if s2 else set()
    d1, d2 = derived_set(m, s1).black, derived_set(m, s2).black
    assert s1 <= d1 and s2 <= d2
    assert d1 <= d2


def test_full_row_rank_examples(example_net):
    assert full_row_rank(pm("*"))
    assert not full_row_rank(pm("?"))
    assert not full_row_rank(pm("*", "*"))
    node = example_net.nodes[0]
    assert full_row_rank(concat_cols([node.A, node.B]))


def test_independence_examples(example_net):
    assert is_independent(pm("* 0"), pm("0 *"))
    assert not is_independent(pm("? 0"), pm("0 *"))
    node = example_net.nodes[0]
    assert is_independent(node.A.row(1), stack_rows([node.A.delete_row(1), node.C]))
    empty = PatternMatrix.zeros(0, 2)
    assert is_independent(pm("0 *"), empty)
    assert not is_independent(pm("? ?"), empty)
    with pytest.raises(ShapeError):
        is_independent(pm("* 0", "0 *"), pm("0 *"))
    with pytest.raises(ShapeError):
        is_independent(pm("* 0"), pm("*"))


def test_witness_examples():
    t, z = rank_deficiency_witness(pm("?"))
    assert t.tolist() == [[0]] and z.tolist() == [1]
    m = pm("* *", "* *")
    t, z = rank_deficiency_witness(m)
    assert membership(m, t) and z.any() and not (z @ t).any()
    assert rank_deficiency_witness(pm("* 0", "0 *")) is None


@settings(max_examples=500, deadline=None)
@given(codes_strategy)
def test_witness_soundness(m):
    cert = rank_deficiency_witness(m)
    if full_row_rank(m):
        assert cert is None
        return
    assert cert is not None
    assert membership(m, cert.T)
    assert cert.z.any()
    assert not (cert.z @ cert.T).any()


def test_tall_patterns_are_not_full_row_rank():
    assert not full_row_rank(pm("*", "0"))
    m = pm("*", "*")
    cert = rank_deficiency_witness(m)
    assert cert is not None and not (cert.z @ cert.T).any()


def test_export_dot_styles(example_net):
    dot = export_dot(pm("*"))
    assert dot.startswith("digraph") and "1 -> 1;" in dot and "dashed" not in dot
    dot = export_dot(pm("?"))
    assert "1 -> 1 [style=dashed];" in dot
    m = col_a1_c1(example_net)
    dot = export_dot(m, overlay=derived_set(m))
    assert dot.count("style=filled") == 3


def test_interconnection_dot(example_net):
    dot = interconnection_dot(example_net.W, example_net.H)
    lines = dot.splitlines()
    assert sum(1 for ln in lines if "[label=" in ln and "u" not in ln.split("[")[0]) == 7
    assert sum(1 for ln in lines if ln.strip().startswith("u") and "[label=" in ln) == 4
    n_quest = int((example_net.W.codes == 2).sum() + (example_net.H.codes == 2).sum())
    assert dot.count("style=dashed") == n_quest
    assert "  2 -> 2 [style=dashed];" in lines
    assert "  u4 -> 3 [style=dashed];" in lines
