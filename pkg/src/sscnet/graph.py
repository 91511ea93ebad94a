"""Graph of a pattern matrix, the color change rule and rank tests built on it.

For a ``p x q`` pattern the graph has nodes ``1..max(p, q)`` and an edge
``(i, j)`` whenever entry ``(j, i)`` is nonzero; ``*`` entries give solid
edges and ``?`` entries dashed ones. Node labels in this module's public
API are 1-based; the kernels work 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from . import kernels
from .errors import ShapeError
from .pattern import PatternMatrix, stack_rows


@dataclass(frozen=True)
class PatternGraph:
    node_count: int
    star_edges: frozenset
    quest_edges: frozenset

    @property
    def edges(self) -> frozenset:
        return self.star_edges | self.quest_edges


@dataclass(frozen=True)
class Coloring:
    black: frozenset
    trace: tuple = field(default=())

    def __contains__(self, node):
        return node in self.black


class RankWitness(NamedTuple):
    """Integer realization ``T`` of a pattern and ``z != 0`` with ``z @ T == 0``."""

    T: np.ndarray
    z: np.ndarray


def graph_of(m: PatternMatrix) -> PatternGraph:
    codes = m.codes
    rows, cols = np.nonzero(codes)
    star, quest = set(), set()
    for j, i in zip(rows.tolist(), cols.tolist()):
        (star if codes[j, i] == 1 else quest).add((i + 1, j + 1))
    return PatternGraph(max(m.shape), frozenset(star), frozenset(quest))


def _black_mask(m: PatternMatrix, nodes: Iterable[int]) -> np.ndarray:
    nv = max(m.shape)
    mask = np.zeros(nv, dtype=np.bool_)
    for v in nodes:
        if not 1 <= v <= nv:
            raise ValueError(f"node {v} outside 1..{nv}")
        mask[v - 1] = True
    return mask


def _run(m: PatternMatrix, mask: np.ndarray, order=None):
    nv = max(m.shape)
    if order is None:
        order = np.arange(nv, dtype=np.int64)
    else:
        order = np.asarray(order, dtype=np.int64) - 1
        if sorted(order.tolist()) != list(range(nv)):
            raise ValueError("order must be a permutation of the graph's nodes")
    return kernels.derived_set(m.codes, mask, order)


def derived_set(
    m: PatternMatrix, initial_black: Iterable[int] = (), order: Optional[Sequence[int]] = None
) -> Coloring:
    """Fixpoint of the color change rule started from ``initial_black``.

    A node ``i`` with exactly one white out-neighbour ``j``, reached by a
    ``*`` edge, colors ``j`` black. With an empty seed the result is the
    derived set of ``m``. ``order`` (1-based permutation of the nodes) sets
    which applicable node fires first; the black set does not depend on it.
    """
    black, trace = _run(m, _black_mask(m, initial_black), order)
    return Coloring(
        frozenset((np.flatnonzero(black) + 1).tolist()),
        tuple((int(i) + 1, int(j) + 1) for i, j in trace),
    )


def full_row_rank(m: PatternMatrix) -> bool:
    """True iff every matrix in the pattern class has full row rank."""
    p, q = m.shape
    if p > q:
        return False
    black, _ = _run(m, np.zeros(max(p, q), dtype=np.bool_))
    return bool(black[:p].all())


def is_independent(m: PatternMatrix, n: PatternMatrix) -> bool:
    """Whether the pattern row ``m`` is independent of the rows of ``n``.

    ``n`` may have zero rows, in which case the answer is whether ``m`` has a
    ``*`` entry.
    """
    if m.rows != 1:
        raise ShapeError(f"is_independent: first argument must be a single row, got {m.shape}")
    if m.cols != n.cols:
        raise ShapeError(f"is_independent: column counts differ ({m.cols} vs {n.cols})")
    t = stack_rows([m, n])
    black, _ = _run(t, np.zeros(max(t.shape), dtype=np.bool_))
    return bool(black[0])


def rank_deficiency_witness(m: PatternMatrix) -> Optional[RankWitness]:
    """Exact certificate that some member of the class lacks full row rank.

    Rows outside the derived set get ``z = 1``. In every column their entries
    are either all zero or can be chosen to sum to zero, since a column with a
    single ``*`` among them would have fired. Returns ``None`` when ``m`` has
    full row rank.
    """
    p, q = m.shape
    codes = m.codes
    black, _ = _run(m, np.zeros(max(p, q), dtype=np.bool_))
    white = ~black[:p]
    if not white.any():
        return None
    T = (codes == 1).astype(np.int64)
    for i in range(q):
        rows = np.flatnonzero(white & (codes[:, i] != 0))
        if rows.size == 0:
            continue
        stars = rows[codes[rows, i] == 1]
        quests = rows[codes[rows, i] == 2]
        if quests.size:
            T[quests[0], i] = -stars.size
        else:
            if stars.size < 2:  # pragma: no cover - excluded by the fixpoint
                raise AssertionError("derived set is not a fixpoint")
            T[stars[-1], i] = -(stars.size - 1)
    z = white.astype(np.int64)
    return RankWitness(T, z)


def _dot_lines(graph: PatternGraph, black=frozenset(), labels=None):
    out = []
    labels = labels or {}
    for v in range(1, graph.node_count + 1):
        attrs = [f'label="{labels.get(v, v)}"']
        if v in black:
            attrs.append('style=filled fillcolor="black" fontcolor="white"')
        out.append(f"  {v} [{' '.join(attrs)}];")
    for i, j in sorted(graph.star_edges):
        out.append(f"  {i} -> {j};")
    for i, j in sorted(graph.quest_edges):
        out.append(f"  {i} -> {j} [style=dashed];")
    return out


def export_dot(
    m: PatternMatrix, overlay: Optional[Coloring] = None, name: str = "G", labels: Optional[dict] = None
) -> str:
    """DOT digraph of ``m``; ``?`` edges dashed, overlay nodes filled.

    ``labels`` maps 1-based nodes to display names (default: the number).
    """
    black = overlay.black if overlay is not None else frozenset()
    lines = [f"digraph {name} {{", "  node [shape=circle];"]
    lines += _dot_lines(graph_of(m), black, labels)
    lines.append("}")
    return "\n".join(lines) + "\n"


def interconnection_dot(w: PatternMatrix, h: PatternMatrix, name: str = "network") -> str:
    """DOT view of an interconnection law: node systems 1..N and inputs u1..um.

    ``W[k, j] != 0`` draws ``j -> k``; ``H[k, l] != 0`` draws ``u(l+1) -> k``.
    """
    n_nodes, n_inputs = h.shape
    lines = [f"digraph {name} {{", "  node [shape=circle];"]
    for k in range(1, n_nodes + 1):
        lines.append(f'  {k} [label="{k}"];')
    for u in range(1, n_inputs + 1):
        lines.append(f'  u{u} [label="u{u}" shape=point xlabel="u{u}"];')

    def edge(src, dst, code):
        return f"  {src} -> {dst}" + (" [style=dashed];" if code == 2 else ";")

    for k, j in zip(*np.nonzero(w.codes)):
        lines.append(edge(j + 1, k + 1, w.codes[k, j]))
    for k, u in zip(*np.nonzero(h.codes)):
        lines.append(edge(f"u{u + 1}", k + 1, h.codes[k, u]))
    lines.append("}")
    return "\n".join(lines) + "\n"
