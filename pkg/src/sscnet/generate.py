"""Seeded random node systems and networks for property runs and benchmarks."""
from __future__ import annotations

import numpy as np

from .errors import ShapeError
from .graph import full_row_rank
from .network import StructuredNetwork
from .node import NodeSystem
from .pattern import PatternMatrix, bar, concat_cols

# probabilities of 0, *, ? for random A and W entries
A_WEIGHTS = (0.5, 0.35, 0.15)
W_WEIGHTS = (0.6, 0.3, 0.1)


class GenerationError(RuntimeError):
    pass


def random_pattern(rng, rows, cols, weights=A_WEIGHTS) -> PatternMatrix:
    return PatternMatrix(rng.choice(3, size=(rows, cols), p=weights).astype(np.int8))


def _unit(n, k, column):
    codes = np.zeros((n, 1) if column else (1, n), dtype=np.int8)
    codes[(k, 0) if column else (0, k)] = 1
    return PatternMatrix(codes)


def random_node_any(rng, dim: int) -> NodeSystem:
    """A node with single-star ``B`` and ``C`` but no controllability filter."""
    a = random_pattern(rng, dim, dim)
    return NodeSystem(a, _unit(dim, rng.integers(dim), True), _unit(dim, rng.integers(dim), False))


def random_node(rng, dim=None, max_dim=5, require_bar=False, retries=1000) -> NodeSystem:
    """Random node with ``[A B]`` of full row rank (and ``[bar(A) B]`` if asked).

    The dimension is drawn once, so rejections do not bias it toward small nodes.
    """
    d = int(dim) if dim is not None else int(rng.integers(1, max_dim + 1))
    for _ in range(retries):
        node = random_node_any(rng, d)
        if not full_row_rank(concat_cols([node.A, node.B])):
            continue
        if require_bar and not full_row_rank(concat_cols([bar(node.A), node.B])):
            continue
        return node
    raise GenerationError(f"no valid node of dimension {d} after {retries} draws")


def random_forced_node(rng, dim: int) -> NodeSystem:
    """Random node built so the color change rule blackens every row of ``[A B]``.

    Rows are forced along a random chain: the input column forces row
    ``pi[0]``, then column ``pi[k]`` forces row ``pi[k + 1]``, which needs
    that column to be zero on the rows later in the chain. The diagonal entry
    of a forcing column sits on an earlier row, so ``[bar(A) B]`` passes too.
    Works at any size.
    """
    pi = rng.permutation(dim)
    codes = rng.choice(3, size=(dim, dim), p=A_WEIGHTS).astype(np.int8)
    for k in range(dim - 1):
        col = pi[k]
        codes[pi[k + 1], col] = 1
        codes[pi[k + 2 :], col] = 0
    b = _unit(dim, pi[0], True)
    return NodeSystem(PatternMatrix(codes), b, _unit(dim, rng.integers(dim), False))


def random_network(
    rng, n_nodes=None, max_nodes=5, max_dim=4, max_inputs=3, dim=None, retries=1000, forced=False
) -> StructuredNetwork:
    """Random network of valid nodes; ``H`` always carries at least one ``*``.

    ``forced`` uses :func:`random_forced_node`, needed once ``dim`` is large
    enough that rejection sampling stops finding valid nodes.
    """
    if n_nodes is not None and n_nodes < 1:
        raise ShapeError("a network needs at least one node")
    big_n = int(n_nodes) if n_nodes is not None else int(rng.integers(1, max_nodes + 1))
    m = int(rng.integers(1, max_inputs + 1))
    if forced:
        nodes = tuple(
            random_forced_node(rng, int(dim) if dim is not None else int(rng.integers(1, max_dim + 1)))
            for _ in range(big_n)
        )
    else:
        nodes = tuple(random_node(rng, dim=dim, max_dim=max_dim, retries=retries) for _ in range(big_n))
    w = random_pattern(rng, big_n, big_n, W_WEIGHTS)
    for _ in range(retries):
        h = random_pattern(rng, big_n, m, W_WEIGHTS)
        if (h.codes == 1).any():
            return StructuredNetwork(nodes, w, h)
    raise GenerationError(f"no input matrix with a * after {retries} draws")


def network_corpus(seed: int, count: int, **kwargs) -> list:
    rng = np.random.default_rng(seed)
    return [random_network(rng, **kwargs) for _ in range(count)]
