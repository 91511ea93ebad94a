"""Structured networks of SISO node systems and their controllability tests.

The closed loop is ``x' = (A + B W C) x + B H u`` with ``A, B, C`` block
diagonal over the nodes. The network is strongly structurally controllable
iff ``[A + BWC, BH]`` and ``[bar(A) + BWC, BH]`` both have full row rank
(the *direct* test). The *reduced* test swaps every node for its standard
node, first for ``(A_k, B_k, C_k)`` and then for ``(bar(A_k), B_k, C_k)``,
which caps both matrices at ``2N`` rows.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ShapeError
from .graph import full_row_rank, rank_deficiency_witness
from .node import (
    Diagnostic,
    bar_node,
    classify,
    split,
    standard_node,
    validate_node,
)
from .pattern import (
    PatternMatrix,
    bar,
    block_diag,
    concat_cols,
    pat_add,
    pat_mul,
)

DIRECT = "direct"
REDUCED = "reduced"


@dataclass(frozen=True)
class StructuredNetwork:
    nodes: tuple
    W: PatternMatrix
    H: PatternMatrix

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))

    @property
    def N(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return self.H.cols

    @property
    def n(self) -> int:
        return sum(node.n for node in self.nodes)

    def offsets(self) -> list[int]:
        out, acc = [], 0
        for node in self.nodes:
            out.append(acc)
            acc += node.n
        return out


@dataclass(frozen=True)
class Witness:
    """Certificate attached to a negative verdict.

    ``matrix`` names the pattern that failed (``"A"`` for ``[A + BWC, BH]``,
    ``"Abar"`` for its barred twin) and ``method`` the test it came from.
    ``T`` is an integer member of that pattern and ``z @ T == 0``.
    """

    matrix: str
    method: str
    T: np.ndarray
    z: np.ndarray
    pattern: PatternMatrix
    culprit: Optional[int] = None  # 1-based node when found by the per-node check


@dataclass(frozen=True)
class Verdict:
    controllable: bool
    rank_A: Optional[bool]
    rank_Abar: Optional[bool]
    method: str
    per_node_conditions: tuple = ()
    reduced_rows: int = 0
    witness: Optional[Witness] = None
    diagnostics: tuple = field(default=())

    def as_dict(self) -> dict:
        out = {
            "controllable": self.controllable,
            "rank_A": self.rank_A,
            "rank_Abar": self.rank_Abar,
            "method": self.method,
            "per_node_conditions": [[str(a), str(b)] for a, b in self.per_node_conditions],
            "reduced_rows": self.reduced_rows,
            "diagnostics": [str(d) for d in self.diagnostics],
            "witness": None,
        }
        if self.witness is not None:
            w = self.witness
            out["witness"] = {
                "matrix": w.matrix,
                "method": w.method,
                "culprit": w.culprit,
                "T": w.T.tolist(),
                "z": w.z.tolist(),
            }
        return out


def validate_network(net: StructuredNetwork) -> list[Diagnostic]:
    """Dimension checks (raising) plus per-node and necessary-condition diagnostics."""
    if net.N < 1:
        raise ShapeError("a network needs at least one node")
    if net.W.shape != (net.N, net.N):
        raise ShapeError(f"W is {net.W.shape}; expected ({net.N}, {net.N}) for {net.N} single-output nodes")
    if net.H.rows != net.N or net.H.cols < 1:
        raise ShapeError(f"H is {net.H.shape}; expected ({net.N}, m) with m >= 1")
    diags = []
    for k, node in enumerate(net.nodes, start=1):
        node_diags = validate_node(node)
        diags += [Diagnostic(d.code, d.message, k) for d in node_diags]
        if any(d.code.startswith("assumption") for d in node_diags):
            continue
        if not full_row_rank(concat_cols([bar(node.A), node.B])):
            diags.append(Diagnostic("node_uncontrollable", "[bar(A) B] is not of full row rank", k))
    if any(d.code == "node_uncontrollable" for d in diags):
        diags.append(
            Diagnostic(
                "network_uncontrollable_by_corollary_1",
                "some node system is not controllable on its own, so the network cannot be",
            )
        )
    return diags


def _structural_errors(diags):
    return [d for d in diags if d.code.startswith("assumption")]


def assemble(net: StructuredNetwork, use_bar: bool = False) -> PatternMatrix:
    """``[A + B W C, B H]``, with ``bar(A)`` in place of ``A`` when ``use_bar``."""
    a = block_diag([node.A for node in net.nodes])
    if use_bar:
        a = bar(a)
    b = block_diag([node.B for node in net.nodes])
    c = block_diag([node.C for node in net.nodes])
    closed = pat_add(a, pat_mul(pat_mul(b, net.W), c))
    return concat_cols([closed, pat_mul(b, net.H)])


def reduce(net: StructuredNetwork) -> tuple[StructuredNetwork, StructuredNetwork]:
    """Standard-node replacements for ``(A_k, B_k, C_k)`` and ``(bar(A_k), B_k, C_k)``."""
    plain = [standard_node(classify(node)) for node in net.nodes]
    barred = [standard_node(classify(bar_node(node))) for node in net.nodes]
    return (
        StructuredNetwork(tuple(plain), net.W, net.H),
        StructuredNetwork(tuple(barred), net.W, net.H),
    )


def node_conditions(net: StructuredNetwork) -> tuple:
    return tuple((classify(node), classify(bar_node(node))) for node in net.nodes)


def reduced_matrices(net: StructuredNetwork, conditions=None) -> tuple:
    """Assembled matrices of the two reduced networks.

    ``conditions`` (pairs for ``A_k`` and ``bar(A_k)``) may be passed in when
    the nodes were classified beforehand.
    """
    if conditions is None:
        conditions = node_conditions(net)
    net_hat = StructuredNetwork(tuple(standard_node(c) for c, _ in conditions), net.W, net.H)
    net_bar_hat = StructuredNetwork(tuple(standard_node(c) for _, c in conditions), net.W, net.H)
    return assemble(net_hat, False), assemble(net_bar_hat, False)


def _embed_node_witness(net, k, use_bar, method):
    """Lift a per-node rank certificate to the full network matrix.

    The input row of node ``k`` is the only one touched by ``W`` and ``H`` and
    it gets weight zero, so the remaining rows only see the node's own block.
    """
    node = net.nodes[k]
    a_k = bar(node.A) if use_bar else node.A
    local = rank_deficiency_witness(concat_cols([a_k, node.B]))
    full = assemble(net, use_bar)
    T = (full.codes == 1).astype(np.int64)
    z = np.zeros(net.n, np.int64)
    off = net.offsets()[k]
    j = split(node).input_row - 1
    for r in range(node.n):
        if r == j:
            continue
        T[off + r, off : off + node.n] = local.T[r, : node.n]
        z[off + r] = local.z[r]
    return Witness("Abar" if use_bar else "A", method, T, z, full, culprit=k + 1)


def _per_node_failure(net):
    for k, node in enumerate(net.nodes):
        if not full_row_rank(concat_cols([node.A, node.B])):
            return k, False
        if not full_row_rank(concat_cols([bar(node.A), node.B])):
            return k, True
    return None


def is_controllable(net: StructuredNetwork, method: str = DIRECT, short_circuit: bool = True) -> Verdict:
    """Decide strong structural controllability.

    With ``short_circuit`` a node that is not controllable on its own ends the
    test early with that node named in the witness. The reduced method always
    needs this check, since such nodes cannot be classified.
    """
    if method not in (DIRECT, REDUCED):
        raise ValueError(f"unknown method {method!r}")
    diags = validate_network(net)
    errors = _structural_errors(diags)
    if errors:
        raise ShapeError("; ".join(str(d) for d in errors))

    if short_circuit or method == REDUCED:
        failure = _per_node_failure(net)
        if failure is not None:
            k, failed_bar = failure
            return Verdict(
                controllable=False,
                rank_A=None if failed_bar else False,
                rank_Abar=False if failed_bar else None,
                method=method,
                witness=_embed_node_witness(net, k, failed_bar, method),
                diagnostics=tuple(diags),
            )

    conditions: tuple = ()
    if method == DIRECT:
        m_plain, m_bar = assemble(net, False), assemble(net, True)
    else:
        conditions = node_conditions(net)
        m_plain, m_bar = reduced_matrices(net, conditions)

    rank_a = full_row_rank(m_plain)
    rank_abar = full_row_rank(m_bar)
    witness = None
    for ok, mat, name in ((rank_a, m_plain, "A"), (rank_abar, m_bar, "Abar")):
        if not ok:
            cert = rank_deficiency_witness(mat)
            witness = Witness(name, method, cert.T, cert.z, mat)
            break
    return Verdict(
        controllable=rank_a and rank_abar,
        rank_A=rank_a,
        rank_Abar=rank_abar,
        method=method,
        per_node_conditions=conditions,
        reduced_rows=max(m_plain.rows, m_bar.rows),
        witness=witness,
        diagnostics=tuple(diags),
    )


def _yes_no(flag):
    return {True: "yes", False: "no", None: "not evaluated"}[flag]


def verdict_report(v: Verdict, title: str = "") -> str:
    lines = []
    if title:
        lines.append(title)
    lines.append(f"verdict: {'CONTROLLABLE' if v.controllable else 'NOT CONTROLLABLE'} (method: {v.method})")
    lines.append(f"[A + BWC, BH] full row rank: {_yes_no(v.rank_A)}")
    lines.append(f"[bar(A) + BWC, BH] full row rank: {_yes_no(v.rank_Abar)}")
    if v.reduced_rows:
        lines.append(f"rows tested: {v.reduced_rows}")
    if v.per_node_conditions:
        lines.append("node conditions (A, bar(A)):")
        for k, (c, cb) in enumerate(v.per_node_conditions, start=1):
            lines.append(f"  node {k}: {c}, {cb}")
    for d in v.diagnostics:
        lines.append(f"diagnostic: {d}")
    if v.witness is not None:
        w = v.witness
        name = "[A + BWC, BH]" if w.matrix == "A" else "[bar(A) + BWC, BH]"
        if w.culprit is not None:
            lines.append(f"node {w.culprit} fails on its own")
        lines.append(f"violated matrix: {name}")
        lines.append("witness z: " + " ".join(str(int(x)) for x in w.z))
        lines.append("witness T:")
        lines += ["  " + " ".join(f"{int(x):>3d}" for x in row) for row in w.T]
    return "\n".join(lines) + "\n"
