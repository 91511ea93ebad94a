"""Single-input single-output node systems and their six-way classification.

A node system ``(A, B, C)`` has ``B`` a column and ``C`` a row, each with a
single ``*``. The row of ``A`` that receives the input is split off as
``A1``; the remaining rows form ``A2``. Four independence properties S1..S4
then place the node in exactly one of the conditions C1..C6, and nodes in the
same condition are interchangeable inside any network. Each condition has a
fixed standard node of dimension 1 or 2.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .errors import ClassificationError, ShapeError
from .graph import Coloring, derived_set, full_row_rank, is_independent
from .pattern import PatternMatrix, bar, concat_cols, stack_rows


class Condition(enum.Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    C5 = "C5"
    C6 = "C6"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class NodeSystem:
    A: PatternMatrix
    B: PatternMatrix
    C: PatternMatrix

    def __post_init__(self):
        n = self.A.rows
        if n < 1 or self.A.cols != n:
            raise ShapeError(f"node A must be square with n >= 1, got {self.A.shape}")
        if self.B.rows != n:
            raise ShapeError(f"node B has {self.B.rows} rows, A has {n}")
        if self.C.cols != n:
            raise ShapeError(f"node C has {self.C.cols} columns, A has {n}")

    @property
    def n(self) -> int:
        return self.A.rows

    @classmethod
    def from_strings(cls, a, b, c) -> "NodeSystem":
        return cls(PatternMatrix.from_rows(a), PatternMatrix.from_rows(b), PatternMatrix.from_rows(c))


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    node: Optional[int] = None

    def __str__(self):
        where = f"node {self.node}: " if self.node is not None else ""
        return f"{self.code}: {where}{self.message}"


@dataclass(frozen=True)
class NodeSplit:
    input_row: int  # 1-based
    A1: PatternMatrix
    A2: PatternMatrix


@dataclass(frozen=True)
class PropertyFlags:
    s1: bool
    s2: bool
    s3: bool
    s4: bool

    def as_dict(self):
        return {"S1": self.s1, "S2": self.s2, "S3": self.s3, "S4": self.s4}


@dataclass(frozen=True)
class NodeColoring:
    """The three colorings of ``col(A, C)`` used to read off S1..S4."""

    T: PatternMatrix
    input_row: int
    output_node: int
    derived: Coloring
    seeded_output: Coloring  # from derived set plus the output node
    seeded_input: Coloring  # from derived set plus the input row

    @property
    def flags(self) -> PropertyFlags:
        j, o = self.input_row, self.output_node
        return PropertyFlags(
            s1=j in self.derived,
            s2=j in self.seeded_output,
            s3=o in self.derived,
            s4=o in self.seeded_input,
        )


def _single_star(codes) -> bool:
    return int((codes == 1).sum()) == 1 and int((codes == 2).sum()) == 0


def validate_node(node: NodeSystem) -> list[Diagnostic]:
    diags = []
    if node.B.cols != 1 or node.C.rows != 1:
        diags.append(
            Diagnostic("assumption_1", f"B is {node.B.shape} and C is {node.C.shape}; expected n x 1 and 1 x n")
        )
        return diags
    if not _single_star(node.B.codes):
        diags.append(Diagnostic("assumption_2", "B must have exactly one * and zeros elsewhere"))
    if not _single_star(node.C.codes):
        diags.append(Diagnostic("assumption_2", "C must have exactly one * and zeros elsewhere"))
    if not full_row_rank(concat_cols([node.A, node.B])):
        diags.append(Diagnostic("node_uncontrollable", "[A B] is not of full row rank"))
    return diags


def _require_valid(node: NodeSystem):
    diags = validate_node(node)
    if diags:
        raise ClassificationError("; ".join(str(d) for d in diags))


def split(node: NodeSystem) -> NodeSplit:
    if not _single_star(node.B.codes) or node.B.cols != 1:
        raise ClassificationError("B must be a column with a single *")
    j = int(node.B.codes[:, 0].argmax())
    return NodeSplit(j + 1, node.A.row(j), node.A.delete_row(j))


def node_coloring(node: NodeSystem) -> NodeColoring:
    """Seeded colorings of ``col(A, C)``.

    One derived set answers S1 and S3 directly; re-seeding it with the output
    node (resp. the input row) answers S2 (resp. S4) without starting over.
    """
    _require_valid(node)
    t = stack_rows([node.A, node.C])
    j = split(node).input_row
    out = node.n + 1
    s = derived_set(t)
    return NodeColoring(
        T=t,
        input_row=j,
        output_node=out,
        derived=s,
        seeded_output=derived_set(t, s.black | {out}),
        seeded_input=derived_set(t, s.black | {j}),
    )


def properties(node: NodeSystem) -> PropertyFlags:
    return node_coloring(node).flags


def properties_direct(node: NodeSystem) -> PropertyFlags:
    """S1..S4 evaluated one by one through the independence test."""
    _require_valid(node)
    sp = split(node)
    return PropertyFlags(
        s1=is_independent(sp.A1, stack_rows([sp.A2, node.C])),
        s2=is_independent(sp.A1, sp.A2),
        s3=is_independent(node.C, node.A),
        s4=is_independent(node.C, sp.A2),
    )


def condition_of(flags: PropertyFlags) -> Condition:
    s1, s2, s3, s4 = flags.s1, flags.s2, flags.s3, flags.s4
    matches = [
        c
        for c, hit in (
            (Condition.C1, s1),
            (Condition.C2, s3),
            (Condition.C3, s2 and s4),
            (Condition.C4, s2 and not s1 and not s4),
            (Condition.C5, s4 and not s2 and not s3),
            (Condition.C6, not s2 and not s4),
        )
        if hit
    ]
    if len(matches) != 1:
        raise RuntimeError(f"property flags {flags} match conditions {matches}")
    return matches[0]


def classify(node: NodeSystem) -> Condition:
    return condition_of(properties(node))


_STANDARD_A = {
    Condition.C1: ["0 *", "* 0"],
    Condition.C2: ["0"],
    Condition.C3: ["*"],
    Condition.C4: ["0 *", "* ?"],
    Condition.C5: ["?"],
    Condition.C6: ["0 0", "* 0"],
}


def standard_node(c: Condition) -> NodeSystem:
    a = PatternMatrix.from_rows(_STANDARD_A[c])
    if a.rows == 2:
        return NodeSystem(a, PatternMatrix.from_rows(["*", "0"]), PatternMatrix.from_rows(["* 0"]))
    return NodeSystem(a, PatternMatrix.from_rows(["*"]), PatternMatrix.from_rows(["*"]))


def bar_node(node: NodeSystem) -> NodeSystem:
    return NodeSystem(bar(node.A), node.B, node.C)
