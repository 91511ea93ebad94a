"""Strong structural controllability of networks of structured SISO systems."""
from .errors import BudgetError, ClassificationError, ParseError, ShapeError
from .graph import (
    Coloring,
    PatternGraph,
    derived_set,
    export_dot,
    full_row_rank,
    graph_of,
    is_independent,
    rank_deficiency_witness,
)
from .network import (
    StructuredNetwork,
    Verdict,
    assemble,
    is_controllable,
    reduce,
    validate_network,
    verdict_report,
)
from .node import (
    Condition,
    NodeSystem,
    PropertyFlags,
    bar_node,
    classify,
    properties,
    split,
    standard_node,
    validate_node,
)
from .pattern import (
    PatternMatrix,
    PatternSymbol,
    bar,
    block_diag,
    concat_cols,
    membership,
    pat_add,
    pat_mul,
    product_class_exact,
    stack_rows,
    sym_add,
    sym_mul,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "ClassificationError",
    "ParseError",
    "ShapeError",
    "Coloring",
    "PatternGraph",
    "derived_set",
    "export_dot",
    "full_row_rank",
    "graph_of",
    "is_independent",
    "rank_deficiency_witness",
    "StructuredNetwork",
    "Verdict",
    "assemble",
    "is_controllable",
    "reduce",
    "validate_network",
    "verdict_report",
    "Condition",
    "NodeSystem",
    "PropertyFlags",
    "bar_node",
    "classify",
    "properties",
    "split",
    "standard_node",
    "validate_node",
    "PatternMatrix",
    "PatternSymbol",
    "bar",
    "block_diag",
    "concat_cols",
    "membership",
    "pat_add",
    "pat_mul",
    "product_class_exact",
    "stack_rows",
    "sym_add",
    "sym_mul",
]
