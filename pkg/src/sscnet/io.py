"""Reading and writing patterns, node systems and networks.

Text format: one matrix row per line, entries ``0``, ``*`` or ``?`` separated
by single spaces, a blank line ending the matrix. Node files hold three
blocks introduced by label lines ``A``, ``B`` and ``C``. JSON patterns are
``{"rows": p, "cols": q, "entries": ["0*?", ...]}``; a JSON network is
``{"nodes": [{"A": ..., "B": ..., "C": ...}, ...], "W": ..., "H": ...}``.
A network directory holds text files listed by a ``manifest.json`` of the
same shape with file names in place of patterns.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

from .errors import ParseError, ShapeError
from .network import StructuredNetwork
from .node import NodeSystem
from .pattern import PatternMatrix, PatternSymbol

MANIFEST = "manifest.json"
_SYMBOLS = {"0", "*", "?"}


def read_source(path) -> str:
    if str(path) == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None


def _is_label(line: str) -> bool:
    tokens = line.split()
    return len(tokens) == 1 and not set(tokens[0]) <= _SYMBOLS


def parse_blocks(text: str, where: str = "<text>") -> list[tuple]:
    """Split text into ``(label, PatternMatrix)`` blocks; label may be None."""
    blocks = []
    label, rows, start = None, [], 0

    def flush():
        nonlocal label, rows
        if rows:
            grid = []
            for lineno, line in rows:
                tokens = line.split()
                bad = [t for t in tokens if t not in _SYMBOLS]
                if bad:
                    raise ParseError(f"{where}:{lineno}: unexpected entry {bad[0]!r}")
                grid.append([PatternSymbol.parse(t) for t in tokens])
            widths = {len(g) for g in grid}
            if len(widths) != 1:
                raise ParseError(f"{where}:{rows[0][0]}: rows of unequal length in block")
            blocks.append((label, PatternMatrix(grid)))
        elif label is not None:
            raise ParseError(f"{where}:{start}: label {label!r} has no matrix")
        label, rows = None, []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            flush()
            continue
        if _is_label(line):
            flush()
            label, start = line.rstrip(":").strip("[]"), lineno
            continue
        rows.append((lineno, line))
    flush()
    return blocks


def pattern_from_json(obj, where: str = "pattern") -> PatternMatrix:
    if isinstance(obj, list):
        obj = {"rows": len(obj), "cols": len(obj[0].replace(" ", "")) if obj else 0, "entries": obj}
    if not isinstance(obj, dict) or "entries" not in obj:
        raise ParseError(f"{where}: expected an object with rows, cols and entries")
    entries = [str(e).replace(" ", "") for e in obj["entries"]]
    rows = obj.get("rows", len(entries))
    cols = obj.get("cols", len(entries[0]) if entries else 0)
    if rows < 1 or cols < 1:
        raise ParseError(f"{where}: empty matrices are not accepted")
    if len(entries) != rows:
        raise ParseError(f"{where}: rows={rows} but {len(entries)} entry strings")
    for r, e in enumerate(entries):
        if len(e) != cols:
            raise ParseError(f"{where}.entries[{r}]: length {len(e)}, expected {cols}")
        bad = set(e) - _SYMBOLS
        if bad:
            raise ParseError(f"{where}.entries[{r}]: unexpected symbol {sorted(bad)[0]!r}")
    return PatternMatrix.from_rows(entries)


def pattern_to_json(m: PatternMatrix) -> dict:
    return {"rows": m.rows, "cols": m.cols, "entries": m.to_strings(sep="")}


def pattern_to_text(m: PatternMatrix, label: str | None = None) -> str:
    head = f"{label}\n" if label else ""
    return head + "\n".join(m.to_strings()) + "\n"


def _loads(text: str, where: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{where}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _looks_json(text: str) -> bool:
    return text.lstrip().startswith(("{", "["))


def parse_pattern(text: str, where: str = "<pattern>") -> PatternMatrix:
    if _looks_json(text):
        return pattern_from_json(_loads(text, where), where)
    blocks = parse_blocks(text, where)
    if len(blocks) != 1:
        raise ParseError(f"{where}: expected one matrix, found {len(blocks)}")
    return blocks[0][1]


def _node_from_parts(parts: dict, where: str) -> NodeSystem:
    missing = [k for k in "ABC" if k not in parts]
    if missing:
        raise ParseError(f"{where}: missing block {missing[0]}")
    try:
        return NodeSystem(parts["A"], parts["B"], parts["C"])
    except ShapeError as exc:
        raise ParseError(f"{where}: {exc}") from None


def node_from_json(obj, where: str = "node") -> NodeSystem:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object with A, B, C")
    parts = {k: pattern_from_json(obj[k], f"{where}.{k}") for k in "ABC" if k in obj}
    return _node_from_parts(parts, where)


def node_to_json(node: NodeSystem) -> dict:
    return {"A": pattern_to_json(node.A), "B": pattern_to_json(node.B), "C": pattern_to_json(node.C)}


def node_to_text(node: NodeSystem) -> str:
    return "\n".join(pattern_to_text(m, k) for k, m in (("A", node.A), ("B", node.B), ("C", node.C)))


def parse_node(text: str, where: str = "<node>") -> NodeSystem:
    if _looks_json(text):
        return node_from_json(_loads(text, where), where)
    parts = {}
    for label, m in parse_blocks(text, where):
        if label not in ("A", "B", "C"):
            raise ParseError(f"{where}: unexpected block label {label!r}")
        parts[label] = m
    return _node_from_parts(parts, where)


def network_from_json(obj, where: str = "network") -> StructuredNetwork:
    if not isinstance(obj, dict) or not {"nodes", "W", "H"} <= set(obj):
        raise ParseError(f"{where}: expected an object with nodes, W and H")
    if not isinstance(obj["nodes"], list) or not obj["nodes"]:
        raise ParseError(f"{where}.nodes: expected a non-empty array")
    nodes = [node_from_json(n, f"{where}.nodes[{i}]") for i, n in enumerate(obj["nodes"])]
    w = pattern_from_json(obj["W"], f"{where}.W")
    h = pattern_from_json(obj["H"], f"{where}.H")
    return StructuredNetwork(tuple(nodes), w, h)


def network_to_json(net: StructuredNetwork) -> dict:
    return {
        "nodes": [node_to_json(node) for node in net.nodes],
        "W": pattern_to_json(net.W),
        "H": pattern_to_json(net.H),
    }


def dumps_network(net: StructuredNetwork) -> str:
    return json.dumps(network_to_json(net), indent=2) + "\n"


def parse_network(text: str, where: str = "<network>") -> StructuredNetwork:
    return network_from_json(_loads(text, where), where)


def read_network_dir(path) -> StructuredNetwork:
    path = Path(path)
    where = str(path / MANIFEST)
    manifest = _loads(read_source(path / MANIFEST), where)
    if not isinstance(manifest, dict) or not {"nodes", "W", "H"} <= set(manifest):
        raise ParseError(f"{where}: expected keys nodes, W and H")
    nodes = [parse_node(read_source(path / f), str(path / f)) for f in manifest["nodes"]]
    if not nodes:
        raise ParseError(f"{where}: no nodes listed")
    w = parse_pattern(read_source(path / manifest["W"]), str(path / manifest["W"]))
    h = parse_pattern(read_source(path / manifest["H"]), str(path / manifest["H"]))
    return StructuredNetwork(tuple(nodes), w, h)


def write_network_dir(net: StructuredNetwork, path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    names = []
    for k, node in enumerate(net.nodes, start=1):
        name = f"node{k}.txt"
        (path / name).write_text(node_to_text(node), encoding="utf-8")
        names.append(name)
    (path / "W.txt").write_text(pattern_to_text(net.W), encoding="utf-8")
    (path / "H.txt").write_text(pattern_to_text(net.H), encoding="utf-8")
    manifest = {"nodes": names, "W": "W.txt", "H": "H.txt"}
    (path / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def load_network(path) -> StructuredNetwork:
    if str(path) != "-" and Path(path).is_dir():
        return read_network_dir(path)
    return parse_network(read_source(path), str(path))


def load_node(path) -> NodeSystem:
    return parse_node(read_source(path), str(path))


def load_pattern(path) -> PatternMatrix:
    return parse_pattern(read_source(path), str(path))
