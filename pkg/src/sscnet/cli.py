"""Command-line front end.

Exit status: 0 controllable (or success), 1 not controllable or a node that
is not controllable on its own, 2 usage or input error, 3 internal
inconsistency (method disagreement or a numeric refutation).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BudgetError, ClassificationError, ParseError, ShapeError
from .generate import GenerationError, random_network
from .graph import (
    derived_set,
    export_dot,
    full_row_rank,
    interconnection_dot,
    is_independent,
    rank_deficiency_witness,
)
from .io import (
    dumps_network,
    load_network,
    load_node,
    load_pattern,
    network_to_json,
    node_to_json,
    node_to_text,
    parse_network,
    parse_pattern,
    read_source,
)
from .network import (
    DIRECT,
    REDUCED,
    assemble,
    is_controllable,
    node_conditions,
    reduce,
    reduced_matrices,
    validate_network,
    verdict_report,
)
from .node import bar_node, classify, node_coloring, standard_node, validate_node
from .oracle import SampleConfig, network_numeric_check, replay_witness
from .pattern import PatternMatrix, stack_rows

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_INCONSISTENT = 0, 1, 2, 3


def _emit(args, text: str, payload: dict):
    if args.format == "json":
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        sys.stdout.write(text)


def _yn(flag):
    return "yes" if flag else "no"


def _fmt_set(s):
    return "{" + ", ".join(str(v) for v in sorted(s)) + "}"


def _matrix_lines(x, indent="  "):
    return [indent + " ".join(f"{int(v):>3d}" for v in row) for row in np.asarray(x)]


def _indented(text, pad):
    return [pad + ln if ln else "" for ln in text.strip().splitlines()]


def _save_repro(net, tag: str) -> Path:
    text = dumps_network(net)
    path = Path.cwd() / f"sscnet-repro-{tag}-{hashlib.sha1(text.encode()).hexdigest()[:10]}.json"
    path.write_text(text, encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# check


def _numeric_summary_text(s):
    line = f"numeric check: {s['passes']}/{s['trials']} sampled realizations controllable (tolerance {s['tolerance']:g})"
    if s["first_failure_seed"] is not None:
        line += f"; first failure at seed {s['first_failure_seed']}"
    return line + "\n"


def cmd_check(args):
    net = load_network(args.network)
    methods = [DIRECT, REDUCED] if args.method == "both" else [args.method]
    verdicts = {m: is_controllable(net, m) for m in methods}
    text = "".join(verdict_report(v) for v in verdicts.values())
    payload = {"verdicts": {m: v.as_dict() for m, v in verdicts.items()}}
    first = verdicts[methods[0]]
    if len({v.controllable for v in verdicts.values()}) > 1:
        path = _save_repro(net, "disagreement")
        payload["error"] = f"direct and reduced verdicts disagree; reproduction saved to {path}"
        _emit(args, text + "error: " + payload["error"] + "\n", payload)
        return EXIT_INCONSISTENT
    if len(methods) == 2:
        text += "methods agree: yes\n"
        payload["methods_agree"] = True

    status = EXIT_OK if first.controllable else EXIT_NO
    if args.verify_samples:
        cfg = SampleConfig(seed=args.seed, trials=args.verify_samples, rank_tolerance=args.tolerance)
        if first.controllable:
            summary = network_numeric_check(net, cfg)
            payload["numeric"] = summary
            text += _numeric_summary_text(summary)
            if summary["failures"]:
                status = EXIT_INCONSISTENT
                path = _save_repro(net, "refuted")
                text += f"error: a sampled realization is not controllable; reproduction saved to {path}\n"
        else:
            replay = replay_witness(net, tol=args.tolerance)
            payload["witness_replay"] = {
                "kalman_controllable": replay["kalman_controllable"],
                "residual": replay["residual"],
                "shift": replay["lam"],
            }
            text += f"witness replay: Kalman test {'passes' if replay['kalman_controllable'] else 'fails'} (residual {replay['residual']:.1e})\n"
            if replay["kalman_controllable"]:
                status = EXIT_INCONSISTENT
    _emit(args, text, payload)
    return status


# ---------------------------------------------------------------------------
# classify


def _node_report(node, title):
    nc = node_coloring(node)
    cond = classify(node)
    flags = nc.flags
    std = standard_node(cond)
    lines = [title]
    for k, v in flags.as_dict().items():
        lines.append(f"  {k}: {_yn(v)}")
    lines.append(f"  condition: {cond}")
    lines.append(f"  input row j: {nc.input_row}, output node: {nc.output_node}")
    lines.append(f"  derived set of col(A, C): {_fmt_set(nc.derived.black)}")
    lines.append(f"  seeded with output node: {_fmt_set(nc.seeded_output.black)}")
    lines.append(f"  seeded with input row: {_fmt_set(nc.seeded_input.black)}")
    lines.append("  standard node:")
    lines += _indented(node_to_text(std), "    ")
    payload = {
        "flags": flags.as_dict(),
        "condition": str(cond),
        "input_row": nc.input_row,
        "output_node": nc.output_node,
        "derived_set": sorted(nc.derived.black),
        "derived_trace": [list(t) for t in nc.derived.trace],
        "seeded_output": sorted(nc.seeded_output.black),
        "seeded_input": sorted(nc.seeded_input.black),
        "standard_node": node_to_json(std),
    }
    return "\n".join(lines) + "\n", payload


def cmd_classify(args):
    node = load_node(args.node)
    diags = validate_node(node)
    if any(d.code.startswith("assumption") for d in diags):
        raise ParseError("; ".join(str(d) for d in diags))
    if diags:
        text = "".join(f"{d}\n" for d in diags)
        _emit(args, text, {"diagnostics": [str(d) for d in diags]})
        return EXIT_NO
    t1, p1 = _node_report(node, "node (A, B, C):")
    try:
        t2, p2 = _node_report(bar_node(node), "node (bar(A), B, C):")
    except ClassificationError as exc:
        t2, p2 = f"node (bar(A), B, C):\n  not classifiable: {exc}\n", {"error": str(exc)}
    _emit(args, t1 + t2, {"node": p1, "bar_node": p2})
    return EXIT_OK


# ---------------------------------------------------------------------------
# reduce


def _uncontrollable_nodes(args, net):
    """Print and return diagnostics for nodes that cannot be classified."""
    diags = [d for d in validate_network(net) if "uncontrollable" in d.code]
    if diags:
        _emit(args, "".join(f"{d}\n" for d in diags), {"diagnostics": [str(d) for d in diags]})
    return diags


def cmd_reduce(args):
    net = load_network(args.network)
    if _uncontrollable_nodes(args, net):
        return EXIT_NO
    conds = node_conditions(net)
    net_hat, net_bar_hat = reduce(net)
    lines = ["node conditions (A, bar(A)):"]
    lines += [f"  node {k}: {a}, {b}" for k, (a, b) in enumerate(conds, start=1)]
    for name, rn in (("reduced network", net_hat), ("reduced network for bar(A)", net_bar_hat)):
        lines.append(f"{name} ({rn.n} states):")
        for k, node in enumerate(rn.nodes, start=1):
            lines.append(f"  node {k}:")
            lines += _indented(node_to_text(node), "    ")
    payload = {
        "conditions": [[str(a), str(b)] for a, b in conds],
        "reduced": network_to_json(net_hat),
        "reduced_bar": network_to_json(net_bar_hat),
    }
    _emit(args, "\n".join(lines) + "\n", payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# rank and independence


def cmd_rank(args):
    m = load_pattern(args.pattern)
    ok = full_row_rank(m)
    s = derived_set(m)
    lines = [f"full row rank: {_yn(ok)}", f"derived set: {_fmt_set(s.black)}"]
    payload = {"full_row_rank": ok, "derived_set": sorted(s.black), "witness": None}
    cert = rank_deficiency_witness(m)
    if cert is not None:
        lines.append("witness z: " + " ".join(str(int(v)) for v in cert.z))
        lines.append("witness T:")
        lines += _matrix_lines(cert.T)
        payload["witness"] = {"T": cert.T.tolist(), "z": cert.z.tolist()}
    _emit(args, "\n".join(lines) + "\n", payload)
    return EXIT_OK


def cmd_independent(args):
    m = load_pattern(args.pattern)
    if not 1 <= args.row <= m.rows:
        raise ParseError(f"--row {args.row} outside 1..{m.rows}")
    r = args.row - 1
    rest = m.delete_row(r)
    ok = is_independent(m.row(r), rest)
    t = stack_rows([m.row(r), rest])
    s = derived_set(t)
    text = f"row {args.row} independent of the other rows: {_yn(ok)}\nderived set (row {args.row} first): {_fmt_set(s.black)}\n"
    _emit(args, text, {"row": args.row, "independent": ok, "derived_set": sorted(s.black)})
    return EXIT_OK


# ---------------------------------------------------------------------------
# sample-verify


def cmd_sample_verify(args):
    net = load_network(args.network)
    verdict = is_controllable(net, DIRECT)
    cfg = SampleConfig(seed=args.seed, trials=args.trials, rank_tolerance=args.tolerance)
    summary = network_numeric_check(net, cfg)
    text = verdict_report(verdict) + _numeric_summary_text(summary)
    payload = {"verdict": verdict.as_dict(), "numeric": summary}
    status = EXIT_OK if verdict.controllable else EXIT_NO
    if verdict.controllable and summary["failures"]:
        text += "error: structural verdict refuted by a sampled realization\n"
        status = EXIT_INCONSISTENT
    if not verdict.controllable:
        replay = replay_witness(net, verdict.witness, args.tolerance)
        payload["witness_replay"] = {"kalman_controllable": replay["kalman_controllable"], "residual": replay["residual"]}
        text += f"witness replay: Kalman test {'passes' if replay['kalman_controllable'] else 'fails'}\n"
        if replay["kalman_controllable"]:
            status = EXIT_INCONSISTENT
    _emit(args, text, payload)
    return status


# ---------------------------------------------------------------------------
# export-dot


def _load_network_or_pattern(path):
    if str(path) != "-" and Path(path).is_dir():
        return load_network(path)
    text = read_source(path)
    try:
        return parse_network(text, str(path))
    except ParseError as net_err:
        try:
            return parse_pattern(text, str(path))
        except ParseError:
            raise net_err from None


def cmd_export_dot(args):
    obj = _load_network_or_pattern(args.file)
    if isinstance(obj, PatternMatrix):
        if args.reduced or args.interconnection:
            raise ParseError("--reduced and --interconnection need a network file")
        sys.stdout.write(export_dot(obj))
        return EXIT_OK
    net = obj
    if args.interconnection:
        sys.stdout.write(interconnection_dot(net.W, net.H))
        return EXIT_OK
    if args.reduced:
        if _uncontrollable_nodes(args, net):
            return EXIT_NO
        net_hat, net_bar_hat = reduce(net)
        mat = assemble(net_bar_hat if args.bar else net_hat, False)
        n = (net_bar_hat if args.bar else net_hat).n
    else:
        validate_network(net)
        mat = assemble(net, args.bar)
        n = net.n
    labels = {n + k: f"u{k}" for k in range(1, net.m + 1)}
    sys.stdout.write(export_dot(mat, name="reduced" if args.reduced else "network", labels=labels))
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cmd_bench(args):
    for name in ("nodes", "dim", "instances"):
        if getattr(args, name) < 1:
            raise ParseError(f"--{name} must be at least 1")
    rng = np.random.default_rng(args.seed)
    try:
        nets = [random_network(rng, n_nodes=args.nodes, dim=args.dim, forced=True) for _ in range(args.instances)]
    except GenerationError as exc:
        raise ParseError(f"network generation failed: {exc}") from None
    is_controllable(nets[0], DIRECT)  # warm up compiled kernels
    is_controllable(nets[0], REDUCED)
    rows = []
    agree = 0
    for i, net in enumerate(nets):
        td, vd = _time(lambda: is_controllable(net, DIRECT), args.repeat)
        tr, vr = _time(lambda: is_controllable(net, REDUCED), args.repeat)
        tc, conds = _time(lambda: node_conditions(net) if vr.per_node_conditions else None, args.repeat)
        tt = float("nan")
        if conds is not None:
            tt, _ = _time(lambda: [full_row_rank(m) for m in reduced_matrices(net, conds)], args.repeat)
        same = vd.controllable == vr.controllable
        agree += same
        if not same:
            _save_repro(net, "bench-disagreement")
        rows.append({"instance": i, "states": net.n, "direct_s": td, "reduced_s": tr, "classify_s": tc,
                     "reduced_test_s": tt, "controllable": vd.controllable, "agree": same})
    summary = {"nodes": args.nodes, "dim": args.dim, "instances": args.instances, "agreement": agree}
    for key in ("direct_s", "reduced_s", "reduced_test_s"):
        vals = [r[key] for r in rows if r[key] == r[key]]
        summary[key[:-2] + "_mean_s"] = statistics.fmean(vals) if vals else None
        summary[key[:-2] + "_median_s"] = statistics.median(vals) if vals else None
    summary["speedup_median"] = summary["direct_median_s"] / max(summary["reduced_median_s"], 1e-12)
    if summary["reduced_test_median_s"] is not None:
        summary["speedup_test_only_median"] = summary["direct_median_s"] / max(summary["reduced_test_median_s"], 1e-12)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)

    def ms(v):
        return f"{v * 1e3:>10.3f}" if v is not None else f"{'-':>10}"

    text = (
        f"networks: {args.instances} x {args.nodes} nodes of dimension {args.dim}\n"
        f"agreement: {agree}/{args.instances}\n"
        f"{'method':<22} {'mean ms':>10} {'median ms':>10}\n"
        f"{'direct':<22} {ms(summary['direct_mean_s'])} {ms(summary['direct_median_s'])}\n"
        f"{'reduced (incl. nodes)':<22} {ms(summary['reduced_mean_s'])} {ms(summary['reduced_median_s'])}\n"
        f"{'reduced test only':<22} {ms(summary['reduced_test_mean_s'])} {ms(summary['reduced_test_median_s'])}\n"
        f"speedup (median): {summary['speedup_median']:.2f}x\n"
    )
    if "speedup_test_only_median" in summary:
        text += f"speedup with nodes classified beforehand (median): {summary['speedup_test_only_median']:.2f}x\n"
    _emit(args, text, {"summary": summary, "instances": rows})
    return EXIT_OK if agree == args.instances else EXIT_INCONSISTENT


# ---------------------------------------------------------------------------


def _global_flags(parser, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--format", choices=("text", "json"), default=d("text"), help="output format")
    parser.add_argument("--seed", type=int, default=d(0), help="master seed for sampling and generation")
    parser.add_argument("--tolerance", type=float, default=d(1e-9), help="relative rank tolerance for numeric tests")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sscnet", description="Strong structural controllability of networks of structured SISO systems."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        _global_flags(p, suppress=True)
        p.set_defaults(func=fn)
        return p

    p = add("check", cmd_check, "decide controllability of a network")
    p.add_argument("network", help="network JSON file, network directory, or - for stdin")
    p.add_argument("--method", choices=("direct", "reduced", "both"), default="both")
    p.add_argument("--verify-samples", type=int, default=0, metavar="K",
                   help="also run the numeric check on K sampled realizations")

    p = add("classify", cmd_classify, "classify a node system into C1..C6")
    p.add_argument("node", help="node file (text blocks A, B, C or JSON), or -")

    p = add("reduce", cmd_reduce, "replace every node by its standard node")
    p.add_argument("network")

    p = add("rank", cmd_rank, "structural full row rank of a pattern matrix")
    p.add_argument("pattern")

    p = add("independent", cmd_independent, "whether one row is independent of the others")
    p.add_argument("pattern")
    p.add_argument("--row", type=int, required=True, help="1-based row to test")

    p = add("sample-verify", cmd_sample_verify, "compare the structural verdict with sampled realizations")
    p.add_argument("network")
    p.add_argument("--trials", type=int, default=200)

    p = add("export-dot", cmd_export_dot, "graph of a pattern or assembled network in DOT")
    p.add_argument("file", help="network or pattern file")
    p.add_argument("--reduced", action="store_true", help="graph of the reduced network")
    p.add_argument("--bar", action="store_true", help="use bar(A) (with --reduced: the reduced network for bar(A))")
    p.add_argument("--interconnection", action="store_true", help="only the node-level interconnection W, H")

    p = add("bench", cmd_bench, "time the direct and reduced tests on random networks")
    p.add_argument("--nodes", type=int, default=10)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--repeat", type=int, default=3, help="timing repeats per instance (best kept)")
    p.add_argument("--csv", help="write per-instance timings to this CSV file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ShapeError, ClassificationError, BudgetError) as exc:
        print(f"sscnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
