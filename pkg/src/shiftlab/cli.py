"""
shiftlab CLI Entry Point

This module provides the command-line interface for shiftlab: argument
parsing, loading of graphs, presentations and codes, the subcommands that
run the library operations, and report rendering/export.

Exit status: 0 on success (including verified witnesses and partial answers),
1 when a witness is refuted or a relation fails, 2 on input errors.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, NamedTuple, Optional

import pandas as pd
from rich.console import Console

from shiftlab.cli_help import show_format_help
from shiftlab.core.ckalg import (
    ConjugacyWitness,
    edge_isometry,
    equal,
    from_triple,
    groupoid_compose,
    groupoid_inverse,
    groupoid_map_H,
    pushforward,
    surjectivity_witness,
    theorem813_images,
    verify_ck_family,
)
from shiftlab.core.codes import (
    BoundedCode,
    VerificationStatus,
    compose,
    identity_code,
    verify_conjugacy,
)
from shiftlab.core.errors import (
    AmbiguousPreimage,
    ConfigError,
    NoPreimage,
    NotComposable,
    ParseError,
    ShiftLabError,
    WellDefinednessViolation,
)
from shiftlab.core.graphs import Graph, higher_block_graph, one_step_to_graph
from shiftlab.core.seqcore import Block, Seq, format_letter, format_word, parse_seq
from shiftlab.core.spaces import (
    EdgeShift,
    HigherBlockShift,
    Membership,
    ShiftPresentation,
    block_language,
    check_infinite_extension,
    classify,
    contains,
    one_step_forbidden_pairs,
)
from shiftlab.core.topology import common_prefix_length, metric_D, metric_dA
from shiftlab.fileformats import (
    NamedCode,
    format_code,
    format_graph,
    load_code,
    load_element,
    load_graph,
    load_shift,
    parse_boundary_path,
)
from shiftlab.formatters.console import ConsoleFormatter, export_report, to_dataframe
from shiftlab.metrics import RunMetrics
from shiftlab.settings import Settings

logger = logging.getLogger("shiftlab")


def init_cli(level: int = logging.WARNING) -> None:
    """Initialize CLI logging."""
    logging.basicConfig(level=level)
    logger.info("shiftlab CLI started")


console: Console = Console()
err_console: Console = Console(stderr=True)

# raised while reading inputs; reported with exit status 2
INPUT_ERRORS = (ShiftLabError, OSError, ValueError)


class CommandResult(NamedTuple):
    title: str
    df: pd.DataFrame
    verdict: str = "ok"
    exit_code: int = 0


# -------------------------------
# Utility Functions
# -------------------------------

def ensure_reports_dir(path: Path) -> Path:
    """
    Ensure reports directory exists.
    """
    path.mkdir(parents=True, exist_ok=True)
    return path


def safe_path(path: Optional[Path]) -> Path:
    """
    Validate an output directory path. Absolute paths are allowed; paths with
    '..' segments are rejected.
    """
    if path is None:
        return Path.cwd() / "reports"
    if any(part == ".." for part in path.parts):
        raise ConfigError("--out", str(path))
    return path.resolve()


def _write(path: Optional[Path], text: str) -> None:
    if path is not None:
        path.write_text(text, encoding="utf-8")


def _bounded(named: NamedCode) -> BoundedCode:
    if not isinstance(named.code, BoundedCode):
        raise ParseError(f"block map {named.name} must have a window")
    return named.code


def _graph_records(g: Graph) -> list[dict]:
    records = [{"record": "vertex", "value": format_letter(v)} for v in g.vertices(0)]
    records += [
        {"record": "edge", "value": f"{format_letter(e.id)} {format_letter(e.source)} {format_letter(e.range)}"}
        for e in g.edges(0)
    ]
    return records


def _default_samples(p: ShiftPresentation, horizon: int, max_period: int = 2) -> list[Seq]:
    """Periodic members with period at most max_period over the horizon letters."""
    samples: list[Seq] = []
    for n in range(1, max_period + 1):
        for word in block_language(p, n, horizon).sorted():
            x = Seq.periodic((), word)
            if x not in samples and contains(p, x, horizon) is not Membership.NO:
                samples.append(x)
    return samples


# -------------------------------
# Commands
# -------------------------------

def cmd_blocks(args: argparse.Namespace, metrics: RunMetrics) -> CommandResult:
    with metrics.timed("parse"):
        p = load_shift(args.shift)
    with metrics.timed("compute"):
        language = block_language(p, args.n, args.horizon)
    records = [{"record": "block", "value": format_word(w)} for w in language.sorted()]
    verdict = "ok"
    if language.partial:
        metrics.partial_results += 1
        verdict = f"partial: truncated at horizon {args.horizon}"
    return CommandResult(f"B_{args.n}({p.describe()})", to_dataframe(records), verdict)


def cmd_member(args: argparse.Namespace, metrics: RunMetrics) -> CommandResult:
    with metrics.timed("parse"):
        p = load_shift(args.shift)
        x = parse_seq(args.seq)
    with metrics.timed("compute"):
        answer = contains(p, x, args.horizon)
        records = [{"record": "membership", "value": answer.value}]
        if args.extend and x.is_finite and answer is not Membership.NO:
            result = check_infinite_extension(p, x.pre, args.extend, args.horizon)
            records.append({"record": "extension", "value": result.status.value})
            records += [{"record": "successor", "value": format_letter(a)} for a in result.symbols]
    verdict = "partial" if answer is Membership.PARTIAL_YES else "ok"
    if answer is Membership.PARTIAL_YES:
        metrics.partial_results += 1
    return CommandResult(f"{x} in {p.describe()}", to_dataframe(records), verdict)


def cmd_classify(args: argparse.Namespace, metrics: RunMetrics) -> CommandResult:
    with metrics.timed("parse"):
        p = load_shift(args.shift)
    with metrics.timed("compute"):
        kind = classify(p, args.horizon)
    records = [{"record": "class", "value": kind.value}]
    return CommandResult(p.describe(), to_dataframe(records))


def cmd_recode(args: argparse.Namespace, metrics: RunMetrics) -> CommandResult:
    """M-step space → 1-step presentation of X^[M] → the graph of that 1-step shift."""
    with metrics.timed("parse"):
        p = load_shift(args.shift)
    with metrics.timed("compute"):
        language = block_language(p, args.step, args.horizon)
        letters = [Block(w) for w in language.sorted()]
        pairs = one_step_forbidden_pairs(p, args.step, args.horizon)
        g = one_step_to_graph(letters, pairs, truncated=language.partial)
    records = [{"record": "letter", "value": format_letter(b)} for b in letters]
    records += [{"record": "forbidden", "value": format_word(w)} for w in pairs]
    records += [r for r in _graph_records(g) if r["record"] == "edge"]
    _write(args.write_graph, format_graph(g))
    verdict = "ok"
    if language.partial:
        metrics.partial_results += 1
        verdict = f"partial: truncated at horizon {args.horizon}"
    return CommandResult(f"{p.describe()}^[{args.step}]", to_dataframe(records), verdict)


def cmd_higher_block(args: argparse.Namespace, metrics: RunMetrics) -> CommandResult:
    with metrics.timed("parse"):
        p = load_shift(args.shift)
    with metrics.timed("compute"):
        if isinstance(p, EdgeShift):
            g = higher_block_graph(p.graph, args.N, args.horizon)
            records = _graph_records(g)
            partial = g.partial
            _write(args.write_graph, format_graph(g))
        else:
            hb = HigherBlockShift(p, args.N, args.horizon)
            records = [{"record": "letter", "value": format_letter(b)} for b in hb.letters(args.horizon)]
            partial = hb.blocks(1, args.horizon).partial
    verdict = "ok"
    if partial:
        metrics.partial_results += 1
        verdict = f"partial: truncated at horizon {args.horizon}"
    return CommandResult(f"{p.describe()}^[{args.N}]", to_dataframe(records), verdict)


def cmd_compose(args: argparse.Namespace, metrics: RunMetrics) -> CommandResult:
    with metrics.timed("parse"):
        phi = load_code(args.phi)
        psi = load_code(args.psi)
        source = load_shift(args.shift) if args.shift else None
    with metrics.timed("compute"):
        composed = compose(_bounded(phi), _bounded(psi), source, args.horizon)
    named = NamedCode(f"{psi.name}_after_{phi.name}", composed)
    records = [{"record": "window", "value": composed.window}]
    try:
        text = format_code(named)
        records += [{"record": "map", "value": line[len("map "):]} for line in text.splitlines() if line.startswith("map ")]
        _write(args.write_code, text)
    except ValueError:
        records.append({"record": "map", "value": composed.describe()})
    return CommandResult(named.name, to_dataframe(records))


def cmd_verify_conjugacy(args: argparse.Namespace, metrics: RunMetrics) -> CommandResult:
    with metrics.timed("parse"):
        source = load_shift(args.source)
        target = load_shift(args.target)
        forward = load_code(args.forward)
        backward = load_code(args.backward)
        samples = [parse_seq(s) for s in args.sample or ()]
    with metrics.timed("compute"):
        if not samples:
            samples = _default_samples(source, args.horizon)
        witness = ConjugacyWitness(forward.code, backward.code, source, target)
        result = verify_conjugacy(witness, args.depth, samples, args.horizon)
    verified = result.status is VerificationStatus.VERIFIED
    metrics.record(verified, max(result.checks, 1))
    records = [
        {"record": "status", "value": result.status.value},
        {"record": "depth", "value": result.depth},
        {"record": "samples", "value": len(samples)},
    ]
    if result.skipped:
        records.append({"record": "skipped", "value": result.skipped})
    if not verified:
        records.append({"record": "counterexample", "value": result.counterexample})
    title = f"{forward.name} / {backward.name}"
    return CommandResult(title, to_dataframe(records), str(result) if not verified else "ok", 0 if verified else 1)


def cmd_ck_image(args: argparse.Namespace, metrics: RunMetrics) -> CommandResult:
    with metrics.timed("parse"):
        E = load_graph(args.E)
        F = load_graph(args.F)
        phi = _bounded(load_code(args.phi)).block_map
        element = load_element(args.element, E) if args.element else None
    with metrics.timed("compute"):
        images = theorem813_images(E, F, phi)
    records = [{"record": name, "value": str(image)} for name, image in images.generators()]
    if element is not None:
        with metrics.timed("pushforward"):
            records.append({"record": "image", "value": str(pushforward(images, element))})
    verdict, code = "ok", 0
    if args.verify:
        with metrics.timed("verify"):
            check = verify_ck_family(images, E)
        metrics.record(check.valid, max(check.checks, 1))
        records.append({"record": "ck-family", "value": str(check)})
        if not check.valid:
            verdict, code = f"failed: {check.relation} at {check.witness}", 1
    if args.surjective:
        with metrics.timed("surjectivity"):
            for edge in F.edges():
                name = f"t_{format_letter(edge.id)}"
                try:
                    w = surjectivity_witness(images, edge.id, E, F, phi)
                except (NoPreimage, AmbiguousPreimage) as exc:
                    metrics.record(False)
                    records.append({"record": name, "value": f"not recovered: {exc}"})
                    if code == 0:
                        verdict, code = f"failed: {name} not in the image", 1
                    continue
                ok = equal(pushforward(images, w), edge_isometry(F, edge.id))
                metrics.record(ok)
                records.append({"record": name, "value": f"{w}" if ok else f"not recovered by {w}"})
                if not ok and code == 0:
                    verdict, code = f"failed: {name} not in the image", 1
    return CommandResult(f"{E.name} -> {F.name}", to_dataframe(records), verdict, code)


def cmd_groupoid(args: argparse.Namespace, metrics: RunMetrics) -> CommandResult:
    with metrics.timed("parse"):
        E = load_graph(args.E)
        triples = [
            from_triple(E, parse_boundary_path(x, E), int(k), parse_boundary_path(y, E))
            for x, k, y in args.triple
        ]
        witness = None
        if args.phi:
            F = load_graph(args.F)
            witness = ConjugacyWitness(load_code(args.phi).code, identity_code(), EdgeShift(E), EdgeShift(F))
    records: list[dict] = []
    verdict, code = "ok", 0
    with metrics.timed("compute"):
        for i, a in enumerate(triples, start=1):
            records.append({"record": f"element {i}", "value": str(a)})
            records.append({"record": f"inverse {i}", "value": str(groupoid_inverse(a))})
        if len(triples) >= 2:
            try:
                product = triples[0]
                for b in triples[1:]:
                    product = groupoid_compose(product, b)
                records.append({"record": "product", "value": str(product)})
            except NotComposable as exc:
                records.append({"record": "product", "value": f"not composable: {exc}"})
                verdict, code = "failed: not composable", 1
        if witness is not None:
            for i, a in enumerate(triples, start=1):
                try:
                    records.append({"record": f"H(element {i})", "value": str(groupoid_map_H(witness, a, args.horizon))})
                except WellDefinednessViolation as exc:
                    records.append({"record": f"H(element {i})", "value": str(exc)})
                    verdict, code = "failed: boundary map not well defined", 1
    return CommandResult(f"groupoid of {E.name}", to_dataframe(records), verdict, code)


def cmd_metric(args: argparse.Namespace, metrics: RunMetrics) -> CommandResult:
    with metrics.timed("parse"):
        x = parse_seq(args.x)
        y = parse_seq(args.y)
    with metrics.timed("compute"):
        prefix = common_prefix_length(x, y)
        records = [
            {"record": "common-prefix", "value": "equal" if prefix is None else prefix},
            {"record": "dA", "value": str(metric_dA(x, y))},
        ]
        if not x.is_finite and not y.is_finite:
            records.append({"record": "D", "value": str(metric_D(x, y))})
    return CommandResult(f"d({x}, {y})", to_dataframe(records))


COMMANDS: dict[str, Callable[[argparse.Namespace, RunMetrics], CommandResult]] = {
    "blocks": cmd_blocks,
    "member": cmd_member,
    "classify": cmd_classify,
    "recode": cmd_recode,
    "higher-block": cmd_higher_block,
    "compose": cmd_compose,
    "verify-conjugacy": cmd_verify_conjugacy,
    "ck-image": cmd_ck_image,
    "groupoid": cmd_groupoid,
    "metric": cmd_metric,
}


# -------------------------------
# Core Runner
# -------------------------------

def run(args: argparse.Namespace) -> int:
    """
    Run one subcommand, render its report and export it if requested.

    Returns:
        the exit status
    """
    metrics = RunMetrics(command=args.command)
    try:
        result = COMMANDS[args.command](args, metrics)
    except INPUT_ERRORS as exc:
        logger.debug("input error in %s", args.command, exc_info=True)
        err_console.print(f"error: {exc}", markup=False, highlight=False)
        return 2

    formatter = ConsoleFormatter(console)
    with metrics.timed("render"):
        if args.format == "lines":
            formatter.format_lines(result.df)
        else:
            formatter.format_report(result.df, result.title, result.verdict, metrics)
    if result.exit_code and args.format == "lines":
        err_console.print(result.verdict, markup=False, highlight=False)

    if args.export:
        notices = err_console if args.format == "lines" else console
        try:
            out_dir = ensure_reports_dir(safe_path(args.out))
        except (ConfigError, OSError) as exc:
            err_console.print(f"error: {exc}", markup=False, highlight=False)
            return 2
        stamp = pd.Timestamp.now().strftime("%Y%m%d_%H%M%S")
        for fmt in args.export:
            filename = out_dir / f"shiftlab_{args.command}_{stamp}.{fmt}"
            try:
                exported = export_report(result.df, format=fmt, filename=str(filename))
                notices.print(f"[bold green]Exported {fmt}:[/] {exported}")
            except (OSError, ValueError) as exc:
                notices.print(f"[bold red]Failed to export {fmt}:[/] {exc}")

    logger.info("%s finished: %s", args.command, metrics.to_dict())
    return result.exit_code


# -------------------------------
# Argument Parser
# -------------------------------

def build_argparser(settings: Optional[Settings] = None) -> argparse.ArgumentParser:
    """
    Build argument parser for CLI. Defaults for --horizon and --depth come
    from the environment settings.
    """
    settings = settings or Settings()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--horizon", type=int, default=settings.horizon, help="Symbols kept from every infinite family")
    common.add_argument("--depth", type=int, default=settings.depth, help="Block length for bounded verification")
    common.add_argument("--format", choices=["text", "lines"], default="text", help="Rich report or one record per line")
    common.add_argument("--export", nargs="*", choices=["csv", "json"], help="Export formats")
    common.add_argument("--out", type=Path, default=Path.cwd() / "reports", help="Output directory for exports")

    p = argparse.ArgumentParser(
        prog="shiftlab",
        description="shiftlab: shift spaces over countable alphabets, sliding block codes and graph algebras"
    )
    p.add_argument("--help-formats", dest="help_formats", action="store_true", help="Show the input file formats")
    sub = p.add_subparsers(dest="command", metavar="command")

    s = sub.add_parser("blocks", parents=[common], help="Block language B_n(X)")
    s.add_argument("--shift", required=True, help="edges:<graph>, builtin:<name> or a presentation file")
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("member", parents=[common], help="Membership of a sequence")
    s.add_argument("--shift", required=True)
    s.add_argument("--seq", required=True, help="a1.a2|(a3) style sequence")
    s.add_argument("--extend", type=int, default=0, help="Also list this many extension symbols of a finite member")

    s = sub.add_parser("classify", parents=[common], help="Finite-symbol / row-finite classification")
    s.add_argument("--shift", required=True)

    s = sub.add_parser("recode", parents=[common], help="1-step presentation of X^[M] and its graph")
    s.add_argument("--shift", required=True)
    s.add_argument("--step", type=int, required=True, help="M")
    s.add_argument("--write-graph", type=Path, help="Write the resulting graph file")

    s = sub.add_parser("higher-block", parents=[common], help="Higher block graph or presentation")
    s.add_argument("--shift", required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--write-graph", type=Path, help="Write the higher block graph file")

    s = sub.add_parser("compose", parents=[common], help="Compose two bounded codes")
    s.add_argument("--phi", required=True, help="First code (applied first)")
    s.add_argument("--psi", required=True, help="Second code")
    s.add_argument("--shift", help="Restrict the table to blocks of this shift")
    s.add_argument("--write-code", type=Path, help="Write the composed block map file")

    s = sub.add_parser("verify-conjugacy", parents=[common], help="Bounded verification of a conjugacy witness")
    s.add_argument("--source", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--forward", required=True)
    s.add_argument("--backward", required=True)
    s.add_argument("--sample", action="append", help="Sample sequence (repeatable)")

    s = sub.add_parser("ck-image", parents=[common], help="Generator images of a conjugacy of edge shifts")
    s.add_argument("--E", required=True)
    s.add_argument("--F", required=True)
    s.add_argument("--phi", required=True)
    s.add_argument("--verify", action="store_true", help="Check the Cuntz-Krieger relations")
    s.add_argument("--surjective", action="store_true", help="Recover every t_a of the target")
    s.add_argument("--element", type=Path, help="Element file over --E to push through the images")

    s = sub.add_parser("groupoid", parents=[common], help="Graph groupoid elements")
    s.add_argument("--E", required=True)
    s.add_argument("--triple", nargs=3, action="append", required=True, metavar=("X", "K", "Y"))
    s.add_argument("--phi", help="Forward code of a conjugacy; maps every triple with H")
    s.add_argument("--F", help="Target graph of --phi")

    s = sub.add_parser("metric", parents=[common], help="Distances between two sequences")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    return p


# -------------------------------
# Entry Point
# -------------------------------

def main(argv: Optional[list[str]] = None) -> int:
    """
    CLI entry point for shiftlab.

    Args:
        argv: Optional list of command-line arguments
    """
    try:
        settings = Settings()
    except ConfigError as exc:
        err_console.print(f"error: {exc}", markup=False, highlight=False)
        return 2
    init_cli(settings.log_level_number)
    parser: argparse.ArgumentParser = build_argparser(settings)
    args = parser.parse_args(argv)

    if args.help_formats:
        show_format_help(console)
        return 0
    if args.command is None:
        parser.print_help()
        return 2
    if args.command == "groupoid" and bool(args.phi) != bool(args.F):
        parser.error("--phi and --F go together")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
