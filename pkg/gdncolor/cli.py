"""Command-line entry point: ``gdncolor solve|chromatic|train|bench|gen``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .baselines import exact_chromatic, greedy_dynamic
from .config import DEFAULT_DEPTH, DEFAULT_EXACT_BUDGET, DEFAULT_RESTARTS, AdamConfig, LossConfig, SolveConfig, TrainConfig
from .errors import BudgetExceededError, DimacsParseError, GdnColorError
from .formats import load_graph, save_graph, write_assignment, write_dimacs
from .generators import gen_gnp, gen_mycielski, gen_queen, gen_random_regular
from .graph import Graph
from .instances import INSTANCE_SUFFIXES, load_instance
from .model import AGGREGATORS, GdnParams, PinSet
from .runner import chromatic_search, solve
from .support import list_supported_methods
from .training import train
from .workflow import BenchConfig, bench


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gdncolor", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more log output (repeatable)")
    parser.add_argument("--quiet", action="store_true", help="only log errors")
    commands = parser.add_subparsers(dest="command", required=True)

    p_solve = commands.add_parser("solve", help="colour one graph with a fixed palette")
    p_solve.add_argument("--graph", required=True, help="graph file or bundled instance name")
    p_solve.add_argument("--k", type=int, required=True, help="palette size")
    _add_solve_options(p_solve)
    p_solve.add_argument("--pin", action="append", default=[], metavar="NODE:COLOR", help="fix a node's colour")
    p_solve.add_argument("--out", type=Path, help="assignment file, one colour per line")
    p_solve.add_argument("--report", type=Path, help="JSON report file")

    p_chrom = commands.add_parser("chromatic", help="smallest palette reaching zero conflicts")
    p_chrom.add_argument("--graph", required=True)
    p_chrom.add_argument("--k-start", type=int, help="first palette tried (default: greedy clique size)")
    p_chrom.add_argument("--exact", action="store_true", help="use the exact oracle instead of the solver")
    _add_solve_options(p_chrom)
    p_chrom.add_argument("--out", type=Path)
    p_chrom.add_argument("--report", type=Path)

    p_train = commands.add_parser("train", help="fit GDN params on a directory of graphs")
    p_train.add_argument("--corpus", type=Path, required=True, help="directory of .col / edge-list files")
    p_train.add_argument("--epochs", type=int, default=10)
    p_train.add_argument("--k", type=int, help="palette for every graph (default: its chromatic number)")
    p_train.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--lr", type=float, default=AdamConfig.lr)
    p_train.add_argument("--margin", type=float, default=LossConfig.margin)
    p_train.add_argument("--aggregator", choices=AGGREGATORS, default="sum")
    p_train.add_argument("--params", type=Path, help="starting params (default: fresh initialisation)")
    p_train.add_argument("--no-calibrate", action="store_true", help="skip scaling fresh params to the margin")
    p_train.add_argument("--exact-budget", type=int, default=DEFAULT_EXACT_BUDGET)
    p_train.add_argument("--out", type=Path, required=True, help="trained params JSON")
    p_train.add_argument("--report", type=Path, help="training report JSON")

    p_bench = commands.add_parser("bench", help="run methods over a manifest of instances")
    p_bench.add_argument("--manifest", type=Path, required=True, help="lines of 'NAME_OR_PATH [K]'")
    p_bench.add_argument("--methods", default="gdn,greedy-dynamic,tabucol")
    p_bench.add_argument("--out", type=Path, required=True, help="results .csv or .json")
    p_bench.add_argument("--workers", type=int, help="worker processes (capped by GDN_THREADS)")
    p_bench.add_argument("--chi-budget", type=int, default=DEFAULT_EXACT_BUDGET)
    _add_solve_options(p_bench, with_method=False)

    p_gen = commands.add_parser("gen", help="write a generated graph")
    p_gen.add_argument("--model", choices=("regular", "gnp", "queen", "mycielski"), required=True)
    p_gen.add_argument("--n", type=int, help="nodes (regular, gnp)")
    p_gen.add_argument("--d", type=int, help="degree (regular)")
    p_gen.add_argument("--p", type=float, help="edge probability (gnp)")
    p_gen.add_argument("--rows", type=int, help="board rows (queen)")
    p_gen.add_argument("--cols", type=int, help="board columns (queen)")
    p_gen.add_argument("--order", type=int, help="Mycielski order")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", type=Path, help="output file; DIMACS on stdout when omitted")

    return parser


def _add_solve_options(parser: argparse.ArgumentParser, *, with_method: bool = True) -> None:
    parser.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    parser.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--pre", action="store_true", help="peel nodes of degree < k first")
    parser.add_argument("--post", action="store_true", help="local-search repair of each restart")
    parser.add_argument("--hybrid", action="store_true", help="exact completion of a conflicted result")
    parser.add_argument("--pin-clamp", action="store_true", help="reset pinned rows after every layer")
    parser.add_argument("--params", type=Path, help="trained params file")
    parser.add_argument("--aggregator", choices=AGGREGATORS, default="sum")
    parser.add_argument("--exact-budget", type=int, default=DEFAULT_EXACT_BUDGET)
    if with_method:
        parser.add_argument(
            "--method",
            default="gdn",
            help=f"one of {', '.join(list_supported_methods())} (aliases accepted)",
        )


def _solve_config(args: argparse.Namespace, k: int) -> SolveConfig:
    return SolveConfig(
        k=k,
        depth=args.depth,
        restarts=args.restarts,
        seed=args.seed,
        pre=args.pre,
        post=args.post,
        hybrid=args.hybrid,
        pin_clamp=args.pin_clamp,
        params_path=args.params,
        method=getattr(args, "method", "gdn"),
        aggregator=args.aggregator,
        exact_budget=args.exact_budget,
    )


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    else:
        level = max(logging.WARNING - 10 * verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _emit(payload: dict, path: Optional[Path]) -> None:
    text = json.dumps(payload, sort_keys=True)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
    print(text)


# ── Commands ────────────────────────────────────────────────────────────────


def _cmd_solve(args: argparse.Namespace) -> int:
    graph = load_instance(args.graph)
    pins = PinSet.parse(args.pin)
    assignment, report = solve(graph, _solve_config(args, args.k), pins=pins, instance=Path(args.graph).stem)
    if args.out is not None:
        write_assignment(assignment, args.out)
    _emit(report.to_dict(), args.report)
    return EXIT_OK


def _cmd_chromatic(args: argparse.Namespace) -> int:
    graph = load_instance(args.graph)
    name = Path(args.graph).stem
    if args.exact:
        chi, witness = exact_chromatic(graph, args.exact_budget)
        if args.out is not None:
            write_assignment(witness, args.out)
        _emit({"instance": name, "k": chi, "method": "exact", "n": graph.n, "m": graph.m}, args.report)
        return EXIT_OK

    result = chromatic_search(graph, _solve_config(args, 2), args.k_start, instance=name)
    if args.out is not None:
        write_assignment(result.assignment, args.out)
    payload = result.report.to_dict()
    payload["k_min"] = result.k
    _emit(payload, args.report)
    return EXIT_OK


def _load_corpus(directory: Path) -> List[Tuple[str, Graph]]:
    if not directory.is_dir():
        raise FileNotFoundError(f"Corpus directory not found: {directory}")
    files = sorted(p for p in directory.iterdir() if p.is_file() and p.suffix in INSTANCE_SUFFIXES)
    if not files:
        raise ValueError(f"no graph files ({', '.join(INSTANCE_SUFFIXES)}) in {directory}")
    return [(path.stem, load_graph(path)) for path in files]


def _palette_for(graph: Graph, budget: int) -> int:
    try:
        chi, _ = exact_chromatic(graph, budget)
    except BudgetExceededError as exc:
        chi = exc.upper
    if chi < 2:
        chi = max(greedy_dynamic(graph).colors_used, 2)
    return chi


def _cmd_train(args: argparse.Namespace) -> int:
    named = _load_corpus(args.corpus)
    corpus = [(graph, args.k if args.k is not None else _palette_for(graph, args.exact_budget)) for _, graph in named]
    config = TrainConfig(
        epochs=args.epochs,
        seed=args.seed,
        depth=args.depth,
        calibrate=not args.no_calibrate,
        aggregator=args.aggregator,
        loss=LossConfig(margin=args.margin),
        adam=AdamConfig(lr=args.lr),
    )
    params0 = GdnParams.load(args.params) if args.params else None
    descriptor = {"directory": str(args.corpus), "instances": [name for name, _ in named], "colors": [k for _, k in corpus]}
    params, report = train(corpus, params0, config, corpus_descriptor=descriptor)
    params.save(args.out)
    if args.report is not None:
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_text(report.to_json(indent=2) + "\n", encoding="utf-8")
    print(json.dumps({"params": str(args.out), "fingerprint": params.fingerprint(), "epoch_losses": report.epoch_losses}))
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    methods = [name for name in args.methods.split(",") if name.strip()]
    config = BenchConfig(
        methods=methods,
        solve=_solve_config(args, 2),
        workers=args.workers,
        chi_budget=args.chi_budget,
    )
    report = bench(args.manifest, config, args.out)
    print(json.dumps({"rows": len(report.rows), "failed": len(report.failed), "out": str(args.out)}))
    return EXIT_OK


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{name}" for name in names if getattr(args, name) is None]
    if missing:
        raise ValueError(f"model {args.model} needs {', '.join(missing)}")


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.model == "regular":
        _require(args, "n", "d")
        graph = gen_random_regular(args.n, args.d, args.seed)
    elif args.model == "gnp":
        _require(args, "n", "p")
        graph = gen_gnp(args.n, args.p, args.seed)
    elif args.model == "queen":
        _require(args, "rows", "cols")
        graph = gen_queen(args.rows, args.cols)
    else:
        _require(args, "order")
        graph = gen_mycielski(args.order)

    if args.out is None:
        sys.stdout.write(write_dimacs(graph).decode("utf-8"))
    else:
        save_graph(graph, args.out)
        logger.info("wrote %r to %s", graph, args.out)
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "chromatic": _cmd_chromatic,
    "train": _cmd_train,
    "bench": _cmd_bench,
    "gen": _cmd_gen,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI; returns 0 on success, 2 on bad input, 3 on an exhausted budget."""

    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose, args.quiet)

    try:
        return _COMMANDS[args.command](args)
    except BudgetExceededError as exc:
        print(f"gdncolor: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DimacsParseError as exc:
        print(f"gdncolor: parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FileNotFoundError, ValueError) as exc:
        print(f"gdncolor: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GdnColorError as exc:
        print(f"gdncolor: {exc}", file=sys.stderr)
        return EXIT_FAILURE
