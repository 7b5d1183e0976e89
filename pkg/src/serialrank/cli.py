"""Command-line entry point: ``serialrank rank|bench|probe|diagnose``.

Exit status is 0 on success, 1 when a computation fails and 2 for usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path

from .compdata import read_matchlist
from .errors import InvalidParameterError, SerialRankError
from .harness import (
    METHODS,
    ExperimentConfig,
    emit_plot,
    rank_file,
    run_sweep,
    run_perturbation_probe,
    write_probe_csv,
)
from .similarity import check_R, write_similarity_csv
from .spectral import SIMILARITY_KINDS, build_similarity, fiedler_vector

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise _UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="serialrank", description="Spectral ranking from pairwise comparisons.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("rank", help="rank the items of a match-list file")
    r.add_argument("file")
    r.add_argument("--method", default="serialrank")
    r.add_argument("--similarity", choices=SIMILARITY_KINDS, default="match")
    r.add_argument("--laplacian", choices=("unnorm", "norm", "unnormalized", "normalized"), default="unnorm")
    r.add_argument("--contrast", type=float, default=None)
    r.add_argument("--topk", type=int, action="append", default=[])
    r.add_argument("--output", "-o", default=None, help="ranking CSV (default: stdout)")
    r.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("bench", help="run a benchmark sweep from a JSON config")
    b.add_argument("--config", required=True)
    b.add_argument("--output", "-o", default=None, help="summary CSV (overrides the config)")
    b.add_argument("--plot", default=None, help="also write an SVG chart here")
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--seed", type=int, default=None, help="overrides the config seed")

    q = sub.add_parser("probe", help="Fiedler perturbation probe under Erdos-Renyi sampling")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--q-grid", type=_float_list, required=True)
    q.add_argument("--trials", type=int, default=50)
    q.add_argument("--output", "-o", default=None)
    q.add_argument("--seed", type=int, default=0)

    d = sub.add_parser("diagnose", help="spectral and R-matrix diagnostics as JSON")
    d.add_argument("file")
    d.add_argument("--similarity", choices=SIMILARITY_KINDS, default="match")
    d.add_argument("--laplacian", choices=("unnorm", "norm", "unnormalized", "normalized"), default="unnorm")
    d.add_argument("--contrast", type=float, default=None)
    d.add_argument("--similarity-csv", default=None, help="also export the similarity matrix")
    d.add_argument("--output", "-o", default=None)
    d.add_argument("--seed", type=int, default=0)
    return p


def _cmd_rank(a: argparse.Namespace) -> int:
    if a.method not in METHODS:
        raise _UsageError(f"unknown method {a.method!r}; choose from {', '.join(METHODS)}")
    out = a.output
    r, report = rank_file(a.file, a.method, a.similarity, a.laplacian, a.contrast, a.topk, out)
    if out is None:
        labels = r.item_labels or tuple(str(i) for i in range(r.n))
        print("rank,label,score")
        for item in r.order:
            score = "" if r.scores is None else repr(float(r.scores[item]))
            print(f"{int(r.ranks[item])},{labels[item]},{score}")
    for k, v in report.upsets_topk.items():
        print(f"l_{k} = {v:.6f}", file=sys.stderr)
    return EXIT_OK


def _cmd_bench(a: argparse.Namespace) -> int:
    try:
        text = Path(a.config).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read config: {exc}") from None
    cfg = ExperimentConfig.from_json(text)
    if a.seed is not None:
        cfg.seed = a.seed
    if a.workers is not None:
        cfg.workers = a.workers
    if a.output is not None:
        cfg.output = a.output
    result = run_sweep(cfg)
    if cfg.output:
        out = Path(cfg.output)
        result.write_csv(out)
        result.write_trials_csv(out.with_name(out.stem + "_trials.csv"))
        result.write_timing_csv(out.with_name(out.stem + "_timing.csv"))
    else:
        result.write_csv(sys.stdout)
    if a.plot:
        emit_plot(result, a.plot)
    return EXIT_OK


def _cmd_probe(a: argparse.Namespace) -> int:
    rows = run_perturbation_probe(a.n, a.q_grid, a.p, a.trials, a.seed)
    if a.output:
        write_probe_csv(rows, a.output)
    else:
        write_probe_csv(rows, sys.stdout)
    return EXIT_OK


def _cmd_diagnose(a: argparse.Namespace) -> int:
    c = read_matchlist(a.file)
    s = build_similarity(c, a.similarity, a.contrast)
    diag = fiedler_vector(s, a.laplacian)
    report = check_R(s)
    doc = diag.to_dict()
    doc["labels"] = list(c.labels)
    doc["r_matrix"] = report.to_dict()
    text = json.dumps(doc, indent=2) + "\n"
    if a.similarity_csv:
        write_similarity_csv(s, a.similarity_csv)
    if a.output:
        Path(a.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {"rank": _cmd_rank, "bench": _cmd_bench, "probe": _cmd_probe, "diagnose": _cmd_diagnose}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"serialrank: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameterError as exc:
        print(f"serialrank: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SerialRankError, OSError) as exc:
        print(f"serialrank: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
