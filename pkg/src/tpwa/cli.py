"""Command-line front end: ``tpwa fit | eval | gen``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time

import numpy as np

from .core import DEFAULT_TOL, FitConfig, assign_points, evaluate_model, max_residual
from .datagen import gen_arctan_1d, gen_grid_pwa, gen_uid_grid
from .errors import BudgetExceeded, InfeasibleInstance, OutOfDomain, SolverFailure
from .oracle import naive_optimal
from .serialize import (
    load_dataset,
    load_model,
    read_json,
    save_dataset,
    save_model,
    template_from_dict,
)
from .template import TemplateSpec
from .topdown import TopDownSearch, build_model

log = logging.getLogger("tpwa")

EXIT_PARSE, EXIT_INFEASIBLE, EXIT_SOLVER, EXIT_BUDGET = 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _configure_logging():
    level = os.environ.get("TPWA_LOG", "quiet").lower()
    levels = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(
        level=levels.get(level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def parse_template(text: str, d: int) -> TemplateSpec:
    if text in ("rect", "rectangular"):
        return TemplateSpec.rectangular(d)
    if text == "octagon":
        return TemplateSpec.octagon(d)
    if text.startswith("file:"):
        t = template_from_dict(read_json(text[5:]))
        if t.d != d:
            raise ValueError(f"template file has d={t.d}, data has d={d}")
        return t
    raise ValueError(f"unknown template {text!r}; use rect, octagon or file:PATH")


def _range(text: str) -> tuple[float, float]:
    lo, hi = (float(v) for v in text.split(","))
    return lo, hi


def emit_plot(model, data, path) -> None:
    """CSV with one row per data point: inputs, outputs and the owning piece (1-based)."""
    groups = assign_points(model, data, policy="nearest")
    owner = {k: i + 1 for i, g in enumerate(groups) for k in g}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i + 1}" for i in range(data.d)] + [f"y{j + 1}" for j in range(data.e)] + ["piece"])
        for k, (x, y) in enumerate(zip(data.X, data.Y), start=1):
            w.writerow([repr(float(v)) for v in x] + [repr(float(v)) for v in y] + [owner[k]])


def cmd_fit(args) -> int:
    try:
        data = load_dataset(args.input)
        template = parse_template(args.template, data.d)
        config = FitConfig(args.epsilon, args.tol, args.cover_period)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    def progress(info):
        log.info(
            "iteration %(iteration)d: |S|=%(n_compatible)d |U\\V|=%(n_frontier)d "
            "alpha=%(alpha)s beta=%(beta)s",
            info,
        )

    hook = progress if log.isEnabledFor(logging.INFO) else None
    start = time.perf_counter()
    iterations = None
    try:
        if args.mode == "naive":
            model = naive_optimal(template, data, args.epsilon, tol=args.tol)
        else:
            search = TopDownSearch(template, data, config, progress=hook)
            if args.mode == "maximal":
                model = build_model(template, data, search.run_maximal(), config)
            else:
                model = search.fit_optimal()
            iterations = search.iterations
    except InfeasibleInstance as exc:
        print(f"infeasible: uncovered indices {list(exc.uncovered)}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    elapsed = time.perf_counter() - start

    save_model(model, args.out)
    if args.emit_plot:
        emit_plot(model, data, args.emit_plot)
    report = sys.stderr if args.out in (None, "-") else sys.stdout
    print(f"q = {model.q}", file=report)
    print(f"iterations = {iterations if iterations is not None else 'n/a'}", file=report)
    print(f"max residual = {max_residual(model, data):.6g}", file=report)
    print(f"wall time = {elapsed:.3f} s", file=report)
    return 0


def _load_queries(path) -> np.ndarray:
    obj = read_json(path)
    if isinstance(obj, dict) and "points" in obj and obj["points"] and isinstance(obj["points"][0], dict):
        rows = [p["x"] for p in obj["points"]]
    elif isinstance(obj, dict):
        rows = obj.get("x", obj.get("points"))
    else:
        rows = obj
    return np.atleast_2d(np.array(rows, dtype=float))


def cmd_eval(args) -> int:
    try:
        model = load_model(args.model)
        queries = _load_queries(args.input)
        if model.d == 1 and queries.shape[0] == 1 and queries.shape[1] != 1:
            queries = queries.T
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    for x in queries:
        try:
            y = evaluate_model(model, x, policy=args.oob)
        except OutOfDomain as exc:
            print(f"out of domain: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        print(json.dumps([float(v) for v in y]))
    return 0


def cmd_gen(args) -> int:
    try:
        if args.generator == "arctan":
            data = gen_arctan_1d(args.k)
        elif args.generator == "uid":
            data = gen_uid_grid(args.n, _range(args.x1_range), _range(args.x2_range), args.scale)
        else:
            data, truth = gen_grid_pwa(args.d, args.cells, args.noise, args.seed, args.n_per_axis)
            if args.truth:
                save_model(truth, args.truth)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    save_dataset(data, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tpwa", description="Template-based piecewise affine regression")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fit = sub.add_parser("fit", help="fit a minimal PWA model to a data set")
    fit.add_argument("--input", required=True)
    fit.add_argument("--out", default=None, help="model JSON path (default: stdout)")
    fit.add_argument("--epsilon", type=float, required=True)
    fit.add_argument("--template", default="rect", help="rect | octagon | file:PATH")
    fit.add_argument("--mode", choices=("optimal", "maximal", "naive"), default="optimal")
    fit.add_argument("--cover-period", type=int, default=1)
    fit.add_argument("--tol", type=float, default=DEFAULT_TOL)
    fit.add_argument("--emit-plot", default=None, metavar="PATH")
    fit.set_defaults(func=cmd_fit)

    ev = sub.add_parser("eval", help="evaluate a model at query points")
    ev.add_argument("--model", required=True)
    ev.add_argument("--input", required=True, help="data set JSON or {\"x\": [[...], ...]}")
    ev.add_argument("--oob", choices=("error", "nearest"), default="nearest")
    ev.set_defaults(func=cmd_eval)

    gen = sub.add_parser("gen", help="write a synthetic data set")
    gen.add_argument("generator", choices=("arctan", "uid", "gridpwa"))
    gen.add_argument("--out", default=None, help="data set JSON path (default: stdout)")
    gen.add_argument("--k", type=int, default=11)
    gen.add_argument("--n", type=int, default=10)
    gen.add_argument("--x1-range", default="0,200")
    gen.add_argument("--x2-range", default="0,400")
    gen.add_argument("--scale", type=float, default=1.0)
    gen.add_argument("--d", type=int, default=2)
    gen.add_argument("--cells", type=int, default=2)
    gen.add_argument("--n-per-axis", type=int, default=7)
    gen.add_argument("--noise", type=float, default=0.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--truth", default=None, metavar="PATH", help="also write the ground-truth model")
    gen.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
