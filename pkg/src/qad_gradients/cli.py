"""Command-line interface: gradients, costs, QAD assignments, grouping and benchmarks."""

import argparse
import csv
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .bench import (
    build_qaoa,
    build_qaqc,
    build_qnn,
    iteration_counts,
    load_graph,
    load_iris,
    ratio_sweep,
    train,
)
from .circuit import PQC
from .data_types import DerivativeIndex, ErrorTable, GradientMethod, Metric
from .exceptions import DataError, QADError
from .gradfirst import gradient
from .gradhigh import HIGHER_ORDER_METHODS, higher_derivative
from .grouping import Criterion, grouping_report
from .qad import cost_table, select


logger = logging.getLogger(__name__)

EXIT_INPUT_ERROR = 2


def _theta(text: Optional[str], pqc: PQC) -> np.ndarray:
    if text is None:
        return np.zeros(pqc.n_params)
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise DataError(f"Malformed theta list '{text}'") from e
    return pqc.check_theta(values)


def _errors(path: Optional[str], metric: str) -> Optional[ErrorTable]:
    if path is not None:
        return ErrorTable.from_json(path)
    if metric == Metric.EFR.value:
        return ErrorTable.default()
    return None


def _emit(summary: Dict[str, Any], rows: Optional[List[Dict[str, Any]]], output: Optional[str]) -> None:
    """JSON summary to stdout, rows to a CSV file when requested."""
    if output and rows:
        with open(output, "w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        logger.info(f"Wrote {len(rows)} rows to {output}")
    print(json.dumps(summary, indent=2))


def cmd_grad(args: argparse.Namespace) -> None:
    pqc = PQC.load(args.pqc)
    value, plan = gradient(
        pqc,
        _theta(args.theta, pqc),
        args.param,
        args.method,
        shots=args.shots,
        seed=args.seed,
        decompose=args.decompose,
    )
    result: Dict[str, Any] = {"value": value, "method": args.method}
    if plan is not None:
        result.update(plan.summary())
    _emit(result, None, None)


def cmd_higher(args: argparse.Namespace) -> None:
    pqc = PQC.load(args.pqc)
    index = DerivativeIndex.parse(args.indices)
    value, plan = higher_derivative(
        pqc, _theta(args.theta, pqc), index, args.method, args.shots, args.seed
    )
    result: Dict[str, Any] = {"value": value, "method": args.method, "index": list(index.indices)}
    if plan is not None:
        result.update(plan.summary())
    _emit(result, None, None)


def cmd_cost(args: argparse.Namespace) -> None:
    pqc = PQC.load(args.pqc)
    errors = ErrorTable.from_json(args.errors) if args.errors else None
    rows = [report.to_dict() for report in cost_table(pqc, args.param, errors).values()]
    _emit({"param": args.param, "reports": rows}, rows, args.output)


def cmd_qad(args: argparse.Namespace) -> None:
    pqc = PQC.load(args.pqc)
    assignment = select(pqc, args.metric, _errors(args.errors, args.metric))
    _emit(assignment.to_dict(), assignment.to_rows(), args.output)


def cmd_group(args: argparse.Namespace) -> None:
    pqc = PQC.load(args.pqc)
    if args.param is None:
        operators = [("observable", pqc.observable.non_identity())]
    else:
        generator = pqc.generator(args.param).non_identity()
        operators = [(pqc.param_names[args.param - 1], generator)]
    report = grouping_report(operators, Criterion(args.criterion))
    _emit({"operators": report}, None, None)


def cmd_bench(args: argparse.Namespace) -> None:
    if args.problem == "qaoa":
        problem: Any = build_qaoa(load_graph(args.graph), args.layers)
    elif args.problem == "qaqc":
        problem = build_qaqc(args.target, args.layers, args.topology)
    else:
        dataset = load_iris(args.data)
        if args.samples:
            dataset = dataset.subset(range(min(args.samples, len(dataset))))
        problem = build_qnn(dataset)

    errors = _errors(args.errors, args.metric)
    trace = train(
        problem,
        args.method,
        steps=args.steps,
        learning_rate=args.lr,
        seed=args.seed,
        metric=args.metric,
        errors=errors,
        shots=args.shots,
    )
    summary = trace.summary()
    summary["problem"] = args.problem
    summary["counts"] = iteration_counts(problem.pqc, args.metric, errors)
    _emit(summary, trace.to_rows(), args.output)


def cmd_sweep(args: argparse.Namespace) -> None:
    fractions = None
    if args.fractions:
        try:
            fractions = [float(part) for part in args.fractions.split(",")]
        except ValueError as e:
            raise DataError(f"Malformed fraction list '{args.fractions}'") from e
    sweep = ratio_sweep(args.n, fractions)
    _emit(sweep.to_dict(), sweep.to_rows(), args.output)


def _add_pqc(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pqc", required=True, help="PQC JSON file")


def _add_sampling(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--shots", type=int, default=None, help="Shots per group (exact if omitted)")
    parser.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    methods = [m.value for m in GradientMethod]
    metrics = [m.value for m in Metric]

    parser = argparse.ArgumentParser(prog="qad-gradients", description=__doc__)
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="cmd", required=True)

    grad = sub.add_parser("grad", help="One first-order partial derivative")
    _add_pqc(grad)
    grad.add_argument("--theta", help="Comma-separated parameters (zeros if omitted)")
    grad.add_argument("--param", type=int, required=True, help="Gate position (1-based)")
    grad.add_argument("--method", choices=methods, default="ht")
    grad.add_argument("--decompose", action="store_true", help="Term-wise PSR")
    _add_sampling(grad)
    grad.set_defaults(func=cmd_grad)

    higher = sub.add_parser("higher", help="k-th order partial derivative")
    _add_pqc(higher)
    higher.add_argument("--theta")
    higher.add_argument("--indices", required=True, help="Comma-separated gate positions")
    higher.add_argument("--method", choices=sorted(HIGHER_ORDER_METHODS) + ["oracle"], default="kfold")
    _add_sampling(higher)
    higher.set_defaults(func=cmd_higher)

    cost = sub.add_parser("cost", help="Cost report per feasible method")
    _add_pqc(cost)
    cost.add_argument("--param", type=int, required=True)
    cost.add_argument("--errors", help="ErrorTable JSON file")
    cost.add_argument("--output", help="CSV output file")
    cost.set_defaults(func=cmd_cost)

    qad = sub.add_parser("qad", help="QAD method assignment")
    _add_pqc(qad)
    qad.add_argument("--metric", choices=metrics, default="count")
    qad.add_argument("--errors", help="ErrorTable JSON file (default table for efr)")
    qad.add_argument("--output", help="CSV output file")
    qad.set_defaults(func=cmd_qad)

    group = sub.add_parser("group", help="Measurement grouping report")
    _add_pqc(group)
    group.add_argument("--param", type=int, default=None, help="Report a generator instead")
    group.add_argument("--criterion", choices=[c.value for c in Criterion], default="full")
    group.set_defaults(func=cmd_group)

    bench = sub.add_parser("bench", help="Train a benchmark problem")
    problems = bench.add_subparsers(dest="problem", required=True)
    qaoa = problems.add_parser("qaoa", help="MaxCut QAOA")
    qaoa.add_argument("--graph", required=True, help="Edge-list file")
    qaoa.add_argument("--layers", type=int, default=1)
    qaqc = problems.add_parser("qaqc", help="Quantum-assisted compiling")
    qaqc.add_argument("--target", choices=["qft", "toffoli", "wstate", "ising"], default="ising")
    qaqc.add_argument("--layers", type=int, default=1)
    qaqc.add_argument("--topology", choices=["ring", "line"], default="ring")
    qnn = problems.add_parser("qnn", help="Iris classifier")
    qnn.add_argument("--data", default=None, help="Iris CSV (bundled copy if omitted)")
    qnn.add_argument("--samples", type=int, default=None, help="Use the first N samples")
    for problem in (qaoa, qaqc, qnn):
        problem.add_argument("--method", choices=methods + ["qad"], default="qad")
        problem.add_argument("--metric", choices=metrics, default="count")
        problem.add_argument("--errors", help="ErrorTable JSON file")
        problem.add_argument("--steps", type=int, default=None)
        problem.add_argument("--lr", type=float, default=None, help="Learning rate")
        problem.add_argument("--output", help="Per-iteration CSV file")
        _add_sampling(problem)
        problem.set_defaults(func=cmd_bench)

    sweep = sub.add_parser("sweep", help="DHT/RDHT circuit-count ratio matrix")
    sweep.add_argument("--n", type=int, default=4, help="Qubits")
    sweep.add_argument("--fractions", help="Comma-separated grid (0.1..1.0 if omitted)")
    sweep.add_argument("--output", help="CSV output file")
    sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        args.func(args)
    except (QADError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
