"""
Command Handlers - Batch Front End for the Estimators

Each subcommand parses its flags, calls the library, and renders the result as
JSON (default) or CSV on stdout or into --output.

Commands:
    compose   - Bound of a composition tree read from a JSON file
    budget    - Equal-split allocation and T-count under GPI and operator norm
    qft       - (Approximate) QFT estimate with optional pruning above k_max
    qpe       - Phase-estimation estimate on t = n + ceil(...) register qubits
    validate  - Monte-Carlo soundness check of the composition bounds
    figures   - Regenerate the reference sweep CSVs

Flow:
    1. main.py builds the parser (config-file values become flag defaults)
    2. The selected cmd_* handler runs and returns an exit code
    3. Exceptions propagate to main.py, which maps them to exit codes

Dependencies:
    - argparse: flag parsing
    - budget, circuits, composition, harness: the estimators
    - reports: JSON/CSV rendering
    - database: optional validation-run archive
"""

import argparse
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from config import (
    DEFAULT_C,
    DEFAULT_COST_MODEL,
    DEFAULT_DB_FILE,
    DEFAULT_DELTA,
    DEFAULT_FIXED_TCOUNT_PER_CRK,
    DEFAULT_LOG_BASE,
    DEFAULT_RZ_PER_CRK,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    EXIT_FAILURE,
    EXIT_OK,
    get_cost_model_names,
)
from budget import (
    cost_delta,
    cost_delta_selinger,
    cost_model,
    equal_split_gpi,
    equal_split_opnorm,
    gpi_advantage_threshold,
    verify_equal_split_optimality,
)
from circuits import PruningPlan, QftSpec, QpeSpec, aqft_tcount, qft_rotation_census, qpe_bits, qpe_tcount
from composition import BoundKind, BoundMethod, compose_tree_bound, compose_tree_breakdown, load_tree
from database.db import add_trials, init_db, log_event, record_run
from distances import DistanceKind, parse_distance
from harness import KINDS, generate_figures, run_validation_grid, write_trial_csv
from reports import FORMATS, build_payload, emit, render_csv, to_json

logger = logging.getLogger(__name__)

DISTANCE_CHOICES = ("gpi", "opnorm", "both")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


# ========== HELPERS ==========

def _distances(name: str) -> list[DistanceKind]:
    """'both' expands to [GPI, OPERATOR_NORM]; anything else must be gpi or opnorm."""
    if name.strip().lower() == "both":
        return [DistanceKind.GPI, DistanceKind.OPERATOR_NORM]
    dist = parse_distance(name)
    if dist is DistanceKind.FROBENIUS:
        raise ValueError("T-count estimates use gpi or opnorm, not frobenius")
    return [dist]


def _render(args, command: str, body: dict, rows: list[dict], columns: list[str] | None = None) -> None:
    if args.format == "csv":
        text = render_csv(rows, columns)
    else:
        text = to_json(build_payload(command, body))
    emit(text, args.output)


def _parse_eps_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"--eps must be a number or a comma-separated list, got {text!r}") from None


# ========== COMMANDS ==========

def cmd_compose(args) -> int:
    """
    Evaluate a composition tree.

    JSON body: method, c, qubits, bound and (with --verbose) the per-node breakdown.
    CSV rows: path, kind, qubits, bound (root only unless --verbose).
    """
    method = BoundMethod.parse(args.method, args.c)
    try:
        tree = load_tree(args.tree)
    except OSError as e:
        raise ValueError(f"Cannot read tree file {args.tree}: {e}") from e

    bound = compose_tree_bound(tree, method)
    nodes = compose_tree_breakdown(tree, method)
    body = {"method": method.kind.value, "c": method.c, "qubits": tree.qubits, "bound": bound}
    if args.verbose:
        body["nodes"] = nodes
    rows = nodes if args.verbose else nodes[-1:]
    _render(args, "compose", body, rows, ["path", "kind", "qubits", "bound"])
    return EXIT_OK


def cmd_budget(args) -> int:
    """
    Equal-split budget under one or both regimes.

    With both regimes the body also carries cost_delta (same model),
    cost_delta_selinger (Selinger15 operator norm vs KMM15 GPI), the GPI
    advantage threshold and whether n_r clears it.
    """
    model = cost_model(args.model, args.log_base)
    regimes = _distances(args.distance)
    solutions = {}
    for dist in regimes:
        if dist is DistanceKind.GPI:
            solutions[dist.value] = equal_split_gpi(args.n_r, args.eps, args.delta, args.c, model)
        else:
            solutions[dist.value] = equal_split_opnorm(args.n_r, args.eps, model)

    body = {
        "n_r": args.n_r,
        "eps": args.eps,
        "delta": args.delta,
        "c": args.c,
        "model": model.name,
        "log_base": model.log_base,
        "leading_order_only": model.leading_order_only,
        "solutions": {name: sol.to_dict() for name, sol in solutions.items()},
    }
    if len(regimes) == 2:
        threshold = gpi_advantage_threshold(args.eps, args.delta, args.c)
        body["cost_delta"] = cost_delta(args.n_r, args.eps, args.delta, args.c, model)
        body["cost_delta_selinger"] = cost_delta_selinger(args.n_r, args.eps, args.delta, args.c, args.log_base)
        body["threshold"] = threshold
        body["gpi_advantage"] = args.n_r >= threshold
    if args.verify_trials:
        report = verify_equal_split_optimality(
            args.n_r, args.eps, args.delta, args.c, model, args.verify_trials, args.seed
        )
        body["optimality"] = asdict(report)

    rows = [
        {
            "regime": name,
            "per_gate_eps": sol.per_gate_eps,
            "per_gate_tcount": sol.per_gate_tcount,
            "total_tcount": sol.total_tcount,
            "total_tcount_int": sol.total_tcount_int,
        }
        for name, sol in solutions.items()
    ]
    _render(args, "budget", body, rows)
    if args.verify_trials and body["optimality"]["violated"]:
        return EXIT_FAILURE
    return EXIT_OK


def cmd_qft(args) -> int:
    """
    Approximate-QFT estimate.

    CSV rows: one per rotation order k with its count, kept flag and both pruning errors.
    """
    model = cost_model(args.model, args.log_base)
    spec = QftSpec(args.n, args.rz_per_crk, args.fixed_tcount)
    plan = PruningPlan.keep_up_to(args.n, args.k_max) if args.k_max is not None else PruningPlan.full(args.n)
    reports = {
        dist.value: aqft_tcount(spec, plan, args.eps, model, dist, args.delta, args.c)
        for dist in _distances(args.distance)
    }

    census = qft_rotation_census(args.n)
    body = {
        "n": args.n,
        "k_max": args.k_max,
        "census_total": census.total,
        "reports": {name: report.to_dict() for name, report in reports.items()},
    }
    if len(reports) == 2:
        body["tcount_delta"] = reports["opnorm"].total_tcount - reports["gpi"].total_tcount

    first = next(iter(reports.values()))
    rows = [
        {
            "k": k,
            "count": count,
            "kept": k in plan.kept,
            "error_gpi": first.per_k_error_gpi[k],
            "error_opnorm": first.per_k_error_opnorm[k],
        }
        for k, count in census.per_k.items()
    ]
    _render(args, "qft", body, rows)
    return EXIT_OK


def cmd_qpe(args) -> int:
    """Phase-estimation estimate; CSV rows are one per distance."""
    model = cost_model(args.model, args.log_base)
    spec = QpeSpec(args.n, args.p, args.eps_qpe)
    t = qpe_bits(args.n, args.p)
    plan = PruningPlan.keep_up_to(t, args.k_max) if args.k_max is not None else None
    qft = QftSpec(t, args.rz_per_crk, args.fixed_tcount)
    reports = {
        dist.value: qpe_tcount(spec, args.eps_total, model, dist, args.rotations, plan, qft, args.delta, args.c)
        for dist in _distances(args.distance)
    }

    body = {"n": args.n, "p": args.p, "t": t, "reports": {name: r.to_dict() for name, r in reports.items()}}
    if len(reports) == 2:
        body["tcount_delta"] = reports["opnorm"].total_tcount - reports["gpi"].total_tcount
    rows = [
        {
            "distance": name,
            "t": r.t,
            "pruning_error": r.pruning_error,
            "remaining_budget": r.remaining_budget,
            "n_leaves": r.n_leaves,
            "per_gate_eps": r.per_gate_eps,
            "total_tcount": r.total_tcount,
            "total_tcount_int": r.total_tcount_int,
        }
        for name, r in reports.items()
    ]
    _render(args, "qpe", body, rows)
    return EXIT_OK


def _validation_grid(args) -> list | None:
    custom = (args.custom_kind, args.custom_n_qubits, args.custom_m, args.custom_eps)
    if all(value is None for value in custom):
        return None
    if any(value is None for value in custom):
        raise ValueError("A custom validation run needs --kind, --n-qubits, --m and --eps together")
    eps = _parse_eps_list(args.custom_eps)
    return [(args.custom_kind, args.custom_n_qubits, args.custom_m, eps[0] if len(eps) == 1 else eps)]


def _archive(db_file: str, results: list) -> None:
    init_db(db_file)
    log_event(db_file, None, "STARTED")
    for result in results:
        run_id = record_run(db_file, result.summary())
        add_trials(db_file, run_id, result.records)
    logger.info(f"Archived {len(results)} validation runs in {db_file}")


def cmd_validate(args) -> int:
    """
    Monte-Carlo soundness check over the default grid or one custom entry.

    Writes per-trial CSVs into --output-dir when given, emits the per-entry
    summaries, and prints 'violations: N' to stderr. Exit 1 when N > 0.
    """
    results = run_validation_grid(args.trials, args.seed, args.workers, args.c, _validation_grid(args))
    if args.output_dir:
        out_dir = Path(args.output_dir)
        for i, result in enumerate(results):
            name = f"validate_{i}_{result.kind}_n{result.n_qubits}_m{result.m}.csv"
            write_trial_csv(result, out_dir / name)
    if args.db:
        _archive(args.db, results)

    summaries = [result.summary() for result in results]
    violations = sum(s["violations"] for s in summaries)
    body = {"trials": args.trials, "seed": args.seed, "violations": violations, "runs": summaries}
    _render(args, "validate", body, summaries)
    sys.stderr.write(f"violations: {violations}\n")
    return EXIT_FAILURE if violations else EXIT_OK


def cmd_figures(args) -> int:
    """Regenerate the 12 reference CSVs into --output-dir and list them."""
    written = generate_figures(args.output_dir, args.c)
    body = {"output_dir": str(args.output_dir), "c": args.c, "files": [str(p) for p in written]}
    _render(args, "figures", body, [{"file": str(p)} for p in written])
    return EXIT_OK


# ========== PARSER ==========

def global_options() -> argparse.ArgumentParser:
    """Options read before the subcommand; main.py pre-parses them to set up logging."""
    parser = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    parser.add_argument("--config", help="dotenv-format file of flag defaults (EPS=0.01, MODEL=Selinger15, ...)")
    parser.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, help="logging level (default WARNING)")
    parser.add_argument("--log-file", help="append logs to this file instead of stderr")
    return parser


def _output_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("-o", "--output", default=None, help="output file (default stdout)")
    parser.add_argument("--format", choices=FORMATS, default="json", help="output format (default json)")
    return parser


def _model_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--model", default=DEFAULT_COST_MODEL,
                        help=f"cost model, one of {get_cost_model_names()} (default {DEFAULT_COST_MODEL})")
    parser.add_argument("--log-base", type=float, default=DEFAULT_LOG_BASE, help="logarithm base of the cost law (default 2)")
    return parser


def _solver_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="GPI slack reserved inside eps (default 0)")
    parser.add_argument("--c", type=float, default=DEFAULT_C, help="Approximation-II constant (default 7.5)")
    parser.add_argument("--distance", default="both", choices=DISTANCE_CHOICES, help="regime(s) to report (default both)")
    return parser


def _circuit_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--k-max", type=int, default=None, help="keep cR_k for k <= k_max (default: no pruning)")
    parser.add_argument("--rz-per-crk", type=int, default=DEFAULT_RZ_PER_CRK, help="R_z leaves per controlled-R_k (default 3)")
    parser.add_argument("--fixed-tcount", type=int, default=DEFAULT_FIXED_TCOUNT_PER_CRK,
                        help="exact T gates per controlled-R_k (default 7)")
    return parser


def _apply_config(parser: argparse.ArgumentParser, config: dict, used: set) -> None:
    """
    Turn config-file values into defaults for the flags this parser knows.

    Custom validation-run flags (dest custom_*) are never defaulted, so a shared
    key such as EPS cannot turn a plain `validate` into a partial custom run.
    """
    for action in parser._actions:
        key = action.dest.upper()
        if action.dest in ("help", "command") or action.dest.startswith("custom_") or key not in config:
            continue
        raw = config[key]
        if action.nargs == 0:
            value = str(raw).strip().lower() in ("1", "true", "yes", "on")
        else:
            value = raw
        parser.set_defaults(**{action.dest: value})
        used.add(key)


def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    """
    Build the full parser.

    Args:
        config: Upper-case flag names -> values from a --config file; they become
                defaults, so explicit flags still win

    Returns:
        ArgumentParser whose parsed namespace has .handler set to a cmd_* function
    """
    config = config or {}
    used: set = set()
    parser = argparse.ArgumentParser(
        prog="gpi-estimate",
        description="GPI error-composition bounds and T-count resource estimates",
        parents=[global_options()],
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    out, model, solver, circuit = _output_options(), _model_options(), _solver_options(), _circuit_options()

    p = sub.add_parser("compose", parents=[out], help="bound of a composition tree")
    p.add_argument("tree", help="JSON tree file")
    p.add_argument("--method", default=BoundKind.EXACT.value, choices=[k.value for k in BoundKind],
                   help="product rule (default exact)")
    p.add_argument("--c", type=float, default=DEFAULT_C, help="Approximation-II constant (default 7.5)")
    p.add_argument("-v", "--verbose", action="store_true", help="include every node's intermediate bound")
    p.set_defaults(handler=cmd_compose)

    p = sub.add_parser("budget", parents=[out, model, solver], help="equal-split error budget and T-count")
    p.add_argument("--n-r", type=int, required="N_R" not in config, help="number of approximated R_z gates")
    p.add_argument("--eps", type=float, default=0.01, help="total error budget (default 0.01)")
    p.add_argument("--verify-trials", type=int, default=0,
                   help="also sample this many constrained allocations against the equal split")
    p.add_argument("--seed", type=int, default=0, help="seed of the optimality sampler (default 0)")
    p.set_defaults(handler=cmd_budget)

    p = sub.add_parser("qft", parents=[out, model, solver, circuit], help="approximate-QFT T-count")
    p.add_argument("--n", type=int, required="N" not in config, help="QFT width in qubits")
    p.add_argument("--eps", type=float, default=0.01, help="total error budget (default 0.01)")
    p.set_defaults(handler=cmd_qft)

    p = sub.add_parser("qpe", parents=[out, model, solver, circuit], help="phase-estimation T-count")
    p.add_argument("--n", type=int, required="N" not in config, help="accurate bits")
    p.add_argument("--p", type=float, default=0.75, help="success probability (default 0.75)")
    p.add_argument("--eps-total", type=float, default=0.01, help="total error budget (default 0.01)")
    p.add_argument("--eps-qpe", type=float, default=0.0, help="phase-approximation error inside the budget")
    p.add_argument("--rotations", type=int, default=1, help="approximable rotations in the controlled-U powers")
    p.set_defaults(handler=cmd_qpe)

    p = sub.add_parser("validate", parents=[out], help="Monte-Carlo check of the composition bounds")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help=f"trials per grid entry (default {DEFAULT_TRIALS})")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--output-dir", default=None, help="write one per-trial CSV per grid entry here")
    p.add_argument("--kind", choices=KINDS, dest="custom_kind", default=None,
                   help="custom run: product or tensor")
    p.add_argument("--n-qubits", type=int, dest="custom_n_qubits", default=None,
                   help="custom run: qubits per factor")
    p.add_argument("--m", type=int, dest="custom_m", default=None,
                   help="custom run: number of factors")
    p.add_argument("--eps", dest="custom_eps", default=None,
                   help="custom run: per-factor error or comma-separated list")
    p.add_argument("--c", type=float, default=DEFAULT_C, help="Approximation-II constant (default 7.5)")
    p.add_argument("--db", nargs="?", const=DEFAULT_DB_FILE, default=None,
                   help=f"archive runs in SQLite (default file {DEFAULT_DB_FILE})")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("figures", parents=[out], help="regenerate the reference sweep CSVs")
    p.add_argument("--output-dir", default="figures", help="directory for the CSVs (default figures)")
    p.add_argument("--c", type=float, default=DEFAULT_C, help="Approximation-II constant (default 7.5)")
    p.set_defaults(handler=cmd_figures)

    for subparser in sub.choices.values():
        _apply_config(subparser, config, used)
    used.update(action.dest.upper() for action in parser._actions)
    unknown = sorted(set(config) - used)
    if unknown:
        logger.warning(f"Ignoring unknown config keys: {', '.join(unknown)}")
    return parser
