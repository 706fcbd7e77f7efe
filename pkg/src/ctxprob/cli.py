"""Command-line front end: ``ctxprob {analyze,simulate,sweep} --config PATH``.

Exit status: 0 pass, 1 tolerance failure, 2 config/validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from pathlib import Path
from typing import IO, Any, Iterable, Sequence

from .config import SCHEMA_VERSION, RunConfig, load_config
from .errors import ConfigError, InvalidModel
from .estimators import TRACE_COLUMNS
from .interference import TRIGONOMETRIC, classical_interval, lambda_theta, perturbation_interval, tpf_eval
from .prob_core import ModelSpec, marginal_c, model_from_dict, validate
from .runner import SeedResult, simulate, simulate_seed

log = logging.getLogger("ctxprob")

EXIT_OK, EXIT_TOLERANCE, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

SWEEP_COLUMNS = (
    "status", "gamma1", "gamma2", "lambda1", "lambda2", "theta1", "theta2", "regime1", "regime2",
)
SWEEP_SIM_COLUMNS = ("gamma1_hat", "gamma2_hat", "abs_err1")


# ---------------------------------------------------------------------------
# output helpers


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(fh: IO[str], columns: Sequence[str], rows: Iterable[dict[str, Any]], fmt: str) -> None:
    """Delimited table with a leading schema line.

    csv: a ``# schema_version: N`` comment line, the header, then rows; blanks
    mark undefined values. json-lines: a header object carrying
    ``schema_version`` and ``columns``, then one object per row with nulls.
    """
    if fmt == "csv":
        fh.write(f"# schema_version: {SCHEMA_VERSION}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_cell(row.get(c)) for c in columns) + "\n")
    else:
        fh.write(json.dumps({"schema_version": SCHEMA_VERSION, "columns": list(columns)}) + "\n")
        for row in rows:
            fh.write(json.dumps({c: row.get(c) for c in columns}) + "\n")


def _json_dump(doc: Any, fh: IO[str]) -> None:
    json.dump(doc, fh, indent=2, sort_keys=False, allow_nan=False)
    fh.write("\n")


def _ext(fmt: str) -> str:
    return "csv" if fmt == "csv" else "jsonl"


# ---------------------------------------------------------------------------
# commands


def analyze_model(model: ModelSpec) -> dict[str, Any]:
    """The analytic report for one model (shared by analyze and sweep)."""
    report = lambda_theta(model)
    p_c = marginal_c(model)
    p_a1, p_a2 = model.a_law.p_1, model.a_law.p_2
    round_trip = []
    for j in (1, 2):
        if report.regime[j - 1] == TRIGONOMETRIC:
            value = tpf_eval(model.cbar_given_a1.p(j), model.chat_given_a2.p(j), p_a1, p_a2, report.theta[j - 1])
            round_trip.append(value.value)
        else:
            round_trip.append(None)
    return {
        "model": model.to_dict(),
        "marginal_c": list(p_c),
        **report.to_dict(),
        "classical_interval": [list(classical_interval(p_a1, p)) for p in p_c],
        "perturbation_interval": [perturbation_interval(p_a1, p).to_dict() for p in p_c],
        "tpf_round_trip": round_trip,
    }


def cmd_analyze(config: RunConfig, out: IO[str] | None = None) -> tuple[int, dict[str, Any]]:
    doc = {"schema_version": SCHEMA_VERSION, "command": "analyze", **analyze_model(config.model)}
    config.out_dir.mkdir(parents=True, exist_ok=True)
    with open(config.out_dir / "report.json", "w") as fh:
        _json_dump(doc, fh)
    if out is not None:
        _json_dump(doc, out)
    return EXIT_OK, doc


def _simulation_summary(config: RunConfig, results: list[SeedResult]) -> dict[str, Any]:
    report = lambda_theta(config.model)
    passing = sum(r.passed for r in results)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "model": config.model.to_dict(),
        "run": {
            "n": config.n,
            "seeds": config.seeds,
            "checkpoints": config.resolved_checkpoints(),
            "generator": config.generator,
            "fault_schedule": config.fault_schedule,
            "tilde_n": config.tilde_n,
            "min_check_n": config.min_check_n,
            "tolerance_sigma": config.tolerance_sigma,
            "tolerance_scale": config.tolerance_scale,
            "tolerance": config.tolerance,
        },
        "analytic": {"marginal_c": list(marginal_c(config.model)), "gamma": list(report.gamma)},
        "seeds": [r.summary() for r in results],
        "passing_seeds": passing,
        "required_passing": config.required_passing,
        "pass": passing >= config.required_passing,
    }


def cmd_simulate(config: RunConfig) -> tuple[int, dict[str, Any]]:
    config.out_dir.mkdir(parents=True, exist_ok=True)
    with contextlib.ExitStack() as stack:
        dumps = {}
        if config.dump_samples:
            for seed in config.seeds:
                dumps[seed] = stack.enter_context(open(config.out_dir / f"samples_seed{seed}.csv", "w"))
        results = simulate(config, dumps)
    ext = _ext(config.fmt)
    for result in results:
        with open(config.out_dir / f"trace_seed{result.seed}.{ext}", "w") as fh:
            write_table(fh, TRACE_COLUMNS, result.rows, config.fmt)
    summary = _simulation_summary(config, results)
    with open(config.out_dir / "summary.json", "w") as fh:
        _json_dump(summary, fh)
    for r in results:
        log.info("seed %d: %s", r.seed, "pass" if r.passed else "FAIL")
    return (EXIT_OK if summary["pass"] else EXIT_TOLERANCE), summary


def sweep_rows(config: RunConfig) -> list[dict[str, Any]]:
    spec = config.sweep
    rows = []
    for value in spec.values:
        row: dict[str, Any] = {spec.parameter: value}
        try:
            model = validate(model_from_dict({**config.model_doc, spec.parameter: value}))
        except InvalidModel as exc:
            row["status"] = exc.invariant
            rows.append(row)
            continue
        doc = analyze_model(model)
        row["status"] = "ok"
        for j in (1, 2):
            row[f"gamma{j}"] = doc["gamma"][j - 1]
            row[f"lambda{j}"] = doc["lambda"][j - 1]
            row[f"theta{j}"] = doc["theta"][j - 1]
            row[f"regime{j}"] = doc["regime"][j - 1]
        if spec.simulate_n:
            point = RunConfig(model=model, n=spec.simulate_n, seeds=[spec.seed], checkpoints=[spec.simulate_n])
            result = simulate_seed(point, spec.seed)
            last = result.rows[-1]
            row["gamma1_hat"] = last["gamma1_hat"]
            row["gamma2_hat"] = last["gamma2_hat"]
            row["abs_err1"] = last["abs_err1"]
        rows.append(row)
    return rows


def cmd_sweep(config: RunConfig) -> tuple[int, list[dict[str, Any]]]:
    if config.sweep is None:
        raise ConfigError("sweep command needs a sweep section")
    rows = sweep_rows(config)
    columns = (config.sweep.parameter,) + SWEEP_COLUMNS
    if config.sweep.simulate_n:
        columns += SWEEP_SIM_COLUMNS
    config.out_dir.mkdir(parents=True, exist_ok=True)
    with open(config.out_dir / f"sweep.{_ext(config.fmt)}", "w") as fh:
        write_table(fh, columns, rows, config.fmt)
    for row in rows:
        if row["status"] != "ok":
            log.warning("sweep point %s=%r rejected: %s", config.sweep.parameter, row[config.sweep.parameter], row["status"])
    return EXIT_OK, rows


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    common.add_argument("--seed-override", type=int, default=None, help="replace run.seeds with this single seed")
    common.add_argument("--out", type=Path, default=None, help="output directory (overrides output.dir)")
    common.add_argument("--format", choices=("csv", "json-lines"), default=None, help="table format")
    common.add_argument("--quiet", action="store_true", help="no progress or report on stdout/stderr")

    parser = argparse.ArgumentParser(prog="ctxprob", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="analytic interference report for the configured model")
    sub.add_parser("simulate", parents=[common], help="seeded Monte Carlo runs with convergence traces")
    sub.add_parser("sweep", parents=[common], help="analytic (and optional simulated) quantities over a grid")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO, format="%(message)s")
    try:
        config = load_config(args.config, require_model=args.command != "sweep")
        if args.seed_override is not None:
            config.seeds = [args.seed_override]
            config.min_passing_seeds = None
        if args.out is not None:
            config.out_dir = args.out
        if args.format is not None:
            config.fmt = args.format
        if args.command == "analyze":
            status, _ = cmd_analyze(config, None if args.quiet else sys.stdout)
        elif args.command == "simulate":
            status, summary = cmd_simulate(config)
            if not args.quiet:
                print(f"{summary['passing_seeds']}/{len(config.seeds)} seeds passed "
                      f"(need {summary['required_passing']}): {'PASS' if summary['pass'] else 'FAIL'}")
        else:
            status, _ = cmd_sweep(config)
    except (ConfigError, InvalidModel) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())
