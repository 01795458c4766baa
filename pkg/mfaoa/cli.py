#!/usr/bin/env python3
"""mfaoa CLI - mean-field AOA solver, diagnostics, oracles and benchmarks.

Exit codes: 0 on success, 1 on a domain error, 2 on a usage error.
"""

import argparse
import csv
import io
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .bench import compare_qaoa, qaoa_ensemble, run_ensemble, summarize
from .config import RunConfig, log_error_with_traceback, resolve_config, setup_logging
from .dynamics import linear_schedule, round_solution, solve
from .errors import InvalidInstanceError, MFAOAError
from .exact import (
    adiabatic_spectrum,
    brute_force_ground,
    minigap,
    optimize_schedule,
    qaoa_bloch_trajectory,
    qaoa_statevector,
)
from .fluctuations import fluctuation_trace, hardness_report, slice_stride
from .formats import (
    dumps,
    instance_to_dict,
    load_instance,
    load_trajectory,
    save_instance,
    save_trajectory,
    write_json,
    write_jsonl,
)
from .problems import (
    IsingProblem,
    break_symmetry,
    generate,
    partition_from_weights,
)

logger = logging.getLogger(__name__)

SUPPRESS = argparse.SUPPRESS


def _number_list(cast: Callable[[str], Any]):
    def parse(text: str) -> list:
        try:
            return [cast(item) for item in text.split(",") if item.strip()]
        except ValueError as e:
            raise argparse.ArgumentTypeError(f"invalid list {text!r}: {e}") from e

    return parse


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid int value: {text!r}") from e
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    """Argument parser; every option defaults to SUPPRESS so only explicit
    flags override the config file."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file with option defaults")
    common.add_argument(
        "--full", action="store_true", help="Apply the config's full-scale overrides"
    )
    common.add_argument("--log-level", help="Console log level (default INFO)")

    parser = argparse.ArgumentParser(
        prog="mfaoa",
        description="Mean-field approximate optimization toolkit",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    subparsers.add_parser("version", help="Show version information")

    gen = subparsers.add_parser("gen", parents=[common], help="Generate an instance")
    gen.add_argument("--kind", choices=["sk", "partition"], default=SUPPRESS)
    gen.add_argument("--n", type=int, default=SUPPRESS, help="Number of spins")
    gen.add_argument("--seed", type=int, default=SUPPRESS, help="Generator seed")
    gen.add_argument(
        "--weights",
        type=_number_list(float),
        default=SUPPRESS,
        help="Explicit partition weights, comma separated",
    )
    gen.add_argument("--out", default=SUPPRESS, help="Output file (default stdout)")

    solve_parser = subparsers.add_parser(
        "solve", parents=[common], help="Run the mean-field AOA on an instance"
    )
    solve_parser.add_argument("--instance", default=SUPPRESS, required=True)
    solve_parser.add_argument("--tau", type=float, default=SUPPRESS)
    solve_parser.add_argument("--p", type=_positive_int, default=SUPPRESS)
    solve_parser.add_argument(
        "--refine", type=int, default=SUPPRESS, help="Maximum refinement rounds"
    )
    solve_parser.add_argument("--two-flip", action="store_true", default=SUPPRESS)
    solve_parser.add_argument(
        "--break-symmetry",
        action="store_true",
        default=SUPPRESS,
        help="Fix the last spin of a field-free instance",
    )
    solve_parser.add_argument(
        "--record-trajectory",
        type=_positive_int,
        metavar="STRIDE",
        default=SUPPRESS,
        help="Record every STRIDE-th slice",
    )
    solve_parser.add_argument("--trajectory-out", default=SUPPRESS)
    solve_parser.add_argument("--out", default=SUPPRESS)

    fluct = subparsers.add_parser(
        "fluct", parents=[common], help="Fluctuation spectrum and Lyapunov exponents"
    )
    fluct.add_argument("--instance", default=SUPPRESS, required=True)
    fluct.add_argument("--trajectory", default=SUPPRESS)
    fluct.add_argument("--tau", type=float, default=SUPPRESS)
    fluct.add_argument("--p", type=_positive_int, default=SUPPRESS)
    fluct.add_argument("--slices", type=_positive_int, default=SUPPRESS)
    fluct.add_argument("--easy-ratio", type=float, default=SUPPRESS)
    fluct.add_argument("--threads", type=_positive_int, default=SUPPRESS)
    fluct.add_argument("--out", default=SUPPRESS, help="CSV output file")

    exact = subparsers.add_parser(
        "exact", parents=[common], help="Exact reference oracles"
    )
    exact.add_argument("--instance", default=SUPPRESS, required=True)
    exact.add_argument(
        "--mode", choices=["ground", "spectrum", "qaoa"], default=SUPPRESS
    )
    exact.add_argument(
        "--s-grid",
        type=_positive_int,
        default=SUPPRESS,
        help="Number of s points in [0, 1]",
    )
    exact.add_argument(
        "--k", type=_positive_int, default=SUPPRESS, help="Levels per slice"
    )
    exact.add_argument(
        "--p", type=_positive_int, default=SUPPRESS, help="QAOA layers"
    )
    exact.add_argument("--tau", type=float, default=SUPPRESS)
    exact.add_argument(
        "--optimize", type=int, default=SUPPRESS, help="Coordinate descent sweeps"
    )
    exact.add_argument("--out", default=SUPPRESS)

    bench = subparsers.add_parser("bench", parents=[common], help="Ensemble benchmark")
    bench.add_argument("--kind", choices=["sk", "partition"], default=SUPPRESS)
    bench.add_argument("--n-list", type=_number_list(int), default=SUPPRESS)
    bench.add_argument("--count", type=_positive_int, default=SUPPRESS)
    bench.add_argument("--tau", type=float, default=SUPPRESS)
    bench.add_argument("--p", type=_positive_int, default=SUPPRESS)
    bench.add_argument("--two-flip", action="store_true", default=SUPPRESS)
    bench.add_argument("--exact", action="store_true", default=SUPPRESS)
    bench.add_argument("--refine", type=int, default=SUPPRESS)
    bench.add_argument("--seed0", type=int, default=SUPPRESS)
    bench.add_argument("--gumbel-m", type=_positive_int, default=SUPPRESS)
    bench.add_argument(
        "--qaoa-layers",
        type=_number_list(int),
        default=SUPPRESS,
        help="QAOA layer counts for the partition comparison",
    )
    bench.add_argument("--qaoa-optimize", type=int, default=SUPPRESS)
    bench.add_argument("--timings", action="store_true", default=SUPPRESS)
    bench.add_argument("--out-dir", default=SUPPRESS)
    bench.add_argument("--threads", type=_positive_int, default=SUPPRESS)

    subparsers.add_parser("serve", parents=[common], help="Serve tools over MCP stdio")
    return parser


def _emit(document: Any, out: str | None):
    if out:
        write_json(out, document)
        logger.info("Wrote %s", out)
    else:
        print(dumps(document))


def _instance_header(problem: IsingProblem) -> dict[str, Any]:
    return {"kind": problem.kind, "n": problem.n, "seed": problem.seed}


def _dynamics_problem(problem: IsingProblem) -> IsingProblem:
    if problem.is_symmetric and problem.n >= 2:
        return break_symmetry(problem)
    return problem


def _write_csv(path: str | Path | None, header: list[str], rows, comment: str = ""):
    buffer = io.StringIO()
    if comment:
        buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(
        [[repr(v) if isinstance(v, float) else v for v in row] for row in rows]
    )
    if path is None:
        sys.stdout.write(buffer.getvalue())
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(buffer.getvalue(), encoding="utf-8")
    logger.info("Wrote %s", path)


def cmd_gen(config: RunConfig) -> int:
    if config.get("weights"):
        problem = partition_from_weights(config.get("weights")).problem
    else:
        problem = generate(config.get("kind"), config.get("n"), config.get("seed"))
    out = config.get("out")
    if out:
        save_instance(out, problem)
        logger.info("Wrote %s instance n=%s to %s", problem.kind, problem.n, out)
    else:
        print(dumps(instance_to_dict(problem)))
    return 0


def cmd_solve(config: RunConfig) -> int:
    problem = load_instance(config.get("instance"))
    stride = config.get("record_trajectory")
    solution = solve(
        problem,
        tau=config.get("tau"),
        p=config.get("p"),
        refine_rounds=config.get("refine"),
        two_flip=config.get("two_flip"),
        break_symmetry_first=config.get("break_symmetry"),
        record_stride=stride,
    )

    if solution.trajectory is not None:
        out = config.get("out")
        trajectory_out = config.get("trajectory_out")
        if not trajectory_out:
            trajectory_out = (
                str(Path(out).with_suffix(".trajectory.jsonl"))
                if out
                else "trajectory.jsonl"
            )
        save_trajectory(trajectory_out, solution.trajectory)
        logger.info(
            "Wrote trajectory (%s slices) to %s",
            len(solution.trajectory),
            trajectory_out,
        )

    _emit(
        {
            "config": config.to_dict(),
            "instance": _instance_header(problem),
            "solution": solution.to_dict(),
            "warnings": solution.warnings,
        },
        config.get("out"),
    )
    return 0


def cmd_fluct(config: RunConfig) -> int:
    problem = load_instance(config.get("instance"))
    dynamics_problem = _dynamics_problem(problem)
    slices = config.get("slices")

    if config.get("trajectory"):
        trajectory = load_trajectory(config.get("trajectory"), dynamics_problem)
    else:
        solution = solve(
            problem,
            tau=config.get("tau"),
            p=config.get("p"),
            record_stride=slice_stride(config.get("p"), slices),
        )
        trajectory = solution.trajectory
    sigma_star = round_solution(trajectory.configuration(len(trajectory) - 1))

    trace = fluctuation_trace(
        dynamics_problem,
        trajectory,
        sigma_star,
        max_slices=slices,
        threads=config.get("threads"),
    )
    report = hardness_report(trace, problem.n, easy_ratio=config.get("easy_ratio"))

    out = config.get("out") or "fluct.csv"
    _write_csv(out, trace.header(), trace.rows())
    write_json(
        f"{out}.report.json",
        {
            "config": config.to_dict(),
            "instance": _instance_header(problem),
            "sigma_star": sigma_star,
            "report": report.to_dict(),
            "gaps": trace.gaps,
            "unstable_slices": int(np.count_nonzero(~trace.stable)),
            "warnings": trace.warnings,
        },
    )
    logger.info(
        "Hardness: max lambda_0 = %.4f, threshold %.4f, %s",
        report.max_lambda,
        report.threshold,
        report.classification,
    )
    return 0


def cmd_exact(config: RunConfig) -> int:
    problem = load_instance(config.get("instance"))
    mode = config.get("mode")
    out = config.get("out")

    if mode == "ground":
        energy, sigma = brute_force_ground(problem)
        _emit(
            {
                "config": config.to_dict(),
                "instance": _instance_header(problem),
                "energy": energy,
                "sigma": sigma,
            },
            out,
        )
        return 0

    dynamics_problem = _dynamics_problem(problem)
    if mode == "spectrum":
        s_grid = np.linspace(0.0, 1.0, int(config.get("s_grid")))
        k = int(config.get("k"))
        slices = adiabatic_spectrum(dynamics_problem, s_grid, k)
        rows = [[sl.s, *map(float, sl.levels)] for sl in slices]
        _write_csv(
            out or "spectrum.csv",
            ["s", *(f"level_{i}" for i in range(k))],
            rows,
        )
        if k >= 2:
            location, gap = minigap(slices)
            logger.info("Minimum gap %.6g at s=%.4f", gap, location)
        return 0

    schedule = linear_schedule(config.get("p"), config.get("tau"))
    state, expectation = qaoa_statevector(dynamics_problem, schedule)
    document = {
        "config": config.to_dict(),
        "instance": _instance_header(problem),
        "schedule": schedule.to_dict(),
        "expectation": expectation,
        "bloch": qaoa_bloch_trajectory(dynamics_problem, schedule)[-1],
        "norm": state.norm,
    }
    if config.get("optimize"):
        optimized, best = optimize_schedule(
            dynamics_problem, schedule, sweeps=int(config.get("optimize"))
        )
        document["optimized"] = {
            "expectation": best,
            "gammas": optimized.gammas,
            "betas": optimized.betas,
            "optimizer": "coordinate-descent (derivative-free substitute)",
        }
    _emit(document, out)
    return 0


def cmd_bench(config: RunConfig) -> int:
    kind = config.get("kind")
    out_dir = Path(config.get("out_dir"))
    schedule = linear_schedule(config.get("p"), config.get("tau"))
    provenance = config.to_dict()
    timings = bool(config.get("timings"))

    results = []
    for n in config.get("n_list"):
        result = run_ensemble(
            kind,
            n,
            config.get("count"),
            schedule,
            seed0=config.get("seed0"),
            with_exact=config.get("exact"),
            two_flip=config.get("two_flip"),
            refine_rounds=config.get("refine"),
            threads=config.get("threads"),
        )
        write_jsonl(
            out_dir / f"records_n{n}.jsonl",
            [
                {"config": provenance, "metadata": result.metadata},
                *(r.to_dict(timings=timings) for r in result.records),
            ],
        )
        results.append(result)

    rows, fits = summarize(kind, results, gumbel_m=config.get("gumbel_m"))
    columns = ["n", "count", "mean", "std", "mean_e0", "success_rate"]
    _write_csv(
        out_dir / "summary.csv",
        columns,
        [[row.get(c, "") for c in columns] for row in rows],
        comment=f"config: {dumps(provenance, indent=None)}",
    )

    layers = config.get("qaoa_layers") or []
    if layers and kind == "partition":
        qaoa_rows = []
        for p_layers in layers:
            for n in config.get("n_list"):
                qaoa_rows.extend(
                    qaoa_ensemble(
                        n,
                        config.get("count"),
                        p_layers,
                        seed0=config.get("seed0"),
                        tau=config.get("tau"),
                        optimize_sweeps=config.get("qaoa_optimize"),
                        threads=config.get("threads"),
                    )
                )
        fits["qaoa"] = compare_qaoa(qaoa_rows, results)
    elif layers:
        logger.warning("QAOA comparison is only defined for partition benchmarks")

    write_json(out_dir / "fits.json", {"config": provenance, "fits": fits})
    logger.info("Benchmark outputs written to %s", out_dir)
    return 0


def cmd_serve(config: RunConfig) -> int:
    from .server import serve

    return serve()


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "fluct": cmd_fluct,
    "exact": cmd_exact,
    "bench": cmd_bench,
    "serve": cmd_serve,
}

_META_OPTIONS = {"command", "config", "full", "log_level"}


def dispatch(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2

    if not args.command:
        parser.print_help(sys.stderr)
        return 2

    if args.command == "version":
        print(f"mfaoa {__version__}")
        return 0

    setup_logging(getattr(args, "log_level", None))
    cli_options = {k: v for k, v in vars(args).items() if k not in _META_OPTIONS}

    try:
        config = resolve_config(
            args.command,
            cli_options,
            getattr(args, "config", None),
            full=getattr(args, "full", False),
        )
        return COMMANDS[args.command](config)
    except InvalidInstanceError as e:
        print(f"Error: invalid instance: {e}", file=sys.stderr)
        return 1
    except MFAOAError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        log_error_with_traceback(e, f"mfaoa {args.command}")
        print(f"Error: {e}", file=sys.stderr)
        return 1


def main():
    """Console entry point."""
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
