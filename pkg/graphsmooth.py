#!/usr/bin/env python3
"""
graphsmooth command line.

    graphsmooth.py simulate --preset fig1-star-theta05
    graphsmooth.py simulate --config experiment.cfg --threads 8 --strict
    graphsmooth.py verify lemma --cases 200
    graphsmooth.py verify prop2 --n 5 --theta 0.5 --seeds 200
    graphsmooth.py bounds --graph complete --T 50 --measurements m.csv --n 5 --mu 0.1 --sigma 1 --S-T 7
    graphsmooth.py solve --edges g.txt --measurements m.csv --n 5 --observations y.txt --mu 0.1
    graphsmooth.py gen-graph --kind star --T 20 --out star.txt
    graphsmooth.py serve --port 8000

Exit codes: 0 success, 2 configuration or input error, 3 verification failure.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src.core.config import settings, create_directories
from src.core.exceptions import ConfigError, GraphSmoothError, VerificationFailedError
from src.core.logging_config import setup_logging, get_logger

console = Console()
logger = get_logger("cli")


# ============================================================================
# Sub-commands
# ============================================================================

def cmd_simulate(args: argparse.Namespace) -> int:
    from src.harness.config_file import read_config
    from src.harness.presets import get_preset
    from src.harness.service import run_experiment
    from src.harness.storage import emit_series

    if (args.config is None) == (args.preset is None):
        raise ConfigError("Give exactly one of --config or --preset")
    config = read_config(args.config) if args.config else get_preset(args.preset)
    if args.trials is not None:
        config = config.model_copy(update={"trials": args.trials})

    result = run_experiment(config, workers=args.threads, strict=args.strict, fresh=args.fresh)
    out_dir = Path(args.out) if args.out else Path(settings.RESULTS_DIR) / (config.name or result.experiment_key)
    csv_path, archive_path = emit_series(result, out_dir)

    table = Table(title=f"Experiment {config.name or result.experiment_key}", show_header=True,
                  header_style="bold magenta")
    table.add_column("T", justify="right", style="cyan")
    table.add_column("mean MSE", justify="right", style="green")
    table.add_column("median MSE", justify="right", style="green")
    table.add_column("std", justify="right")
    table.add_column("trials", justify="right")
    table.add_column("flagged", justify="right", style="yellow")
    table.add_column("envelope / T", justify="right", style="dim")
    for agg in result.aggregates:
        table.add_row(
            str(agg.T),
            _fmt(agg.mean_mse),
            _fmt(agg.median_mse),
            _fmt(agg.std_mse),
            str(agg.trials),
            str(agg.flagged),
            _fmt(agg.rate_envelope),
        )
    console.print(table)
    console.print(f"[green]Series written to {csv_path}[/green]")
    console.print(f"[green]Archive written to {archive_path}[/green]")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    from src.harness.verification import verify_lemma, verify_sampling, verify_sync_lemma

    if args.target in ("lemma", "sync"):
        runner = verify_lemma if args.target == "lemma" else verify_sync_lemma
        cases = args.cases or (200 if args.target == "lemma" else 100)
        report = runner(seed=args.seed, cases=cases, corruption=args.corruption)
        body = (
            f"[bold cyan]Cases passed:[/bold cyan] {report.passes}/{report.cases} ({report.checks} checks)\n"
            f"[bold cyan]Worst margin:[/bold cyan] {report.worst_margin:.3e}\n"
            f"[bold cyan]Worst branch gap:[/bold cyan] {report.worst_continuity_gap:.3e}"
        )
        for failure in report.failures[:5]:
            body += (
                f"\n[red]case {failure.case}: {failure.graph_kind} n={failure.n} T={failure.T} "
                f"mu={failure.mu:.3g} {failure.check}={failure.dense_value:.6g} < bound={failure.bound_value:.6g}[/red]"
            )
    else:
        params = {"n": args.n, "delta": args.delta}
        if args.target == "prop2":
            params.update(theta=args.theta, T=args.T or 0)
        else:
            params.update(T=args.T or 50, p=args.p)
        report = verify_sampling(args.target, params, seeds=args.seeds, seed=args.seed)
        body = (
            f"[bold cyan]Parameters:[/bold cyan] {report.params}\n"
            f"[bold cyan]Sandwich pass rate:[/bold cyan] {report.pass_rate:.3f} "
            f"(required {report.required_rate:.2f})"
        )
        if report.norm_pass_rate is not None:
            body += f"\n[bold cyan]||C|| <= gamma pass rate:[/bold cyan] {report.norm_pass_rate:.3f}"
        if not report.hypotheses_met:
            body += "\n[yellow]Parameters do not meet the sampling hypotheses[/yellow]"

    style = "green" if report.passed else "red"
    console.print(Panel(body, title=f"verify {args.target}", border_style=style))
    if not report.passed:
        raise VerificationFailedError(f"verify {args.target} failed")
    return 0


def _load_graph(args: argparse.Namespace):
    from src.graph.core import build_graph
    from src.graph.io import read_edge_list

    if args.edges:
        return read_edge_list(args.edges)
    if args.graph and args.T:
        return build_graph(args.graph, args.T)
    raise ConfigError("Give --edges FILE or --graph KIND with --T")


def cmd_bounds(args: argparse.Namespace) -> int:
    from src.bounds.lemma import BoundInputs, bound_inputs_from, error_bound
    from src.graph.core import laplacian_spectrum
    from src.measurement.design import gram_summary
    from src.measurement.io import read_measurements

    g = _load_graph(args)
    spectrum = laplacian_spectrum(g)
    if args.measurements:
        summary = gram_summary(read_measurements(args.measurements, args.n, g.vertex_count))
        inputs = bound_inputs_from(g, summary, args.mu, sync=args.sync, spectrum=spectrum)
        design_norm = summary.design_norm
    else:
        if None in (args.b2, args.b3, args.design_norm):
            raise ConfigError("Without --measurements give --b2, --b3 and --design-norm")
        b1 = args.b1 if args.b1 is not None else spectrum.fiedler
        inputs = BoundInputs(mu=args.mu, b1=b1, b2=args.b2, b3=args.b3, lambda_min_CtC=args.lambda_min_ctc)
        design_norm = args.design_norm

    report = error_bound(
        inputs, spectrum, args.n, args.sigma, design_norm, args.S_T, args.delta, variance_form=args.variance_form
    )
    print(json.dumps(report.as_dict()))
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    from src.estimator.solver import SolveOptions, solve
    from src.measurement.io import read_measurements, read_observations
    from src.signals.io import format_signal, write_signal

    g = _load_graph(args)
    m = read_measurements(args.measurements, args.n, g.vertex_count)
    y = read_observations(args.observations)
    opts = SolveOptions(
        mu=args.mu,
        rel_tol=args.tol,
        max_iters=args.max_iters,
        mode=args.mode,
        allow_rank_deficient=args.allow_rank_deficient,
    )
    report = solve(g, m, y, opts)
    if args.out:
        write_signal(report.estimate, args.out)
        console.print(
            f"[green]Estimate written to {args.out}[/green] "
            f"({report.iterations} iterations, residual {report.final_residual:.3e}, "
            f"converged={report.converged})",
        )
    else:
        sys.stdout.write(format_signal(report.estimate))
    return 0


def cmd_gen_graph(args: argparse.Namespace) -> int:
    from src.graph.core import build_erdos_renyi, build_graph
    from src.graph.io import format_edge_list, write_edge_list

    if args.kind == "erdos_renyi":
        if args.p is None:
            raise ConfigError("erdos_renyi needs --p")
        g = build_erdos_renyi(args.T, args.p, np.random.default_rng(args.seed))
    else:
        g = build_graph(args.kind, args.T)
    if args.out:
        write_edge_list(g, args.out)
        console.print(f"[green]{args.kind} graph with {g.edge_count} edges written to {args.out}[/green]")
    else:
        sys.stdout.write(format_edge_list(g))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("main:app", host=args.host, port=args.port, reload=False)
    return 0


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.4g}"


# ============================================================================
# Argument parsing
# ============================================================================

def _add_graph_args(parser: argparse.ArgumentParser):
    parser.add_argument("--edges", help="Edge-list file")
    parser.add_argument("--graph", choices=["complete", "star", "path"], help="Graph family")
    parser.add_argument("--T", type=int, help="Number of graph vertices")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphsmooth", description="Graph-smooth signal recovery toolkit")
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Run a Monte-Carlo experiment")
    p.add_argument("--config", help="Flat key = value config file")
    p.add_argument("--preset", help="Named preset")
    p.add_argument("--threads", type=int, default=None, help="Worker pool size")
    p.add_argument("--trials", type=int, default=None, help="Override the trial count")
    p.add_argument("--strict", action="store_true", help="Exclude non-converged trials from aggregates")
    p.add_argument("--fresh", action="store_true", help="Discard stored cells first")
    p.add_argument("--out", help="Output directory for series.csv and archive.json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="Run an empirical verification suite")
    p.add_argument("target", choices=["lemma", "sync", "prop2", "prop5"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=None)
    p.add_argument("--seeds", type=int, default=200)
    p.add_argument("--corruption", type=float, default=1.0, help="Multiply lambda_bar' (verifier self-test)")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--p", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--T", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="Evaluate the error bound as flat JSON")
    _add_graph_args(p)
    p.add_argument("--measurements", help="Measurement CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--S-T", dest="S_T", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--variance-form", choices=["theorem", "lemma"], default="theorem")
    p.add_argument("--sync", action="store_true", help="Use the centered (synchronization) quantities")
    p.add_argument("--b1", type=float)
    p.add_argument("--b2", type=float)
    p.add_argument("--b3", type=float)
    p.add_argument("--lambda-min-ctc", type=float, default=0.0)
    p.add_argument("--design-norm", type=float)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("solve", help="Solve the penalized estimator")
    _add_graph_args(p)
    p.add_argument("--measurements", required=True)
    p.add_argument("--observations", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--mode", choices=["plain", "centered"], default="plain")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--allow-rank-deficient", action="store_true")
    p.add_argument("--out", help="Output CSV (node,coord,value); stdout if omitted")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen-graph", help="Write an edge list")
    p.add_argument("--kind", choices=["complete", "star", "path", "erdos_renyi"], required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("serve", help="Run the HTTP API")
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level, rich_console=True)
    create_directories()
    try:
        return args.func(args)
    except GraphSmoothError as exc:
        console.print(f"[red]Error:[/red] {exc.detail}")
        logger.error(f"{args.command} failed: {exc.detail}")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
