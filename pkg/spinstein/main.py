"""
Command-line front end.

    spinstein macrostates --q 3 --beta 1.6
    spinstein simulate --q 3 --beta 1.6 --n 200 --x ordered:1 --r 0.05 --steps 100000
    spinstein couple --q 3 --beta 1.6 --n 200 --x ordered:1 --replicas 50
    spinstein exact {tmix|stationary|wasserstein|stein|export} ...
    spinstein bench {bounded-degree|tnorm|clt|wscaling|theta-trend|tmix-scaling|coalescence|concentration|envelope} ...
    spinstein replay data/clt.csv.manifest.json

Every command writes a CSV (or text export) plus a manifest next to it and prints a table.
Exit codes: 0 ok, 1 internal solver failure, 2 usage, 3 resource guard, 4 output failure.
"""
import argparse
import json
import logging
import math
import shutil
import sys
import tempfile
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from . import __version__
from .bench import (
    LipschitzSpec,
    bounded_degree_bound,
    clt_covariance_check,
    coalescence_tail,
    concentration_run,
    contraction_envelope,
    mean_T_norm,
    restricted_tmix_scaling,
    theta_star_trend,
    wasserstein_scaling,
)
from .coupling import start_pairs, two_phase_coalescence
from .dynamics import ChainState, RestrictedRegion, nearest_counts, run_trajectory
from .errors import SpinsteinError, UsageError
from .exact import (
    lumped_gibbs,
    lumped_transition_matrix,
    neighbour_lipschitz,
    solve_stationary,
    solve_stein_poisson,
    tv_curve_and_tmix,
    write_coordinate_text,
)
from .macrostates import analyze, beta_c, beta_s, select_macrostate
from .reporting import (
    ExperimentManifest,
    TableFormatter,
    compare_outputs,
    digest_file,
    manifest_path_for,
    write_csv,
    write_svg_lines,
)
from .settings import RunConfig, build_run_config, describe_validation_error, load_environment
from .spin_core import ModelParams, build_graph, complete_graph_energy, make_stream, read_configuration, read_graph

logger = logging.getLogger(__name__)

PATH_FLAGS = ("--out", "--svg")


class CommandResult:
    """Table produced by a command, plus optional plot series and extra files."""

    def __init__(
        self,
        columns: List[str],
        rows: List[Dict[str, Any]],
        summary: Optional[Dict[str, Any]] = None,
        series: Optional[Dict[str, List[Tuple[float, float]]]] = None,
        files: Optional[List[Path]] = None,
    ):
        self.columns = columns
        self.rows = rows
        self.summary = summary or {}
        self.series = series
        self.files = files or []


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


# ---------------------------------------------------------------- helpers


def model_params(config: RunConfig, n: Optional[int] = None) -> ModelParams:
    try:
        return ModelParams(q=config.q, beta=config.beta, n_vertices=config.n if n is None else n)
    except ValidationError as e:
        raise UsageError(f"invalid model parameters: {describe_validation_error(e)}")


def parse_restrict(text: str) -> Tuple[str, float]:
    """Split "X:R" (for example "ordered:1:0.05" or "e:0.1") into selector and radius."""
    selector, _, radius = text.rpartition(":")
    try:
        value = float(radius)
    except ValueError:
        value = math.nan
    if not selector or not 0.0 < value < 1.0:
        raise UsageError(f"--restrict: expected X:R with X = e or ordered:K and 0 < R < 1, got '{text}'")
    return selector, value


def region_from(args: argparse.Namespace, config: RunConfig) -> Optional[RestrictedRegion]:
    """Ball from --restrict X:R, or from --x with the configured radius; None when neither is given."""
    if getattr(args, "restrict", None):
        selector, radius = parse_restrict(args.restrict)
    elif getattr(args, "x", None) is not None:
        selector, radius = args.x, config.r
    else:
        return None
    return RestrictedRegion(select_macrostate(selector, config.beta, config.q), radius)


def graph_from(args: argparse.Namespace, config: RunConfig):
    if getattr(args, "graph_file", None):
        return read_graph(args.graph_file)
    return build_graph(args.graph, config.n, degree=args.degree, edge_prob=args.edge_prob, seed=args.graph_seed)


def count_columns(q: int) -> List[str]:
    return [f"counts_{k + 1}" for k in range(q)]


def count_fields(counts: np.ndarray) -> Dict[str, int]:
    return {f"counts_{k + 1}": int(c) for k, c in enumerate(counts)}


def table_series(rows: List[Dict[str, Any]], x_key: str, y_keys: Sequence[str]) -> Dict[str, List[Tuple[float, float]]]:
    series = {}
    for key in y_keys:
        series[key] = [(float(row[x_key]), float(row[key])) for row in rows if row.get(key) is not None]
    return series


# ---------------------------------------------------------------- commands


def cmd_macrostates(args, config: RunConfig) -> CommandResult:
    q = config.q
    columns = ["index", "dominant_color"] + [f"x_{k + 1}" for k in range(q)] + [
        "s_star", "a", "a_prime", "b", "theta", "lambda", "numeric_lambda", "condition_holds"
    ]
    rows = []
    for i, analysis in enumerate(analyze(config.beta, q)):
        record = analysis.to_dict()
        row = {"index": i + 1, "dominant_color": record["dominant_color"]}
        row.update({f"x_{k + 1}": value for k, value in enumerate(record["x"])})
        for key in ("s_star", "a", "a_prime", "b", "theta", "lambda", "numeric_lambda", "condition_holds"):
            row[key] = record[key]
        rows.append(row)
    summary = {"beta_c": beta_c(q), "beta_s": beta_s(q), "macrostates": len(rows)}
    return CommandResult(columns, rows, summary)


def cmd_simulate(args, config: RunConfig) -> CommandResult:
    graph = None
    n = config.n
    if args.model == "graph":
        graph = graph_from(args, config)
        n = graph.n_vertices
    elif args.graph != "complete" or args.graph_file:
        raise UsageError("--model cwp runs on the complete graph; use --model graph for other graphs")
    p = model_params(config, n)
    region = region_from(args, config)
    rng = make_stream(config.seed)
    if args.init_file:
        initial = ChainState(read_configuration(args.init_file, config.q, n_vertices=n), config.q)
    elif region is not None:
        initial = ChainState.from_counts(nearest_counts(region.center, n), config.q, rng)
    else:
        initial = ChainState(rng.integers(0, config.q, size=n), config.q)
    summary = run_trajectory(initial, args.steps, p, rng, region=region, graph=graph, stride=args.stride)
    columns = ["step"] + count_columns(config.q) + ["rejected_cum", "tau_out", "tau_in"]
    rows = summary.to_records()
    series = {
        f"s_{k + 1}": [(float(row["step"]), row[f"counts_{k + 1}"] / float(n)) for row in rows] for k in range(config.q)
    }
    return CommandResult(
        columns,
        rows,
        {
            "final_counts": summary.final_state.counts.tolist(),
            "rejections": summary.rejections,
            "tau_out": summary.stopping_times.tau_out,
            "tau_in": summary.stopping_times.tau_in,
        },
        series=series,
    )


def cmd_couple(args, config: RunConfig) -> CommandResult:
    p = model_params(config)
    x = select_macrostate(args.x, config.beta, config.q)
    region = None if args.unrestricted else RestrictedRegion(x, config.r)
    sigma, tau = start_pairs(region, config.n, config.q, make_stream(config.seed), random_pairs=0)[0]
    rows = []
    for replica in range(args.replicas):
        trace = two_phase_coalescence(
            sigma, tau, region, p, config.seed, replica, args.max_steps, record_every=args.max_steps, gamma=args.gamma
        )
        rows.append(trace.to_record(replica))
    finite = [row["tau_couple"] for row in rows if row["tau_couple"] is not None]
    summary = {
        "replicas": len(rows),
        "censored": len(rows) - len(finite),
        "median_tau": float(np.median(finite)) if finite else None,
        "p90_tau": float(np.percentile(finite, 90)) if finite else None,
    }
    return CommandResult(["replica", "tau_couple", "phase1_len", "max_hamming", "event_B_violated_at"], rows, summary)


def _lumped_chain(args, config: RunConfig):
    return lumped_transition_matrix(config.n, config.q, config.beta, region_from(args, config))


def cmd_exact_tmix(args, config: RunConfig) -> CommandResult:
    chain = _lumped_chain(args, config)
    result = tv_curve_and_tmix(chain, config.epsilon)
    rows = [{"t": t, "worst_tv": d} for t, d in result.curve]
    return CommandResult(
        ["t", "worst_tv"],
        rows,
        {"states": chain.size, "epsilon": config.epsilon, "t_mix": result.t_mix},
        series=table_series(rows, "t", ["worst_tv"]),
    )


def cmd_exact_stationary(args, config: RunConfig) -> CommandResult:
    chain = _lumped_chain(args, config)
    solved = solve_stationary(chain.transition)
    gibbs = lumped_gibbs(config.n, config.q, config.beta, chain.region)
    rows = []
    for counts, weight, reference in zip(chain.states, solved, gibbs.weights):
        row = count_fields(counts)
        row.update({"stationary": float(weight), "gibbs": float(reference)})
        rows.append(row)
    summary = {
        "states": chain.size,
        "tv_to_gibbs": float(0.5 * np.abs(solved - gibbs.weights).sum()),
        "residual": chain.stationary_residual(solved),
    }
    return CommandResult(count_columns(config.q) + ["stationary", "gibbs"], rows, summary)


def cmd_exact_wasserstein(args, config: RunConfig) -> CommandResult:
    if args.restrict:
        selector, radius = parse_restrict(args.restrict)
    else:
        selector, radius = args.x or "e", config.r if args.x else None
    table = wasserstein_scaling(config.q, config.beta, selector, radius, [config.n])
    return CommandResult(table.columns, table.rows, table.summary)


def _stein_function(spec: str, q: int) -> Callable[[np.ndarray], float]:
    kind, _, arg = spec.partition(":")
    if kind == "fraction" and arg.isdigit() and 1 <= int(arg) <= q:
        color = int(arg) - 1
        return lambda counts: counts[color] / float(counts.sum())
    if kind == "energy" and not arg:
        return lambda counts: complete_graph_energy(counts) / float(counts.sum()) ** 2
    raise UsageError(f"test function must be 'fraction:K' with 1 <= K <= {q} or 'energy', got '{spec}'")


def cmd_exact_stein(args, config: RunConfig) -> CommandResult:
    chain = _lumped_chain(args, config)
    h = chain.state_function(_stein_function(args.h, config.q))
    solution = solve_stein_poisson(chain, h)
    rows = []
    for counts, h_value, f_value in zip(chain.states, h, solution.values):
        row = count_fields(counts)
        row.update({"h": float(h_value), "f": float(f_value)})
        rows.append(row)
    summary = {
        "states": chain.size,
        "mean_h": solution.mean,
        "residual": solution.residual,
        "lipschitz": neighbour_lipschitz(chain, solution.values),
    }
    return CommandResult(count_columns(config.q) + ["h", "f"], rows, summary)


def cmd_exact_export(args, config: RunConfig) -> CommandResult:
    chain = _lumped_chain(args, config)
    target = Path(args.out) if args.out else config.output_dir / "lumped_matrix.txt"
    target.parent.mkdir(parents=True, exist_ok=True)
    write_coordinate_text(chain.transition, target, chain.states)
    files = [target, Path(f"{target}.states")]
    return CommandResult([], [], {"states": chain.size, "nonzeros": int(chain.transition.nnz)}, files=files)


def cmd_bench_bounded_degree(args, config: RunConfig) -> CommandResult:
    g = graph_from(args, config)
    p = model_params(config, g.n_vertices)
    report = bounded_degree_bound(g, p, LipschitzSpec.uniform(g.n_vertices, args.lipschitz))
    row = {
        "n": g.n_vertices,
        "delta": g.max_degree,
        "edges": g.edge_count,
        "kappa": report.inputs["kappa"],
        "bound": report.bound_value,
        "degree_bound": report.terms["degree_bound"],
    }
    return CommandResult(list(row), [row])


def cmd_bench_tnorm(args, config: RunConfig) -> CommandResult:
    g = graph_from(args, config)
    p = model_params(config, g.n_vertices)
    estimate = mean_T_norm(g, p, np.full(config.q, 1.0 / config.q), make_stream(config.seed), samples=args.samples)
    row = {"n": g.n_vertices, **estimate.model_dump()}
    return CommandResult(list(row), [row])


def cmd_bench_clt(args, config: RunConfig) -> CommandResult:
    row = clt_covariance_check(config.n, config.q, config.beta).model_dump()
    return CommandResult(list(row), [row])


def cmd_bench_wscaling(args, config: RunConfig) -> CommandResult:
    radius = None if args.unrestricted else config.r
    table = wasserstein_scaling(config.q, config.beta, args.x, radius, args.ns, workers=config.threads)
    return CommandResult(table.columns, table.rows, table.summary, series=table_series(table.rows, "n", ["d_w_over_sqrt_n"]))


def cmd_bench_theta_trend(args, config: RunConfig) -> CommandResult:
    table = theta_star_trend(config.q, args.x, args.betas)
    return CommandResult(table.columns, table.rows, table.summary, series=table_series(table.rows, "beta", ["proxy"]))


def cmd_bench_tmix_scaling(args, config: RunConfig) -> CommandResult:
    table = restricted_tmix_scaling(
        config.q, config.beta, args.x, config.r, args.ns, epsilon=config.epsilon, workers=config.threads
    )
    return CommandResult(table.columns, table.rows, table.summary, series=table_series(table.rows, "n", ["t_mix_over_n_log_n"]))


def cmd_bench_coalescence(args, config: RunConfig) -> CommandResult:
    table = coalescence_tail(
        config.q, config.beta, args.x, config.r, config.n, args.replicas, config.seed,
        alphas=args.alphas, max_steps=args.max_steps, workers=config.threads,
    )
    return CommandResult(table.columns, table.rows, table.summary, series=table_series(table.rows, "alpha", ["ccdf", "reference"]))


def cmd_bench_concentration(args, config: RunConfig) -> CommandResult:
    table = concentration_run(
        config.q, config.beta, args.x, config.r, args.ns, args.replicas, config.seed, args.steps, workers=config.threads
    )
    return CommandResult(table.columns, table.rows, table.summary)


def cmd_bench_envelope(args, config: RunConfig) -> CommandResult:
    table = contraction_envelope(
        config.q, config.beta, args.x, config.r, config.n, args.d0, args.replicas, config.seed, workers=config.threads
    )
    return CommandResult(table.columns, table.rows, table.summary, series=table_series(table.rows, "t", ["mean_hamming", "envelope"]))


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    common.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    common.add_argument("--config", help="flat 'key = value' file overriding the defaults")
    common.add_argument("--threads", type=int, help="worker cap for independent jobs")
    common.add_argument("--seed", type=int, help="base seed of every random stream")
    common.add_argument("--out", help="output CSV path")
    common.add_argument("--svg", help="optional SVG line plot path")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--q", type=int, help="number of colors (default 3)")
    model.add_argument("--beta", type=float, help="inverse temperature")
    model.add_argument("--n", type=int, help="number of vertices")

    ball = argparse.ArgumentParser(add_help=False)
    ball.add_argument("--r", type=float, help="restriction radius (default 0.05)")

    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument("--graph", default="complete", help="complete, cycle, path, empty, regular or gnp")
    graph.add_argument("--graph-file", help="graph file (N on the first line, then one edge per line)")
    graph.add_argument("--degree", type=int, default=4)
    graph.add_argument("--edge-prob", type=float, default=0.1)
    graph.add_argument("--graph-seed", type=int, default=None)

    parser = argparse.ArgumentParser(prog="spinstein", description="Potts model dynamics and exact oracles")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("macrostates", parents=[common, model], help="macrostates and contraction constants")
    sub.add_argument("--json", action="store_true", help="print the analysis as JSON instead of a table")
    sub.set_defaults(handler=cmd_macrostates)

    sub = commands.add_parser("simulate", parents=[common, model, ball, graph], help="run Glauber dynamics")
    sub.add_argument("--model", choices=["cwp", "graph"], default="cwp", help="count dynamics on K_N, or vertex dynamics on --graph")
    sub.add_argument("--x", help="restrict to the ball around 'e' or 'ordered:K'")
    sub.add_argument("--restrict", help="restriction ball as X:R, for example ordered:1:0.05")
    sub.add_argument("--steps", type=int, default=10_000)
    sub.add_argument("--stride", type=int, default=None)
    sub.add_argument("--init-file", help="initial configuration file (1-based colors)")
    sub.set_defaults(handler=cmd_simulate)

    sub = commands.add_parser("couple", parents=[common, model, ball], help="two-phase coalescence runs")
    sub.add_argument("--x", default="e")
    sub.add_argument("--replicas", type=int, default=20)
    sub.add_argument("--max-steps", type=int, default=10 ** 7)
    sub.add_argument("--gamma", type=float, default=10.0, help="event-B horizon gamma N log(N)^2")
    sub.add_argument("--unrestricted", action="store_true")
    sub.set_defaults(handler=cmd_couple)

    exact = commands.add_parser("exact", help="exact lumped-chain oracles")
    exact_commands = exact.add_subparsers(dest="exact_command", required=True)
    for name, handler, text in [
        ("tmix", cmd_exact_tmix, "worst-case TV curve and t_mix"),
        ("stationary", cmd_exact_stationary, "stationary vector against the Gibbs weights"),
        ("wasserstein", cmd_exact_wasserstein, "exact d_W between Gibbs and product measures"),
        ("stein", cmd_exact_stein, "Stein-Poisson solution for a test function"),
        ("export", cmd_exact_export, "lumped matrix as coordinate text"),
    ]:
        sub = exact_commands.add_parser(name, parents=[common, model, ball], help=text)
        sub.add_argument("--x", help="restrict to the ball around 'e' or 'ordered:K'")
        sub.add_argument("--restrict", help="restriction ball as X:R, for example ordered:1:0.05")
        sub.add_argument("--epsilon", type=float, help="mixing threshold (default 0.25)")
        if name == "stein":
            sub.add_argument("--h", default="fraction:1", help="'fraction:K' or 'energy'")
        sub.set_defaults(handler=handler)

    bench = commands.add_parser("bench", help="bounds and scaling experiments")
    bench_commands = bench.add_subparsers(dest="bench_command", required=True)

    sub = bench_commands.add_parser("bounded-degree", parents=[common, model, graph])
    sub.add_argument("--lipschitz", type=float, default=1.0, help="||L(h)|| of the test function")
    sub.set_defaults(handler=cmd_bench_bounded_degree)

    sub = bench_commands.add_parser("tnorm", parents=[common, model, graph])
    sub.add_argument("--samples", type=int, default=10_000)
    sub.set_defaults(handler=cmd_bench_tnorm)

    sub = bench_commands.add_parser("clt", parents=[common, model])
    sub.set_defaults(handler=cmd_bench_clt)

    sub = bench_commands.add_parser("wscaling", parents=[common, model, ball])
    sub.add_argument("--x", default="e")
    sub.add_argument("--ns", type=parse_int_list, default=[40, 80, 160, 320])
    sub.add_argument("--unrestricted", action="store_true", help="compare the full measures")
    sub.set_defaults(handler=cmd_bench_wscaling)

    sub = bench_commands.add_parser("theta-trend", parents=[common, model])
    sub.add_argument("--x", default="ordered:1")
    sub.add_argument("--betas", type=parse_float_list, default=[1.5, 2.0, 3.0, 5.0, 10.0])
    sub.set_defaults(handler=cmd_bench_theta_trend)

    sub = bench_commands.add_parser("tmix-scaling", parents=[common, model, ball])
    sub.add_argument("--x", default="ordered:1")
    sub.add_argument("--ns", type=parse_int_list, default=[30, 60, 120, 240])
    sub.add_argument("--epsilon", type=float)
    sub.set_defaults(handler=cmd_bench_tmix_scaling)

    sub = bench_commands.add_parser("coalescence", parents=[common, model, ball])
    sub.add_argument("--x", default="ordered:1")
    sub.add_argument("--replicas", type=int, default=200)
    sub.add_argument("--alphas", type=parse_float_list, default=[5.0, 10.0, 20.0])
    sub.add_argument("--max-steps", type=int, default=10 ** 7)
    sub.set_defaults(handler=cmd_bench_coalescence)

    sub = bench_commands.add_parser("concentration", parents=[common, model, ball])
    sub.add_argument("--x", default="ordered:1")
    sub.add_argument("--ns", type=parse_int_list, default=[100, 200, 400])
    sub.add_argument("--replicas", type=int, default=20)
    sub.add_argument("--steps", type=int, default=10 ** 6)
    sub.set_defaults(handler=cmd_bench_concentration)

    sub = bench_commands.add_parser("envelope", parents=[common, model, ball])
    sub.add_argument("--x", default="ordered:1")
    sub.add_argument("--d0", type=int, default=50)
    sub.add_argument("--replicas", type=int, default=500)
    sub.set_defaults(handler=cmd_bench_envelope)

    sub = commands.add_parser("replay", parents=[common], help="rerun a manifest and compare output digests")
    sub.add_argument("manifest")
    sub.set_defaults(handler=None)
    return parser


def command_name(args: argparse.Namespace) -> str:
    parts = [args.command]
    for key in ("exact_command", "bench_command"):
        if getattr(args, key, None):
            parts.append(getattr(args, key))
    return " ".join(parts)


def configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if getattr(args, "verbose", False):
        level = logging.DEBUG
    elif getattr(args, "quiet", False):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


def run_command(args: argparse.Namespace, argv: List[str]) -> int:
    config = build_run_config(vars(args), args.config)
    name = command_name(args)
    manifest = ExperimentManifest(
        command=name,
        argv=list(argv),
        flags={k: v for k, v in vars(args).items() if k != "handler"},
        seed=config.seed,
        version=__version__,
    )
    logger.info("Running %s", name)
    result = args.handler(args, config)

    if result.files:
        for path in result.files:
            manifest.add_output(path, digest_file(path))
        anchor = result.files[0]
    else:
        default_name = name.replace(" ", "_") + ".csv"
        anchor = Path(args.out) if args.out else config.output_dir / default_name
        manifest.add_output(anchor, write_csv(result.rows, result.columns, anchor))
    if args.svg and result.series:
        svg_path = write_svg_lines(args.svg, result.series, title=name)
        manifest.add_output(svg_path, digest_file(svg_path))
    manifest.finish()
    manifest.write(manifest_path_for(anchor))

    if getattr(args, "json", False):
        print(json.dumps({"rows": result.rows, "summary": result.summary}, indent=2, default=str))
        return 0
    if result.columns:
        shown = result.rows if len(result.rows) <= 40 else result.rows[:20] + result.rows[-20:]
        print(TableFormatter.format_table(result.columns, shown))
    print(TableFormatter.format_summary(result.summary))
    return 0


def redirect_outputs(argv: List[str], outputs: Dict[str, str], directory: Path) -> List[str]:
    """
    Point every output flag of argv into directory, keeping the file names. A run that used
    the default output location gets an explicit --out naming its first recorded output.
    """
    redirected = []
    pending = None
    for token in argv:
        if pending:
            redirected.append(str(directory / Path(token).name))
            pending = None
            continue
        flag, sep, value = token.partition("=")
        if flag in PATH_FLAGS and sep:
            redirected.append(f"{flag}={directory / Path(value).name}")
        else:
            redirected.append(token)
            pending = token in PATH_FLAGS
    if not any(token.partition("=")[0] == "--out" for token in argv):
        first = next(iter(outputs), "output.csv")
        redirected += ["--out", str(directory / first)]
    return redirected


def replay(manifest_path: str) -> int:
    manifest = ExperimentManifest.load(manifest_path)
    workdir = Path(tempfile.mkdtemp(prefix="spinstein-replay-"))
    try:
        code = dispatch(redirect_outputs(manifest.argv, manifest.outputs, workdir))
        if code != 0:
            return code
        actual = {path.name: digest_file(path) for path in workdir.iterdir() if path.is_file()}
        mismatched = compare_outputs(manifest.outputs, actual)
    finally:
        shutil.rmtree(workdir, ignore_errors=True)
    if mismatched:
        logger.error("Replay of %s differs in %s", manifest_path, ", ".join(mismatched))
        print(f"replay mismatch: {', '.join(mismatched)}")
        return 1
    print(f"replay ok: {len(manifest.outputs)} output(s) reproduced")
    return 0


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run the command and map failures to exit codes."""
    load_environment()
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else 2
    configure_logging(args)
    try:
        if args.command == "replay":
            return replay(args.manifest)
        return run_command(args, argv)
    except SpinsteinError as e:
        logger.error("%s", e.detail)
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        detail = describe_validation_error(e)
        logger.error("%s", detail)
        print(f"error: {detail}", file=sys.stderr)
        return UsageError.exit_code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
