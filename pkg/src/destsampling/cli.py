"""Command-line entry point.

Every option can also come from a JSON config file (``--config``); flags
given on the command line win over the file. Data goes to ``--out`` or
stdout, logging to stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import re
import sys

import numpy as np

from . import __version__
from .analytic import ConvergenceError, harmonic_distribution, hitting_from_links, solve_balanced, tau
from .experiment import (
    ExperimentConfig,
    ResourceLimitError,
    histogram_csv,
    link_distance_histogram,
    plot_series,
    results_csv,
    results_json,
    run_destination_sampling_experiment,
    run_kleinberg_baseline,
)
from .graph import DistanceDistribution, dumps_graph, empty_graph, kleinberg_class_weights, loads_graph, sample_kleinberg, shortcut_distances
from .lattice import Kind, Topology
from .rewire import RewireParams, evolve
from .rng import seed_sequence

log = logging.getLogger("destsampling")

COMMANDS = ("evolve", "measure", "baseline", "solve-balanced", "exact-tau", "histogram", "dump", "load", "sweep")

_EXPERIMENT_DEFAULTS = {
    "topology": "ring",
    "capacity": 1,
    "p": 0.1,
    "warmup": "10n",
    "walks": 100_000,
    "seed": 0,
    "frozen": False,
    "alpha": None,
    "graphs": 1,
    "batches": 100,
    "windows": 10,
    "memory_cap": ExperimentConfig.memory_cap,
    "plot_data": None,
}
_GRAPH_DEFAULTS = {"topology": "ring", "n": 1000, "capacity": 1, "p": 0.1, "steps": "10n", "seed": 0}

DEFAULTS = {
    "sweep": {**_EXPERIMENT_DEFAULTS, "sizes": "1000x2^8", "model": "destination"},
    "measure": {**_EXPERIMENT_DEFAULTS, "n": 1000},
    "baseline": {**_EXPERIMENT_DEFAULTS, "sizes": "1000x2^8"},
    "evolve": {**_GRAPH_DEFAULTS, "load": None},
    "dump": {**_GRAPH_DEFAULTS, "generator": "empty", "alpha": None},
    "load": {"input": None},
    "histogram": {**_GRAPH_DEFAULTS, "input": None},
    "solve-balanced": {"n": 8, "tol": 1e-12, "max_iter": 100_000, "damping": 1.0},
    "exact-tau": {"n": 1024, "dist": "harmonic", "alpha": -1.0, "tol": 1e-12, "vectors": False},
}
_COMMON_DEFAULTS = {"out": None, "threads": 1}


class UsageError(Exception):
    pass


def parse_sizes(text) -> list[int]:
    """``BASExMULT^COUNT`` (COUNT sizes BASE*MULT**i) or a comma-separated list."""
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    text = str(text).strip()
    m = re.fullmatch(r"(\d+)x(\d+)\^(\d+)", text)
    if m:
        base, mult, count = map(int, m.groups())
        return [base * mult**i for i in range(count)]
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad size list {text!r}; expected e.g. 1000x2^10 or 1000,2000") from None


def parse_steps(text, n: int) -> int:
    """An absolute count or a multiple of the vertex count such as ``10n``."""
    if isinstance(text, int):
        return text
    text = str(text).strip()
    try:
        if text.endswith("n"):
            return int(round(float(text[:-1] or 1) * n))
        return int(text)
    except ValueError:
        raise UsageError(f"bad step count {text!r}; expected e.g. 5000 or 10n") from None


def _topology(kind: str, n: int) -> Topology:
    kind = Kind(kind)
    if kind is Kind.TORUS:
        side = int(round(n**0.5))
        if side * side != n:
            raise UsageError(f"torus needs a square vertex count, got n={n}")
        return Topology.torus(side)
    return Topology(kind, n)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="destsampling", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help):
        p = sub.add_parser(name, help=help, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--dry-run", action="store_true", help="print the resolved config and exit")
        p.add_argument("--threads", type=int, help="worker processes for sweeps")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--quiet", action="store_true")
        g.add_argument("--verbose", action="store_true")
        return p

    def experiment_opts(p):
        p.add_argument("--topology", choices=[k.value for k in Kind])
        p.add_argument("--capacity", type=int)
        p.add_argument("--p", type=float)
        p.add_argument("--warmup", help="steps, or a multiple of n such as 10n")
        p.add_argument("--walks", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--frozen", action="store_true", help="measuring walks do not rewire")
        p.add_argument("--alpha", type=float, help="Kleinberg exponent (default -dimension)")
        p.add_argument("--graphs", type=int, help="independent static graphs for the baseline")
        p.add_argument("--batches", type=int)
        p.add_argument("--windows", type=int)
        p.add_argument("--memory-cap", type=int, dest="memory_cap")
        p.add_argument("--plot-data", dest="plot_data", help="also write a two-column series file")

    def graph_opts(p):
        p.add_argument("--topology", choices=[k.value for k in Kind])
        p.add_argument("--n", type=int)
        p.add_argument("--capacity", type=int)
        p.add_argument("--p", type=float)
        p.add_argument("--steps", help="rewiring steps, or a multiple of n such as 10n")
        p.add_argument("--seed", type=int)

    p = command("sweep", "path-length sweep over graph sizes")
    experiment_opts(p)
    p.add_argument("--sizes", help="BASExMULT^COUNT or a comma list")
    p.add_argument("--model", choices=["destination", "kleinberg"])

    p = command("measure", "destination-sampling path length at one size")
    experiment_opts(p)
    p.add_argument("--n", type=int)

    p = command("baseline", "path length on static Kleinberg graphs")
    experiment_opts(p)
    p.add_argument("--sizes")

    p = command("evolve", "evolve a graph by destination sampling and write a snapshot")
    graph_opts(p)
    p.add_argument("--load", help="start from this snapshot instead of an empty graph")

    p = command("dump", "write a generated graph snapshot")
    graph_opts(p)
    p.add_argument("--generator", choices=["empty", "kleinberg", "evolved"])
    p.add_argument("--alpha", type=float)

    p = command("load", "validate a snapshot and summarize it")
    p.add_argument("--in", dest="input")

    p = command("histogram", "shortcut-length histogram of a snapshot or a freshly evolved graph")
    graph_opts(p)
    p.add_argument("--in", dest="input")

    p = command("solve-balanced", "balanced shortcut distribution on the directed ring")
    p.add_argument("--n", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--damping", type=float)

    p = command("exact-tau", "exact expected greedy routing time on the directed ring")
    p.add_argument("--n", type=int)
    p.add_argument("--dist", choices=["harmonic", "uniform", "balanced", "kleinberg"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--vectors", action="store_true", help="emit d, ell, h columns")
    return parser


def resolve(argv) -> tuple[str, dict, dict]:
    ns = vars(_parser().parse_args(argv))
    cmd = ns.pop("command")
    flags = {k: ns.pop(k) for k in ("config", "dry_run", "quiet", "verbose") if k in ns}
    from_file = {}
    if flags.get("config"):
        try:
            with open(flags["config"]) as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {flags['config']}: {exc}") from None
        if not isinstance(from_file, dict):
            raise UsageError("config file must hold a JSON object")
        from_file = {k.replace("-", "_"): v for k, v in from_file.items()}
    defaults = {**_COMMON_DEFAULTS, **DEFAULTS[cmd]}
    unknown = set(from_file) - set(defaults)
    if unknown:
        raise UsageError(f"unknown config keys for {cmd}: {', '.join(sorted(unknown))}")
    return cmd, {**defaults, **from_file, **ns}, flags


def _experiment_config(opts: dict, sizes: list[int]) -> ExperimentConfig:
    warm = str(opts["warmup"]).strip()
    warmup, factor = (None, float(warm[:-1] or 1)) if warm.endswith("n") else (parse_steps(warm, 0), 10.0)
    return ExperimentConfig(
        topology=opts["topology"],
        sizes=sizes,
        capacity=opts["capacity"],
        p=opts["p"],
        warmup=warmup,
        warmup_factor=factor,
        walks=opts["walks"],
        seed=opts["seed"],
        frozen=bool(opts["frozen"]),
        alpha=opts["alpha"],
        graphs=opts["graphs"],
        batches=opts["batches"],
        windows=opts["windows"],
        memory_cap=opts["memory_cap"],
        threads=opts["threads"],
    )


def _config_line(opts: dict) -> str:
    return "# config: " + json.dumps(opts, sort_keys=True) + "\n"


def _graph_from_opts(opts: dict):
    if opts["p"] is not None and not 0 < opts["p"] < 1:
        raise UsageError("p must lie in (0, 1)")
    if opts["n"] < 2:
        raise UsageError("n must be at least 2")
    topo = _topology(opts["topology"], opts["n"])
    graph = empty_graph(topo, opts["capacity"])
    steps = parse_steps(opts["steps"], topo.n)
    summary = evolve(graph, steps, RewireParams(opts["p"], opts["seed"]))
    log.info("evolved n=%d for %d steps, mean hops %s", topo.n, steps, summary.mean_hops)
    return graph


def _run_sweep(cmd: str, opts: dict) -> str:
    sizes = [opts["n"]] if cmd == "measure" else parse_sizes(opts["sizes"])
    cfg = _experiment_config(opts, sizes)
    model = "kleinberg" if cmd == "baseline" or opts.get("model") == "kleinberg" else "destination"
    result = (run_kleinberg_baseline if model == "kleinberg" else run_destination_sampling_experiment)(cfg)
    for r in result.records:
        log.info("n=%d wall time %.2fs", r.n, r.wall_time)
    if opts.get("plot_data"):
        with open(opts["plot_data"], "w") as fh:
            fh.write(_config_line(opts) + plot_series(result))
    if opts["out"] and opts["out"].endswith(".json"):
        return results_json(result)
    return results_csv(result)


def _run_solve(opts: dict) -> str:
    if opts["n"] < 2:
        raise UsageError("n must be at least 2")
    sol = solve_balanced(opts["n"], opts["tol"], opts["max_iter"], opts["damping"])
    h = hitting_from_links(sol.ell)
    buf = io.StringIO()
    buf.write(_config_line(opts))
    buf.write(f"# tau: {tau(h)!r}\n# iterations: {sol.iterations}\n# residual: {sol.residual!r}\n")
    _vectors(buf, sol.ell, h)
    return buf.getvalue()


def _vectors(buf, ell, h) -> None:
    buf.write("d,ell,h\n")
    for d in range(1, ell.n):
        buf.write(f"{d},{float(ell.weights[d - 1])!r},{float(h.h[d - 1])!r}\n")


def _run_exact_tau(opts: dict) -> str:
    n = opts["n"]
    if n < 2:
        raise UsageError("n must be at least 2")
    dist = opts["dist"]
    if dist == "harmonic":
        ell = harmonic_distribution(n)
    elif dist == "uniform":
        ell = DistanceDistribution.uniform(n)
    elif dist == "kleinberg":
        ell = DistanceDistribution(n, kleinberg_class_weights(Topology.ring(n), opts["alpha"]))
    else:
        ell = solve_balanced(n, opts["tol"]).ell
    h = hitting_from_links(ell)
    if opts["vectors"]:
        buf = io.StringIO()
        buf.write(_config_line(opts) + f"# tau: {tau(h)!r}\n")
        _vectors(buf, ell, h)
        return buf.getvalue()
    return json.dumps({"config": opts, "tau": tau(h)}, sort_keys=True) + "\n"


def _read_snapshot(path: str):
    if not path:
        raise UsageError("--in is required")
    try:
        with open(path) as fh:
            return loads_graph(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read snapshot {path}: {exc}") from None


def _run_graph_command(cmd: str, opts: dict) -> str:
    if cmd == "load":
        graph = _read_snapshot(opts["input"])
        d = shortcut_distances(graph)
        summary = {
            **graph.topo.describe(),
            "capacity": graph.capacity,
            "shortcuts": graph.shortcut_count(),
            "mean_shortcut_distance": float(d.mean()) if d.size else None,
        }
        if opts["out"]:
            return dumps_graph(graph)
        return json.dumps(summary, sort_keys=True) + "\n"
    if cmd == "histogram":
        graph = _read_snapshot(opts["input"]) if opts["input"] else _graph_from_opts(opts)
        return histogram_csv(link_distance_histogram(graph), {"config": json.dumps(opts, sort_keys=True)})
    if cmd == "evolve":
        if opts["load"]:
            graph = _read_snapshot(opts["load"])
            summary = evolve(graph, parse_steps(opts["steps"], graph.topo.n), RewireParams(opts["p"], opts["seed"]))
            log.info("evolved loaded graph, mean hops %s", summary.mean_hops)
        else:
            graph = _graph_from_opts(opts)
        return dumps_graph(graph, {"config": json.dumps(opts, sort_keys=True)})
    # dump
    gen = opts["generator"]
    if gen == "evolved":
        graph = _graph_from_opts(opts)
    else:
        topo = _topology(opts["topology"], opts["n"])
        if gen == "empty":
            graph = empty_graph(topo, opts["capacity"])
        else:
            alpha = opts["alpha"] if opts["alpha"] is not None else (-2.0 if topo.kind is Kind.TORUS else -1.0)
            rng = np.random.Generator(np.random.PCG64(seed_sequence(opts["seed"], topo.n)))
            graph = sample_kleinberg(topo, alpha, opts["capacity"], rng)
    return dumps_graph(graph, {"config": json.dumps(opts, sort_keys=True)})


def main(argv=None) -> int:
    try:
        cmd, opts, flags = resolve(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    level = logging.WARNING if flags.get("quiet") else logging.DEBUG if flags.get("verbose") else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr, force=True)
    if flags.get("dry_run"):
        print(json.dumps({"command": cmd, **opts}, indent=2, sort_keys=True))
        return 0
    try:
        if cmd in ("sweep", "measure", "baseline"):
            text = _run_sweep(cmd, opts)
        elif cmd == "solve-balanced":
            text = _run_solve(opts)
        elif cmd == "exact-tau":
            text = _run_exact_tau(opts)
        else:
            text = _run_graph_command(cmd, opts)
    except (UsageError, ValueError, TypeError, ConvergenceError, ResourceLimitError) as exc:
        log.error("%s", exc)
        return 1
    if opts["out"]:
        with open(opts["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
