"""Command line entry point: ``graphbandits <command> [options]``.

Exit codes: 0 success, 1 contract violation, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .environments import ProbabilisticGraph, parse_env_spec
from .errors import BadInput, ContractViolation
from .families import gen_named
from .graph import DirectedGraph, read_graph
from .harness import (compare_exploration, report_params, round_report, sweep,
                      traces_to_json, write_traces_csv)
from .osmd import run_batch, run_probabilistic

EXIT_OK, EXIT_CONTRACT, EXIT_BAD_INPUT = 0, 1, 2


def load_graph(spec: str) -> DirectedGraph:
    """A graph file path, or a catalogue name such as ``complete_bipartite:2,3``."""
    if Path(spec).is_file():
        return read_graph(spec)
    return gen_named(spec)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _exact(args):
    return {"auto": None, "yes": True, "no": False}[args.exact]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed (episodes use seed, seed+1, ...)")
    common.add_argument("--out", help="directory for output files (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--config", help="JSON file whose keys mirror the long options")
    common.add_argument("--graph", help="graph file or catalogue name")

    p = argparse.ArgumentParser(prog="graphbandits", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("params", parents=[common], help="domination and packing numbers")
    s.add_argument("--exact", choices=("auto", "yes", "no"), default="auto",
                   help="exact enumeration for the integral optima (auto: n <= 25)")

    s = sub.add_parser("round", parents=[common], help="round a maximum vertex packing")
    s.add_argument("--exact", choices=("auto", "yes", "no"), default="auto")

    def episodes(s):
        s.add_argument("--env", help="hard:..., file:<csv> or const:<losses>")
        s.add_argument("--seeds", type=int, default=1, help="number of seeds")

    s = sub.add_parser("run", parents=[common], help="run OSMD episodes and write traces")
    episodes(s)
    s.add_argument("--T", type=int, help="horizon")
    s.add_argument("--edge-prob", type=float, help="keep each edge with this probability per round")

    s = sub.add_parser("sweep", parents=[common], help="regret scaling over a grid of horizons")
    episodes(s)
    s.add_argument("--T-grid", type=_int_list, help="comma-separated horizons")

    s = sub.add_parser("compare", parents=[common], help="fractional vs integral exploration")
    episodes(s)
    s.add_argument("--T", type=int)
    s.add_argument("--exact", choices=("auto", "yes", "no"), default="auto")
    return p


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise BadInput(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise BadInput("config file must hold a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        cfg.pop("command", None)
        unknown = set(cfg) - set(vars(args))
        if unknown:
            raise BadInput(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "T_grid" in cfg and isinstance(cfg["T_grid"], str):
            cfg["T_grid"] = _int_list(cfg["T_grid"])
        # explicit command-line flags win over the config file
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise BadInput(f"{args.command} needs --{', --'.join(m.replace('_', '-') for m in missing)}")


def _table(d: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("key", "value"))
    for k in sorted(d):
        v = d[k]
        w.writerow((k, json.dumps(v) if isinstance(v, (list, dict)) else v))
    return buf.getvalue()


def _emit(args, name: str, text: str):
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_dict(args, stem: str, d: dict):
    if args.format == "json":
        _emit(args, f"{stem}.json", json.dumps(d, indent=2, sort_keys=True) + "\n")
    else:
        _emit(args, f"{stem}.csv", _table(d))


def _seeds(args) -> list[int]:
    if args.seeds < 1:
        raise BadInput("--seeds must be positive")
    return list(range(args.seed, args.seed + args.seeds))


def cmd_params(args):
    _need(args, "graph")
    _emit_dict(args, "params", report_params(load_graph(args.graph), _exact(args)))


def cmd_round(args):
    _need(args, "graph")
    _emit_dict(args, "round", round_report(load_graph(args.graph), _exact(args)))


def cmd_run(args):
    _need(args, "graph", "env", "T")
    g = load_graph(args.graph)
    env = parse_env_spec(args.env, g, args.T)
    seeds = _seeds(args)
    if args.edge_prob is not None:
        if not 0 < args.edge_prob <= 1:
            raise BadInput("--edge-prob must lie in (0, 1]")
        pg = ProbabilisticGraph.uniform(g, args.edge_prob)
        traces = [run_probabilistic(pg, env, args.T, s) for s in seeds]
    else:
        traces = run_batch(g, env, args.T, seeds, record=True)
    if args.format == "csv":
        buf = io.StringIO()
        write_traces_csv(traces, buf)
        _emit(args, "traces.csv", buf.getvalue())
    else:
        _emit(args, "traces.json", json.dumps(traces_to_json(traces), sort_keys=True) + "\n")


def cmd_sweep(args):
    _need(args, "graph", "env", "T_grid")
    g = load_graph(args.graph)
    report = sweep(g, args.env, args.T_grid, _seeds(args), out_dir=args.out)
    d = report.to_dict()
    if args.format == "json":
        _emit(args, "sweep.json", json.dumps(d, indent=2, sort_keys=True) + "\n")
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("T", "mean_regret", "stderr", "mean_pseudo_regret"))
    pseudo = d["mean_pseudo_regret"] or [""] * len(d["T_grid"])
    for row in zip(d["T_grid"], d["mean_regret"], d["stderr"], pseudo):
        w.writerow([row[0]] + [repr(v) if isinstance(v, float) else v for v in row[1:]])
    w.writerow(("# slope", repr(d["slope"]), "intercept", repr(d["intercept"])))
    _emit(args, "sweep.csv", buf.getvalue())


def cmd_compare(args):
    _need(args, "graph", "env", "T")
    g = load_graph(args.graph)
    report = compare_exploration(g, args.env, args.T, _seeds(args), _exact(args))
    _emit_dict(args, "compare", report.to_dict())


COMMANDS = {"params": cmd_params, "round": cmd_round, "run": cmd_run,
            "sweep": cmd_sweep, "compare": cmd_compare}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_BAD_INPUT
    except BadInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        COMMANDS[args.command](args)
    except BadInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ContractViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
