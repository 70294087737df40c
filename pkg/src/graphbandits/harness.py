"""Experiment orchestration: regret sweeps, exploration comparisons, reports."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .domination import gap_report, integral_delta, integral_zeta
from .environments import Environment, parse_env_spec
from .errors import BadInput, ContractViolation
from .graph import DirectedGraph, degeneracy_report, degeneracy_status
from .osmd import PolicyConfig, RegretTrace, make_config, rates, run_batch, guarantee_horizon
from .packing import degenerate_round, greedy_one_packing

MIN_GRID = 4
MIN_SEEDS = 30
TRACE_COLUMNS = ("seed", "t", "arm", "loss", "cum_regret")

EnvSource = str | Environment | Callable[[int], Environment]


def _resolve_env(env: EnvSource, graph: DirectedGraph, T: int) -> Environment:
    if isinstance(env, Environment):
        return env
    if isinstance(env, str):
        return parse_env_spec(env, graph, T)
    return env(T)


def mean_and_stderr(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return float(v.mean()), float("nan")
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))


def fit_loglog_slope(T, values) -> tuple[float, float]:
    """Least-squares ``log(value) = slope * log(T) + intercept``."""
    T = np.asarray(T, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(T) < 2 or np.any(values <= 0) or np.any(T <= 0):
        raise ContractViolation("log-log fit needs at least two positive points")
    slope, intercept = np.polyfit(np.log(T), np.log(values), 1)
    return float(slope), float(intercept)


@dataclass
class ScalingReport:
    T_grid: list[int]
    seeds: int
    mean_regret: list[float]
    stderr: list[float]
    slope: float
    intercept: float
    mean_pseudo_regret: list[float] | None = None
    pseudo_slope: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def sweep(graph: DirectedGraph, env: EnvSource, T_grid: Sequence[int], seeds: Sequence[int] | int,
          out_dir=None, config_fn: Callable[[int], PolicyConfig] | None = None) -> ScalingReport:
    """Mean final regret over seeds for each horizon, with a log-log slope fit.

    ``env`` is resolved per horizon, so ``hard:...,eps=packing`` rescales the
    gap with T. With ``out_dir`` every finished (T, seed) result is appended
    to ``sweep_partial.jsonl`` as soon as its horizon completes.
    """
    seeds = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    T_grid = [int(t) for t in T_grid]
    if len(T_grid) < MIN_GRID or any(b <= a for a, b in zip(T_grid, T_grid[1:])):
        raise BadInput(f"T grid must be strictly increasing with at least {MIN_GRID} points")
    if len(seeds) < MIN_SEEDS:
        raise BadInput(f"need at least {MIN_SEEDS} seeds, got {len(seeds)}")
    partial = None
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        partial = Path(out_dir) / "sweep_partial.jsonl"
        partial.write_text("")
    means, errs, pmeans = [], [], []
    for T in T_grid:
        config = config_fn(T) if config_fn else make_config(graph, T)
        traces = run_batch(graph, _resolve_env(env, graph, T), T, seeds, config)
        if partial is not None:
            with partial.open("a") as fh:
                for tr in traces:
                    fh.write(json.dumps({"T": T, "seed": tr.seed, "final_regret": tr.final_regret,
                                         "pseudo_regret": tr.pseudo_regret}) + "\n")
        m, e = mean_and_stderr([tr.final_regret for tr in traces])
        means.append(m)
        errs.append(e)
        if traces[0].pseudo_regret is not None:
            pmeans.append(float(np.mean([tr.pseudo_regret for tr in traces])))
    slope, intercept = fit_loglog_slope(T_grid, means)
    pslope = fit_loglog_slope(T_grid, pmeans)[0] if len(pmeans) == len(T_grid) else None
    return ScalingReport(T_grid, len(seeds), means, errs, slope, intercept,
                         pmeans or None, pslope)


@dataclass
class ExplorationComparison:
    T: int
    seeds: int
    delta_star: float
    delta: int
    delta_exact: bool
    fractional_mean: float
    fractional_stderr: float
    integral_mean: float
    integral_stderr: float
    difference_mean: float
    difference_stderr: float

    def to_dict(self) -> dict:
        return asdict(self)


def integral_config(graph: DirectedGraph, T: int, exact: bool | None = None) -> tuple[PolicyConfig, bool]:
    """Baseline policy: explore uniformly over a minimum dominating set, rates from its size."""
    dom = integral_delta(graph, exact)
    u = np.zeros(graph.n)
    u[sorted(dom.witness)] = 1.0 / dom.value
    gamma, eta, clamped = rates(dom.value, graph.n, T)
    warning = clamped or T < guarantee_horizon(graph.n, dom.value)
    return PolicyConfig(gamma, eta, u, T, float(dom.value), warning), dom.exact


def compare_exploration(graph: DirectedGraph, env: EnvSource, T: int, seeds: Sequence[int] | int,
                        exact: bool | None = None) -> ExplorationComparison:
    """Fractional (LP) exploration against the integral-dominating-set baseline.

    Both runs share seeds, so the environment draws coincide and the paired
    difference has a small standard error.
    """
    seeds = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    environment = _resolve_env(env, graph, T)
    frac_cfg = make_config(graph, T)
    int_cfg, exact_flag = integral_config(graph, T, exact)
    frac = np.array([tr.final_regret for tr in run_batch(graph, environment, T, seeds, frac_cfg)])
    base = np.array([tr.final_regret for tr in run_batch(graph, environment, T, seeds, int_cfg)])
    fm, fe = mean_and_stderr(frac)
    im, ie = mean_and_stderr(base)
    dm, de = mean_and_stderr(frac - base)
    return ExplorationComparison(T, len(seeds), frac_cfg.delta_star, int(int_cfg.delta_star),
                                 exact_flag, fm, fe, im, ie, dm, de)


def report_params(graph: DirectedGraph, exact: bool | None = None) -> dict:
    report = gap_report(graph, exact).to_dict()
    report["n"] = graph.n
    report["self_loop_free"] = sorted(graph.self_loop_free)
    report["one_degenerate"] = degeneracy_status(graph)
    if graph.n <= 20:
        report["degeneracy_search"] = degeneracy_report(graph)
    return report


def round_report(graph: DirectedGraph, exact: bool | None = None) -> dict:
    zeta = integral_zeta(graph, exact)
    h = greedy_one_packing(graph, zeta.witness)
    out = {
        "zeta": zeta.value,
        "zeta_exact": zeta.exact,
        "packing_set": sorted(zeta.witness),
        "one_packing": sorted(h.vertices),
        "one_packing_size": len(h),
        "size_bound": math.ceil(zeta.value / 3),
        "one_degenerate": degeneracy_status(graph),
    }
    if out["one_degenerate"] == "degenerate":
        rounded = degenerate_round(graph)
        out["degenerate_round"] = sorted(rounded.support)
        out["degenerate_round_value"] = int(rounded.value)
    return out


def write_traces_csv(traces: Sequence[RegretTrace], fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for tr in traces:
        for row in tr.rows():
            w.writerow([row[0], row[1], row[2], repr(row[3]), repr(row[4])])


def traces_to_json(traces: Sequence[RegretTrace]) -> list[dict]:
    return [{
        "seed": tr.seed,
        "T": tr.T,
        "final_regret": tr.final_regret,
        "pseudo_regret": tr.pseudo_regret,
        "rounds": [dict(zip(TRACE_COLUMNS[1:], row[1:])) for row in tr.rows()],
    } for tr in traces]
