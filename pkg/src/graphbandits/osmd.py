"""Online stochastic mirror descent with exploration (negentropy potential).

Each round the player mixes its iterate ``X`` with the exploration
distribution ``u`` (normalised optimal covering weights), plays
``A ~ Xmix``, builds the importance-weighted estimate

    lhat(j) = 1[j observed] * loss(j) / P(j observed)

and takes a multiplicative-weights step ``X' ∝ X * exp(-eta * lhat)``.

The single-step functions (:func:`init_state`, :func:`estimate_loss`,
:func:`md_update`) are the readable reference. Episodes run through
:func:`_simulate`, which advances several seeds in lockstep; every array
operation is row-wise, so a seed's trace does not depend on which batch it
was run in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .domination import DominationSolution, solve_primal
from .environments import Environment, ProbabilisticGraph
from .errors import ContractViolation, InfeasibleError
from .graph import DirectedGraph, Observability, classify

GAMMA_MAX = 0.5
CHUNK = 2048


# --- configuration -----------------------------------------------------------


@dataclass(frozen=True)
class PolicyConfig:
    gamma: float
    eta: float
    u: np.ndarray
    T: int
    delta_star: float
    warning: bool = False

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if abs(u.sum() - 1) > 1e-12 or np.any(u < 0):
            raise ContractViolation("exploration distribution must lie on the simplex")
        if not 0 <= self.gamma <= GAMMA_MAX or self.eta <= 0:
            raise ContractViolation(f"bad rates gamma={self.gamma}, eta={self.eta}")
        object.__setattr__(self, "u", u)


def guarantee_horizon(n: int, delta_star: float) -> float:
    """Smallest horizon covered by the regret guarantee: n^3 log n / delta*^2."""
    return n ** 3 * math.log(n) / delta_star ** 2


def rates(delta_star: float, n: int, T: int) -> tuple[float, float, bool]:
    """``(gamma, eta, clamped)`` with gamma = (delta* log n / T)^(1/3), eta = gamma^2 / delta*."""
    gamma = (delta_star * math.log(n) / T) ** (1 / 3)
    clamped = gamma > GAMMA_MAX
    gamma = min(gamma, GAMMA_MAX)
    return gamma, gamma ** 2 / delta_star, clamped


def make_config(g: DirectedGraph, T: int, delta_solution: DominationSolution | None = None) -> PolicyConfig:
    kind = classify(g)
    if kind is Observability.STRONGLY:
        raise ContractViolation(
            "graph is strongly observable; this algorithm targets weakly observable graphs")
    if kind is Observability.NON:
        raise ContractViolation("graph is non-observable: some arm can never be observed")
    if T < 1:
        raise ContractViolation("horizon must be positive")
    sol = delta_solution if delta_solution is not None else solve_primal(g)
    d = float(sol.value)
    gamma, eta, clamped = rates(d, g.n, T)
    warning = clamped or T < guarantee_horizon(g.n, d)
    return PolicyConfig(gamma, eta, sol.exploration(), T, d, warning)


# --- one round, reference form -----------------------------------------------


@dataclass(frozen=True)
class PolicyState:
    X: np.ndarray
    X_tilde: np.ndarray
    t: int = 1
    log_w: np.ndarray | None = field(default=None, repr=False)


def mix(X, u, gamma):
    return (1 - gamma) * X + gamma * u


def init_state(config: PolicyConfig) -> PolicyState:
    n = len(config.u)
    X = np.full(n, 1.0 / n)
    return PolicyState(X, mix(X, config.u, config.gamma), 1, np.zeros(n))


def observation_probs(g: DirectedGraph, X_tilde) -> np.ndarray:
    """Probability that each arm is observed when playing ``X_tilde``."""
    X_tilde = np.asarray(X_tilde, dtype=float)
    return np.array([sum(X_tilde[i] for i in sorted(g.in_nbrs[j])) for j in range(g.n)])


def estimate_loss(g: DirectedGraph, state: PolicyState, arm: int,
                  observed: Mapping[int, float]) -> np.ndarray:
    lhat = np.zeros(g.n)
    for j in g.out_nbrs[arm]:
        if j not in observed:
            raise ContractViolation(f"arm {arm} observes {j} but no loss was supplied")
        lhat[j] = observed[j] / sum(state.X_tilde[i] for i in sorted(g.in_nbrs[j]))
    return lhat


def md_update(state: PolicyState, config: PolicyConfig, lhat) -> PolicyState:
    """Exponential-weights step, computed in log space."""
    if np.any(state.X <= 0):
        raise ContractViolation("iterate must be strictly positive")
    log_w = state.log_w if state.log_w is not None else np.log(state.X)
    log_w = log_w - config.eta * np.asarray(lhat, dtype=float)
    log_w = log_w - log_w.max()
    w = np.exp(log_w)
    X = w / w.sum()
    return PolicyState(X, mix(X, config.u, config.gamma), state.t + 1, log_w)


# --- traces ------------------------------------------------------------------


@dataclass
class RegretTrace:
    seed: int
    T: int
    final_regret: float
    pseudo_regret: float | None = None
    arms: np.ndarray | None = None
    losses: np.ndarray | None = None
    cum_regret: np.ndarray | None = None
    flagged_rounds: int = 0
    delta_bar: float | None = None
    diagnostics: dict | None = None

    def rows(self):
        """``(seed, t, arm, loss, cum_regret)`` per round, t starting at 1."""
        if self.arms is None:
            raise ValueError("trace was recorded without per-round data")
        for t in range(self.T):
            yield (self.seed, t + 1, int(self.arms[t]), float(self.losses[t]),
                   float(self.cum_regret[t]))


# --- randomness --------------------------------------------------------------

STREAMS = ("environment", "policy", "graph")


def episode_streams(seed) -> dict[str, np.random.Generator]:
    """Independent named generators for one episode, derived from ``seed``."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return {
        name: np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + (k,))))
        for k, name in enumerate(STREAMS)
    }


def _seed_label(seed):
    return seed.entropy if isinstance(seed, np.random.SeedSequence) else seed


# --- engine ------------------------------------------------------------------


@dataclass
class _Round:
    """What the policy uses in one round; arrays may carry a leading batch axis."""
    adj: np.ndarray  # float 0/1, (n, n) or (B, n, n)
    u: np.ndarray
    gamma: float
    eta: float


def _simulate(plan: Callable[[int], _Round], env: Environment, T: int, seeds: Sequence,
              record: bool = True, diagnostics: Callable | None = None) -> list[RegretTrace]:
    if T < 1:
        raise ContractViolation("horizon must be positive")
    n = env.n
    B = len(seeds)
    streams = [episode_streams(s) for s in seeds]
    rows = np.arange(B)
    log_w = np.zeros((B, n))
    means = env.means
    arms = np.empty((B, T), dtype=np.int64) if record else None
    incurred = np.empty((B, T)) if record else None
    cum_reg = np.empty((B, T)) if record else None
    alg_total = np.zeros(B)
    arm_totals = np.zeros((B, n))
    pseudo = np.zeros(B)
    diag = []

    for start in range(0, T, CHUNK):
        size = min(CHUNK, T - start)
        losses = np.stack([env.block(st["environment"], start, size) for st in streams])
        if np.any(~np.isfinite(losses)) or losses.min() < 0 or losses.max() > 1:
            raise ContractViolation(f"environment produced a loss outside [0, 1] near round {start + 1}")
        draws = np.stack([st["policy"].random(size) for st in streams])
        chosen = np.empty((B, size), dtype=np.int64)
        for s in range(size):
            r = plan(start + s)
            w = np.exp(log_w)
            X = w / w.sum(axis=1, keepdims=True)
            Xt = (1 - r.gamma) * X + r.gamma * r.u
            cdf = np.cumsum(Xt, axis=1)
            arm = np.minimum((cdf < draws[:, s:s + 1] * cdf[:, -1:]).sum(axis=1), n - 1)
            obs = (Xt[:, :, None] * r.adj).sum(axis=1)
            seen = r.adj[arm] if r.adj.ndim == 2 else r.adj[rows, arm]
            lhat = np.zeros((B, n))
            np.divide(losses[:, s, :], obs, out=lhat, where=seen > 0)
            if diagnostics is not None:
                diag.append(diagnostics(X, obs, r))
            log_w = log_w - r.eta * lhat
            log_w -= log_w.max(axis=1, keepdims=True)
            chosen[:, s] = arm
        paid = losses[rows[:, None], np.arange(size)[None, :], chosen]
        # running sums continue from the previous chunk's totals so that the
        # additions happen in round order whatever the chunk size
        running = np.cumsum(np.concatenate([alg_total[:, None], paid], axis=1), axis=1)[:, 1:]
        arm_running = np.cumsum(np.concatenate([arm_totals[:, None, :], losses], axis=1), axis=1)[:, 1:]
        if record:
            arms[:, start:start + size] = chosen
            incurred[:, start:start + size] = paid
            cum_reg[:, start:start + size] = running - arm_running.min(axis=2)
        alg_total = running[:, -1]
        arm_totals = arm_running[:, -1]
        if means is not None:
            pseudo = np.cumsum(np.concatenate([pseudo[:, None], means[chosen]], axis=1), axis=1)[:, -1]

    best_total = arm_totals.min(axis=1)
    out = []
    for b, seed in enumerate(seeds):
        trace = RegretTrace(
            seed=_seed_label(seed), T=T,
            final_regret=float(alg_total[b] - best_total[b]),
            pseudo_regret=None if means is None else float(pseudo[b] - T * means.min()),
        )
        if record:
            trace.arms, trace.losses, trace.cum_regret = arms[b], incurred[b], cum_reg[b]
        if diagnostics is not None:
            trace.diagnostics = {k: np.array([d[k][b] for d in diag]) for k in diag[0]}
        out.append(trace)
    return out


def _fixed_plan(g: DirectedGraph, config: PolicyConfig):
    r = _Round(g.adjacency().astype(float), config.u, config.gamma, config.eta)
    return lambda t: r


def _variance_terms(g: DirectedGraph, config: PolicyConfig):
    U = np.zeros(g.n, dtype=bool)
    U[sorted(g.self_loop_free)] = True

    def terms(X, obs, r):
        ratio = X / obs
        return {"off_U": ratio[:, ~U].sum(axis=1), "on_U": ratio[:, U].sum(axis=1)}
    return terms


def run_batch(g: DirectedGraph, environment: Environment, T: int, seeds: Sequence,
              config: PolicyConfig | None = None, record: bool = False,
              diagnostics: bool = False) -> list[RegretTrace]:
    """Independent episodes for several seeds, advanced together."""
    if environment.n != g.n:
        raise ContractViolation("environment and graph disagree on the number of arms")
    config = config or make_config(g, T)
    diag = _variance_terms(g, config) if diagnostics else None
    return _simulate(_fixed_plan(g, config), environment, T, list(seeds), record, diag)


def run_episode(g: DirectedGraph, environment: Environment, T: int, rng=0,
                config: PolicyConfig | None = None, record: bool = True,
                diagnostics: bool = False) -> RegretTrace:
    """One episode; ``rng`` is an int seed or a ``SeedSequence``.

    With ``diagnostics=True`` the trace carries, per round, the sums of
    ``X(i) / P(i observed)`` over arms with and without a self-loop.
    """
    return run_batch(g, environment, T, [rng], config, record, diagnostics)[0]


# --- time-varying and probabilistic graphs -------------------------------------


def _sequence_plan(gs, T, delta_bar, mode, skip_infeasible):
    n = gs[0].n
    cache: dict = {}
    deltas: list[Fraction | None] = []
    for t, g in enumerate(gs):
        if g.n != n:
            raise ContractViolation(f"round {t + 1}: graph has {g.n} vertices, expected {n}")
        if g not in cache:
            try:
                sol = solve_primal(g)
            except InfeasibleError as exc:
                if not skip_infeasible:
                    raise ContractViolation(f"round {t + 1}: {exc}") from None
                sol = None
            cache[g] = (sol, g.adjacency().astype(float))
        sol = cache[g][0]
        deltas.append(None if sol is None else sol.value)
    feasible = [d for d in deltas if d is not None]
    if not feasible:
        raise ContractViolation("no round has a feasible covering LP")
    if delta_bar is None:
        delta_bar = float(sum(feasible, Fraction(0)) / len(feasible))
    if delta_bar <= 0:
        raise ContractViolation("average domination number is zero; nothing to explore")

    uniform = np.full(n, 1.0 / n)
    fixed = rates(delta_bar, n, T)
    running = Fraction(0)
    seen = 0
    plans = []
    for t, g in enumerate(gs):
        sol, adj = cache[g]
        if sol is None:
            plans.append(_Round(adj, uniform, 0.0, fixed[1]))
            continue
        if mode == "adaptive":
            running += sol.value
            seen += 1
            avg = float(running / seen)
            gamma, eta, _ = rates(avg, n, T) if avg > 0 else (0.0, fixed[1], False)
        else:
            gamma, eta = fixed[0], fixed[1]
        u = sol.exploration() if sol.value > 0 else uniform
        plans.append(_Round(adj, u, gamma, eta))
    flagged = sum(d is None for d in deltas)
    return plans, delta_bar, flagged


def run_time_varying(gs: Sequence[DirectedGraph], environment: Environment, T: int, rng=0,
                     delta_bar: float | None = None, mode: str = "offline",
                     record: bool = True) -> RegretTrace:
    """Play against graph ``gs[t]`` in round ``t``.

    Exploration is recomputed from each round's graph. The rates use the
    average domination number: supplied by the caller, or the exact average
    over ``gs`` (``mode="offline"``), or a running average
    (``mode="adaptive"``, experimental).
    """
    if len(gs) != T:
        raise ContractViolation(f"need one graph per round ({T}), got {len(gs)}")
    if mode not in ("offline", "adaptive"):
        raise ValueError(f"unknown mode {mode!r}")
    plans, dbar, _ = _sequence_plan(list(gs), T, delta_bar, mode, skip_infeasible=False)
    trace = _simulate(plans.__getitem__, environment, T, [rng], record)[0]
    trace.delta_bar = dbar
    return trace


def sample_realizations(pg: ProbabilisticGraph, T: int, rng=0) -> list[DirectedGraph]:
    """The graph sequence a probabilistic run with seed ``rng`` would see."""
    gen = episode_streams(rng)["graph"]
    return [pg.sample(gen) for _ in range(T)]


def run_probabilistic(pg: ProbabilisticGraph, environment: Environment, T: int, rng=0,
                      delta_bar: float | None = None, mode: str = "offline",
                      record: bool = True) -> RegretTrace:
    """Each round draws its graph edge by edge and reveals it to the player.

    Rounds whose realisation leaves some self-loop-free arm unobservable
    skip exploration (``gamma = 0``) and are counted in ``flagged_rounds``.
    """
    gs = sample_realizations(pg, T, rng)
    plans, dbar, flagged = _sequence_plan(gs, T, delta_bar, mode, skip_infeasible=True)
    trace = _simulate(plans.__getitem__, environment, T, [rng], record)[0]
    trace.delta_bar = dbar
    trace.flagged_rounds = flagged
    return trace


def expected_delta_star(pg: ProbabilisticGraph) -> float:
    """Exact mean of the fractional domination number over all realisations."""
    total = 0.0
    for g, p in pg.realizations():
        if p == 0:
            continue
        total += p * float(solve_primal(g).value)
    return total


def sampled_delta_star(pg: ProbabilisticGraph, samples: int, rng: np.random.Generator) -> np.ndarray:
    return np.array([float(solve_primal(pg.sample(rng)).value) for _ in range(samples)])
