"""Oblivious loss environments, the stochastic hard instances and BAI helpers.

An environment never sees the player's actions. It produces the loss
matrix in consecutive blocks from its own generator; ``Generator.random``
is a sequential stream, so the rows for a round do not depend on how the
horizon is split into blocks.
"""
from __future__ import annotations

import csv
import itertools
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadInput, ContractViolation
from .graph import DirectedGraph
from .packing import is_independent, packing_load


class Environment:
    n: int
    descriptor: dict

    def block(self, rng: np.random.Generator, start: int, size: int) -> np.ndarray:
        """Losses for rounds ``start .. start + size - 1`` as a ``(size, n)`` array."""
        raise NotImplementedError

    @property
    def means(self) -> np.ndarray | None:
        """Expected loss per arm when the environment is stationary, else None."""
        return None


class ConstantEnv(Environment):
    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 1:
            raise BadInput("constant losses must be a flat list")
        _check_range(self.values)
        self.n = len(self.values)
        self.descriptor = {"kind": "const", "values": self.values.tolist()}

    def block(self, rng, start, size):
        return np.broadcast_to(self.values, (size, self.n)).copy()

    @property
    def means(self):
        return self.values


class MatrixEnv(Environment):
    """A fixed (adversarial, oblivious) loss sequence, one row per round."""

    def __init__(self, losses, source=None):
        self.losses = np.asarray(losses, dtype=float)
        if self.losses.ndim != 2:
            raise BadInput("loss matrix must be two-dimensional")
        _check_range(self.losses)
        self.n = self.losses.shape[1]
        self.descriptor = {"kind": "file", "source": source, "rounds": self.losses.shape[0]}

    @classmethod
    def from_csv(cls, path) -> "MatrixEnv":
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        try:
            data = [[float(v) for v in r] for r in rows]
        except ValueError as exc:
            raise BadInput(f"{path}: {exc}") from None
        if len({len(r) for r in data}) > 1:
            raise BadInput(f"{path}: ragged loss matrix")
        return cls(data, source=str(path))

    def block(self, rng, start, size):
        if start + size > self.losses.shape[0]:
            raise ContractViolation(
                f"loss file has {self.losses.shape[0]} rounds, need {start + size}")
        return self.losses[start:start + size].copy()


@dataclass(frozen=True)
class HardInstance:
    """Arms off ``S`` always lose 1; ``S`` is Bernoulli(1/2) except ``j`` at 1/2 - eps."""

    graph: DirectedGraph
    S: tuple[int, ...]
    j: int
    epsilon: float
    k: int | None = None

    def __post_init__(self):
        S = tuple(int(v) for v in self.S)
        object.__setattr__(self, "S", S)
        if len(set(S)) != len(S) or not all(0 <= v < self.graph.n for v in S):
            raise BadInput("S must list distinct vertices of the graph")
        if self.j not in S:
            raise BadInput(f"special arm {self.j} is not in S")
        if not 0 <= self.epsilon <= 0.5:
            raise BadInput(f"epsilon {self.epsilon} outside [0, 1/2]")
        if not is_independent(self.graph, S):
            raise BadInput("S is not an independent set")
        load = packing_load(self.graph, S)
        if self.k is None:
            object.__setattr__(self, "k", max(load, 1))
        elif load > self.k:
            raise BadInput(f"S is not a {self.k}-packing (some vertex sees {load} of it)")

    def means(self) -> np.ndarray:
        m = np.ones(self.graph.n)
        m[list(self.S)] = 0.5
        m[self.j] = 0.5 - self.epsilon
        return m


def eps_packing(size: int, k: int, T: int) -> float:
    """Gap that balances a k-packing of ``size`` arms over horizon T."""
    return (size / (k * T)) ** (1 / 3)


def eps_log(size: int, T: int) -> float:
    return (math.log(size) / T) ** (1 / 3)


class HardInstanceEnv(Environment):
    def __init__(self, hi: HardInstance):
        self.instance = hi
        self.n = hi.graph.n
        self._means = hi.means()
        # draws are indexed by position in S, so relabelling arms permutes losses
        self._p = self._means[list(hi.S)]
        self.descriptor = {"kind": "hard", "S": list(hi.S), "j": hi.j,
                           "eps": hi.epsilon, "k": hi.k}

    def block(self, rng, start, size):
        out = np.ones((size, self.n))
        out[:, list(self.instance.S)] = rng.random((size, len(self.instance.S))) < self._p
        return out

    @property
    def means(self):
        return self._means


def hard_instance_env(hi: HardInstance) -> HardInstanceEnv:
    return HardInstanceEnv(hi)


def _check_range(a):
    if np.any(~np.isfinite(a)) or np.any(a < 0) or np.any(a > 1):
        raise ContractViolation("losses must lie in [0, 1]")


# --- best arm identification --------------------------------------------------


def bai_instances(n: int, epsilon: float, family: str = "P") -> list[np.ndarray]:
    """Mean vectors of the two BAI families.

    ``"P"``: ``n`` instances on ``n`` arms, instance ``j`` has arm ``j`` at
    ``1/2 - eps``. ``"Q"``: ``n + 1`` instances on arms ``0..n``; arm 0 sits
    at ``1/2 - eps`` in instance 0 and at ``1/2 - eps/2`` in instance
    ``j >= 1``, where arm ``j`` is at ``1/2 - eps``.
    """
    if not 0 < epsilon <= 0.5:
        raise BadInput("epsilon must lie in (0, 1/2]")
    family = family.upper()
    if family == "P":
        out = []
        for j in range(n):
            m = np.full(n, 0.5)
            m[j] = 0.5 - epsilon
            out.append(m)
        return out
    if family == "Q":
        out = [np.full(n + 1, 0.5)]
        out[0][0] = 0.5 - epsilon
        for j in range(1, n + 1):
            m = np.full(n + 1, 0.5)
            m[0] = 0.5 - epsilon / 2
            m[j] = 0.5 - epsilon
            out.append(m)
        return out
    raise BadInput(f"unknown BAI family {family!r}")


def uniform_pull_bai(means, T: int, rng: np.random.Generator) -> int:
    """Pull every arm T times and report the smallest empirical mean."""
    means = np.asarray(means, dtype=float)
    if T < 1:
        raise BadInput("T must be positive")
    totals = (rng.random((T, len(means))) < means).sum(axis=0)
    return int(np.argmin(totals))


def bai_success_threshold(n: int, epsilon: float) -> float:
    """Horizon below which uniform pulling cannot succeed with probability 1/2."""
    return math.log(n / 4) / (16 * epsilon ** 2)


# --- probabilistic graphs -----------------------------------------------------


@dataclass(frozen=True)
class ProbabilisticGraph:
    base: DirectedGraph
    P: dict

    def __post_init__(self):
        if set(self.P) != set(self.base.edges):
            raise BadInput("P must be defined on exactly the base edges")
        if any(not 0 < p <= 1 for p in self.P.values()):
            raise BadInput("triggering probabilities must lie in (0, 1]")

    @classmethod
    def uniform(cls, base: DirectedGraph, p: float) -> "ProbabilisticGraph":
        return cls(base, {e: p for e in base.edges})

    def _edges(self):
        return sorted(self.base.edges)

    def sample(self, rng: np.random.Generator) -> DirectedGraph:
        edges = self._edges()
        keep = rng.random(len(edges)) < np.array([self.P[e] for e in edges])
        return DirectedGraph(self.base.n, frozenset(e for e, k in zip(edges, keep) if k))

    def realizations(self):
        """Yield ``(graph, probability)`` over all subsets of random edges."""
        edges = self._edges()
        sure = [e for e in edges if self.P[e] == 1]
        rand = [e for e in edges if self.P[e] < 1]
        for bits in itertools.product((0, 1), repeat=len(rand)):
            prob = 1.0
            kept = list(sure)
            for e, b in zip(rand, bits):
                prob *= self.P[e] if b else 1 - self.P[e]
                if b:
                    kept.append(e)
            yield DirectedGraph(self.base.n, frozenset(kept)), prob


# --- environment spec strings ---------------------------------------------------

_KEY = re.compile(r"(?:^|,)\s*([A-Za-z_]+)\s*=")


def _parse_kv(body: str) -> dict[str, str]:
    """``"S=0,1,2,j=1,eps=0.1"`` -> ``{"S": "0,1,2", "j": "1", "eps": "0.1"}``."""
    marks = list(_KEY.finditer(body))
    if not marks or marks[0].start() != 0:
        raise BadInput(f"expected key=value list, got {body!r}")
    out = {}
    for m, nxt in zip(marks, marks[1:] + [None]):
        out[m.group(1)] = body[m.end(): nxt.start() if nxt else len(body)].strip()
    return out


def _index_list(text: str) -> list[int]:
    out = []
    for tok in re.split(r"[,;\s]+", text.strip()):
        if not tok:
            continue
        if "-" in tok:
            a, b = tok.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(tok))
    return out


def parse_env_spec(spec: str, graph: DirectedGraph, T: int) -> Environment:
    """Build an environment from ``hard:...``, ``file:<path>`` or ``const:<list>``.

    ``hard:S=<idx list>,j=<idx>,eps=<float|packing|log>[,k=<int>]`` where the
    index list accepts ``0,1,2``, ``0;1;2`` or ranges like ``0-7``.
    """
    kind, sep, body = spec.partition(":")
    if not sep:
        raise BadInput(f"environment spec {spec!r} lacks a 'kind:' prefix")
    try:
        if kind == "const":
            env = ConstantEnv([float(v) for v in re.split(r"[,;\s]+", body.strip()) if v])
        elif kind == "file":
            env = MatrixEnv.from_csv(Path(body))
        elif kind == "hard":
            kv = _parse_kv(body)
            unknown = set(kv) - {"S", "j", "eps", "k"}
            if unknown:
                raise BadInput(f"unknown hard-instance keys {sorted(unknown)}")
            S = _index_list(kv["S"])
            k = int(kv["k"]) if "k" in kv else None
            eps_text = kv.get("eps", "packing")
            if eps_text == "packing":
                kk = k if k is not None else max(packing_load(graph, S), 1)
                eps = eps_packing(len(S), kk, T)
            elif eps_text == "log":
                eps = eps_log(len(S), T)
            else:
                eps = float(eps_text)
            env = HardInstanceEnv(HardInstance(graph, tuple(S), int(kv.get("j", S[0])), eps, k))
        else:
            raise BadInput(f"unknown environment kind {kind!r} (hard, file, const)")
    except KeyError as exc:
        raise BadInput(f"environment spec {spec!r} is missing {exc}") from None
    except ValueError as exc:
        if isinstance(exc, BadInput):
            raise
        raise BadInput(f"environment spec {spec!r}: {exc}") from None
    if env.n != graph.n:
        raise BadInput(f"environment has {env.n} arms but the graph has {graph.n}")
    return env
