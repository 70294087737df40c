import math

import numpy as np
import pytest

from graphbandits import osmd
from graphbandits.domination import solve_primal
from graphbandits.environments import (ConstantEnv, Environment, HardInstance, HardInstanceEnv,
                                       MatrixEnv, ProbabilisticGraph)
from graphbandits.errors import ContractViolation
from graphbandits.families import (clique, figure1, gen_complete_bipartite, matching,
                                   random_weakly_observable)
from graphbandits.graph import DirectedGraph
from graphbandits.osmd import (PolicyConfig, PolicyState, episode_streams, estimate_loss,
                               expected_delta_star, init_state, make_config, md_update, mix,
                               observation_probs, rates, run_batch, run_episode, run_probabilistic,
                               run_time_varying, sample_realizations, sampled_delta_star)
from oracles import numeric_md_step


def hard_env(g, S, eps=0.1):
    return HardInstanceEnv(HardInstance(g, tuple(S), S[0], eps))


def test_rates():
    gamma, eta, clamped = rates(2.0, 8, 10**6)
    assert gamma == pytest.approx((2 * math.log(8) / 1e6) ** (1 / 3))
    assert eta == pytest.approx(gamma ** 2 / 2) and not clamped
    gamma, _, clamped = rates(2.0, 8, 3)
    assert gamma == 0.5 and clamped


def test_make_config():
    cfg = make_config(gen_complete_bipartite(2, 3), 10)
    assert cfg.delta_star == 2 and cfg.warning
    assert not make_config(gen_complete_bipartite(2, 3), 1000).warning
    assert cfg.u.sum() == pytest.approx(1)
    with pytest.raises(ContractViolation):
        make_config(clique(3), 100)
    with pytest.raises(ContractViolation):
        make_config(DirectedGraph(2, frozenset({(0, 1)})), 100)
    g = matching(2)
    assert not make_config(g, 10**6).warning


def test_policy_config_validation():
    with pytest.raises(ContractViolation):
        PolicyConfig(0.1, 0.1, np.array([0.5, 0.6]), 10, 1.0)
    with pytest.raises(ContractViolation):
        PolicyConfig(0.9, 0.1, np.array([0.5, 0.5]), 10, 1.0)


def test_estimator_reference():
    g = figure1()
    cfg = make_config(g, 100)
    st = init_state(cfg)
    P = observation_probs(g, st.X_tilde)
    lhat = estimate_loss(g, st, 2, {2: 0.3, 3: 0.9})
    assert lhat[3] == pytest.approx(0.9 / P[3]) and lhat[0] == 0
    with pytest.raises(ContractViolation):
        estimate_loss(g, st, 2, {2: 0.3})


def test_md_update_against_numeric_argmin():
    rng = np.random.default_rng(31)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        X = rng.dirichlet(np.ones(n))
        lhat = rng.random(n) * 3
        eta = rng.uniform(0.05, 1)
        cfg = PolicyConfig(0.1, eta, np.full(n, 1 / n), 10, 1.0)
        new = md_update(PolicyState(X, mix(X, cfg.u, 0.1)), cfg, lhat)
        assert np.allclose(new.X, numeric_md_step(X, lhat, eta), atol=1e-6)
        assert np.allclose(new.X_tilde, 0.9 * new.X + 0.1 * cfg.u)


def test_md_update_needs_positive_iterate():
    cfg = PolicyConfig(0.1, 0.1, np.array([0.5, 0.5]), 10, 1.0)
    with pytest.raises(ContractViolation):
        md_update(PolicyState(np.array([1.0, 0.0]), np.array([0.95, 0.05])), cfg, [0, 0])


def reference_episode(g, env, T, seed):
    """Plain per-round loop built from the single-step functions."""
    cfg = make_config(g, T)
    streams = episode_streams(seed)
    st = init_state(cfg)
    arms, cum = [], []
    totals = np.zeros(g.n)
    paid = 0.0
    for t in range(T):
        loss = env.block(streams["environment"], t, 1)[0]
        u = streams["policy"].random()
        cdf = np.cumsum(st.X_tilde)
        arm = min(int(np.searchsorted(cdf, u * cdf[-1], side="right")), g.n - 1)
        observed = {j: loss[j] for j in g.out_nbrs[arm]}
        st = md_update(st, cfg, estimate_loss(g, st, arm, observed))
        paid += loss[arm]
        totals += loss
        arms.append(arm)
        cum.append(paid - totals.min())
    return np.array(arms), np.array(cum)


def test_engine_matches_reference_loop():
    g = matching(3)
    env = hard_env(g, [3, 4, 5], 0.2)
    arms, cum = reference_episode(g, env, 300, 4)
    tr = run_episode(g, env, 300, 4)
    assert np.array_equal(arms, tr.arms)
    assert np.allclose(cum, tr.cum_regret)


def test_batch_and_chunk_invariance(monkeypatch):
    g = figure1()
    env = ConstantEnv([0.2, 0.6, 0.5, 0.1])
    single = run_episode(g, env, 500, 7)
    batch = run_batch(g, env, 500, [1, 7, 9], record=True)[1]
    assert np.array_equal(single.arms, batch.arms)
    assert np.array_equal(single.cum_regret, batch.cum_regret)
    monkeypatch.setattr(osmd, "CHUNK", 37)
    chunked = run_episode(g, env, 500, 7)
    assert np.array_equal(single.arms, chunked.arms)
    assert np.array_equal(single.cum_regret, chunked.cum_regret)


def test_regret_is_against_best_fixed_arm():
    g = figure1()
    env = ConstantEnv([0.2, 0.6, 0.5, 0.1])
    tr = run_episode(g, env, 200, 3)
    values = np.array([0.2, 0.6, 0.5, 0.1])
    assert tr.final_regret == pytest.approx(values[tr.arms].sum() - 200 * 0.1)
    assert tr.pseudo_regret == pytest.approx(tr.final_regret)
    assert np.all(np.diff(tr.cum_regret) >= -1e-12)


def test_pseudo_regret_unknown_for_matrix_env():
    g = figure1()
    env = MatrixEnv(np.random.default_rng(0).random((50, 4)))
    assert run_episode(g, env, 50, 0).pseudo_regret is None
    with pytest.raises(ContractViolation):
        run_episode(g, env, 60, 0)


class _Broken(Environment):
    n = 4
    descriptor = {}

    def block(self, rng, start, size):
        return np.full((size, 4), 2.0)


def test_losses_out_of_range():
    with pytest.raises(ContractViolation):
        run_episode(figure1(), _Broken(), 10, 0)


def test_learns_on_easy_instance():
    g = matching(2)
    env = ConstantEnv([1.0, 1.0, 0.0, 1.0])
    tr = run_episode(g, env, 20000, 0)
    # exploration alone costs about gamma * T here
    assert tr.final_regret < 3 * make_config(g, 20000).gamma * 20000


def test_variance_diagnostics():
    rng = np.random.default_rng(4)
    g = random_weakly_observable(7, rng)
    cfg = make_config(g, 2000)
    tr = run_episode(g, ConstantEnv(rng.random(7)), 2000, 1, diagnostics=True)
    assert np.all(tr.diagnostics["off_U"] <= 2 * g.n + 1e-9)
    assert np.all(tr.diagnostics["on_U"] <= cfg.delta_star / cfg.gamma * (1 + 1e-12))


def test_time_varying_constant_sequence_matches_fixed():
    g = figure1()
    env = ConstantEnv([0.2, 0.6, 0.5, 0.1])
    fixed = run_episode(g, env, 300, 5)
    tv = run_time_varying([g] * 300, env, 300, 5)
    assert tv.delta_bar == float(solve_primal(g).value)
    assert np.array_equal(fixed.arms, tv.arms)
    assert np.array_equal(fixed.cum_regret, tv.cum_regret)
    with pytest.raises(ContractViolation):
        run_time_varying([g] * 10, env, 11, 0)
    adaptive = run_time_varying([g] * 300, env, 300, 5, mode="adaptive")
    assert np.array_equal(fixed.arms, adaptive.arms)


def test_time_varying_alternating_graphs():
    a, b = figure1(), figure1().relabel([1, 0, 3, 2])
    gs = [a if t % 2 else b for t in range(200)]
    tr = run_time_varying(gs, ConstantEnv([0.3, 0.3, 0.5, 0.1]), 200, 0)
    assert tr.delta_bar == pytest.approx(2.0)
    bad = DirectedGraph(4, frozenset({(0, 0), (1, 1)}))
    with pytest.raises(ContractViolation):
        run_time_varying([a, bad], ConstantEnv([0.3, 0.3, 0.5, 0.1]), 2, 0)


def test_probabilistic_runs():
    g = figure1()
    env = ConstantEnv([0.2, 0.6, 0.5, 0.1])
    sure = ProbabilisticGraph.uniform(g, 1.0)
    assert np.array_equal(run_probabilistic(sure, env, 200, 2).arms, run_episode(g, env, 200, 2).arms)
    pg = ProbabilisticGraph.uniform(g, 0.6)
    tr = run_probabilistic(pg, env, 400, 2)
    gs = sample_realizations(pg, 400, 2)
    assert tr.flagged_rounds == sum(any(not h.in_nbrs[j] for j in h.self_loop_free) for h in gs)
    assert tr.flagged_rounds > 0


def test_expected_delta_star():
    g = gen_complete_bipartite(1, 2)
    pg = ProbabilisticGraph(g, {e: 1.0 for e in g.edges})
    assert expected_delta_star(pg) == 2
    # U = {1, 2}; 0 always sees 1, 1 always sees 2, 0 sees 2 half the time
    base = DirectedGraph(3, frozenset({(0, 0), (0, 1), (0, 2), (1, 2)}))
    pg = ProbabilisticGraph(base, {(0, 0): 1.0, (0, 1): 1.0, (0, 2): 0.5, (1, 2): 1.0})
    assert expected_delta_star(pg) == pytest.approx(1.5)
    sample = sampled_delta_star(pg, 2000, np.random.default_rng(0))
    assert set(sample) == {1.0, 2.0} and abs(sample.mean() - 1.5) < 0.05


def test_rates_at_guarantee_threshold():
    T = math.ceil(8 ** 3 * math.log(8) / 4)
    cfg = PolicyConfig(*rates(2.0, 8, T)[:2], np.full(8, 1 / 8), T, 2.0)
    assert cfg.gamma == pytest.approx((2 * math.log(8) / T) ** (1 / 3))
    assert cfg.eta == pytest.approx(cfg.gamma ** 2 / 2)
    assert T >= osmd.guarantee_horizon(8, 2.0)


def test_init_state():
    st = init_state(PolicyConfig(0.5, 0.1, np.full(4, 0.25), 10, 1.0))
    assert np.allclose(st.X, 0.25) and np.allclose(st.X_tilde, 0.25) and st.t == 1
    st = init_state(PolicyConfig(0.2, 0.1, np.array([1.0, 0.0]), 10, 1.0))
    assert np.allclose(st.X_tilde, [0.6, 0.4])
