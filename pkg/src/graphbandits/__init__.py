"""Bandits with graph feedback: domination LPs, rounding, OSMD and experiments."""
from .domination import (DominationSolution, GapReport, PackingSolution, gap_report,
                         integral_delta, integral_zeta, solve_dual, solve_primal)
from .environments import (ConstantEnv, Environment, HardInstance, HardInstanceEnv, MatrixEnv,
                           ProbabilisticGraph, bai_instances, parse_env_spec, uniform_pull_bai)
from .errors import BadInput, ContractViolation, GraphBanditError, InfeasibleError, NotOneDegenerate
from .families import gen_complete_bipartite, gen_named, gen_orthogonal_f2k
from .graph import (DegeneracyCertificate, DirectedGraph, Observability, classify,
                    degeneracy_certificate, parse_graph, self_loop_free_set, serialize_graph)
from .harness import ScalingReport, compare_exploration, fit_loglog_slope, report_params, sweep
from .osmd import (PolicyConfig, PolicyState, RegretTrace, estimate_loss, make_config, md_update,
                   run_batch, run_episode, run_probabilistic, run_time_varying)
from .packing import KPackingSet, degenerate_round, greedy_one_packing, verify_k_packing

__version__ = "0.1.0"
