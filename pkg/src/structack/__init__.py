"""Uninformed structure-only edge-injection attacks on graph neural networks.

Attacks link low-centrality nodes whose structural similarity is minimal,
using only the graph topology. The package also ships the linearized victim
model, KS-based noticeability checks and a configuration-driven experiment
harness.
"""
from ._backend import active_backend, use_backend
from .assignment import AssignmentResult, min_cost_assignment
from .attacks import (AttackPlan, BudgetError, build_attack, degree_quantile_injection, dice_attack,
                      distance_quantile_injection, random_attack, structack)
from .centrality import CentralityScores, compute_centrality, lowest_centrality_nodes
from .graph import EdgeSet, Graph, GraphFormatError, extract_lcc, load_edge_list, load_linqs, load_npz
from .harness import ExperimentConfig, ExperimentReport, emit_report, run_experiment
from .noticeability import CriticalRateResult, NoticeabilityVerdict, critical_rate, is_unnoticeable, ks_two_sample
from .similarity import SimilarityMatrix, similarity_matrix
from .victim import (NormalizedOperator, VictimConfig, VictimParams, evaluate_accuracy, jacobian_closed_form,
                     jacobian_finite_difference, normalized_adjacency, predict, propagate, train_victim)

__version__ = "0.1.0"
