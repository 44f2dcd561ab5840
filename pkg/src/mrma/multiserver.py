"""Synchronous one-round exchange of classifiers between heterogeneous
servers.

Each server first runs the single-server protocol on its own clients at half
the evaluation budget, then receives every peer's classifier (by value, as
serialized parameters), scores each one on a reserved slice of its own
evaluation pool at the other half of the budget, and applies reversal and
cutoff-weighted averaging to the pooled set. Phase-1 and phase-2 evaluation
clients are disjoint, so no client ever answers more than one query and no
client's spent budget exceeds its total.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .basis import BasisSpec
from .classifiers import LinearClassifier, combine
from .ensemble import MrmaConfig, SingleServerRun, averaging_weights, model_reversal, run_single_server
from .feedback import AccuracyEstimate, evaluate_classifier
from .validation import as_feature_matrix, as_pm1_labels


@dataclass
class ServerSpec:
    """One server: its clients, its local protocol sizes, and its cutoffs."""

    server_id: int
    Z: np.ndarray
    y: np.ndarray
    config: MrmaConfig
    cross_cutoff: float = 0.8
    basis: BasisSpec | None = None

    def __post_init__(self):
        self.Z = as_feature_matrix(self.Z)
        self.y = as_pm1_labels(self.y)
        if not 0.5 < self.cross_cutoff < 1.0:
            raise ValueError("cross_cutoff must lie in (0.5, 1)")


@dataclass
class CrossEvaluation:
    """How one server scored one received classifier."""

    server_id: int
    peer_id: int
    estimate: AccuracyEstimate
    reversed_flag: bool
    weight: float


@dataclass
class ServerRound:
    """Results of one exchange round, indexed like the input server list."""

    local_runs: list[SingleServerRun]
    shared: list[LinearClassifier]
    finals: list[LinearClassifier]
    cross: list[list[CrossEvaluation]] = field(default_factory=list)


def run_round(servers: list[ServerSpec], rng: np.random.Generator) -> ServerRound:
    """One synchronous round: local runs, exchange, cross-evaluation, averaging.

    Every server's evaluation budget is split in half: phase 1 (local weak
    classifiers) and phase 2 (the K received classifiers) each run at
    epsilon_total / 2, on disjoint slices of the evaluation pool. Each
    server therefore needs (n_members + K) * eval_subset_size evaluation
    clients.
    """
    if len(servers) < 2:
        raise ValueError("need at least two servers for an exchange round")
    n_servers = len(servers)
    for spec in servers:
        cfg = spec.config
        needed = (cfg.n_members + n_servers) * cfg.eval_subset_size
        if needed > cfg.n_eval:
            raise ValueError(
                f"server {spec.server_id}: evaluation pool supports at most "
                f"{cfg.n_eval // cfg.eval_subset_size} subsets, needs "
                f"{cfg.n_members + n_servers}"
            )

    # Phase 1: local protocol at half the evaluation budget.
    local_runs = []
    for spec in servers:
        half = spec.config.budget.with_evaluation(spec.config.budget.epsilon_total / 2.0)
        cfg = replace(spec.config, budget=half)
        local_runs.append(run_single_server(cfg, spec.Z, spec.y, rng, spec.basis))
    shared = [run.final for run in local_runs]

    # Phase 2: every server scores all shared classifiers on reserved clients.
    finals: list[LinearClassifier] = []
    cross: list[list[CrossEvaluation]] = []
    for spec in servers:
        cfg = spec.config
        eps_cross = cfg.budget.epsilon_total / 2.0
        n1 = cfg.eval_subset_size
        base = cfg.n_train + cfg.n_members * n1  # first client after phase-1 slices
        adjusted, estimates, flags = [], [], []
        for j, peer in enumerate(shared):
            lo = base + j * n1
            est = evaluate_classifier(peer, spec.Z[lo:lo + n1], spec.y[lo:lo + n1],
                                      eps_cross, rng)
            clf, r_star = model_reversal(peer, est)
            adjusted.append(clf)
            estimates.append((est, r_star))
            flags.append(est.debiased < 0.5)
        weights = averaging_weights([r for _, r in estimates], spec.cross_cutoff)
        finals.append(combine(adjusted, weights))
        cross.append([
            CrossEvaluation(spec.server_id, servers[j].server_id, estimates[j][0],
                            flags[j], float(weights[j]))
            for j in range(n_servers)
        ])
    return ServerRound(local_runs=local_runs, shared=shared, finals=finals, cross=cross)
