"""Experiment orchestration: synthetic and CSV-backed studies over a grid of
privacy levels, with per-trial seeding that makes every run an exact replay.

A trial generates a fresh client pool and test set, runs the requested
methods, and records one misclassification rate per method. Seeds are spawned
per (epsilon, trial) from the root seed, and each trial splits its stream
into data / protocol / baseline children, so methods never perturb each
other's randomness and results are identical regardless of scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisSpec, basis_matrix, project_rows, rescale
from .classifiers import LinearClassifier, TrainConfig, predict_label
from .datagen import (
    DEFAULT_GRID_SIZE,
    SlopeSpec,
    generate_covariates,
    generate_labels,
    sample_slope,
    single_server_slope,
    time_grid,
)
from .ensemble import MajorityVote, MrmaConfig, perturbed_baselines, run_single_server
from .mechanisms import split_budget
from .multiserver import ServerSpec, run_round
from .validation import as_feature_matrix, as_pm1_labels

METHODS = ("weak", "mr", "ma", "mrma", "voting", "averaging", "all-data")
_PROTOCOL_METHODS = frozenset({"weak", "mr", "ma", "mrma"})
_BASELINE_METHODS = frozenset({"voting", "averaging", "all-data"})

GROUP_GAMMA_RANGES = {1: (-8.0, -2.0), 3: (2.0, 8.0)}


def misclassification_rate(predictor, Z, y) -> float:
    """Fraction of test points whose predicted label mismatches the truth."""
    Z = as_feature_matrix(Z)
    y = as_pm1_labels(y)
    if y.size == 0:
        raise ValueError("test set must be nonempty")
    if isinstance(predictor, LinearClassifier):
        labels = predict_label(predictor, Z)
    elif hasattr(predictor, "predict"):
        labels = predictor.predict(Z)
    else:
        labels = predictor(Z)
    return float(np.mean(np.asarray(labels) != y))


@dataclass(frozen=True)
class SyntheticCurves:
    """Trial data source: random curves projected to rescaled coefficients."""

    slope: SlopeSpec
    basis: BasisSpec
    rescale_kind: str = "tanh"
    grid_size: int = DEFAULT_GRID_SIZE

    def __call__(self, rng, n_clients: int, n_test: int, trial_key=None):
        times = time_grid(self.grid_size)
        beta = sample_slope(self.slope, times, rng)
        curves = generate_covariates(n_clients + n_test, times, rng)
        y = generate_labels(curves, beta, self.slope.alpha0, times, rng)
        design = basis_matrix(self.basis, times)
        Z = rescale(project_rows(curves, design), self.rescale_kind)
        return Z[:n_clients], y[:n_clients], Z[n_clients:], y[n_clients:]


@dataclass(frozen=True)
class VectorPool:
    """Trial data source backed by a fixed feature/label pool (real data).

    Each trial holds out a fresh test split, then rescales every feature by
    its max-abs over the remaining (client) portion only; test features are
    clipped to [-1, 1] so the sensitivity bound still holds.
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "features", as_feature_matrix(self.features))
        object.__setattr__(self, "labels", as_pm1_labels(self.labels))
        if self.features.shape[0] != self.labels.size:
            raise ValueError("features and labels must have matching lengths")

    @property
    def dimension(self) -> int:
        return self.features.shape[1]

    def __call__(self, rng, n_clients: int, n_test: int, trial_key=None):
        total = self.labels.size
        if n_clients + n_test > total:
            raise ValueError(
                f"pool of {total} rows cannot supply {n_clients} clients "
                f"plus {n_test} test points"
            )
        order = rng.permutation(total)
        test_idx = order[:n_test]
        client_idx = order[n_test:n_test + n_clients]
        clients = self.features[client_idx]
        scale = np.max(np.abs(clients), axis=0)
        scale[scale == 0.0] = 1.0
        Z = clients / scale
        Z_test = np.clip(self.features[test_idx] / scale, -1.0, 1.0)
        return Z, self.labels[client_idx], Z_test, self.labels[test_idx]


@dataclass(frozen=True)
class FixedTrials:
    """Trial data source with precomputed (Z, y, Z_test, y_test) per trial."""

    datasets: dict

    def __call__(self, rng, n_clients: int, n_test: int, trial_key=None):
        return self.datasets[trial_key]


@dataclass(frozen=True)
class ExperimentConfig:
    """A full single-server study: protocol sizes plus the trial grid."""

    epsilons: tuple[float, ...]
    trials: int
    test_size: int = 500
    n_train: int = 500
    n_eval: int = 2500
    subsample_size: int = 50
    eval_subset_size: int = 50
    n_members: int = 50
    cutoff: float = 0.8
    basis_kind: str = "fourier"
    dimension: int = 4
    rescale_kind: str = "tanh"
    train: TrainConfig = field(default_factory=TrainConfig)
    slope: SlopeSpec = field(default_factory=single_server_slope)
    methods: tuple[str, ...] = METHODS
    seed: int = 42
    grid_size: int = DEFAULT_GRID_SIZE

    def __post_init__(self):
        if not self.epsilons:
            raise ValueError("epsilon grid must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.test_size < 1:
            raise ValueError("test_size must be >= 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        object.__setattr__(self, "methods", tuple(self.methods))

    @property
    def n_clients(self) -> int:
        return self.n_train + self.n_eval

    def basis(self) -> BasisSpec:
        return BasisSpec(self.basis_kind, self.dimension)

    def mrma_config(self, epsilon: float) -> MrmaConfig:
        return MrmaConfig(
            n_train=self.n_train,
            n_eval=self.n_eval,
            subsample_size=self.subsample_size,
            eval_subset_size=self.eval_subset_size,
            n_members=self.n_members,
            budget=split_budget(epsilon, self.dimension),
            cutoff=self.cutoff,
            train=self.train,
        )

    def provider(self) -> SyntheticCurves:
        return SyntheticCurves(self.slope, self.basis(), self.rescale_kind, self.grid_size)


@dataclass(frozen=True)
class TrialResult:
    epsilon: float
    trial: int
    method: str
    misclassification: float


def _run_trial(config: ExperimentConfig, provider, epsilon: float, trial: int,
               seed_seq: np.random.SeedSequence):
    data_ss, protocol_ss, baseline_ss = seed_seq.spawn(3)
    Z, y, Z_test, y_test = provider(
        np.random.default_rng(data_ss), config.n_clients, config.test_size,
        (epsilon, trial),
    )
    mrma_cfg = config.mrma_config(epsilon)
    basis = config.basis() if isinstance(provider, SyntheticCurves) else None
    rates: dict[str, float] = {}
    diag_rows: list[tuple] = []

    if _PROTOCOL_METHODS & set(config.methods):
        run = run_single_server(mrma_cfg, Z, y, np.random.default_rng(protocol_ss), basis)
        rates["weak"] = float(np.mean(
            [misclassification_rate(m, Z_test, y_test) for m in run.members]
        ))
        rates["mr"] = float(np.mean(
            [misclassification_rate(m, Z_test, y_test) for m in run.reversed_members]
        ))
        rates["ma"] = misclassification_rate(run.final_plain, Z_test, y_test)
        rates["mrma"] = misclassification_rate(run.final, Z_test, y_test)
        for b, est in enumerate(run.estimates):
            diag_rows.append((
                epsilon, trial, b, est.raw_mean, est.debiased,
                bool(run.reversed_flags[b]), float(run.weights[b]),
            ))
    if _BASELINE_METHODS & set(config.methods):
        base = perturbed_baselines(Z, y, mrma_cfg, np.random.default_rng(baseline_ss), basis)
        rates["voting"] = misclassification_rate(base.voting, Z_test, y_test)
        rates["averaging"] = misclassification_rate(base.averaging, Z_test, y_test)
        rates["all-data"] = misclassification_rate(base.all_data, Z_test, y_test)

    results = [TrialResult(epsilon, trial, m, rates[m]) for m in config.methods]
    return results, diag_rows


def _trial_task(args):
    return _run_trial(*args)


def run_experiment(config: ExperimentConfig, provider=None, jobs: int = 1):
    """Run every (epsilon, trial) cell; returns (results, diagnostics rows).

    ``provider`` defaults to the synthetic functional source implied by the
    config. Trials are independent given their spawned seeds, so ``jobs``
    only changes scheduling, never results.
    """
    provider = provider or config.provider()
    root = np.random.SeedSequence(config.seed)
    children = root.spawn(len(config.epsilons) * config.trials)
    tasks = []
    for e_idx, epsilon in enumerate(config.epsilons):
        for trial in range(config.trials):
            seed_seq = children[e_idx * config.trials + trial]
            tasks.append((config, provider, epsilon, trial, seed_seq))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_trial_task, tasks, chunksize=1))
    else:
        outcomes = [_trial_task(task) for task in tasks]
    results: list[TrialResult] = []
    diagnostics: list[tuple] = []
    for trial_results, diag_rows in outcomes:
        results.extend(trial_results)
        diagnostics.extend(diag_rows)
    return results, diagnostics


def summarize(results: list[TrialResult]):
    """Per (epsilon, method) mean, standard error of the mean, and trial count.

    Rows keep first-seen order of epsilon and method, which is the config
    grid order for results produced by run_experiment.
    """
    grouped: dict[tuple, list[float]] = {}
    for res in results:
        grouped.setdefault((res.epsilon, res.method), []).append(res.misclassification)
    rows = []
    for (epsilon, method), values in grouped.items():
        arr = np.asarray(values)
        stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
        rows.append((epsilon, method, float(arr.mean()), stderr, arr.size))
    return rows


@dataclass(frozen=True)
class MultiServerConfig:
    """A heterogeneous multi-server study.

    Servers come in three groups: damped-series slopes with negative random
    weights, rough Gaussian-process slopes carrying almost no usable signal,
    and damped-series slopes with positive random weights (opposite sign to
    group 1, the negative-transfer probe).
    """

    epsilons: tuple[float, ...]
    trials: int
    group_sizes: tuple[int, int, int] = (10, 5, 10)
    test_size: int = 500
    n_train: int = 500
    n_eval: int = 2500
    subsample_size: int = 50
    eval_subset_size: int = 33
    n_members: int = 50
    cutoff: float = 0.8
    cross_cutoff: float = 0.8
    basis_kind: str = "fourier"
    dimension: int = 4
    rescale_kind: str = "tanh"
    train: TrainConfig = field(default_factory=TrainConfig)
    alpha0: float = 0.1
    gp_rate: float = 15.0
    seed: int = 42
    grid_size: int = DEFAULT_GRID_SIZE

    def __post_init__(self):
        if not self.epsilons:
            raise ValueError("epsilon grid must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if sum(self.group_sizes) < 2:
            raise ValueError("need at least two servers")
        needed = (self.n_members + sum(self.group_sizes)) * self.eval_subset_size
        if needed > self.n_eval:
            raise ValueError(
                f"evaluation pool too small: need {needed} clients, have {self.n_eval}"
            )
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))

    @property
    def n_servers(self) -> int:
        return sum(self.group_sizes)

    def server_groups(self) -> list[int]:
        return [g + 1 for g, size in enumerate(self.group_sizes) for _ in range(size)]

    def slope_spec(self, group: int) -> SlopeSpec:
        if group in GROUP_GAMMA_RANGES:
            return SlopeSpec(kind="uniform-random-series",
                             gamma_range=GROUP_GAMMA_RANGES[group], alpha0=self.alpha0)
        return SlopeSpec(kind="gaussian-process", gp_rate=self.gp_rate, alpha0=self.alpha0)

    def basis(self) -> BasisSpec:
        return BasisSpec(self.basis_kind, self.dimension)

    def mrma_config(self, epsilon: float) -> MrmaConfig:
        return MrmaConfig(
            n_train=self.n_train,
            n_eval=self.n_eval,
            subsample_size=self.subsample_size,
            eval_subset_size=self.eval_subset_size,
            n_members=self.n_members,
            budget=split_budget(epsilon, self.dimension),
            cutoff=self.cutoff,
            train=self.train,
        )


def _run_multi_trial(config: MultiServerConfig, epsilon: float, trial: int,
                     seed_seq: np.random.SeedSequence):
    groups = config.server_groups()
    n_servers = config.n_servers
    times = time_grid(config.grid_size)
    basis = config.basis()
    design = basis_matrix(basis, times)
    mrma_cfg = config.mrma_config(epsilon)

    data_children = seed_seq.spawn(n_servers)
    local_ss, round_ss = seed_seq.spawn(2)
    local_rng = np.random.default_rng(local_ss)
    round_rng = np.random.default_rng(round_ss)

    servers, tests = [], []
    for k in range(n_servers):
        rng = np.random.default_rng(data_children[k])
        beta = sample_slope(config.slope_spec(groups[k]), times, rng)
        curves = generate_covariates(config.n_train + config.n_eval + config.test_size,
                                     times, rng)
        y = generate_labels(curves, beta, config.alpha0, times, rng)
        Z = rescale(project_rows(curves, design), config.rescale_kind)
        pool = config.n_train + config.n_eval
        servers.append(ServerSpec(k, Z[:pool], y[:pool], mrma_cfg,
                                  config.cross_cutoff, basis))
        tests.append((Z[pool:], y[pool:]))

    # Local-only reference: full evaluation budget, no exchange.
    result_rows, cross_rows, classifier_rows = [], [], []
    for k, spec in enumerate(servers):
        run = run_single_server(spec.config, spec.Z, spec.y, local_rng, basis)
        rate = misclassification_rate(run.final, *tests[k])
        result_rows.append((epsilon, trial, k, groups[k], "local", rate))

    round_result = run_round(servers, round_rng)
    for k in range(n_servers):
        rate = misclassification_rate(round_result.finals[k], *tests[k])
        result_rows.append((epsilon, trial, k, groups[k], "multi", rate))
        for entry in round_result.cross[k]:
            cross_rows.append((
                epsilon, trial, entry.server_id, entry.peer_id,
                entry.estimate.debiased, entry.reversed_flag, entry.weight,
            ))
        shared = round_result.shared[k]
        classifier_rows.append((
            epsilon, trial, k, config.train.method, shared.alpha,
            *shared.b.tolist(),
            basis.describe(),
        ))
    return result_rows, cross_rows, classifier_rows


def _multi_task(args):
    return _run_multi_trial(*args)


def run_multi_experiment(config: MultiServerConfig, jobs: int = 1):
    """All (epsilon, trial) cells of a multi-server study.

    Returns (result rows, cross-evaluation rows, shared-classifier rows).
    """
    root = np.random.SeedSequence(config.seed)
    children = root.spawn(len(config.epsilons) * config.trials)
    tasks = []
    for e_idx, epsilon in enumerate(config.epsilons):
        for trial in range(config.trials):
            tasks.append((config, epsilon, trial,
                          children[e_idx * config.trials + trial]))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_multi_task, tasks, chunksize=1))
    else:
        outcomes = [_multi_task(task) for task in tasks]
    results, cross, classifiers = [], [], []
    for result_rows, cross_rows, classifier_rows in outcomes:
        results.extend(result_rows)
        cross.extend(cross_rows)
        classifiers.extend(classifier_rows)
    return results, cross, classifiers


_SEC61_EPSILONS = (0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0)

_CASE_TABLE = {
    # case: (N, N0, N1, n0, n1, B, r0)
    1: (3000, 500, 2500, 100, 100, 25, 0.6),
    2: (5500, 500, 5000, 100, 100, 50, 0.6),
    3: (5500, 500, 5000, 50, 100, 50, 0.6),
    4: (3000, 500, 2500, 100, 50, 50, 0.6),
    5: (3000, 500, 2500, 50, 50, 50, 0.6),
    6: (5000, 2500, 2500, 250, 50, 50, 0.8),
    7: (7500, 5000, 2500, 500, 50, 50, 0.8),
    8: (7500, 2500, 5000, 250, 100, 50, 0.8),
}


def preset(name: str):
    """Named parameter bundles for the studies the package reproduces."""
    if name == "sec6.1":
        return ExperimentConfig(epsilons=_SEC61_EPSILONS, trials=500)
    if name == "sec6.2":
        return MultiServerConfig(epsilons=_SEC61_EPSILONS, trials=500,
                                 group_sizes=(10, 5, 10), eval_subset_size=33)
    if name == "sec6.2-scaled":
        return MultiServerConfig(
            epsilons=(2.0,), trials=50, group_sizes=(2, 2, 2),
            n_train=250, n_eval=1250, subsample_size=50, eval_subset_size=50,
            n_members=19,
        )
    if name.startswith("case"):
        try:
            case = int(name[4:])
            n, n0, n1_pool, n0_sub, n1_sub, b, r0 = _CASE_TABLE[case]
        except (KeyError, ValueError):
            raise ValueError(f"unknown preset {name!r}") from None
        return ExperimentConfig(
            epsilons=_SEC61_EPSILONS, trials=500, n_train=n0, n_eval=n1_pool,
            subsample_size=n0_sub, eval_subset_size=n1_sub, n_members=b, cutoff=r0,
        )
    raise ValueError(f"unknown preset {name!r}")


def real_data_config(pool: VectorPool, epsilons, trials: int, test_size: int,
                     n_train: int, n_eval: int, subsample_size: int,
                     eval_subset_size: int, n_members: int, cutoff: float = 0.7,
                     train: TrainConfig | None = None, seed: int = 42,
                     methods=METHODS) -> ExperimentConfig:
    """Config for the vector-data path; dimension comes from the pool."""
    return ExperimentConfig(
        epsilons=tuple(epsilons), trials=trials, test_size=test_size,
        n_train=n_train, n_eval=n_eval, subsample_size=subsample_size,
        eval_subset_size=eval_subset_size, n_members=n_members, cutoff=cutoff,
        dimension=pool.dimension, train=train or TrainConfig(), seed=seed,
        methods=tuple(methods),
    )
