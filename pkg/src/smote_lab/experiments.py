"""Monte Carlo studies of SMOTE convergence.

Each study is a pure function of its config.  Trials draw from streams keyed
by ``(seed, study tag, n, [k,] trial)`` and are reduced in trial order, so the
thread count never changes a result.

Sweeps (KS / W1 / KL against ``n``), density overlays, the uniform spacing
identity ``E[U_(k+1) - U_(k)] = 1/(n+1)`` and the nearest-neighbour distance
tail probabilities ``P(D_(k) >= eps)`` all live here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .core_sampling import SmoteConfig, Variant, generate_batch, smote_from_samples
from .data_io import DatasetRef, load_column, normalize_minmax
from .distributions import DistributionSpec, sample_from, sample_iid
from .errors import ConfigError, InsufficientData
from .streams import check_seed, derive_seed, ordered_map, stream

# stream tags; changing one changes every downstream number
_REFERENCE, _TRIAL, _SMOTE, _KL, _OVERLAY, _SPACING, _TAIL, _MIXTURE = range(1, 9)

DEFAULT_KL_GRID = tuple(range(8, 73, 4))
MARGINAL_GROUP = 10
# base samples per vectorised SMOTE call when estimating the marginal of Z
_GROUP_CHUNK = 2000
_SPACING_CHUNK = 10_000


class Metric(str, enum.Enum):
    KS1 = "KS1"
    KS2 = "KS2"
    W1 = "W1"
    KL = "KL"


@dataclass(frozen=True)
class DatasetSource:
    """A real-valued series used as the population ``X``."""

    ref: DatasetRef
    normalize: bool = False

    def to_json(self):
        return {"dataset": self.ref.to_json(), "normalize": self.normalize}


def source_from_json(obj):
    if "dataset" in obj:
        return DatasetSource(DatasetRef.from_json(obj["dataset"]), bool(obj.get("normalize", False)))
    return DistributionSpec.from_json(obj)


@dataclass(frozen=True)
class SweepConfig:
    source: DistributionSpec | DatasetSource
    n_grid: tuple = (8, 20, 70, 200)
    k_values: tuple = (1, 5)
    trials: int = 50
    draws_per_trial: int = 2000
    metric: Metric = Metric.KS2
    seed: int = 0
    variant: Variant = Variant.FIXED_RANK
    reference_size: int = 100_000
    n_bins: int = metrics.KL_BINS
    calibration: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        errors = []
        try:
            object.__setattr__(self, "metric", Metric(self.metric))
        except ValueError:
            errors.append(("metric", f"unknown metric {self.metric!r}"))
        try:
            object.__setattr__(self, "variant", Variant(self.variant))
        except ValueError:
            errors.append(("variant", f"unknown variant {self.variant!r}"))
        errors += validate_grid(self.n_grid, self.k_values)
        if self.trials < 1:
            errors.append(("trials", f"must be >= 1, got {self.trials}"))
        if self.draws_per_trial < 1:
            errors.append(("draws_per_trial", f"must be >= 1, got {self.draws_per_trial}"))
        if self.reference_size < 1:
            errors.append(("reference_size", f"must be >= 1, got {self.reference_size}"))
        if self.n_bins < 2:
            errors.append(("n_bins", f"must be >= 2, got {self.n_bins}"))
        if self.metric in (Metric.KS1, Metric.KL) and not isinstance(self.source, DistributionSpec):
            errors.append(("metric", f"{self.metric.value} needs an analytic distribution source"))
        if self.metric is Metric.KL and self.draws_per_trial % MARGINAL_GROUP:
            errors.append(("draws_per_trial", f"must be a multiple of {MARGINAL_GROUP} for KL"))
        try:
            check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            errors.append(("seed", str(exc)))
        if errors:
            raise ConfigError(errors)

    def to_json(self):
        return {
            "source": self.source.to_json(),
            "n_grid": list(self.n_grid),
            "k_values": list(self.k_values),
            "trials": self.trials,
            "draws_per_trial": self.draws_per_trial,
            "metric": self.metric.value,
            "seed": self.seed,
            "variant": self.variant.value,
            "reference_size": self.reference_size,
            "n_bins": self.n_bins,
            "calibration": self.calibration,
        }


def validate_grid(n_grid, k_values, n_field="n_grid", k_field="k_values"):
    errors = []
    if not n_grid:
        errors.append((n_field, "must not be empty"))
    elif any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        errors.append((n_field, "must be strictly ascending"))
    if not k_values:
        errors.append((k_field, "must not be empty"))
    if any(k < 1 for k in k_values):
        errors.append((k_field, "every k must be >= 1"))
    if n_grid and k_values and max(k_values) >= min(n_grid):
        errors.append((f"{k_field}/{n_field}",
                       f"every k must be < min({n_field}) = {min(n_grid)}, got k = {max(k_values)}"))
    return errors


@dataclass(frozen=True)
class SweepRow:
    n: int
    k: int
    mean: float
    std_error: float
    trials: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    provenance: dict = field(default_factory=dict)

    def row(self, n, k) -> SweepRow:
        return next(r for r in self.rows if r.n == n and r.k == k)

    def means(self, k) -> list[float]:
        return [r.mean for r in sorted(self.rows, key=lambda r: r.n) if r.k == k]


def mean_and_se(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(v.mean()), se


def pooled_se(a: SweepRow, b: SweepRow) -> float:
    return math.hypot(a.std_error, b.std_error)


def _rows(config, per_task, tasks):
    rows = []
    for n in config.n_grid:
        for k in config.k_values:
            vals = [out[k] for (tn, _), out in zip(tasks, per_task) if tn == n]
            m, se = mean_and_se(vals)
            rows.append(SweepRow(n, k, m, se, len(vals)))
    return tuple(rows)


def _population(config: SweepConfig):
    """Reference values for KS2/W1 and, for datasets, the pool subsets come from."""
    src = config.source
    if isinstance(src, DatasetSource):
        values = load_column(src.ref).values
        if src.normalize:
            values = normalize_minmax(values)[0]
        if values.size < max(config.n_grid):
            raise InsufficientData(
                f"dataset has {values.size} usable values, n_grid needs {max(config.n_grid)}")
        return values
    return sample_iid(src, config.reference_size, config.seed, _REFERENCE)


def _distance(config, z, reference_sorted):
    if config.metric is Metric.KS1:
        return metrics.ks_one_sample(z, config.source).value
    if config.metric is Metric.W1:
        return metrics.wasserstein1(z, reference_sorted).value
    return metrics.ks_two_sample(z, reference_sorted).value


def _sample_sweep(config: SweepConfig, threads):
    population = np.sort(_population(config))
    tasks = [(n, t) for n in config.n_grid for t in range(config.trials)]

    def trial(task):
        n, t = task
        if config.calibration:
            d = _distance(config, population, population)
            return {k: d for k in config.k_values}
        rng = stream(config.seed, _TRIAL, n, t)
        if isinstance(config.source, DatasetSource):
            base = population[rng.choice(population.size, n, replace=False)]
        else:
            base = sample_from(config.source, rng, n)
        out = {}
        for k in config.k_values:
            smote = SmoteConfig(k, config.variant)
            z = generate_batch(base, smote, config.draws_per_trial,
                               seed=derive_seed(config.seed, _SMOTE, n, k, t), threads=1)
            out[k] = _distance(config, z, population)
        return out

    return _rows(config, ordered_map(trial, tasks, threads), tasks)


def run_ks_sweep(config: SweepConfig, threads: int | None = None) -> SweepResult:
    """Mean KS distance of SMOTE draws to the population for each ``(n, k)``.

    Every trial draws a fresh base subset of size ``n`` (shared by all ``k``)
    and ``draws_per_trial`` synthetic points.  ``KS2`` compares against the
    dataset or a fixed ``reference_size`` draw; ``KS1`` against the analytic CDF.
    """
    if config.metric not in (Metric.KS1, Metric.KS2):
        raise ConfigError([("metric", "ks sweep needs KS1 or KS2")])
    return SweepResult(_sample_sweep(config, threads), {"config": config.to_json()})


def run_wasserstein_sweep(config: SweepConfig, threads: int | None = None) -> SweepResult:
    if config.metric is not Metric.W1:
        raise ConfigError([("metric", "wasserstein sweep needs W1")])
    return SweepResult(_sample_sweep(config, threads), {"config": config.to_json()})


def marginal_draws(spec: DistributionSpec, n: int, rank: int, count: int, seed: int, *key: int,
                   variant: Variant = Variant.FIXED_RANK, group_size: int = MARGINAL_GROUP) -> np.ndarray:
    """``count`` draws of ``Z`` where every ``group_size`` draws share a fresh n-sample.

    Averaging over base samples makes these draws target the marginal law of
    ``Z`` rather than its law given one particular sample.
    """
    groups = -(-count // group_size)
    parts = []
    for c, start in enumerate(range(0, groups, _GROUP_CHUNK)):
        g = min(_GROUP_CHUNK, groups - start)
        rng = stream(seed, *key, c)
        samples = sample_from(spec, rng, (g, n))
        parts.append(smote_from_samples(samples, rank, group_size, rng, variant).ravel())
    return np.concatenate(parts)[:count]


def run_kl_sweep(config: SweepConfig, threads: int | None = None) -> SweepResult:
    """Histogram KL(Z || X) per ``(n, k)``; one KL estimate per trial.

    A trial draws ``draws_per_trial`` values of ``Z``, in groups of
    ``MARGINAL_GROUP`` sharing a fresh base sample.
    """
    if config.metric is not Metric.KL:
        raise ConfigError([("metric", "kl sweep needs KL")])
    spec = config.source
    tasks = [(n, t) for n in config.n_grid for t in range(config.trials)]

    def trial(task):
        n, t = task
        out = {}
        for k in config.k_values:
            z = marginal_draws(spec, n, k, config.draws_per_trial, config.seed, _KL, n, k, t,
                               variant=config.variant)
            out[k] = metrics.kl_histogram(z, spec, config.n_bins).value
        return out

    rows = _rows(config, ordered_map(trial, tasks, threads), tasks)
    return SweepResult(rows, {"config": config.to_json()})


@dataclass(frozen=True)
class OverlayResult:
    grid: np.ndarray
    pdf: np.ndarray
    curves: dict  # n -> density of Z on grid
    k: int


def default_grid(spec: DistributionSpec, points: int = 201) -> np.ndarray:
    if spec.kind.value == "uniform":
        a, b = spec.params
        pad = 0.1 * (b - a)
        return np.linspace(a - pad, b + pad, points)
    return np.linspace(spec.quantile(0.001), spec.quantile(0.999), points)


def run_density_overlay(spec: DistributionSpec, n_values, k: int, draws: int, grid=None,
                        seed: int = 0, threads: int | None = None) -> OverlayResult:
    """KDE of the marginal of ``Z`` for each ``n``, plus the true pdf on ``grid``."""
    n_values = tuple(int(n) for n in n_values)
    errors = validate_grid(n_values, (k,), "n_values", "k")
    if draws < 2:
        errors.append(("draws", f"must be >= 2, got {draws}"))
    if errors:
        raise ConfigError(errors)
    grid = default_grid(spec) if grid is None else np.asarray(grid, dtype=float)

    def curve(n):
        z = marginal_draws(spec, n, k, draws, seed, _OVERLAY, n, k)
        return metrics.kde_density(z, grid)

    curves = ordered_map(curve, n_values, threads)
    return OverlayResult(grid, spec.pdf(grid), dict(zip(n_values, curves)), k)


@dataclass(frozen=True)
class SpacingRow:
    n: int
    k: int
    mean: float
    std_error: float
    target: float

    @property
    def abs_dev(self) -> float:
        return abs(self.mean - self.target)


def uniform_spacings(rng: np.random.Generator, trials: int, n: int):
    """Sorted uniforms ``(trials, n)`` and their consecutive gaps ``(trials, n-1)``."""
    u = np.sort(rng.random((trials, n)), axis=1)
    return u, np.diff(u, axis=1)


def run_spacing_check(n_values, trials: int, seed: int = 0, threads: int | None = None) -> list[SpacingRow]:
    """Monte Carlo mean of every uniform spacing ``U_(k+1) - U_(k)`` against ``1/(n+1)``."""
    n_values = tuple(int(n) for n in n_values)
    errors = []
    if not n_values:
        errors.append(("n", "must not be empty"))
    errors += [("n", f"need n >= 2 for a spacing, got {n}") for n in n_values if n < 2]
    if trials < 1000:
        errors.append(("trials", f"must be >= 1000, got {trials}"))
    if errors:
        raise ConfigError(errors)

    def moments(task):
        n, c = task
        m = min(_SPACING_CHUNK, trials - c * _SPACING_CHUNK)
        _, gaps = uniform_spacings(stream(seed, _SPACING, n, c), m, n)
        return gaps.sum(axis=0), (gaps * gaps).sum(axis=0)

    chunks = -(-trials // _SPACING_CHUNK)
    tasks = [(n, c) for n in n_values for c in range(chunks)]
    results = ordered_map(moments, tasks, threads)
    rows = []
    for n in n_values:
        parts = [r for (tn, _), r in zip(tasks, results) if tn == n]
        s = np.sum([p[0] for p in parts], axis=0)
        ss = np.sum([p[1] for p in parts], axis=0)
        mean = s / trials
        var = np.maximum(ss / trials - mean * mean, 0.0) * trials / (trials - 1)
        se = np.sqrt(var / trials)
        rows += [SpacingRow(n, k + 1, float(mean[k]), float(se[k]), 1.0 / (n + 1)) for k in range(n - 1)]
    return rows


@dataclass(frozen=True)
class TailProbConfig:
    spec: DistributionSpec
    n: int
    k_values: tuple
    epsilon: float
    trials: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        errors = []
        if not self.epsilon > 0:
            errors.append(("epsilon", f"must be > 0, got {self.epsilon}"))
        if self.n < 2:
            errors.append(("n", f"must be >= 2, got {self.n}"))
        if not self.k_values:
            errors.append(("k_values", "must not be empty"))
        elif any(b <= a for a, b in zip(self.k_values, self.k_values[1:])):
            errors.append(("k_values", "must be strictly ascending"))
        elif self.k_values[0] < 1 or self.k_values[-1] > self.n - 1:
            errors.append(("k_values/n", f"every k must lie in [1, n-1] = [1, {self.n - 1}]"))
        if self.trials < 1:
            errors.append(("trials", f"must be >= 1, got {self.trials}"))
        if errors:
            raise ConfigError(errors)

    def to_json(self):
        return {"spec": self.spec.to_json(), "n": self.n, "k_values": list(self.k_values),
                "epsilon": self.epsilon, "trials": self.trials, "seed": self.seed}


@dataclass(frozen=True)
class TailProbRow:
    k: int
    probability: float
    std_error: float


def ordered_distances(samples: np.ndarray) -> np.ndarray:
    """Sorted distances from the first point of each row to the others."""
    return np.sort(np.abs(samples[:, 1:] - samples[:, :1]), axis=1)


def run_tail_prob_check(config: TailProbConfig, threads: int | None = None) -> list[TailProbRow]:
    """Estimate ``P(D_(k) >= eps)`` for every k on one shared set of trials.

    Because ``D_(k) <= D_(k+1)`` within each trial, the estimates are
    non-decreasing in ``k`` exactly, not just in expectation.
    """
    chunks = -(-config.trials // _SPACING_CHUNK)
    cols = np.array(config.k_values) - 1

    def count(c):
        m = min(_SPACING_CHUNK, config.trials - c * _SPACING_CHUNK)
        x = sample_from(config.spec, stream(config.seed, _TAIL, c), (m, config.n))
        return (ordered_distances(x)[:, cols] >= config.epsilon).sum(axis=0)

    hits = np.sum(ordered_map(count, range(chunks), threads), axis=0)
    p = hits / config.trials
    se = np.sqrt(p * (1 - p) / config.trials)
    return [TailProbRow(k, float(pk), float(s)) for k, pk, s in zip(config.k_values, p, se)]


def run_mixture_check(spec: DistributionSpec, n: int, pool: int, draws: int, seed: int = 0):
    """KS distance between SMOTE-K draws and an equal-weight pool of SMOTE-k draws.

    Both streams target the marginal of ``Z`` (fresh base sample per group),
    so the distance should vanish as ``draws`` grows.
    """
    big = marginal_draws(spec, n, pool, draws, seed, _MIXTURE, 0, variant=Variant.RANDOM_FROM_POOL)
    per_k = -(-draws // pool)
    pooled = np.concatenate([
        marginal_draws(spec, n, k, per_k, seed, _MIXTURE, k) for k in range(1, pool + 1)
    ])
    return metrics.ks_two_sample(big, pooled)
