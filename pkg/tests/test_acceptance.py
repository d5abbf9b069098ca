"""Exit criteria.  Run ``pytest -m acceptance -s`` to see the measured numbers.

Each test carries ``acceptance(<criterion>)``; conftest prints one PASS/FAIL
line per criterion at the end of the session.  Seeds are fixed and were not
tuned against the outcome.
"""

import math
import time

import numpy as np
import pytest

from smote_lab.cli import main, validate_config
from smote_lab.core_sampling import SmoteConfig, generate_batch, neighbor_ordering, smote_big_k, smote_k
from smote_lab.data_io import (
    DatasetRef,
    PlotSpec,
    Series,
    bundled,
    housing_ref,
    load_column,
    normalize_minmax,
    render_line_plot,
    write_sweep_csv,
)
from smote_lab.distributions import DistributionSpec, cdf, pdf, quantile, sample_iid
from smote_lab.errors import ColumnNotFound, ConfigError, DegenerateRange, DegenerateSupport, InvalidCount
from smote_lab.experiments import (
    DEFAULT_KL_GRID,
    DatasetSource,
    SweepConfig,
    SweepResult,
    TailProbConfig,
    pooled_se,
    run_density_overlay,
    run_kl_sweep,
    run_ks_sweep,
    run_mixture_check,
    run_spacing_check,
    run_tail_prob_check,
    run_wasserstein_sweep,
)
from smote_lab.metrics import kde_density, kl_divergence, kl_histogram, ks_one_sample, ks_two_sample, wasserstein1

U = DistributionSpec.uniform()
N = DistributionSpec.gaussian()
E = DistributionSpec.exponential()
SEED = 20240601
GRID = (8, 20, 70, 200)


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def report(label, **values):
    print(f"\n[{label}] " + " ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                                     for k, v in values.items()))


def strictly_decreasing(values):
    return all(b < a for a, b in zip(values, values[1:]))


# -- 1. spacing identity ------------------------------------------------------

@pytest.mark.acceptance(1)
def test_spacing_identity():
    rows, secs = timed(run_spacing_check, [9, 49, 99], 100_000, SEED)
    worst = max(r.abs_dev / r.std_error for r in rows)
    report("spacings", rows=len(rows), worst_se=worst, seconds=secs)
    assert len(rows) == 8 + 48 + 98
    assert all(r.abs_dev <= 4 * r.std_error for r in rows)
    assert secs < 30


# -- 2. tail-probability monotonicity -----------------------------------------

@pytest.mark.acceptance(2)
def test_tail_probability_monotone():
    t0 = time.perf_counter()
    for spec in (U, N, E):
        for eps in (0.05, 0.2):
            rows = run_tail_prob_check(TailProbConfig(spec, 50, tuple(range(1, 11)), eps, 10_000, SEED))
            probs = [r.probability for r in rows]
            report("tailprob", dist=spec.kind.value, eps=eps, p1=probs[0], p10=probs[-1])
            assert all(a <= b for a, b in zip(probs, probs[1:]))
    secs = time.perf_counter() - t0
    assert secs < 30


# -- 3. convergence in probability (KS) ---------------------------------------

@pytest.fixture(scope="module")
def ks_sweeps():
    out, total = {}, 0.0
    for spec in (U, N):
        cfg = SweepConfig(spec, GRID, (1, 5), trials=50, draws_per_trial=2000, metric="KS2", seed=SEED,
                          reference_size=100_000)
        out[spec.kind.value], secs = timed(run_ks_sweep, cfg)
        total += secs
    out["seconds"] = total
    return out


@pytest.mark.acceptance(3)
@pytest.mark.parametrize("dist", ["uniform", "gaussian"])
@pytest.mark.parametrize("k", [1, 5])
def test_ks_decreasing_in_n(ks_sweeps, dist, k):
    means = ks_sweeps[dist].means(k)
    report("ks trend", dist=dist, k=k, means=" ".join(f"{m:.4f}" for m in means))
    assert strictly_decreasing(means)


@pytest.mark.acceptance(3)
@pytest.mark.parametrize("dist", ["uniform", "gaussian"])
def test_ks_rank_ordering_at_n8(ks_sweeps, dist):
    res = ks_sweeps[dist]
    a, b = res.row(8, 1), res.row(8, 5)
    se = pooled_se(a, b)
    report("ks order", dist=dist, k1=a.mean, k5=b.mean, pooled_se=se, margin_se=(b.mean - a.mean) / se)
    assert b.mean - a.mean >= 2 * se


@pytest.mark.acceptance(3)
def test_ks_runtime(ks_sweeps):
    report("ks runtime", seconds=ks_sweeps["seconds"])
    assert ks_sweeps["seconds"] < 120


# -- 4. convergence in mean (W1) ----------------------------------------------

HOUSING = DatasetSource(housing_ref(bundled("housing_fixture.csv")), normalize=True)


@pytest.fixture(scope="module")
def w1_sweeps():
    out, total = {}, 0.0
    for name, source in (("uniform", U), ("housing", HOUSING)):
        cfg = SweepConfig(source, GRID, (1, 5), trials=50, draws_per_trial=2000, metric="W1", seed=SEED)
        out[name], secs = timed(run_wasserstein_sweep, cfg)
        total += secs
    out["seconds"] = total
    return out


@pytest.mark.acceptance(4)
@pytest.mark.parametrize("source", ["uniform", "housing"])
@pytest.mark.parametrize("k", [1, 5])
def test_w1_decreasing_in_n(w1_sweeps, source, k):
    means = w1_sweeps[source].means(k)
    report("w1 trend", source=source, k=k, means=" ".join(f"{m:.4f}" for m in means))
    assert strictly_decreasing(means)


@pytest.mark.acceptance(4)
def test_w1_runtime(w1_sweeps):
    assert w1_sweeps["seconds"] < 120


# -- 5. KL ordering ------------------------------------------------------------

@pytest.fixture(scope="module")
def kl_sweeps():
    out, total = {}, 0.0
    for spec in (U, N):
        cfg = SweepConfig(spec, DEFAULT_KL_GRID, (1, 5), trials=50, draws_per_trial=2000, metric="KL", seed=SEED)
        out[spec.kind.value], secs = timed(run_kl_sweep, cfg)
        total += secs
    out["seconds"] = total
    return out


@pytest.mark.acceptance(5)
@pytest.mark.parametrize("dist", ["uniform", "gaussian"])
def test_kl_k1_below_k5(kl_sweeps, dist):
    res = kl_sweeps[dist]
    margins = []
    for n in DEFAULT_KL_GRID:
        a, b = res.row(n, 1), res.row(n, 5)
        margins.append((b.mean - a.mean) / pooled_se(a, b))
    report("kl order", dist=dist, min_margin_se=min(margins), at_n=DEFAULT_KL_GRID[int(np.argmin(margins))])
    assert min(margins) >= 2


@pytest.mark.acceptance(5)
def test_kl_runtime(kl_sweeps):
    assert kl_sweeps["seconds"] < 180


# -- 6. mixture law ------------------------------------------------------------

@pytest.mark.acceptance(6)
@pytest.mark.parametrize("spec", [U, N], ids=["uniform", "gaussian"])
def test_mixture_law(spec):
    res, secs = timed(run_mixture_check, spec, 20, 3, 1_000_000, SEED)
    report("mixture", dist=spec.kind.value, ks=res.value, seconds=secs)
    assert res.value < 0.01
    assert secs < 60


# -- 7. exact-value oracle suite ------------------------------------------------

class Forced:
    def __init__(self, *values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


def at(i, n):
    """Uniform that selects index ``i`` of ``n``."""
    return (i + 0.5) / n


def _raises(exc, fn, *args, **kwargs):
    try:
        fn(*args, **kwargs)
    except exc:
        return True
    return False


def _csv_bytes(tmp, name, result):
    return write_sweep_csv(result, tmp / name).read_bytes()


ANALYTIC = {
    "order [0,2,5] base 2": lambda: neighbor_ordering([0, 2, 5], 2).ordered_indices.tolist() == [1, 0]
    and np.allclose(neighbor_ordering([0, 2, 5], 2).distances, [3, 5], atol=1e-9, rtol=0),
    "order ties [1,1,1]": lambda: neighbor_ordering([1, 1, 1], 0).ordered_indices.tolist() == [1, 2],
    "order 2-D": lambda: neighbor_ordering([(0, 0), (3, 4), (1, 0)], 0).ordered_indices.tolist() == [2, 1]
    and np.allclose(neighbor_ordering([(0, 0), (3, 4), (1, 0)], 0).distances, [1, 5], atol=1e-9, rtol=0),
    "smote_k Z=3.0": lambda: abs(smote_k([0, 10], 1, Forced(at(0, 2), 0.3)) - 3.0) < 1e-9,
    "smote_k all-equal": lambda: all(abs(smote_k([1, 1, 1], k, Forced(at(i, 3), lam)) - 1.0) < 1e-9
                                     for i in range(3) for k in (1, 2) for lam in (0.0, 0.4, 0.99)),
    "smote_k Z=2.5 hand trace": lambda: abs(smote_k([0, 2, 5], 2, Forced(at(2, 3), 0.5)) - 2.5) < 1e-9,
    "smote_big_k Z=5.0": lambda: abs(smote_big_k([0, 10], 1, Forced(at(0, 2), 0.7, 0.5)) - 5.0) < 1e-9,
    "batch count=0": lambda: _raises(InvalidCount, generate_batch, [0.0, 10.0], SmoteConfig(1, seed=1), 0),
    "pdf uniform": lambda: abs(pdf(U, 0.5) - 1.0) < 1e-9,
    "pdf gaussian": lambda: abs(pdf(N, 0.0) - 1 / math.sqrt(2 * math.pi)) < 1e-9 and abs(pdf(N, 0.0) - 0.3989423) < 5e-8,
    "pdf exponential outside": lambda: pdf(E, -1.0) == 0.0,
    "cdf uniform": lambda: abs(cdf(U, 0.25) - 0.25) < 1e-9,
    "cdf exponential ln2": lambda: abs(cdf(E, math.log(2)) - 0.5) < 1e-9,
    "cdf gaussian 0": lambda: abs(cdf(N, 0.0) - 0.5) < 1e-9,
    "quantile uniform": lambda: abs(quantile(U, 0.7) - 0.7) < 1e-9,
    "quantile exponential": lambda: abs(quantile(E, 0.5) - math.log(2)) < 1e-9,
    "quantile gaussian 0.975": lambda: abs(cdf(N, quantile(N, 0.975)) - 0.975) < 1e-9
    and abs(quantile(N, 0.975) - 1.959964) < 5e-7,
    "ks1 7/30": lambda: abs(ks_one_sample([0.1, 0.5, 0.9], U).value - 7 / 30) < 1e-9,
    "ks1 single": lambda: abs(ks_one_sample([0.5], U).value - 0.5) < 1e-9,
    "ks2 identical": lambda: ks_two_sample([0.3, 0.1, 0.7], [0.3, 0.1, 0.7]).value == 0.0,
    "ks2 disjoint": lambda: abs(ks_two_sample([0, 0], [1, 1]).value - 1.0) < 1e-9,
    "ks2 1/6": lambda: abs(ks_two_sample([0, 1], [0, 0.5, 1]).value - 1 / 6) < 1e-9,
    "w1 zero": lambda: wasserstein1([0, 1], [0, 1]).value == 0.0,
    "w1 shift": lambda: abs(wasserstein1([0, 1], [1, 2]).value - 1.0) < 1e-9,
    "w1 0.5": lambda: abs(wasserstein1([0, 0, 1, 1], [0.5] * 4).value - 0.5) < 1e-9,
    "kl equal": lambda: abs(kl_divergence([0.2, 0.3, 0.5], [0.2, 0.3, 0.5])) < 1e-9,
    "kl two bins": lambda: abs(kl_divergence([0.5, 0.5], [0.25, 0.75])
                               - (0.5 * math.log(2) + 0.5 * math.log(2 / 3))) < 1e-9,
    "kde symmetric, midpoint max": lambda: (lambda d: np.allclose(d, d[::-1], atol=1e-12) and d[20] == d.max())(
        kde_density([-1.0, 1.0], np.linspace(-1, 1, 41))),
    "kde degenerate": lambda: _raises(DegenerateSupport, kde_density, [2.0, 2.0], [0.0]),
    "normalize {2,4,6}": lambda: normalize_minmax([2, 4, 6])[0].tolist() == [0, 0.5, 1]
    and normalize_minmax([2, 4, 6])[1:] == (2.0, 6.0),
    "normalize degenerate": lambda: _raises(DegenerateRange, normalize_minmax, [5, 5]),
    "spacing n=1": lambda: _raises(ConfigError, run_spacing_check, [1], 1000),
    "overlay degenerate spec": lambda: _raises(
        ValueError, lambda: run_density_overlay(DistributionSpec("uniform", (1, 1)), [8], 1, 10)),
    "tailprob eps beyond diameter": lambda: all(
        r.probability == 0.0 for r in run_tail_prob_check(TailProbConfig(U, 20, (1, 10, 19), 1.01, 2000, SEED))),
    "sweep calibration KS=0": lambda: run_ks_sweep(SweepConfig(HOUSING, (2000,), (1,), 2, calibration=True))
    .rows[0].mean == 0.0,
    "sweep calibration W1=0": lambda: run_wasserstein_sweep(
        SweepConfig(HOUSING, (2000,), (1,), 2, metric="W1", calibration=True)).rows[0].mean == 0.0,
    "cli k>=n names both": lambda: _cli_error_mentions({"command": "ks-sweep", "params": {"k_values": [1, 8]}},
                                                       "k_values", "n_grid"),
    "cli negative trials": lambda: _cli_error_mentions({"command": "ks-sweep", "params": {"trials": -5}}, "trials"),
    "cli minimal config": lambda: validate_config({"command": "w1-sweep"}).params["trials"] == 50,
}


def _cli_error_mentions(raw, *fields):
    try:
        validate_config(raw)
    except ConfigError as exc:
        return any(all(f in path for f in fields) for path, _ in exc.errors)
    return False


@pytest.mark.acceptance(7)
@pytest.mark.parametrize("name", sorted(ANALYTIC))
def test_exact_examples(name):
    assert ANALYTIC[name]()


@pytest.mark.acceptance(7)
def test_file_examples(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("id,v\n1,1.0\n2,-200\n3,2.0\n")
    col = load_column(DatasetRef(str(p), "v", missing_sentinel=-200))
    assert col.values.tolist() == [1.0, 2.0] and col.dropped == 1
    with pytest.raises(ColumnNotFound) as info:
        load_column(DatasetRef(str(p), "w"))
    assert "id" in str(info.value) and "v" in str(info.value)
    assert _csv_bytes(tmp_path, "e.csv", SweepResult(())) == b"n,k,mean,std_error,trials\n"
    res = run_ks_sweep(SweepConfig(U, (8,), (1,), 3, 100, seed=SEED))
    assert _csv_bytes(tmp_path, "a.csv", res) == _csv_bytes(tmp_path, "b.csv", res)
    one = render_line_plot(PlotSpec([Series("s", [0, 1], [0, 1])]), tmp_path / "one.svg").read_text()
    assert one.count("<polyline") == 1
    two = PlotSpec([Series("a", [0, 1], [0, 1]), Series("b", [0, 1], [1, 0])])
    svg = render_line_plot(two, tmp_path / "two.svg").read_text()
    legend = svg[svg.index('<g class="legend"'):]
    assert legend[:legend.index("</g>")].count("<text") == 2
    assert render_line_plot(two, tmp_path / "three.svg").read_bytes() == (tmp_path / "two.svg").read_bytes()


@pytest.mark.acceptance(7)
def test_monte_carlo_examples():
    # tolerances are the ones fixed by pilot runs
    n = 10_000
    assert ks_one_sample(np.arange(1, n + 1) / (n + 1), U).value < 1e-3
    assert kl_histogram(sample_iid(U, 1_000_000, SEED), U, 50).value < 0.001
    grid = np.linspace(-3, 3, 121)
    assert np.max(np.abs(kde_density(sample_iid(N, 10_000, SEED), grid) - pdf(N, grid))) < 0.05
    z = generate_batch([0.0, 10.0], SmoteConfig(1, seed=SEED), 100_000)
    assert z.min() >= 0.0 and z.max() <= 10.0
    cfg = SmoteConfig(2, seed=SEED)
    base = sample_iid(N, 30, SEED)
    assert generate_batch(base, cfg, 5000).tobytes() == generate_batch(base, cfg, 5000, threads=3).tobytes()
    assert sample_iid(E, 100, SEED).tobytes() == sample_iid(E, 100, SEED).tobytes()
    rows = run_tail_prob_check(TailProbConfig(U, 100, (1,), 0.5, 10_000, SEED))
    assert rows[0].probability < 0.01
    kl500 = run_kl_sweep(SweepConfig(U, (500,), (1,), 20, metric="KL", seed=SEED)).rows[0].mean
    assert kl500 < 0.05
    flat = run_density_overlay(U, [70], 1, 40_000, np.linspace(0.2, 0.8, 61), seed=SEED)
    assert np.max(np.abs(flat.curves[70] - 1.0)) < 0.15
    spacing = run_spacing_check([9], 100_000, SEED)
    assert all(abs(r.target - 0.1) < 1e-12 and r.abs_dev <= 4 * r.std_error for r in spacing)


# -- 8. determinism through the CLI ---------------------------------------------

CLI_RUNS = {
    "sample": ["sample", "--dist", "exponential", "--n", "30", "--k", "3", "--count", "9000"],
    "ks-sweep": ["ks-sweep", "--dist", "gaussian", "--n-grid", "8", "20", "--trials", "8", "--draws", "500",
                 "--reference-size", "20000"],
    "w1-sweep": ["w1-sweep", "--dataset", str(bundled("air_quality_fixture.csv")), "--column", "CO(GT)",
                 "--sentinel", "-200", "--delimiter", ";", "--decimal", ",", "--n-grid", "8", "20",
                 "--trials", "8", "--draws", "500"],
    "kl-sweep": ["kl-sweep", "--n-grid", "8", "16", "--trials", "6", "--draws", "500", "--variant", "pool"],
    "overlay": ["overlay", "--dist", "gaussian", "--n-values", "8", "20", "--draws", "3000"],
    "spacing-check": ["spacing-check", "--n", "9", "20", "--trials", "5000"],
    "tailprob-check": ["tailprob-check", "--dist", "exponential", "--n", "30", "--trials", "3000"],
}


def _outputs(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir()) if p.suffix in (".csv", ".svg")}


@pytest.mark.acceptance(8)
@pytest.mark.parametrize("command", sorted(CLI_RUNS))
def test_cli_rerun_from_provenance(tmp_path, capsys, command):
    first = tmp_path / "first"
    assert main(CLI_RUNS[command] + ["--seed", str(SEED), "--threads", "1", "--out-dir", str(first)]) == 0
    outputs = _outputs(first)
    assert any(name.endswith(".csv") for name in outputs)
    for threads in ("2", "5"):
        again = tmp_path / f"again{threads}"
        argv = [command, "--config", str(first / "provenance.json"), "--threads", threads, "--out-dir", str(again)]
        assert main(argv) == 0
        assert _outputs(again) == outputs
    capsys.readouterr()
