"""Distribution distances used as convergence diagnostics.

Kolmogorov-Smirnov (one- and two-sample) and Wasserstein-1 are computed
exactly from the empirical CDFs.  KL divergence uses a shared histogram
binning; the Gaussian KDE is only used for density overlay figures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DistributionSpec, cdf
from .errors import DegenerateSupport, EmptySample, SampleError

KL_BINS = 50
KL_SMOOTHING = 1e-10
# reference quantiles the KL binning must cover
KL_TAIL = (0.001, 0.999)


@dataclass(frozen=True)
class MetricResult:
    name: str
    value: float
    n: int
    meta: dict = field(default_factory=dict)

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        if len(self.edges) != len(self.masses) + 1:
            raise ValueError("need exactly one more edge than masses")
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("edges must be strictly increasing")
        if np.any(self.masses < 0) or abs(self.masses.sum() - 1.0) > 1e-12:
            raise ValueError("masses must be non-negative and sum to 1")


def _values(sample, name="sample") -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise EmptySample(f"{name} is empty")
    if not np.isfinite(x).all():
        raise SampleError(f"{name} contains non-finite values")
    return x


def ks_one_sample(sample, spec: DistributionSpec) -> MetricResult:
    """``sup |F_n - F|`` evaluated at both sides of every jump of ``F_n``."""
    x = np.sort(_values(sample))
    n = x.size
    F = cdf(spec, x)
    i = np.arange(1, n + 1)
    d = max(np.max(i / n - F), np.max(F - (i - 1) / n))
    return MetricResult("KS1", float(d), n, {"reference": spec.to_json()})


def ks_two_sample(a, b) -> MetricResult:
    a = np.sort(_values(a, "a"))
    b = np.sort(_values(b, "b"))
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return MetricResult("KS2", float(np.max(np.abs(fa - fb))), a.size, {"n_b": b.size})


def wasserstein1(a, b) -> MetricResult:
    """Integral of ``|F_a - F_b|`` over the merged support, exact for any sizes."""
    a = np.sort(_values(a, "a"))
    b = np.sort(_values(b, "b"))
    pts = np.sort(np.concatenate([a, b]))
    widths = np.diff(pts)
    left = pts[:-1]
    fa = np.searchsorted(a, left, side="right") / a.size
    fb = np.searchsorted(b, left, side="right") / b.size
    return MetricResult("W1", float(np.sum(np.abs(fa - fb) * widths)), a.size, {"n_b": b.size})


def smooth(masses, eps: float = KL_SMOOTHING) -> np.ndarray:
    p = np.asarray(masses, dtype=float) + eps
    return p / p.sum()


def kl_divergence(p, q, eps: float = KL_SMOOTHING) -> float:
    """``sum p ln(p/q)`` after additive smoothing and renormalisation of both."""
    p = smooth(p, eps)
    q = smooth(q, eps)
    if p.shape != q.shape:
        raise ValueError("mass vectors differ in length")
    return max(0.0, float(np.sum(p * np.log(p / q))))


def kl_binning(z, spec: DistributionSpec, n_bins: int = KL_BINS) -> tuple[Histogram, Histogram]:
    """Histograms of ``z`` and of ``spec`` on one shared set of edges.

    The edges span the range of ``z`` widened to the reference's 0.1% and 99.9%
    quantiles.  Reference mass outside the edges is dropped and the remainder
    renormalised.
    """
    if n_bins < 2:
        raise ValueError(f"n_bins must be >= 2, got {n_bins}")
    z = _values(z, "z_sample")
    if z.min() == z.max():
        raise DegenerateSupport("all synthetic values are equal")
    lo = min(z.min(), spec.quantile(KL_TAIL[0]))
    hi = max(z.max(), spec.quantile(KL_TAIL[1]))
    edges = np.linspace(lo, hi, n_bins + 1)
    counts, _ = np.histogram(z, bins=edges)
    ref = np.diff(cdf(spec, edges))
    return Histogram(edges, counts / z.size), Histogram(edges, ref / ref.sum())


def kl_histogram(z_sample, spec: DistributionSpec, n_bins: int = KL_BINS,
                 eps: float = KL_SMOOTHING) -> MetricResult:
    """Histogram estimate of ``KL(Z || X)`` for synthetic draws ``z_sample``."""
    pz, px = kl_binning(z_sample, spec, n_bins)
    value = kl_divergence(pz.masses, px.masses, eps)
    meta = {"direction": "KL(Z||X)", "n_bins": n_bins, "smoothing": eps,
            "reference": spec.to_json()}
    return MetricResult("KL", value, int(np.size(z_sample)), meta)


def silverman_bandwidth(sample) -> float:
    x = _values(sample)
    if x.size < 2:
        raise DegenerateSupport("need at least two values for a bandwidth")
    sd = float(np.std(x, ddof=1))
    if sd == 0.0:
        raise DegenerateSupport("sample has zero spread")
    return 1.06 * sd * x.size ** -0.2


def kde_density(sample, grid, bandwidth: float | None = None) -> np.ndarray:
    """Gaussian kernel density of ``sample`` evaluated on ``grid``."""
    x = _values(sample)
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    g = np.asarray(grid, dtype=float).ravel()
    out = np.empty_like(g)
    norm = 1.0 / (x.size * h * math.sqrt(2.0 * math.pi))
    step = max(1, 2**22 // x.size)
    for s in range(0, g.size, step):
        t = (g[s:s + step, None] - x[None, :]) / h
        out[s:s + step] = np.exp(-0.5 * t * t).sum(axis=1) * norm
    return out
