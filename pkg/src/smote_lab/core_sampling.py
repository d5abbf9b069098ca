"""SMOTE-k and SMOTE-K synthetic sampling.

A synthetic point is ``Z = X_i + lam * (X_(i,k) - X_i)`` where ``X_i`` is a
uniformly chosen sample point, ``X_(i,k)`` its rank-``k`` nearest neighbour and
``lam ~ U(0, 1)``.  SMOTE-K first draws ``k`` uniformly from ``1..K``.

Random draws are consumed in a frozen order per synthetic point:
``index``, then ``pool choice`` (SMOTE-K only), then ``lam``.  Each draw is a
single ``rng.random()`` call, so a batch drawn as one ``(m, draws)`` block is
bitwise identical to ``m`` consecutive scalar calls on the same generator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    IndexOutOfRange,
    InvalidCount,
    RankOutOfRange,
    SampleError,
    SampleTooSmall,
)
from .streams import check_seed, ordered_map, stream

# draws per batch chunk; part of the determinism contract, do not change
CHUNK_SIZE = 4096
# rows of the pairwise distance matrix materialised at once
_ROW_BLOCK = 512


class Variant(str, enum.Enum):
    FIXED_RANK = "fixed"
    RANDOM_FROM_POOL = "pool"


@dataclass(frozen=True)
class SmoteConfig:
    """Neighbour rank (``k`` or pool size ``K``), variant and seed."""

    rank: int
    variant: Variant = Variant.FIXED_RANK
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.rank, bool) or not isinstance(self.rank, (int, np.integer)):
            raise TypeError("rank must be an integer")
        if self.rank < 1:
            raise RankOutOfRange(f"rank must be >= 1, got {self.rank}")
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "seed", check_seed(self.seed))

    @property
    def draws_per_point(self) -> int:
        return 3 if self.variant is Variant.RANDOM_FROM_POOL else 2


@dataclass(frozen=True)
class NeighborOrdering:
    base_index: int
    ordered_indices: np.ndarray
    distances: np.ndarray


def as_sample(points, min_size: int = 1) -> np.ndarray:
    """Validate ``points`` and return them as a float ``(n, d)`` array.

    A flat sequence is read as ``n`` one-dimensional points.
    """
    try:
        arr = np.asarray(points, dtype=float)
    except ValueError as exc:  # ragged input
        raise SampleError(f"points must share one dimension: {exc}") from None
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise SampleError(f"expected a sequence of points, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise SampleError("sample contains non-finite coordinates")
    if arr.shape[0] < min_size:
        raise SampleTooSmall(f"need at least {min_size} points, got {arr.shape[0]}")
    return arr


def _check_rank(rank: int, n: int) -> int:
    if not 1 <= rank <= n - 1:
        raise RankOutOfRange(f"rank must satisfy 1 <= rank <= n-1 = {n - 1}, got {rank}")
    return int(rank)


def _row_distances(X: np.ndarray, rows: np.ndarray) -> np.ndarray:
    diff = X[rows, None, :] - X[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _sort_excluding_self(dist: np.ndarray, rows: np.ndarray) -> np.ndarray:
    # self gets -1 so it sorts first and is dropped; stable sort breaks ties by index
    dist[np.arange(len(rows)), rows] = -1.0
    return np.argsort(dist, axis=1, kind="stable")[:, 1:]


def neighbor_ordering(sample, base_index: int) -> NeighborOrdering:
    """All other indices by ascending Euclidean distance to ``sample[base_index]``.

    Ties are broken by ascending original index.
    """
    X = as_sample(sample, min_size=2)
    n = X.shape[0]
    if not 0 <= base_index < n:
        raise IndexOutOfRange(f"base_index {base_index} outside [0, {n})")
    rows = np.array([base_index])
    dist = _row_distances(X, rows)
    order = _sort_excluding_self(dist.copy(), rows)[0]
    return NeighborOrdering(int(base_index), order, dist[0, order])


def neighbor_table(X: np.ndarray, max_rank: int) -> np.ndarray:
    """``(n, max_rank)`` array whose row ``i`` lists the first neighbours of ``i``."""
    n = X.shape[0]
    _check_rank(max_rank, n)
    table = np.empty((n, max_rank), dtype=np.intp)
    for start in range(0, n, _ROW_BLOCK):
        rows = np.arange(start, min(start + _ROW_BLOCK, n))
        table[rows] = _sort_excluding_self(_row_distances(X, rows), rows)[:, :max_rank]
    return table


def interpolate(base, neighbor, lam):
    return base + lam * (neighbor - base)


def _uniform_index(u, size: int):
    return np.minimum((np.asarray(u) * size).astype(np.intp), size - 1)


def _point(X, flat, i, k, lam):
    nb = neighbor_ordering(X, i).ordered_indices[k - 1]
    z = interpolate(X[i], X[nb], lam)
    return float(z[0]) if flat else z


def smote_k(sample, k: int, rng) -> float | np.ndarray:
    """One SMOTE-k point (two draws from ``rng``: index, then ``lam``).

    Returns a float for one-dimensional input, a coordinate array otherwise.
    """
    flat = np.ndim(sample) == 1
    X = as_sample(sample, min_size=2)
    n = X.shape[0]
    k = _check_rank(k, n)
    i = int(_uniform_index(rng.random(), n))
    lam = rng.random()
    return _point(X, flat, i, k, lam)


def smote_big_k(sample, pool: int, rng) -> float | np.ndarray:
    """One SMOTE-K point (three draws: index, pool choice, ``lam``)."""
    flat = np.ndim(sample) == 1
    X = as_sample(sample, min_size=2)
    n = X.shape[0]
    pool = _check_rank(pool, n)
    i = int(_uniform_index(rng.random(), n))
    k = 1 + int(_uniform_index(rng.random(), pool))
    lam = rng.random()
    return _point(X, flat, i, k, lam)


def smote_point(sample, config: SmoteConfig, rng):
    if config.variant is Variant.RANDOM_FROM_POOL:
        return smote_big_k(sample, config.rank, rng)
    return smote_k(sample, config.rank, rng)


def _chunk(X, table, config, count, seed, c):
    m = min(CHUNK_SIZE, count - c * CHUNK_SIZE)
    u = stream(seed, c).random((m, config.draws_per_point))
    n = X.shape[0]
    idx = _uniform_index(u[:, 0], n)
    if config.variant is Variant.RANDOM_FROM_POOL:
        col = _uniform_index(u[:, 1], config.rank)
    else:
        col = np.full(m, config.rank - 1)
    lam = u[:, -1:]
    base = X[idx]
    return interpolate(base, X[table[idx, col]], lam)


def generate_batch(sample, config: SmoteConfig, count: int, seed: int | None = None,
                   threads: int | None = None) -> np.ndarray:
    """``count`` synthetic points as a pure function of the arguments.

    Draws are split into chunks of ``CHUNK_SIZE``; chunk ``c`` uses the stream
    ``(seed, c)`` and is identical to ``CHUNK_SIZE`` consecutive calls of
    :func:`smote_point` on that stream.  ``seed`` defaults to ``config.seed``.
    Output has shape ``(count,)`` for one-dimensional input, else ``(count, d)``.
    """
    if isinstance(count, bool) or not isinstance(count, (int, np.integer)) or count < 1:
        raise InvalidCount(f"count must be a positive integer, got {count!r}")
    flat = np.ndim(sample) == 1
    X = as_sample(sample, min_size=2)
    _check_rank(config.rank, X.shape[0])
    seed = config.seed if seed is None else check_seed(seed)
    table = neighbor_table(X, config.rank)
    n_chunks = -(-count // CHUNK_SIZE)
    parts = ordered_map(lambda c: _chunk(X, table, config, count, seed, c), range(n_chunks), threads)
    Z = np.concatenate(parts)
    return Z[:, 0] if flat else Z


def smote_from_samples(samples, rank: int, per_sample: int, rng: np.random.Generator,
                       variant: Variant = Variant.FIXED_RANK) -> np.ndarray:
    """Vectorised SMOTE over many independent base samples.

    ``samples`` has shape ``(G, n)`` (one-dimensional points) or ``(G, n, d)``.
    Draws ``per_sample`` synthetic points from each base sample; the uniforms
    come from one ``(G, per_sample, draws)`` block of ``rng``.  Returns shape
    ``(G, per_sample)`` or ``(G, per_sample, d)``.
    """
    S = np.asarray(samples, dtype=float)
    flat = S.ndim == 2
    if flat:
        S = S[..., None]
    G, n, _ = S.shape
    rank = _check_rank(rank, n)
    variant = Variant(variant)
    draws = 3 if variant is Variant.RANDOM_FROM_POOL else 2
    u = rng.random((G, per_sample, draws))
    idx = _uniform_index(u[..., 0], n)
    k = 1 + _uniform_index(u[..., 1], rank) if draws == 3 else np.full(idx.shape, rank)
    lam = u[..., -1:]

    g = np.arange(G)[:, None]
    base = S[g, idx]  # (G, m, d)
    diff = S[:, None, :, :] - base[:, :, None, :]
    dist = np.sqrt(np.einsum("gmjd,gmjd->gmj", diff, diff))
    np.put_along_axis(dist, idx[..., None], -1.0, axis=2)
    order = np.argsort(dist, axis=2, kind="stable")
    nb = np.take_along_axis(order, k[..., None], axis=2)[..., 0]
    Z = interpolate(base, S[g, nb], lam)
    return Z[..., 0] if flat else Z
