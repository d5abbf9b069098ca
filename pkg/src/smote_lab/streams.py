"""Counter-based random streams and an order-preserving parallel map.

Every random quantity in the library is drawn from a Philox stream keyed by
``(seed, *counter)``.  Work items carry their own key, so results never depend
on how many threads executed them or in which order they finished.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

SEED_MAX = 2**64 - 1
THREADS_ENV = "SMOTE_LAB_THREADS"


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the counter ``key`` under ``seed``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def open_uniform(rng: np.random.Generator, size=None):
    """Uniforms on the open interval (0, 1).

    ``Generator.random`` returns multiples of 2**-53 on [0, 1); shifting by half
    a step keeps inverse-CDF transforms away from 0 and 1.
    """
    return rng.random(size) + 2.0**-54


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    return threads


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """``[fn(x) for x in items]``, possibly evaluated concurrently; order is kept."""
    items: Sequence[T] = list(items)
    threads = min(resolve_threads(threads), max(len(items), 1))
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def derive_seed(seed: int, *key: int) -> int:
    """A 64-bit seed for the counter ``key``, for APIs that take a plain seed."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])
