"""Seeded SMOTE-k / SMOTE-K sampling with convergence diagnostics."""

__version__ = "0.1.0"

from .core_sampling import (  # noqa: E402
    SmoteConfig,
    Variant,
    generate_batch,
    neighbor_ordering,
    smote_big_k,
    smote_k,
)
from .distributions import DistributionSpec  # noqa: E402

__all__ = [
    "DistributionSpec",
    "SmoteConfig",
    "Variant",
    "generate_batch",
    "neighbor_ordering",
    "smote_big_k",
    "smote_k",
]
