"""Uniform, Gaussian and exponential reference distributions.

Sampling is by inverse transform from one seeded uniform stream, so a
distribution draw is fully determined by ``(spec, n, seed)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError
from .streams import open_uniform, stream

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class Kind(str, enum.Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"
    EXPONENTIAL = "exponential"


_ARITY = {Kind.UNIFORM: 2, Kind.GAUSSIAN: 2, Kind.EXPONENTIAL: 1}
_ALIASES = {"normal": Kind.GAUSSIAN, "exp": Kind.EXPONENTIAL}


@dataclass(frozen=True)
class DistributionSpec:
    """``uniform(a, b)``, ``gaussian(mu, sigma)`` or ``exponential(rate)``."""

    kind: Kind
    params: tuple[float, ...]

    def __post_init__(self):
        kind = self.kind
        if not isinstance(kind, Kind):
            name = str(kind).lower()
            kind = _ALIASES.get(name) or Kind(name)
        params = tuple(float(p) for p in self.params)
        if len(params) != _ARITY[kind]:
            raise ValueError(f"{kind.value} takes {_ARITY[kind]} parameter(s), got {len(params)}")
        if not all(math.isfinite(p) for p in params):
            raise ValueError("distribution parameters must be finite")
        if kind is Kind.UNIFORM and not params[1] > params[0]:
            raise ValueError(f"uniform requires b > a, got a={params[0]}, b={params[1]}")
        if kind is Kind.GAUSSIAN and not params[1] > 0:
            raise ValueError(f"gaussian requires sigma > 0, got {params[1]}")
        if kind is Kind.EXPONENTIAL and not params[0] > 0:
            raise ValueError(f"exponential requires rate > 0, got {params[0]}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", params)

    @classmethod
    def uniform(cls, a=0.0, b=1.0):
        return cls(Kind.UNIFORM, (a, b))

    @classmethod
    def gaussian(cls, mu=0.0, sigma=1.0):
        return cls(Kind.GAUSSIAN, (mu, sigma))

    @classmethod
    def exponential(cls, rate=1.0):
        return cls(Kind.EXPONENTIAL, (rate,))

    @classmethod
    def from_json(cls, obj):
        return cls(obj["kind"], tuple(obj["params"]))

    def to_json(self):
        return {"kind": self.kind.value, "params": list(self.params)}

    @property
    def support(self) -> tuple[float, float]:
        if self.kind is Kind.UNIFORM:
            return self.params
        if self.kind is Kind.EXPONENTIAL:
            return (0.0, math.inf)
        return (-math.inf, math.inf)

    @property
    def is_compact(self) -> bool:
        return self.kind is Kind.UNIFORM

    def pdf(self, x):
        return pdf(self, x)

    def cdf(self, x):
        return cdf(self, x)

    def quantile(self, u):
        return quantile(self, u)


def _out(values, scalar):
    return float(values) if scalar else values


def pdf(spec: DistributionSpec, x):
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if spec.kind is Kind.UNIFORM:
        a, b = spec.params
        val = np.where((x >= a) & (x <= b), 1.0 / (b - a), 0.0)
    elif spec.kind is Kind.GAUSSIAN:
        mu, sigma = spec.params
        t = (x - mu) / sigma
        val = _INV_SQRT_2PI / sigma * np.exp(-0.5 * t * t)
    else:
        (rate,) = spec.params
        val = np.where(x >= 0, rate * np.exp(-rate * np.maximum(x, 0.0)), 0.0)
    return _out(val, scalar)


def _std_normal_cdf(t):
    # erfc keeps full relative accuracy in the lower tail
    return 0.5 * special.erfc(-t / _SQRT2)


def cdf(spec: DistributionSpec, x):
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if spec.kind is Kind.UNIFORM:
        a, b = spec.params
        val = np.clip((x - a) / (b - a), 0.0, 1.0)
    elif spec.kind is Kind.GAUSSIAN:
        mu, sigma = spec.params
        val = _std_normal_cdf((x - mu) / sigma)
    else:
        (rate,) = spec.params
        val = -np.expm1(-rate * np.maximum(x, 0.0))
    return _out(val, scalar)


# Acklam's rational approximation to the standard normal quantile (rel. error 1.15e-9)
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _acklam(p):
    x = np.empty_like(p)
    lo = p < _P_LOW
    hi = p > 1.0 - _P_LOW
    mid = ~(lo | hi)

    q = np.sqrt(-2.0 * np.log(p[lo]))
    x[lo] = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
        ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    q = np.sqrt(-2.0 * np.log1p(-p[hi]))
    x[hi] = -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
        ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    q = p[mid] - 0.5
    r = q * q
    x[mid] = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
        (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
    return x


def std_normal_quantile(p):
    """Inverse standard normal CDF: Acklam's approximation plus one Halley step."""
    p = np.asarray(p, dtype=float)
    x = _acklam(p)
    # refine against the side of the CDF that is not close to 1
    upper = x > 0
    e = np.where(upper, (1.0 - p) - _std_normal_cdf(-x), _std_normal_cdf(x) - p)
    u = e * math.sqrt(2.0 * math.pi) * np.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def quantile(spec: DistributionSpec, u):
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    if not np.all((u > 0.0) & (u < 1.0)):
        raise DomainError("quantile level must lie in the open interval (0, 1)")
    if spec.kind is Kind.UNIFORM:
        a, b = spec.params
        val = a + u * (b - a)
    elif spec.kind is Kind.GAUSSIAN:
        mu, sigma = spec.params
        val = mu + sigma * std_normal_quantile(u)
    else:
        (rate,) = spec.params
        val = -np.log1p(-u) / rate
    return _out(val, scalar)


def sample_iid(spec: DistributionSpec, n: int, seed: int, *key: int) -> np.ndarray:
    """``n`` i.i.d. draws by inverse transform from the stream ``(seed, *key)``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return quantile(spec, open_uniform(stream(seed, *key), n))


def sample_from(spec: DistributionSpec, rng: np.random.Generator, size) -> np.ndarray:
    """Inverse-transform draws of arbitrary ``size`` from an existing generator."""
    return quantile(spec, open_uniform(rng, size))
