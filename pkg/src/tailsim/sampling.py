"""Midpoint partitions, seeded uniforms and the power-transform severity sampler.

Random streams are numpy ``PCG64`` generators keyed by a ``SeedSequence``
built from the run seed and a tuple of stream indices, so that
``child_rng(seed, k_index, chunk_index)`` is the same stream on every run
regardless of thread count.
"""

from dataclasses import dataclass
import math

import numpy as np

from .distributions import lognormal_comp_quantile
from .errors import DomainError

MODES = ("riemann", "random")


@dataclass(frozen=True)
class PowerTransform:
    """The substitution ``t(q) = q**k`` with ``k >= 1``."""

    k: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k >= 1.0):
            raise DomainError(f"transform exponent k must be a finite value >= 1, got {self.k}")

    def t(self, q):
        return np.power(q, self.k)

    def t_prime(self, q):
        return self.k * np.power(q, self.k - 1.0)

    def t_inverse(self, p):
        return np.power(p, 1.0 / self.k)


@dataclass(frozen=True)
class SampleMode:
    mode: str = "riemann"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")


def child_rng(seed, *stream):
    """Independent generator for sub-stream ``stream`` of ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(ss))


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


def midpoint_partition(n):
    """Midpoints ``(i - 1/2) / n`` for ``i = 1..n``."""
    n = _check_n(n)
    return (np.arange(n, dtype=np.float64) + 0.5) / n


def open_uniforms(rng, n):
    # 53-bit grid shifted by half a step: never exactly 0 or 1
    return (rng.integers(0, 2**53, size=n, dtype=np.int64) + 0.5) * 2.0**-53


def uniform_sample(n, seed, *stream):
    """``n`` uniforms on the open interval (0, 1), fixed by ``(seed, stream)``."""
    n = _check_n(n)
    return open_uniforms(child_rng(seed, *stream), n)


def transform_weight(transform, q):
    """Importance weight ``t'(q) = k q**(k-1)``."""
    arr = np.asarray(q, dtype=np.float64)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError("q must lie strictly inside (0, 1)")
    w = transform.t_prime(arr)
    return float(w) if arr.ndim == 0 else w


def severity_sample(params, transform, q):
    """``(value, weight)`` with value = tail quantile at ``q**k`` and weight ``t'(q)``."""
    weight = transform_weight(transform, q)
    value = lognormal_comp_quantile(params, transform.t(np.asarray(q, dtype=np.float64)))
    return value, weight


def permute(n, seed, *stream):
    """Uniform random permutation of ``range(n)`` (0-based), Fisher-Yates."""
    n = _check_n(n)
    return child_rng(seed, *stream).permutation(n)
