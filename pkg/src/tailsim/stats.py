"""Weighted moment estimators, simulation errors and the variance-gap quadrature.

For trial (or sample) values ``s`` with importance weights ``w``::

    E(X)   ~ mean(s * w)
    E(X^2) ~ mean(s**2 * w)
    E(Y^2) ~ mean((s * w)**2)

``X`` is the quantity being estimated and ``Y`` the weighted variable whose
variance governs the error of the importance-sampled mean.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .distributions import confidence_radius, lognormal_comp_quantile
from .errors import DomainError, QuadratureError, UndefinedRelativeError
from .kernels import moment_sums


def _clamped_variance(second, mean, label):
    var = second - mean * mean
    if var < 0.0:
        if var < -1e-12 * max(second, mean * mean, 1e-300):
            warnings.warn(f"negative {label} estimate {var:.3e} clamped to 0", RuntimeWarning)
        return 0.0
    return var


@dataclass(frozen=True)
class MomentEstimates:
    mean_x: float
    mean_x2: float
    mean_y2: float
    n: int

    @property
    def var_x(self):
        return _clamped_variance(self.mean_x2, self.mean_x, "Var(X)")

    @property
    def var_y(self):
        return _clamped_variance(self.mean_y2, self.mean_x, "Var(Y)")

    @property
    def se_regular(self):
        """Standard error of the mean without the weights."""
        return math.sqrt(self.var_x / self.n)

    @property
    def se_enhanced(self):
        """Standard error of the importance-sampled mean."""
        return math.sqrt(self.var_y / self.n)


@dataclass
class MomentAccumulator:
    """Mergeable running sums for one or more loss columns sharing trial weights.

    ``sums[j]`` holds ``(sum S*W, sum S^2*W, sum (S*W)^2)`` for column ``j``;
    ``weight_sums`` holds ``(sum W, sum W^2)``.
    """

    n_columns: int = 1
    n: int = 0
    sums: np.ndarray = field(default=None)
    weight_sums: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.sums is None:
            self.sums = np.zeros((self.n_columns, 3))
        if self.weight_sums is None:
            self.weight_sums = np.zeros(2)

    def update(self, values, weights):
        values = np.atleast_2d(np.asarray(values, dtype=np.float64))
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        sums, wsums = moment_sums(np.ascontiguousarray(values), weights)
        self.sums = self.sums + sums
        self.weight_sums = self.weight_sums + wsums
        self.n += weights.shape[0]
        return self

    def merge(self, other):
        return MomentAccumulator(
            self.n_columns,
            self.n + other.n,
            self.sums + other.sums,
            self.weight_sums + other.weight_sums,
        )

    def estimates(self, column=0):
        s = self.sums[column] / self.n
        return MomentEstimates(float(s[0]), float(s[1]), float(s[2]), self.n)

    @property
    def mean_weight(self):
        return float(self.weight_sums[0] / self.n)

    @property
    def weight_variance(self):
        m = self.mean_weight
        return float(self.weight_sums[1] / self.n - m * m)


def pairwise_merge(accumulators):
    """Combine accumulators in a fixed pairwise tree over their list order."""
    items = list(accumulators)
    if not items:
        raise ValueError("nothing to merge")
    while len(items) > 1:
        merged = [items[i].merge(items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            merged.append(items[-1])
        items = merged
    return items[0]


def weighted_moments(values, weights):
    """Importance-weighted estimates of E(X), E(X^2) and E(Y^2)."""
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if values.ndim != 1 or values.shape != weights.shape:
        raise DomainError(f"values and weights must be 1-d of equal length, got {values.shape} and {weights.shape}")
    if values.shape[0] < 2:
        raise DomainError("at least two samples are required")
    if not np.all(weights > 0):
        raise DomainError("weights must be strictly positive")
    return MomentAccumulator().update(values, weights).estimates()


def simulation_errors(moments, confidence_level=0.95):
    """Relative confidence radii ``(regular, enhanced)`` of the estimated mean.

    Each is ``z * sqrt(Var / n) / mean``; multiply by 100 for percentages.
    """
    if not moments.mean_x > 0:
        raise UndefinedRelativeError(
            f"relative error undefined for mean {moments.mean_x!r} <= 0"
        )
    z = confidence_radius(confidence_level)
    regular = z * math.sqrt(moments.var_x / moments.n) / moments.mean_x
    enhanced = z * math.sqrt(moments.var_y / moments.n) / moments.mean_x
    return regular, enhanced


def sample_improvement(regular, enhanced):
    """Estimated ``Var(X) / Var(Y)`` from the two error radii."""
    if enhanced == 0:
        raise ZeroDivisionError("enhanced error is zero; sample improvement undefined")
    return (regular / enhanced) ** 2


# Adaptive Gauss-Legendre quadrature. Each interval is scored by comparing the
# 10-point rule on the whole interval with the same rule on its two halves.

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_P_FLOOR = 1e-300


def _gauss(h, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    fx = h(mid[:, None] + half[:, None] * _GL_X)
    return half * (fx @ _GL_W), half * (np.abs(fx) @ _GL_W)


def _score(h, lo, hi):
    mid = 0.5 * (lo + hi)
    whole, _ = _gauss(h, lo, hi)
    left, left_abs = _gauss(h, lo, mid)
    right, right_abs = _gauss(h, mid, hi)
    est = left + right
    return est, left_abs + right_abs, np.abs(est - whole)


def adaptive_integrate(pieces, rtol=1e-6, atol=0.0, max_intervals=20000):
    """Integrate a sum of ``(h, lo, hi)`` pieces with global adaptive bisection.

    ``h`` must accept an array of abscissae. Convergence is declared when the
    summed error estimate is below ``max(atol, rtol * integral of |h|)``, so
    cancelling integrands are judged against their magnitude, not their sum.
    Returns ``(value, error_estimate)``.
    """
    groups = []
    for h, lo, hi in pieces:
        lo_a = np.linspace(lo, hi, 9)[:-1]
        hi_a = np.linspace(lo, hi, 9)[1:]
        est, mag, err = _score(h, lo_a, hi_a)
        groups.append([h, lo_a, hi_a, est, mag, err])

    while True:
        total = sum(g[3].sum() for g in groups)
        magnitude = sum(g[4].sum() for g in groups)
        error = sum(g[5].sum() for g in groups)
        tol = max(atol, rtol * magnitude)
        if error <= tol:
            return float(total), float(error)
        count = sum(g[1].size for g in groups)
        if count >= max_intervals:
            raise QuadratureError(
                f"quadrature did not converge: error {error:.3e} > tolerance {tol:.3e} "
                f"after {count} intervals",
                estimate=float(total), error=float(error), intervals=count,
            )
        all_err = np.concatenate([g[5] for g in groups])
        # split the worst intervals carrying half of the excess error
        order = np.sort(all_err)[::-1]
        cut = order[min(np.searchsorted(np.cumsum(order), 0.5 * (error - tol)), order.size - 1)]
        for g in groups:
            h, lo_a, hi_a, est, mag, err = g
            split = err >= cut
            if not split.any():
                continue
            mid = 0.5 * (lo_a[split] + hi_a[split])
            new_lo = np.concatenate([lo_a[split], mid])
            new_hi = np.concatenate([mid, hi_a[split]])
            n_est, n_mag, n_err = _score(h, new_lo, new_hi)
            keep = ~split
            g[1] = np.concatenate([lo_a[keep], new_lo])
            g[2] = np.concatenate([hi_a[keep], new_hi])
            g[3] = np.concatenate([est[keep], n_est])
            g[4] = np.concatenate([mag[keep], n_mag])
            g[5] = np.concatenate([err[keep], n_err])


def _safe(g):
    def h(p):
        out = np.zeros_like(p)
        ok = (p > _P_FLOOR) & (p < 1.0)
        out[ok] = g(p[ok])
        return out
    return h


def unit_interval_pieces(g, a=0.0, b=1.0):
    """Split ``int_a^b g(p) dp`` on [0, 1] into pieces that tame ``p -> 0``.

    Below 1/2 the integral is taken in ``u = -log p`` (mapped onto a finite
    interval when ``a = 0``), which flattens tail-quantile blow-ups at the
    origin. Abscissae at or below 1e-300 contribute zero.
    """
    if not 0.0 <= a < b <= 1.0:
        raise DomainError(f"need 0 <= a < b <= 1, got [{a}, {b}]")
    g = _safe(g)
    pieces = []
    split = 0.5
    if a < split:
        top = min(b, split)
        u_top = -math.log(top)
        if a > 0.0:
            u_bot = -math.log(a)

            def h_log(u, g=g):
                p = np.exp(-u)
                return g(p) * p

            pieces.append((h_log, u_top, u_bot))
        else:
            def h_inf(s, g=g, u0=u_top):
                u = u0 + s / (1.0 - s)
                p = np.exp(-u)
                return g(p) * p / (1.0 - s) ** 2

            pieces.append((h_inf, 0.0, 1.0))
    if b > split:
        pieces.append((g, max(a, split), b))
    return pieces


def integrate_unit(g, a=0.0, b=1.0, rtol=1e-6, max_intervals=20000):
    return adaptive_integrate(unit_interval_pieces(g, a, b), rtol=rtol, max_intervals=max_intervals)[0]


def variance_gap(comp_quantile, weight_at_level, rtol=1e-6):
    """``Var(Y) - Var(X)`` for a general substitution ``p = t(q)``.

    ``comp_quantile(p)`` is the complementary quantile of ``X`` and
    ``weight_at_level(p)`` evaluates ``t'(t^{-1}(p))``; both take arrays.
    """
    def g(p):
        x = comp_quantile(p)
        return x * x * (weight_at_level(p) - 1.0)
    return integrate_unit(g, rtol=rtol)


def variance_gap_quadrature(severity, k, rtol=1e-6):
    """``Var(Y) - Var(X)`` for a lognormal severity under ``t(q) = q**k``.

    Negative values mean the power transform reduces variance.
    """
    if not (math.isfinite(k) and k >= 1.0):
        raise DomainError(f"k must be >= 1, got {k}")
    if k == 1.0:
        return 0.0
    expo = (k - 1.0) / k
    return variance_gap(
        lambda p: lognormal_comp_quantile(severity, p),
        lambda p: k * np.power(p, expo),
        rtol=rtol,
    )


def transformed_moments_quadrature(severity, k, rtol=1e-8):
    """``(E(X), E(X^2), E(Y^2))`` by quadrature over the tail quantile."""
    expo = (k - 1.0) / k

    def q(p):
        return lognormal_comp_quantile(severity, p)

    ex = integrate_unit(q, rtol=rtol)
    ex2 = integrate_unit(lambda p: q(p) ** 2, rtol=rtol)
    ey2 = integrate_unit(lambda p: q(p) ** 2 * k * np.power(p, expo), rtol=rtol)
    return ex, ex2, ey2


def k2_inequality_check(severity, rtol=1e-6):
    """The two positive integrals whose order decides variance reduction at k = 2.

    Returns ``(lhs, rhs)`` with ``lhs = int_0^{1/4} x(p)^2 (1 - 2 sqrt p) dp`` and
    ``rhs = int_{1/4}^1 x(p)^2 (2 sqrt p - 1) dp``; ``lhs > rhs`` means k = 2
    reduces variance.
    """
    def sq(p):
        return lognormal_comp_quantile(severity, p) ** 2

    lhs = integrate_unit(lambda p: sq(p) * (1.0 - 2.0 * np.sqrt(p)), 0.0, 0.25, rtol=rtol)
    rhs = integrate_unit(lambda p: sq(p) * (2.0 * np.sqrt(p) - 1.0), 0.25, 1.0, rtol=rtol)
    return lhs, rhs
