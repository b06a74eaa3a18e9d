"""Independent high-precision reference computations used only by the tests."""

import mpmath

mpmath.mp.dps = 35


def upper_normal_tail(z):
    """P(Z > z) from the complementary error function, 35 digits."""
    return mpmath.erfc(mpmath.mpf(z) / mpmath.sqrt(2)) / 2


def upper_normal_quantile(p):
    """z with P(Z > z) = p by Newton iteration on log P(Z > z).

    Starts from the Abramowitz-Stegun 26.2.23 rational guess.
    """
    p = mpmath.mpf(p)
    target = mpmath.log(p)
    tail = min(p, 1 - p)
    t = mpmath.sqrt(-2 * mpmath.log(tail))
    z = t - (2.515517 + 0.802853 * t + 0.010328 * t**2) / (1 + 1.432788 * t + 0.189269 * t**2 + 0.001308 * t**3)
    if p > 0.5:
        z = -z
    for _ in range(200):
        q = upper_normal_tail(z)
        f = mpmath.log(q) - target
        pdf = mpmath.npdf(z)
        step = f / (pdf / q)
        z += step
        if abs(step) < mpmath.mpf(10) ** -25:
            break
    assert abs(upper_normal_tail(z) / p - 1) < mpmath.mpf(10) ** -20
    return z


def poisson_quantile_bruteforce(lam, p):
    """Smallest n with sum_{j<=n} e^-lam lam^j / j! >= 1 - p (exact summation)."""
    lam = mpmath.mpf(lam)
    target = 1 - mpmath.mpf(p)
    total = mpmath.mpf(0)
    n = 0
    while True:
        total += mpmath.exp(-lam) * lam**n / mpmath.factorial(n)
        if total >= target:
            return n
        n += 1
