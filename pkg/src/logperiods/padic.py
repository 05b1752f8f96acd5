"""Exact p-adic valuations and Gauss norms in logarithmic scale.

Everything here works with exact rationals (``fractions.Fraction``).  Norms
and radii are carried as their base-p logarithms, so that every ultrametric
inequality used elsewhere in the package becomes a decidable comparison of
rationals.  The only non-rational values are the two sentinels:

* ``POS_INF`` -- valuation of 0;
* ``NEG_INF`` -- log-norm of the zero polynomial.

Both are plain floats and order correctly against ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction

POS_INF = float("inf")
NEG_INF = float("-inf")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_odd_prime(p: int) -> int:
    """Validate the global prime: odd and >= 3."""
    if not is_prime(p) or p < 3:
        raise ValueError(f"p must be an odd prime >= 3, got {p}")
    return p


def valuation(q, p: int):
    """Exact p-adic valuation of a rational; POS_INF for 0."""
    q = Fraction(q)
    if q == 0:
        return POS_INF
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return Fraction(v)


def beta(s: int, p: int) -> int:
    """ord_p((s-1)!), the norm-inflation exponent of the full-interval bound."""
    if s < 1:
        raise ValueError("s must be >= 1")
    # Legendre: ord_p(m!) = sum_{k>=1} floor(m / p^k)
    m = s - 1
    total = 0
    pk = p
    while pk <= m:
        total += m // pk
        pk *= p
    return total


def beta_tilde(s: int, p: int) -> int:
    """floor((s-1)/(p-1)), the asymptotic norm-inflation exponent."""
    if s < 1:
        raise ValueError("s must be >= 1")
    return (s - 1) // (p - 1)


def rho0_log(p: int) -> Fraction:
    """log_p of the convergence radius of the p-adic logarithm: -1/(p-1)."""
    return Fraction(-1, p - 1)


def rho_level_log(p: int, n: int) -> Fraction:
    """log_p of rho_0^(1/p^n), the radius attached to level n."""
    return Fraction(-1, (p - 1) * p**n)


def n_zero(r_log, p: int) -> int:
    """Smallest n >= 0 with p^n * |r_log| >= 1/(p-1).

    ``r_log`` is the base-p logarithm of a radius 0 < rho < 1, hence must be
    negative; the radius rho = 1 (r_log = 0) is rejected.
    """
    r_log = Fraction(r_log)
    if r_log >= 0:
        raise ValueError("radius log must be negative (rho < 1)")
    target = Fraction(1, p - 1)
    n = 0
    scale = -r_log
    while scale < target:
        scale *= p
        n += 1
    return n
