"""Interpolated logarithmic periods and their certified truncations.

The central object is the interpolation polynomial xi-tilde attached to a
pair of nested integer intervals J' in J and a level n: the unique
polynomial of bounded degree that is congruent to the twisted xi_n divided
by p modulo the twisted omega_n on J', and to 1 modulo the twisted
omega_{n-1} on the rest of J.  Two independent constructions are provided
(polynomial CRT, and a modular-inverse closed form) together with exact
checks of the norm bounds, the unit-quotient property, the valuations at
higher-level special points, and truncations of the associated infinite
products with a certified tail bound in log scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .cyclotomic import CyclotomicElement, cyclo_valuation, eval_at_special_point
from .padic import NEG_INF, beta, beta_tilde, check_odd_prime, n_zero, valuation
from .polyring import (
    Interval,
    RationalPoly,
    ShiftedForm,
    crt,
    gauss_log_norm,
    lambda_invariant,
    mlog,
    modular_inverse,
    mu_invariant,
    omega_twisted,
    poly_xgcd,
    twist,
    xi_twisted,
)

ONE = RationalPoly.one()


@dataclass(frozen=True)
class IntervalPair:
    """A finite interval J with a distinguished subinterval J' (possibly empty)."""

    J: Interval
    Jp: Interval

    def __post_init__(self):
        if self.J.is_empty():
            raise ValueError("J must be nonempty")
        if not self.J.contains_interval(self.Jp):
            raise ValueError(f"J' = {self.Jp} is not a subinterval of J = {self.J}")

    @property
    def full(self) -> bool:
        return self.Jp == self.J


@dataclass(frozen=True)
class XiTilde:
    """An interpolated log period: level n, interval pair, and its polynomial."""

    p: int
    u: Fraction
    n: int
    pair: IntervalPair
    poly: RationalPoly

    @property
    def degree_bound(self) -> int:
        """Strict bound ((p-1)|J'| + |J|) p^(n-1) on the degree (n >= 1)."""
        pr = self.pair
        return ((self.p - 1) * pr.Jp.size + pr.J.size) * self.p ** (self.n - 1)


def _closed_form(p: int, u: Fraction, n: int, pair: IntervalPair) -> RationalPoly:
    # (mlog_{J',n} mod product of twisted omega_{n-1} over J)^(-1) * mlog_{J',n},
    # with the inverse assembled factorwise through CRT to keep degrees small.
    mlg = mlog(pair.Jp, n, p, u)
    shifted = ShiftedForm(mlg)
    factors = [omega_twisted(n - 1, j, p, u) for j in pair.J.members()]
    inverses = [
        modular_inverse(shifted.residue_mod_omega(n - 1, j, p, u), f)
        for j, f in zip(pair.J.members(), factors)
    ]
    inv = crt(inverses, factors)
    return inv * mlg


def _crt_form(p: int, u: Fraction, n: int, pair: IntervalPair) -> RationalPoly:
    # incremental CRT; the remainder passes use the shifted-basis folding
    # since every modulus is a unit multiple of (1+x)^(p^level) - u^(j p^level)
    cells = [(n, j, xi_twisted(n, j, p, u) / p) for j in pair.Jp.members()]
    for j in pair.J.members():
        if j not in pair.Jp:
            cells.append((n - 1, j, ONE))
    (lvl0, j0, r0) = cells[0]
    acc = r0
    big = omega_twisted(lvl0, j0, p, u)
    for lvl, j, res in cells[1:]:
        m = omega_twisted(lvl, j, p, u)
        red = ShiftedForm(big).residue_mod_omega(lvl, j, p, u)
        g, s, _ = poly_xgcd(red, m)
        if not g.is_one():
            raise ArithmeticError("moduli unexpectedly share a factor")
        delta = ShiftedForm(res - acc).residue_mod_omega(lvl, j, p, u)
        t = ShiftedForm(delta * s).residue_mod_omega(lvl, j, p, u)
        acc = acc + big * t
        big = big * m
    return acc


def build_xitilde(p: int, u, n: int, pair: IntervalPair, verify: bool = True) -> XiTilde:
    """Construct the interpolated log period at level n.

    With ``verify`` the polynomial is built twice, by CRT and by the
    modular-inverse closed form, the two results are compared
    coefficientwise, and every defining congruence is re-checked by exact
    remainder computation.
    """
    check_odd_prime(p)
    u = Fraction(u)
    if valuation(u - 1, p) < 1:
        raise ValueError("u must be congruent to 1 mod p")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return XiTilde(p, u, 0, pair, mlog(pair.Jp, 0, p, u))
    if pair.Jp.is_empty():
        return XiTilde(p, u, n, pair, ONE)
    poly = _closed_form(p, u, n, pair)
    out = XiTilde(p, u, n, pair, poly)
    if poly.degree >= out.degree_bound:
        raise AssertionError("degree bound violated")
    if verify:
        other = _crt_form(p, u, n, pair)
        if other != poly:
            raise AssertionError("CRT and closed-form constructions disagree")
        _check_congruences(out)
    return out


def _check_congruences(x: XiTilde) -> None:
    p, u, n = x.p, x.u, x.n
    shifted = ShiftedForm(x.poly)
    e = p**n
    for j in x.pair.Jp.members():
        target = xi_twisted(n, j, p, u) / p
        c = u ** (j * e)
        if shifted.residue_coeffs(e, c) != ShiftedForm(target).residue_coeffs(e, c):
            raise AssertionError(f"congruence failure mod omega_n^({j})")
    minus_one = ShiftedForm(x.poly - ONE)
    # congruent to 1 modulo every level n-1 factor over all of J (this covers
    # both the J - J' defining congruences and the closed-form display)
    if not minus_one.divisible_by_omega_prod(x.pair.J, n - 1, p, u):
        raise AssertionError("not congruent to 1 mod the level n-1 product")


@lru_cache(maxsize=None)
def xitilde_poly(p: int, u: Fraction, n: int, pair: IntervalPair) -> RationalPoly:
    """Cached unverified construction, for use inside recursions."""
    return build_xitilde(p, u, n, pair, verify=False).poly


# ---------------------------------------------------------------------------
# Norm bounds
# ---------------------------------------------------------------------------


@dataclass
class NormBoundReport:
    log_norm: Fraction
    lower: Fraction | None
    upper: Fraction | None
    bounds: dict = field(default_factory=dict)
    applicable: bool = True
    ok: bool = True


def norm_threshold(p: int, u: Fraction, size_J: int) -> Fraction:
    """Level beyond which the floor(beta-tilde) norm bound applies."""
    return valuation(factorial(size_J - 1), p) - (valuation(u - 1, p) - 1)


def check_norm_bounds(x: XiTilde) -> NormBoundReport:
    """Exact rational verification of the Gauss-norm bounds at radius 1.

    Nothing is asserted at level 0, where the interpolation degenerates to
    the plain product of twisted logarithm factors.
    """
    p, u, n = x.p, x.u, x.n
    g = gauss_log_norm(x.poly, p)
    if n == 0:
        return NormBoundReport(g, None, None, applicable=False)
    sj, sjp = x.pair.J.size, x.pair.Jp.size
    lower = Fraction(sjp)
    uppers = {}
    slack = Fraction(1, p - 1) + valuation(factorial(sj - 1), p) - valuation(
        u ** (p ** (n - 1)) - 1, p
    )
    generic = sjp + _floor(Fraction(sj - 1, p - 1) + max(Fraction(0), slack))
    uppers["generic"] = Fraction(generic)
    if n > norm_threshold(p, u, sj):
        uppers["beta_tilde"] = Fraction(sjp + beta_tilde(sj, p))
    if x.pair.full:
        uppers["beta"] = Fraction(sj + beta(sj, p))
    upper = min(uppers.values())
    ok = lower <= g <= upper
    return NormBoundReport(g, lower, upper, bounds=uppers, ok=ok)


def _floor(q: Fraction) -> int:
    return q.numerator // q.denominator


# ---------------------------------------------------------------------------
# Unit quotients and the experimental invariants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MuLambdaReport:
    degree: int
    mu: Fraction
    lam: int

    def __post_init__(self):
        if not 0 <= self.lam <= self.degree:
            raise ValueError("lambda-invariant out of range")


def unit_quotient(x: XiTilde) -> tuple[RationalPoly, MuLambdaReport]:
    """Quotient of the period by its logarithm part, with (deg, mu, lambda).

    The quotient is a p-adic unit power series whenever beta_tilde(|J|)
    vanishes; in that case integrality of the coefficients and a unit
    constant term are asserted.
    """
    p, n = x.p, x.n
    v = x.poly.exact_div(mlog(x.pair.Jp, n, p, x.u))
    report = MuLambdaReport(v.degree, mu_invariant(v, p), lambda_invariant(v, p))
    if n >= 1:
        if report.degree > p ** (n - 1) * (x.pair.J.size - 1):
            raise AssertionError("quotient degree exceeds its bound")
        if report.mu > 0:
            raise AssertionError("quotient norm below 1")
        if beta_tilde(x.pair.J.size, p) == 0:
            if report.mu < 0:
                raise AssertionError("quotient not integral with beta_tilde = 0")
            if valuation(v.coeff(0), p) != 0:
                raise AssertionError("constant term is not a unit")
    return v, report


def expected_experimental_invariants(p: int, n: int, size_J: int) -> MuLambdaReport:
    """The published experimental (deg, mu, lambda) formulas for the quotient.

    The mu line uses floor((|J|-1)/(p-1)) as published.  Note that at
    |J| = p this contradicts the proven norm bound p^(|J| + ord_p((|J|-1)!)),
    which forces mu = 0 there; see corrected_experimental_mu.
    """
    return MuLambdaReport(
        degree=p ** (n - 1) * (size_J - 1),
        mu=Fraction(-beta_tilde(size_J, p)),
        lam=(p - 1) * p ** (n - 1) * ((size_J - 2) // (p - 1)),
    )


def corrected_experimental_mu(p: int, size_J: int) -> Fraction:
    """The mu value consistent with the proven norm bound: -ord_p((|J|-1)!).

    Exact computation over every sampled grid cell attains this value, i.e.
    the upper norm bound of the full-interval existence statement is sharp.
    """
    return Fraction(-beta(size_J, p))


# ---------------------------------------------------------------------------
# Truncated infinite products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedProduct:
    """Product of interpolated periods over levels N..n_max plus a tail bound."""

    p: int
    u: Fraction
    N: int
    pair: IntervalPair
    n_max: int
    factors: tuple
    poly: RationalPoly

    def tail_log_norm_bound(self, r_log) -> Fraction:
        """Certified bound on log_p || tail product - 1 || at radius p^r_log.

        The tail factors G_n (n > n_max) satisfy, past the norm threshold,
        ||G_n - 1||_rho <= p^(c - (n - n_0(rho)) |J|) with
        c = (p-2)/(p-1)|J| + beta_tilde(|J|) + |J'|, and ||G_n - 1||_rho <=
        p^(beta_tilde + |J'|) below n_0(rho).  Writing the tail as a product
        of 1 + eps_n, the deviation from 1 is bounded by the sum of the
        positive exponents if any are positive, by their supremum otherwise.
        """
        p = self.p
        sj, sjp = self.pair.J.size, self.pair.Jp.size
        bt = beta_tilde(sj, p)
        r_log = Fraction(r_log)
        n0 = n_zero(r_log, p)
        c = Fraction((p - 2) * sj, p - 1) + bt + sjp
        flat = Fraction(bt + sjp)

        def term(n: int) -> Fraction:
            return flat if n <= n0 else c - (n - n0) * sj

        start = self.n_max + 1
        positives = []
        n = start
        while term(n) > 0:
            positives.append(term(n))
            n += 1
        if positives:
            return sum(positives, Fraction(0))
        return term(start)

    def value_at(self, j: int, m: int) -> CyclotomicElement:
        """Evaluate the truncated product at u^j zeta - 1, zeta of order p^m."""
        return eval_at_special_point(self.poly, j, m, self.p, self.u)

    def mlog_divisor(self) -> RationalPoly:
        out = ONE
        for m in range(self.N, self.n_max + 1):
            out = out * mlog(self.pair.Jp, m, self.p, self.u)
        return out


def truncate_Xi(p: int, u, N: int, pair: IntervalPair, n_max: int) -> TruncatedProduct:
    """Truncation at level n_max of the infinite product starting at N."""
    u = Fraction(u)
    if n_max < N:
        raise ValueError("n_max must be >= N")
    if n_max < norm_threshold(p, u, pair.J.size):
        raise ValueError("n_max below the norm threshold: tail bound unavailable")
    factors = tuple(
        XiTilde(p, u, m, pair, xitilde_poly(p, u, m, pair)) for m in range(N, n_max + 1)
    )
    poly = ONE
    for f in factors:
        poly = poly * f.poly
    return TruncatedProduct(p, u, N, pair, n_max, factors, poly)


def check_special_values(t: TruncatedProduct) -> bool:
    """Vanishing/one table: 0 at levels in [N, n_max] on J', 1 below N on J."""
    for m in range(t.N, t.n_max + 1):
        for j in t.pair.Jp.members():
            if not t.value_at(j, m).is_zero():
                return False
    for m in range(0, t.N):
        for j in t.pair.J.members():
            if t.value_at(j, m) != 1:
                return False
    return True


# ---------------------------------------------------------------------------
# Valuations at higher-level special points
# ---------------------------------------------------------------------------


@dataclass
class HigherLevelValuation:
    value: Fraction
    lower: Fraction
    exact: bool
    ok: bool


def valuation_at_higher_level(x: XiTilde, k: int, m: int) -> HigherLevelValuation:
    """Valuation of p^|J'| times the period at u^k zeta - 1, zeta of order p^m.

    Requires m > n >= 1.  The valuation is at least
    |J'|/p^(m-n) - beta_tilde(|J|), with equality when beta_tilde(|J|) = 0.
    """
    if x.n < 1:
        raise ValueError("the valuation formula needs level n >= 1")
    if m <= x.n:
        raise ValueError("m must exceed the level n")
    p = x.p
    sjp = x.pair.Jp.size
    val = cyclo_valuation(eval_at_special_point(x.poly, k, m, p, x.u) * p**sjp)
    bt = beta_tilde(x.pair.J.size, p)
    lower = Fraction(sjp, p ** (m - x.n)) - bt
    exact = bt == 0
    ok = (val == lower) if exact else (val >= lower)
    return HigherLevelValuation(val, lower, exact, ok)


# ---------------------------------------------------------------------------
# Convergence types
# ---------------------------------------------------------------------------


@dataclass
class TypeCheckReport:
    mu_ok: bool
    fitted_nu: Fraction | None
    ok: bool


def type_check(factors, lam, mu, radius_grid, p: int, start_level: int = 0) -> TypeCheckReport:
    """Verify the (lambda, mu) product type on a finite radius grid.

    ``factors`` are the G_n for n = start_level, start_level+1, ...; the
    norm condition ||G_n||_1 <= p^mu is checked for every factor, and the
    least rational nu with ||G_n - 1||_rho <= p^(nu - lambda(n - n_0(rho)))
    for all grid radii and all n >= n_0(rho) is fitted.  A fitted nu of
    NEG_INF (all factors equal to 1) is reported as None.
    """
    lam = Fraction(lam)
    mu = Fraction(mu)
    mu_ok = all(gauss_log_norm(g, p) <= mu for g in factors)
    best = NEG_INF
    for r_log in radius_grid:
        n0 = n_zero(Fraction(r_log), p)
        for idx, g in enumerate(factors):
            n = start_level + idx
            if n < n0:
                continue
            dev = gauss_log_norm(g - ONE, p, r_log)
            if dev == NEG_INF:
                continue
            cand = dev + lam * (n - n0)
            if cand > best:
                best = cand
    fitted = None if best == NEG_INF else best
    return TypeCheckReport(mu_ok, fitted, mu_ok)


def check_divisible_decay(h: RationalPoly, n: int, exponents: dict, p: int, u, r_log) -> bool:
    """Decay bound for a polynomial divisible by twisted omega_{n-1} powers.

    ``exponents`` maps twist indices j to alpha_j; the check asserts
    divisibility and the radius bound with lambda = sum alpha_j:

        n >= n_0(rho):  ||H||_rho <= (p rho_0)^lambda p^(-(n-n_0) lambda) ||H||_1
        n <= n_0(rho):  ||H||_rho <= (rho^(p^(n-1)))^lambda ||H||_1

    The second exponent is p^(n-1), the radius each linear factor actually
    reaches after n-1 Frobenius substitutions; it is sharp at n = 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    u = Fraction(u)
    r_log = Fraction(r_log)
    lam = sum(exponents.values())
    div = ONE
    for j, a in exponents.items():
        div = div * omega_twisted(n - 1, j, p, u) ** a
    if not (h % div).is_zero():
        raise ValueError("polynomial is not divisible by the stated product")
    n0 = n_zero(r_log, p)
    lhs = gauss_log_norm(h, p, r_log)
    base = gauss_log_norm(h, p)
    bounds = []
    if n >= n0:
        bounds.append(Fraction(lam * (p - 2), p - 1) - (n - n0) * lam + base)
    if n <= n0:
        bounds.append(lam * p ** (n - 1) * r_log + base)
    return all(lhs <= b for b in bounds)


# ---------------------------------------------------------------------------
# Interpolation norm bound (polynomial CRT over one level)
# ---------------------------------------------------------------------------


@dataclass
class InterpolationBoundReport:
    log_norm_P: Fraction
    first_bound: Fraction
    second_bound: Fraction
    ok: bool


def amice_velu_bound_check(qs, n: int, p: int, u) -> InterpolationBoundReport:
    """Build P from residues Q_j mod twisted omega_n and check the norm bounds.

    delta_i is the i-th finite difference of the residue sequence; the two
    asserted inequalities are, in log scale,

        ||P||_1 <= (r-1)/(p-1) + max_i(-i/(p-1) + ord_p(i!) + A_i)
               <= (r-1)/(p-1) + max_i A_i

    with A_i = log||delta_i||_1 + i * ord_p(u^(p^n) - 1).
    """
    u = Fraction(u)
    r = len(qs)
    if r < 1:
        raise ValueError("need at least one residue")
    for q in qs:
        if q.degree >= p**n:
            raise ValueError("residues must have degree < p^n")
    moduli = [omega_twisted(n, j, p, u) for j in range(r)]
    bigp = crt(qs, moduli) if r > 1 else qs[0]
    vu = valuation(u ** (p**n) - 1, p)
    first_terms = []
    second_terms = []
    for i in range(r):
        delta = RationalPoly.zero()
        for j in range(i + 1):
            delta = delta + qs[j] * ((-1) ** (i - j) * comb(i, j))
        a_i = gauss_log_norm(delta, p)
        if a_i == NEG_INF:
            continue
        a_i = a_i + i * vu
        second_terms.append(a_i)
        first_terms.append(Fraction(-i, p - 1) + valuation(factorial(i), p) + a_i)
    head = Fraction(r - 1, p - 1)
    first = head + max(first_terms)
    second = head + max(second_terms)
    lhs = gauss_log_norm(bigp, p)
    ok = lhs <= first <= second
    return InterpolationBoundReport(lhs, first, second, ok)


def delta_norm_bound_for_twisted_family(
    q: RationalPoly, p: int, u, r: int, step: int = 1
) -> bool:
    """Finite differences of a twisted family contract geometrically.

    For residues Q_j = Q twisted by j*step, each difference delta_i obeys
    ||delta_i||_1 <= ||Q||_1 * |u^step - 1|^i.  (Taking step = p^n gives the
    variant with |u^(p^n) - 1|^i; with step = 1 the contraction ratio is
    |u - 1|, not |u^(p^n) - 1|.)
    """
    u = Fraction(u)
    qs = [twist(q, j * step, u) for j in range(r)]
    vu = valuation(u**step - 1, p)
    base = gauss_log_norm(q, p)
    for i in range(r):
        delta = RationalPoly.zero()
        for j in range(i + 1):
            delta = delta + qs[j] * ((-1) ** (i - j) * comb(i, j))
        dn = gauss_log_norm(delta, p)
        if dn != NEG_INF and dn > base - i * vu:
            return False
    return True
