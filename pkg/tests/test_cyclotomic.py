import random
from fractions import Fraction

from logperiods.cyclotomic import (
    CycloVector,
    CyclotomicElement,
    cyclo_valuation,
    cyclotomic_poly,
    eval_at_special_point,
    euler_phi_p_power,
    membership_in_filtration,
)
from logperiods.padic import POS_INF, valuation
from logperiods.polyring import RationalPoly, omega, xi, xi_twisted


U = Fraction(4)  # 1 + p for p = 3


def test_cyclotomic_poly_shape():
    assert cyclotomic_poly(3, 0) == RationalPoly((-1, 1))
    assert cyclotomic_poly(3, 1) == RationalPoly((1, 1, 1))
    phi9 = cyclotomic_poly(3, 2)
    assert phi9.degree == euler_phi_p_power(3, 2) == 6
    assert phi9(1) == 3


def test_eval_constant_and_omega_vanishing():
    one = eval_at_special_point(RationalPoly.one(), 3, 2, 3, U)
    assert one == 1
    for m in (0, 1, 2):
        v = eval_at_special_point(omega(m, 3), 0, m, 3, U)
        assert v.is_zero()  # zeta^(p^m) = 1


def test_eval_is_ring_homomorphism():
    rng = random.Random(13)
    for _ in range(25):
        f = RationalPoly([rng.randint(-9, 9) for _ in range(rng.randint(1, 7))])
        g = RationalPoly([rng.randint(-9, 9) for _ in range(rng.randint(1, 7))])
        j, m = rng.choice((-1, 0, 1, 2)), rng.choice((0, 1, 2))
        ef = eval_at_special_point(f, j, m, 3, U)
        eg = eval_at_special_point(g, j, m, 3, U)
        assert eval_at_special_point(f + g, j, m, 3, U) == ef + eg
        assert eval_at_special_point(f * g, j, m, 3, U) == ef * eg


def test_valuation_of_uniformizer_and_rationals():
    for p, m in ((3, 1), (3, 2), (5, 1), (3, 3)):
        pi = CyclotomicElement.zeta(p, m) - 1
        assert cyclo_valuation(pi) == Fraction(1, (p - 1) * p ** (m - 1))
        assert cyclo_valuation(CyclotomicElement.from_rational(p, p, m)) == 1
    assert cyclo_valuation(CyclotomicElement.from_rational(Fraction(9, 2), 3, 2)) == 2
    assert cyclo_valuation(CyclotomicElement.from_rational(0, 3, 1)) == POS_INF


def test_valuation_additive_on_products():
    rng = random.Random(29)
    p = 3
    for _ in range(20):
        m = rng.choice((1, 2))
        a = CyclotomicElement(p, m, RationalPoly([rng.randint(-4, 4) for _ in range(5)]))
        b = CyclotomicElement(p, m, RationalPoly([rng.randint(-4, 4) for _ in range(5)]))
        if a.is_zero() or b.is_zero():
            continue
        va, vb, vab = cyclo_valuation(a), cyclo_valuation(b), cyclo_valuation(a * b)
        assert vab == va + vb
        if not (a + b).is_zero():
            assert cyclo_valuation(a + b) >= min(va, vb)


def test_valuation_restricted_to_rationals_matches_ordp():
    rng = random.Random(31)
    for _ in range(30):
        q = Fraction(rng.randint(-50, 50), rng.randint(1, 40))
        if q == 0:
            continue
        for m in (0, 1, 2):
            el = CyclotomicElement.from_rational(q, 3, m)
            assert cyclo_valuation(el) == valuation(q, 3)


def test_xi_valuation_at_higher_level_points():
    # ord_p(xi_n(u^s zeta - 1)) = 1 / p^(m-n) for zeta of exact order p^m, m > n
    p = 3
    for n, m in ((1, 2), (1, 3), (2, 3)):
        for s in (0, 1, -1):
            val = eval_at_special_point(xi(n, p), s, m, p, U)
            assert cyclo_valuation(val) == Fraction(1, p ** (m - n))


def test_level_lift_consistency():
    p = 3
    a = CyclotomicElement.zeta(p, 1)
    lifted = a.lift(2)
    # zeta_3 = zeta_9^3, so lifting then cubing the level-2 generator agrees
    z9 = CyclotomicElement.zeta(p, 2)
    assert lifted == z9 * z9 * z9
    q = CyclotomicElement.from_rational(Fraction(7, 2), p, 0)
    assert cyclo_valuation(q.lift(2)) == valuation(Fraction(7, 2), p)


def test_membership_in_filtration():
    p = 3
    zero = CyclotomicElement.from_rational(0, p, 1)
    one = CyclotomicElement.from_rational(1, p, 1)
    v = CycloVector((zero, zero, zero))
    assert membership_in_filtration(v, set())
    v2 = CycloVector((zero, one, zero))
    assert membership_in_filtration(v2, {1})
    assert not membership_in_filtration(v2, {0, 2})
