import math
import random
from fractions import Fraction

import pytest

from logperiods.polyring import (
    Interval,
    PolyMatrix,
    RationalPoly,
    crt,
    mlog,
    modular_inverse,
    mu_invariant,
    omega,
    omega_prod,
    omega_twisted,
    poly_gcd,
    poly_xgcd,
    resultant,
    smith_form,
    twist,
    xi,
    xi_twisted,
)
from logperiods.polyring import gauss_log_norm

X = RationalPoly.x()


def _random_poly(rng, maxdeg=10, zero_ok=True):
    deg = rng.randint(0 if zero_ok else 1, maxdeg)
    coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(deg + 1)]
    return RationalPoly(coeffs)


# -- basic ring operations ---------------------------------------------------


def test_mul_matches_schoolbook_reference():
    rng = random.Random(3)
    for _ in range(60):
        f = _random_poly(rng, maxdeg=40)
        g = _random_poly(rng, maxdeg=40)
        ref = [Fraction(0)] * (len(f.coeffs) + len(g.coeffs) - 1 or 1)
        for i, a in enumerate(f.coeffs):
            for j, b in enumerate(g.coeffs):
                ref[i + j] += a * b
        assert f * g == RationalPoly(ref)


def test_divmod_roundtrip():
    rng = random.Random(5)
    for _ in range(80):
        f = _random_poly(rng, maxdeg=25)
        g = _random_poly(rng, maxdeg=10, zero_ok=False)
        q, r = divmod(f, g)
        assert q * g + r == f
        assert r.degree < g.degree


def test_pow_and_compose():
    f = RationalPoly((1, 1))
    assert f**3 == RationalPoly((1, 3, 3, 1))
    g = RationalPoly((0, 0, 1))
    assert g.compose(f) == f * f
    assert f.compose(RationalPoly.zero()) == RationalPoly.one()


# -- omega / xi / twists -----------------------------------------------------


def test_omega_one_at_p3():
    assert omega(1, 3) == RationalPoly((0, 3, 3, 1))  # x^3 + 3x^2 + 3x


def test_xi_zero_is_px():
    for p in (3, 5, 7):
        assert xi(0, p) == RationalPoly((0, p))


def test_xi_times_previous_omega_is_omega():
    for p in (3, 5, 7, 11, 13):
        for n in (1, 2):
            assert xi(n, p) * omega(n - 1, p) == omega(n, p)


def test_omega_quotient_exact_to_level_four():
    # the cyclotomic quotient divides exactly at every level up to 4
    for p in (3, 5, 7):
        for n in (3, 4):
            assert xi(n, p) * omega(n - 1, p) == omega(n, p)


def test_mlog_singleton_is_twisted_xi_over_p():
    p, u = 3, Fraction(4)
    for n in (0, 1, 2):
        assert mlog(Interval(0, 0), n, p, u) == xi(n, p) / p
        assert mlog(Interval(2, 2), n, p, u) == xi_twisted(n, 2, p, u) / p


def test_twist_examples():
    p, u = 3, Fraction(4)
    assert twist(X, 0, u) == X
    assert twist(X, 1, u) == RationalPoly((Fraction(1, 4) - 1, Fraction(1, 4)))
    for n in (0, 1, 2):
        for j in (-1, 0, 2):
            assert twist(omega(n, p), j, u) == omega_twisted(n, j, p, u)
            assert twist(xi(n, p), j, u) == xi_twisted(n, j, p, u)


def test_twisted_omega_closed_form():
    p, u, n, j = 3, Fraction(4), 1, 2
    f = omega_twisted(n, j, p, u)
    e = p**n
    assert f.degree == e
    assert f.leading() == u ** (-j * e)
    assert f.coeff(0) == u ** (-j * e) - 1


def test_mlog_norm_and_mu():
    p, u = 3, Fraction(4)
    for n in (1, 2):
        for J in (Interval(0, 0), Interval(-1, 1)):
            f = mlog(J, n, p, u)
            assert gauss_log_norm(f, p) == J.size
            assert mu_invariant(f, p) == -J.size
    assert mlog(Interval.empty(), 2, p, u).is_one()


# -- intervals ----------------------------------------------------------------


def test_interval_helpers():
    J = Interval(-1, 1)
    assert J.size == 3
    assert list(J.members()) == [-1, 0, 1]
    assert Interval.open_closed(-1, 1) == Interval(0, 1)
    assert Interval.open_closed(0, 0).is_empty()
    subs = J.subintervals()
    assert Interval.empty() in subs and J in subs
    assert len([s for s in subs if not s.is_empty()]) == 6
    assert Interval.parse("2..5") == Interval(2, 5)
    assert Interval.parse("empty").is_empty()
    assert str(Interval(-1, 2)) == "-1..2"


# -- gcd / xgcd / crt ---------------------------------------------------------


def test_gcd_and_xgcd():
    rng = random.Random(9)
    for _ in range(50):
        a = _random_poly(rng, 8, zero_ok=False)
        b = _random_poly(rng, 8, zero_ok=False)
        c = _random_poly(rng, 4, zero_ok=False)
        g = poly_gcd(a * c, b * c)
        assert c.monic().divides(g) or g.divides(c.monic()) or (g % c.monic()).is_zero()
        assert (a * c % g).is_zero() and (b * c % g).is_zero()
        gg, s, t = poly_xgcd(a, b)
        assert s * a + t * b == gg


def test_crt_single_and_lagrange_oracle():
    m = RationalPoly((1, 1, 1))
    r = RationalPoly((5, 7, 2, 1))
    assert crt([r], [m]) == r % m
    # residues (0,1), moduli (x, x-1): Lagrange interpolation through (0,0),(1,1)
    got = crt([RationalPoly.zero(), RationalPoly.one()], [X, X - 1])
    assert got == X
    assert got(0) == 0 and got(1) == 1


def test_crt_random_against_reduction():
    rng = random.Random(21)
    for _ in range(30):
        pts = rng.sample(range(-8, 9), 3)
        moduli = [X - a for a in pts]
        residues = [RationalPoly.constant(rng.randint(-5, 5)) for _ in pts]
        f = crt(residues, moduli)
        assert f.degree < 3
        for r, m in zip(residues, moduli):
            assert (f - r) % m == RationalPoly.zero()


def test_crt_rejects_common_factor():
    with pytest.raises(ArithmeticError, match="gcd"):
        crt([RationalPoly.zero(), RationalPoly.one()], [X * (X - 1), X])


def test_modular_inverse():
    rng = random.Random(33)
    for _ in range(30):
        m = _random_poly(rng, 6, zero_ok=False)
        a = _random_poly(rng, 5, zero_ok=False)
        if not poly_gcd(a, m).is_one():
            continue
        inv = modular_inverse(a, m)
        assert (inv * a) % m == RationalPoly.one()
        assert inv.degree < m.degree


# -- resultants ---------------------------------------------------------------


def _sylvester_resultant(f, g):
    # Reference oracle: full Sylvester determinant with exact fractions.
    m, n = f.degree, g.degree
    size = m + n
    rows = []
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    for i in range(n):
        rows.append([Fraction(0)] * i + fc + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + gc + [Fraction(0)] * (size - n - 1 - i))
    # fraction-free-ish Gaussian elimination over Q
    det = Fraction(1)
    mat = [row[:] for row in rows]
    for c in range(size):
        piv = next((r for r in range(c, size) if mat[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            mat[c], mat[piv] = mat[piv], mat[c]
            det = -det
        det *= mat[c][c]
        inv = 1 / mat[c][c]
        for r in range(c + 1, size):
            if mat[r][c]:
                factor = mat[r][c] * inv
                for k in range(c, size):
                    mat[r][k] -= factor * mat[c][k]
    return det


def test_resultant_against_sylvester():
    rng = random.Random(17)
    for _ in range(40):
        f = _random_poly(rng, 6, zero_ok=False)
        g = _random_poly(rng, 6, zero_ok=False)
        if f.degree == 0 or g.degree == 0:
            continue
        assert resultant(f, g) == _sylvester_resultant(f, g)


def test_resultant_conventions():
    rng = random.Random(19)
    # Res(x - a, g) = g(a)
    for _ in range(20):
        a = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        g = _random_poly(rng, 5, zero_ok=False)
        if g.degree < 1:
            continue
        assert resultant(X - a, g) == g(a)
    # Res(Phi_p, x - 1) = Phi_p(1) = p under the fixed convention
    for p in (3, 5, 7):
        phi = RationalPoly([1] * p)  # 1 + x + ... + x^(p-1)
        assert resultant(phi, X - 1) == p
        # xi_1 = Phi_p(1+x), so its resultant with x-1 is Phi_p(2)
        assert resultant(xi(1, p), X - 1) == phi(2)
    # vanishing iff common factor
    f = (X - 1) * (X + 2)
    g = (X - 1) * (X - 3)
    assert resultant(f, g) == 0
    assert resultant(X + 2, X - 3) != 0


# -- polynomial matrices and Smith form ---------------------------------------


def test_polymatrix_product_and_det():
    a = PolyMatrix([[X, 1], [0, X - 1]])
    b = PolyMatrix([[1, X], [X, 1]])
    ab = a * b
    assert ab[0, 0] == 2 * X
    assert ab[0, 1] == X * X + 1
    assert ab.det() == a.det() * b.det()


def test_smith_identity():
    sf = smith_form(PolyMatrix.identity(3))
    assert [d for d in sf.divisors] == [RationalPoly.one()] * 3


def test_smith_diag_gcd_oracle():
    # diag(x, x(x-1)): by hand, invariants descending are [x(x-1), x]
    m = PolyMatrix.diagonal([X, X * (X - 1)])
    sf = smith_form(m)
    assert list(sf.divisors) == [X * (X - 1), X]
    assert sf.left * sf.diag * sf.right == m


def test_smith_certificates_and_reassembly():
    rng = random.Random(41)
    for _ in range(25):
        n = rng.choice((2, 3))
        m = PolyMatrix(
            [[_random_poly(rng, 3) for _ in range(n)] for _ in range(n)]
        )
        if m.det().is_zero():
            continue
        sf = smith_form(m)
        assert sf.left * sf.diag * sf.right == m
        dl, dr = sf.left.det(), sf.right.det()
        assert dl.degree == 0 and dr.degree == 0
        # divisor product equals det up to the unit scalar
        prod = RationalPoly.one()
        for d in sf.divisors:
            prod = prod * d
        det = m.det()
        assert det == prod * (dl.coeff(0) * dr.coeff(0))
        for a, b in zip(sf.divisors, list(sf.divisors)[1:]):
            assert (a % b).is_zero()


def test_smith_rejects_singular():
    m = PolyMatrix([[X, X], [X, X]])
    with pytest.raises(ValueError):
        smith_form(m)


def test_divisor_sequence_validation():
    from logperiods.polyring import DivisorSequence

    DivisorSequence((X * (X - 1), X))  # descending: fine
    with pytest.raises(ValueError):
        DivisorSequence((X, X * (X - 1)))
    with pytest.raises(ValueError):
        DivisorSequence((X, RationalPoly.zero()))


def _unimodular(rng, n):
    m = PolyMatrix.identity(n)
    for _ in range(4):
        i, j = rng.sample(range(n), 2)
        e = PolyMatrix.identity(n).entries()
        e[i][j] = _random_poly(rng, 2)
        m = m * PolyMatrix(e)
    return m


def test_smith_product_lemma_coprime_invariants():
    # invariants of C = AB are the elementwise products when the invariant
    # sets are pairwise coprime
    rng = random.Random(55)
    for _ in range(10):
        n = 2
        f = [(X - 1) * (X - 2), X - 1]
        g = [(X + 1) * (X + 2), X + 2]
        lu, ru = _unimodular(rng, n), _unimodular(rng, n)
        lv, rv = _unimodular(rng, n), _unimodular(rng, n)
        a = lu * PolyMatrix.diagonal(f) * ru
        b = lv * PolyMatrix.diagonal(g) * rv
        sf = smith_form(a * b)
        expected = [(fi * gi).monic() for fi, gi in zip(f, g)]
        assert list(sf.divisors) == expected


def test_omega_prod_matches_factors():
    p, u = 3, Fraction(4)
    J = Interval(0, 1)
    f = omega_prod(J, 1, p, u)
    assert f == omega_twisted(1, 0, p, u) * omega_twisted(1, 1, p, u)
