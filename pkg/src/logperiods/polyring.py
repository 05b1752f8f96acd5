"""Dense exact polynomial algebra over the rationals.

Provides the polynomial carrier type used everywhere in the package, the
cyclotomic building blocks omega_n / xi_n and their twists, polynomial CRT,
resultants, Gauss norms in log scale, and Smith normal form for matrices of
polynomials.

Coefficients are ``fractions.Fraction``, stored low degree first with the
trailing zeros stripped.  Multiplication of large polynomials goes through
Kronecker substitution (packing integer coefficients into one big integer)
so that Python's native big-integer product does the heavy lifting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .padic import NEG_INF, valuation

_SCHOOLBOOK_CUTOFF = 24


def _kronecker_mul(a: list[int], b: list[int]) -> list[int]:
    # Pack signed coefficients in base 2^bits; decode with balanced digits.
    maxa = max(abs(x) for x in a)
    maxb = max(abs(x) for x in b)
    bound = maxa * maxb * min(len(a), len(b))
    bits = bound.bit_length() + 2
    pa = 0
    for c in reversed(a):
        pa = (pa << bits) + c
    pb = 0
    for c in reversed(b):
        pb = (pb << bits) + c
    prod = pa * pb
    n = len(a) + len(b) - 1
    mask = (1 << bits) - 1
    half = 1 << (bits - 1)
    out = []
    for _ in range(n):
        d = prod & mask
        if d >= half:
            d -= 1 << bits
        out.append(d)
        prod = (prod - d) >> bits
    assert prod == 0
    return out


def _int_mul(a: list[int], b: list[int]) -> list[int]:
    if min(len(a), len(b)) <= _SCHOOLBOOK_CUTOFF:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return out
    return _kronecker_mul(a, b)


class RationalPoly:
    """Dense polynomial with exact rational coefficients, low degree first."""

    __slots__ = ("_c",)

    def __init__(self, coefficients=()):
        coeffs = [Fraction(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self._c = tuple(coeffs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "RationalPoly":
        return cls(())

    @classmethod
    def one(cls) -> "RationalPoly":
        return cls((1,))

    @classmethod
    def constant(cls, c) -> "RationalPoly":
        return cls((c,))

    @classmethod
    def x(cls) -> "RationalPoly":
        return cls((0, 1))

    @classmethod
    def monomial(cls, k: int, c=1) -> "RationalPoly":
        return cls((0,) * k + (Fraction(c),))

    # -- basic structure ---------------------------------------------------

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self._c) - 1

    def coeff(self, i: int) -> Fraction:
        return self._c[i] if 0 <= i < len(self._c) else Fraction(0)

    def leading(self) -> Fraction:
        if not self._c:
            raise ValueError("zero polynomial has no leading coefficient")
        return self._c[-1]

    def is_zero(self) -> bool:
        return not self._c

    def is_one(self) -> bool:
        return self._c == (Fraction(1),)

    def is_monic(self) -> bool:
        return bool(self._c) and self._c[-1] == 1

    def monic(self) -> "RationalPoly":
        lc = self.leading()
        return self if lc == 1 else self * Fraction(1, 1) / lc

    def __bool__(self) -> bool:
        return bool(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPoly):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self == RationalPoly.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._c)

    def __repr__(self) -> str:
        if not self._c:
            return "RationalPoly(0)"
        terms = []
        for i, c in enumerate(self._c):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*x" if c != 1 else "x")
            else:
                terms.append(f"{c}*x^{i}" if c != 1 else f"x^{i}")
        return "RationalPoly(" + " + ".join(terms) + ")"

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "RationalPoly":
        other = _coerce(other)
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(tuple(-c for c in self._c))

    def __sub__(self, other) -> "RationalPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "RationalPoly":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "RationalPoly":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RationalPoly.zero()
            return RationalPoly(tuple(c * other for c in self._c))
        other = _coerce(other)
        if not self._c or not other._c:
            return RationalPoly.zero()
        da = math.lcm(*(c.denominator for c in self._c))
        db = math.lcm(*(c.denominator for c in other._c))
        ia = [int(c * da) for c in self._c]
        ib = [int(c * db) for c in other._c]
        prod = _int_mul(ia, ib)
        den = da * db
        return RationalPoly(tuple(Fraction(c, den) for c in prod))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "RationalPoly":
        scalar = Fraction(scalar)
        return RationalPoly(tuple(c / scalar for c in self._c))

    def __pow__(self, n: int) -> "RationalPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = RationalPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __divmod__(self, other):
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._c)
        dq = len(rem) - len(other._c)
        if dq < 0:
            return RationalPoly.zero(), self
        quot = [Fraction(0)] * (dq + 1)
        div = other._c
        lc = div[-1]
        for k in range(dq, -1, -1):
            c = rem[k + len(div) - 1]
            if c:
                q = c / lc
                quot[k] = q
                for i, d in enumerate(div):
                    rem[k + i] -= q * d
        return RationalPoly(quot), RationalPoly(rem[: len(div) - 1])

    def __floordiv__(self, other) -> "RationalPoly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "RationalPoly":
        return divmod(self, other)[1]

    def divides(self, other: "RationalPoly") -> bool:
        return (other % self).is_zero()

    def exact_div(self, other) -> "RationalPoly":
        """Division asserting a zero remainder."""
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("division was expected to be exact")
        return q

    # -- evaluation / composition -----------------------------------------

    def __call__(self, point):
        point = Fraction(point)
        acc = Fraction(0)
        for c in reversed(self._c):
            acc = acc * point + c
        return acc

    def compose(self, inner: "RationalPoly") -> "RationalPoly":
        acc = RationalPoly.zero()
        for c in reversed(self._c):
            acc = acc * inner + RationalPoly.constant(c)
        return acc


def _coerce(v) -> RationalPoly:
    if isinstance(v, RationalPoly):
        return v
    if isinstance(v, (int, Fraction)):
        return RationalPoly.constant(v)
    raise TypeError(f"cannot coerce {type(v)!r} to RationalPoly")


ZERO = RationalPoly.zero()
ONE = RationalPoly.one()
X = RationalPoly.x()


# ---------------------------------------------------------------------------
# Gauss norms and Iwasawa invariants (log scale)
# ---------------------------------------------------------------------------


def gauss_log_norm(f: RationalPoly, p: int, r_log=0):
    """log_p of the Gauss norm of f on the disc of radius p^r_log.

    For polynomials the sup over the disc is max_i |a_i| * rho^i, i.e.
    max_i (-valuation(a_i) + i*r_log) in log scale.  NEG_INF for f = 0.
    """
    if f.is_zero():
        return NEG_INF
    r_log = Fraction(r_log)
    best = None
    for i, c in enumerate(f.coeffs):
        if c == 0:
            continue
        v = -valuation(c, p) + i * r_log
        if best is None or v > best:
            best = v
    return best


def mu_invariant(f: RationalPoly, p: int):
    """Minimal coefficient valuation (POS_INF sentinel never arises: f != 0)."""
    if f.is_zero():
        raise ValueError("mu-invariant of the zero polynomial")
    return min(valuation(c, p) for c in f.coeffs if c != 0)


def lambda_invariant(f: RationalPoly, p: int) -> int:
    """Index of the first coefficient attaining the mu-invariant."""
    mu = mu_invariant(f, p)
    for i, c in enumerate(f.coeffs):
        if c != 0 and valuation(c, p) == mu:
            return i
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# Integer intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """Closed integer interval [lo, hi]; empty when lo > hi."""

    lo: int
    hi: int

    @classmethod
    def empty(cls) -> "Interval":
        return cls(0, -1)

    @classmethod
    def open_closed(cls, a: int, b: int) -> "Interval":
        """The interval ]a, b] = {a+1, ..., b}."""
        return cls(a + 1, b)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        text = text.strip()
        if text in ("empty", ""):
            return cls.empty()
        lo, hi = text.split("..")
        return cls(int(lo), int(hi))

    @property
    def size(self) -> int:
        return max(0, self.hi - self.lo + 1)

    def is_empty(self) -> bool:
        return self.lo > self.hi

    def members(self) -> range:
        return range(self.lo, self.hi + 1)

    def __contains__(self, j: int) -> bool:
        return self.lo <= j <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return other.is_empty() or (self.lo <= other.lo and other.hi <= self.hi)

    def subintervals(self, include_empty: bool = True):
        """All subintervals, the empty one first, then by (lo, hi)."""
        out = [Interval.empty()] if include_empty else []
        for lo in self.members():
            for hi in range(lo, self.hi + 1):
                out.append(Interval(lo, hi))
        return out

    def __str__(self) -> str:
        return "empty" if self.is_empty() else f"{self.lo}..{self.hi}"


# ---------------------------------------------------------------------------
# Cyclotomic building blocks and twists
# ---------------------------------------------------------------------------


def binomial_power(exponent: int) -> RationalPoly:
    """(1+x)^exponent, expanded exactly."""
    return RationalPoly(tuple(math.comb(exponent, k) for k in range(exponent + 1)))


def omega(n: int, p: int) -> RationalPoly:
    """(1+x)^(p^n) - 1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    f = binomial_power(p**n)
    return f - 1


def xi(n: int, p: int) -> RationalPoly:
    """omega_n / omega_{n-1} for n >= 1; p*x for n = 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return RationalPoly((0, p))
    step = p ** (n - 1)
    coeffs = [Fraction(0)] * ((p - 1) * step + 1)
    for k in range(p):
        for i, c in enumerate(math.comb(k * step, i) for i in range(k * step + 1)):
            coeffs[i] += c
    return RationalPoly(coeffs)


def twist(f: RationalPoly, j: int, u: Fraction) -> RationalPoly:
    """Substitution x -> u^(-j)(1+x) - 1, exactly."""
    u = Fraction(u)
    a = u**-j
    inner = RationalPoly((a - 1, a))
    return f.compose(inner)


def omega_twisted(n: int, j: int, p: int, u: Fraction) -> RationalPoly:
    """u^(-j p^n)(1+x)^(p^n) - 1, the twisted omega_n (closed form)."""
    u = Fraction(u)
    scale = u ** (-j * p**n)
    e = p**n
    coeffs = [scale * math.comb(e, k) for k in range(e + 1)]
    coeffs[0] -= 1
    return RationalPoly(coeffs)


def xi_twisted(n: int, j: int, p: int, u: Fraction) -> RationalPoly:
    """Twisted xi_n: sum_k u^(-jk p^(n-1)) (1+x)^(k p^(n-1)) for n >= 1."""
    u = Fraction(u)
    if n == 0:
        a = u**-j
        return RationalPoly((p * (a - 1), p * a))
    step = p ** (n - 1)
    coeffs = [Fraction(0)] * ((p - 1) * step + 1)
    for k in range(p):
        w = u ** (-j * k * step)
        for i in range(k * step + 1):
            coeffs[i] += w * math.comb(k * step, i)
    return RationalPoly(coeffs)


def mlog(J: Interval, n: int, p: int, u: Fraction) -> RationalPoly:
    """Product over j in J of xi_n^(j)/p; the empty product is 1."""
    out = ONE
    for j in J.members():
        out = out * (xi_twisted(n, j, p, u) / p)
    return out


def omega_prod(J: Interval, n: int, p: int, u: Fraction) -> RationalPoly:
    """Product over j in J of the twisted omega_n."""
    out = ONE
    for j in J.members():
        out = out * omega_twisted(n, j, p, u)
    return out


# ---------------------------------------------------------------------------
# Fast reduction modulo twisted omegas
# ---------------------------------------------------------------------------


class ShiftedForm:
    """A polynomial rewritten in powers of y = 1+x, over the integers.

    Every twisted omega is a unit multiple of (1+x)^e - c, so remainders
    modulo them reduce to folding the y-power coefficients with powers of
    c.  The Taylor shift is done once per polynomial with pure integer
    arithmetic (no rational normalization in the inner loop).
    """

    __slots__ = ("ints", "den")

    def __init__(self, f: RationalPoly):
        if f.is_zero():
            self.ints = []
            self.den = 1
            return
        den = math.lcm(*(c.denominator for c in f.coeffs))
        b = [int(c * den) for c in f.coeffs]
        # in-place translation y -> y - 1 (coefficients of f(y-1))
        n = len(b)
        for i in range(n - 1):
            for k in range(n - 2, i - 1, -1):
                b[k] -= b[k + 1]
        self.ints = b
        self.den = den

    def residue_coeffs(self, e: int, c: Fraction) -> list[Fraction]:
        """The e coefficients in y of the remainder modulo y^e - c."""
        out = []
        for s in range(e):
            if s >= len(self.ints):
                out.append(Fraction(0))
                continue
            acc = Fraction(0)
            power = Fraction(1)
            for q in range(0, (len(self.ints) - s - 1) // e + 1):
                v = self.ints[q * e + s]
                if v:
                    acc += v * power
                power *= c
            out.append(acc / self.den)
        return out

    def residue_mod_omega(self, n: int, j: int, p: int, u: Fraction) -> RationalPoly:
        """Remainder modulo the twisted omega_n (as a polynomial in x)."""
        e = p**n
        c = Fraction(u) ** (j * e)
        h = RationalPoly(self.residue_coeffs(e, c))
        return h.compose(RationalPoly((1, 1)))

    def divisible_by_omega(self, n: int, j: int, p: int, u: Fraction) -> bool:
        e = p**n
        c = Fraction(u) ** (j * e)
        return all(v == 0 for v in self.residue_coeffs(e, c))

    def divisible_by_omega_prod(self, J: Interval, n: int, p: int, u: Fraction) -> bool:
        # the factors are pairwise coprime, so the product divides iff each does
        return all(self.divisible_by_omega(n, j, p, u) for j in J.members())


def congruent_mod_omega_prod(
    f: RationalPoly, g: RationalPoly, J: Interval, n: int, p: int, u: Fraction
) -> bool:
    """f == g modulo the product of twisted omega_n over J, by coefficient folding."""
    return ShiftedForm(f - g).divisible_by_omega_prod(J, n, p, u)


# ---------------------------------------------------------------------------
# gcd / xgcd / modular inverse / CRT
# ---------------------------------------------------------------------------


def _int_content_free(f: RationalPoly) -> list[int]:
    den = math.lcm(*(c.denominator for c in f.coeffs))
    ints = [int(c * den) for c in f.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [c // g for c in ints]


def poly_gcd(f: RationalPoly, g: RationalPoly) -> RationalPoly:
    """Monic gcd over Q[x] (primitive PRS on integer parts)."""
    if f.is_zero():
        return g.monic() if g else ZERO
    if g.is_zero():
        return f.monic()
    a = _int_content_free(f)
    b = _int_content_free(g)
    if len(a) < len(b):
        a, b = b, a
    while True:
        r = _int_prem(a, b)
        if not r:
            return RationalPoly(b).monic()
        cont = 0
        for c in r:
            cont = math.gcd(cont, c)
        a, b = b, [c // cont for c in r]


def _int_prem(a: list[int], b: list[int]) -> list[int]:
    # Pseudo-remainder of integer coefficient lists: lc(b)^(da-db+1) * a mod b.
    da, db = len(a) - 1, len(b) - 1
    if da < db:
        return list(a)
    rem = list(a)
    lc = b[-1]
    for k in range(da - db, -1, -1):
        top = rem[k + db]
        for i in range(len(rem)):
            rem[i] *= lc
        if top:
            for i, c in enumerate(b):
                rem[k + i] -= top * c
        rem.pop()
    while rem and rem[-1] == 0:
        rem.pop()
    return rem


def poly_xgcd(a: RationalPoly, b: RationalPoly):
    """Extended gcd over Q[x]: returns (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = a, b
    s0, s1 = ONE, ZERO
    t0, t1 = ZERO, ONE
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return ZERO, ZERO, ZERO
    lc = r0.leading()
    return r0 / lc, s0 / lc, t0 / lc


def modular_inverse(a: RationalPoly, modulus: RationalPoly) -> RationalPoly:
    """The unique R with deg R < deg modulus and R*a == 1 mod modulus."""
    g, s, _ = poly_xgcd(a % modulus, modulus)
    if not g.is_one():
        raise ArithmeticError(f"not invertible: gcd has degree {g.degree}")
    return s % modulus


def crt(residues, moduli) -> RationalPoly:
    """Chinese remainder combination over Q[x].

    Raises ArithmeticError, reporting the offending gcd, when two moduli
    share a factor.
    """
    if len(residues) != len(moduli):
        raise ValueError("residues and moduli must have equal length")
    if not moduli:
        raise ValueError("need at least one modulus")
    acc = residues[0] % moduli[0]
    big = moduli[0]
    for r, m in zip(residues[1:], moduli[1:]):
        g, s, _ = poly_xgcd(big % m, m)
        if not g.is_one():
            raise ArithmeticError(f"moduli are not coprime: gcd {g!r}")
        # acc + big * t == r (mod m)  with  t = (r - acc) * inv(big) mod m
        t = ((r - acc) * s) % m
        acc = acc + big * t
        big = big * m
    return acc


# ---------------------------------------------------------------------------
# Resultants (subresultant PRS)
# ---------------------------------------------------------------------------


def resultant(f: RationalPoly, g: RationalPoly) -> Fraction:
    """Resultant with the convention Res(f,g) = lc(f)^deg(g) * prod g(roots f)."""
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of the zero polynomial")
    if f.degree == 0:
        return f.leading() ** g.degree
    if g.degree == 0:
        return g.leading() ** f.degree
    fd = math.lcm(*(c.denominator for c in f.coeffs))
    gd = math.lcm(*(c.denominator for c in g.coeffs))
    fi = [int(c * fd) for c in f.coeffs]
    gi = [int(c * gd) for c in g.coeffs]
    r = _resultant_int(fi, gi)
    return Fraction(r, fd**g.degree * gd**f.degree)


def _resultant_int(a: list[int], b: list[int]) -> int:
    # Subresultant PRS resultant for integer coefficient lists.
    sign = 1
    if len(a) < len(b):
        if ((len(a) - 1) * (len(b) - 1)) % 2 == 1:
            sign = -sign
        a, b = b, a
    ca = _list_content(a)
    cb = _list_content(b)
    t = ca ** (len(b) - 1) * cb ** (len(a) - 1)
    a = [c // ca for c in a]
    b = [c // cb for c in b]
    g, h = 1, 1
    while True:
        da, db = len(a) - 1, len(b) - 1
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            sign = -sign
        r = _int_prem(a, b)
        if not r:
            # a nonconstant common factor remains: resultant vanishes
            return 0
        a, b = b, r
        div = g * h**delta
        b = [c // div for c in b]
        g = a[-1]
        if delta > 0:
            h = g**delta // h ** (delta - 1)
        if len(b) - 1 == 0:
            da = len(a) - 1
            res = b[-1] ** da // h ** (da - 1)
            return sign * t * res


def _list_content(a: list[int]) -> int:
    g = 0
    for c in a:
        g = math.gcd(g, c)
    return g if g else 1


# ---------------------------------------------------------------------------
# Polynomial matrices and Smith normal form
# ---------------------------------------------------------------------------


class PolyMatrix:
    """Rectangular matrix of RationalPoly entries."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries):
        self._e = [[_coerce(v) for v in row] for row in entries]
        self.rows = len(self._e)
        self.cols = len(self._e[0]) if self._e else 0
        if any(len(row) != self.cols for row in self._e):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, diag) -> "PolyMatrix":
        diag = list(diag)
        n = len(diag)
        return cls([[_coerce(diag[i]) if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def from_scalar_matrix(cls, m) -> "PolyMatrix":
        return cls([[RationalPoly.constant(v) for v in row] for row in m])

    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def entries(self):
        return [row[:] for row in self._e]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._e == other._e
        )

    def __repr__(self) -> str:
        return f"PolyMatrix({self.rows}x{self.cols})"

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix(
            [
                [self._e[i][j] + other._e[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix(
            [
                [self._e[i][j] - other._e[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RationalPoly)):
            return PolyMatrix([[e * other for e in row] for row in self._e])
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = ZERO
                for k in range(self.cols):
                    a = self._e[i][k]
                    b = other._e[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    __rmul__ = __mul__

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix([[fn(e) for e in row] for row in self._e])

    def det(self) -> RationalPoly:
        n = self.rows
        if n != self.cols:
            raise ValueError("determinant of a non-square matrix")
        if n == 1:
            return self._e[0][0]
        # expansion along the first column (fine at the dimensions used here)
        total = ZERO
        for i in range(n):
            a = self._e[i][0]
            if not a:
                continue
            minor = PolyMatrix(
                [
                    [self._e[r][c] for c in range(1, n)]
                    for r in range(n)
                    if r != i
                ]
            )
            term = a * minor.det()
            total = total + term if i % 2 == 0 else total - term
        return total


@dataclass(frozen=True)
class DivisorSequence:
    """Monic elementary divisors in descending divisibility order."""

    divisors: tuple

    def __post_init__(self):
        ds = self.divisors
        for d in ds:
            if d.is_zero():
                raise ValueError("zero divisor in a divisor sequence")
        for a, b in zip(ds, ds[1:]):
            if not (a % b).is_zero():
                raise ValueError("divisor sequence is not descending")

    def __iter__(self):
        return iter(self.divisors)

    def __len__(self):
        return len(self.divisors)

    def __getitem__(self, i):
        return self.divisors[i]


@dataclass
class SmithForm:
    left: PolyMatrix
    diag: PolyMatrix
    right: PolyMatrix
    divisors: DivisorSequence


def smith_form(m: PolyMatrix) -> SmithForm:
    """Smith normal form over Q[x] with transformation certificates.

    Returns L, D, R with L*D*R == m, L and R invertible over Q[x] (nonzero
    scalar determinants) and D diagonal with monic divisors in descending
    divisibility order.  Raises on singular square input.
    """
    n, c = m.rows, m.cols
    if n != c:
        raise ValueError("smith_form expects a square matrix")
    work = [row[:] for row in m.entries()]
    left = [row[:] for row in PolyMatrix.identity(n).entries()]
    right = [row[:] for row in PolyMatrix.identity(n).entries()]

    def row_sub(i, k, q):
        # work_i -= q*work_k ; keep A = L*work*R by col_k(L) += q*col_i(L)
        for j in range(c):
            work[i][j] = work[i][j] - q * work[k][j]
        for r in range(n):
            left[r][k] = left[r][k] + q * left[r][i]

    def col_sub(j, k, q):
        # col_j(work) -= q*col_k(work) ; row_k(R) += q*row_j(R)
        for i in range(n):
            work[i][j] = work[i][j] - q * work[i][k]
        for s in range(c):
            right[k][s] = right[k][s] + q * right[j][s]

    def row_swap(i, k):
        work[i], work[k] = work[k], work[i]
        for r in range(n):
            left[r][i], left[r][k] = left[r][k], left[r][i]

    def col_swap(j, k):
        for i in range(n):
            work[i][j], work[i][k] = work[i][k], work[i][j]
        right[j], right[k] = right[k], right[j]

    def row_add(t, i):
        # work_t += work_i ; col_i(L) -= col_t(L)
        for j in range(c):
            work[t][j] = work[t][j] + work[i][j]
        for r in range(n):
            left[r][i] = left[r][i] - left[r][t]

    for t in range(n):
        while True:
            pivot = None
            for i in range(t, n):
                for j in range(t, c):
                    e = work[i][j]
                    if e and (pivot is None or e.degree < work[pivot[0]][pivot[1]].degree):
                        pivot = (i, j)
            if pivot is None:
                raise ValueError("singular matrix")
            if pivot != (t, t):
                if pivot[0] != t:
                    row_swap(t, pivot[0])
                if pivot[1] != t:
                    col_swap(t, pivot[1])
            clean = True
            for i in range(t + 1, n):
                if work[i][t]:
                    q, r = divmod(work[i][t], work[t][t])
                    row_sub(i, t, q)
                    if r:
                        clean = False
            for j in range(t + 1, c):
                if work[t][j]:
                    q, r = divmod(work[t][j], work[t][t])
                    col_sub(j, t, q)
                    if r:
                        clean = False
            if not clean:
                continue
            # pivot now divides its (cleared) row and column; enforce global
            # divisibility on the remaining block
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, c):
                    if work[i][j] and not (work[i][j] % work[t][t]).is_zero():
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad)
        lc = work[t][t].leading()
        if lc != 1:
            # scale row t by 1/lc; col_t(L) *= lc
            for j in range(c):
                work[t][j] = work[t][j] / lc
            for r in range(n):
                left[r][t] = left[r][t] * lc

    # reverse to descending divisibility: conjugate by the flip permutation
    perm = list(reversed(range(n)))
    dia = [work[perm[i]][perm[i]] for i in range(n)]
    lmat = PolyMatrix([[left[r][perm[j]] for j in range(n)] for r in range(n)])
    rmat = PolyMatrix([[right[perm[i]][s] for s in range(c)] for i in range(n)])
    dmat = PolyMatrix.diagonal(dia)
    return SmithForm(lmat, dmat, rmat, DivisorSequence(tuple(dia)))
