"""Exact arithmetic in Q(zeta) for zeta a p-power root of unity.

Elements live in Q[y] / Phi_{p^m}(y) where Phi_{p^m} is the p^m-th
cyclotomic polynomial.  Everything in scope evaluates polynomials with
rational coefficients at points u^j*zeta - 1, so exact arithmetic over Q
suffices and no p-adic precision management is ever needed.

The p-adic valuation extends uniquely to Q(zeta) because p is totally
ramified there; it is computed through the norm, i.e. a resultant with the
cyclotomic polynomial, spread evenly over the degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .padic import POS_INF, valuation
from .polyring import RationalPoly, resultant


def euler_phi_p_power(p: int, m: int) -> int:
    return 1 if m == 0 else (p - 1) * p ** (m - 1)


def cyclotomic_poly(p: int, m: int) -> RationalPoly:
    """Phi_{p^m}: y - 1 for m = 0, else sum_k y^(k p^(m-1))."""
    if m == 0:
        return RationalPoly((-1, 1))
    step = p ** (m - 1)
    coeffs = [0] * ((p - 1) * step + 1)
    for k in range(p):
        coeffs[k * step] = 1
    return RationalPoly(coeffs)


class CyclotomicElement:
    """Residue class modulo Phi_{p^m}, represented by a reduced polynomial."""

    __slots__ = ("p", "level", "rep")

    def __init__(self, p: int, level: int, rep: RationalPoly):
        self.p = p
        self.level = level
        phi = euler_phi_p_power(p, level)
        if rep.degree >= phi:
            rep = rep % cyclotomic_poly(p, level)
        self.rep = rep

    @classmethod
    def from_rational(cls, c, p: int, level: int = 0) -> "CyclotomicElement":
        return cls(p, level, RationalPoly.constant(Fraction(c)))

    @classmethod
    def zeta(cls, p: int, level: int) -> "CyclotomicElement":
        """The chosen primitive root of unity of order p^level."""
        if level == 0:
            return cls.from_rational(1, p, 0)
        return cls(p, level, RationalPoly.x())

    def lift(self, level: int) -> "CyclotomicElement":
        """Coerce into the larger field via y -> y^(p^(level - self.level))."""
        if level == self.level:
            return self
        if level < self.level:
            raise ValueError("cannot lower the level")
        step = self.p ** (level - self.level)
        coeffs = [Fraction(0)] * (self.rep.degree * step + 1 if self.rep else 1)
        for i, c in enumerate(self.rep.coeffs):
            coeffs[i * step] = c
        return CyclotomicElement(self.p, level, RationalPoly(coeffs))

    def _pair(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicElement.from_rational(other, self.p)
        lvl = max(self.level, other.level)
        return self.lift(lvl), other.lift(lvl)

    def __add__(self, other):
        a, b = self._pair(other)
        return CyclotomicElement(a.p, a.level, a.rep + b.rep)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.p, self.level, -self.rep)

    def __sub__(self, other):
        a, b = self._pair(other)
        return CyclotomicElement(a.p, a.level, a.rep - b.rep)

    def __rsub__(self, other):
        a, b = self._pair(other)
        return CyclotomicElement(a.p, a.level, b.rep - a.rep)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement(self.p, self.level, self.rep * other)
        a, b = self._pair(other)
        return CyclotomicElement(a.p, a.level, a.rep * b.rep)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CyclotomicElement.from_rational(other, self.p)
        if not isinstance(other, CyclotomicElement):
            return NotImplemented
        a, b = self._pair(other)
        return a.rep == b.rep

    def __hash__(self):
        return hash((self.p, self.level, self.rep))

    def __repr__(self) -> str:
        return f"CyclotomicElement(p={self.p}, level={self.level}, {self.rep!r})"

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def is_rational(self) -> bool:
        return self.rep.degree <= 0

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.rep.coeff(0)


def eval_at_special_point(
    f: RationalPoly, j: int, m: int, p: int, u
) -> CyclotomicElement:
    """Evaluate f at u^j * zeta - 1 for zeta of exact order p^m.

    Computed by Horner in Q[y]/Phi_{p^m}, substituting x -> u^j*y - 1.
    """
    u = Fraction(u)
    a = u**j
    point = CyclotomicElement(p, m, RationalPoly((-1, a)))
    acc = CyclotomicElement.from_rational(0, p, m)
    for c in reversed(f.coeffs):
        acc = acc * point + c
    return acc


def cyclo_valuation(a: CyclotomicElement, p: int | None = None):
    """The unique extension of ord_p to Q(zeta_{p^m}); POS_INF for zero.

    p is totally ramified, so ord_p(a) = ord_p(Norm(a)) / phi(p^m), and the
    norm is the resultant of Phi_{p^m} with any representative.
    """
    if p is not None and p != a.p:
        raise ValueError("prime mismatch")
    p = a.p
    if a.is_zero():
        return POS_INF
    if a.is_rational():
        return valuation(a.as_rational(), p)
    phi = euler_phi_p_power(p, a.level)
    nrm = resultant(cyclotomic_poly(p, a.level), a.rep)
    return Fraction(valuation(nrm, p), phi)


@dataclass(frozen=True)
class CycloVector:
    """Coordinates of a vector of cyclotomic elements at a common level."""

    coords: tuple

    def __post_init__(self):
        levels = {c.level for c in self.coords}
        if len(levels) > 1:
            raise ValueError("coordinates at mixed levels")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def membership_in_filtration(v: CycloVector, selected_indices) -> bool:
    """True iff every coordinate outside ``selected_indices`` is exactly zero."""
    selected = set(selected_indices)
    return all(c.is_zero() for i, c in enumerate(v.coords) if i not in selected)
