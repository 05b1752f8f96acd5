"""Filtered phi-modules: polygons, strong divisibility, admissibility.

A filtered phi-module is carried as an invertible rational matrix for phi
in some ambient coordinates, an increasing list of integer weights, and an
invertible basis matrix whose i-th column is the i-th adapted basis
vector: the j-th filtration step is the span of the columns whose weight
is at least j.  The three polygons (Newton, Hodge-Tate, Smith) are exact
convex polygons with rational vertex heights, so every comparison in the
classical numerical criteria is decidable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .padic import check_odd_prime, valuation
from .polyring import RationalPoly

# ---------------------------------------------------------------------------
# Polygons
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polygon:
    """Lower-convex polygon from (0,0) given by its nondecreasing slopes."""

    slopes: tuple

    def __post_init__(self):
        s = tuple(Fraction(v) for v in self.slopes)
        object.__setattr__(self, "slopes", s)
        if any(a > b for a, b in zip(s, s[1:])):
            raise ValueError("slopes must be nondecreasing")

    @property
    def vertices(self) -> tuple:
        out = [(0, Fraction(0))]
        acc = Fraction(0)
        for i, s in enumerate(self.slopes, start=1):
            acc += s
            out.append((i, acc))
        return tuple(out)

    @property
    def endpoint(self) -> tuple:
        return self.vertices[-1]

    def partial_sums(self) -> list[Fraction]:
        out, acc = [], Fraction(0)
        for s in self.slopes:
            acc += s
            out.append(acc)
        return out

    def is_below(self, other: "Polygon") -> bool:
        """Below = every partial sum is <= the other's (same length)."""
        if len(self.slopes) != len(other.slopes):
            raise ValueError("polygons of different widths")
        return all(a <= b for a, b in zip(self.partial_sums(), other.partial_sums()))

    def same_endpoints(self, other: "Polygon") -> bool:
        return self.endpoint == other.endpoint


def lower_convex_slopes(points) -> list[Fraction]:
    """Slopes (one per unit abscissa) of the lower hull of (i, height) points.

    Points with infinite height are simply omitted; the first and last
    abscissas must carry finite heights.
    """
    pts = sorted((i, Fraction(h)) for i, h in points)
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point if it lies on or above the new chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = (y2 - y1) / (x2 - x1)
        slopes.extend([s] * (x2 - x1))
    return slopes


# ---------------------------------------------------------------------------
# Filtered phi-modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FilteredPhiModule:
    """phi matrix (ambient coordinates), sorted weights, adapted basis columns."""

    p: int
    phi: tuple
    weights: tuple
    basis: tuple = None

    def __post_init__(self):
        check_odd_prime(self.p)
        phi = tuple(tuple(Fraction(v) for v in row) for row in self.phi)
        object.__setattr__(self, "phi", phi)
        ws = tuple(int(w) for w in self.weights)
        if list(ws) != sorted(ws):
            raise ValueError("weights must be nondecreasing")
        object.__setattr__(self, "weights", ws)
        d = len(phi)
        if len(ws) != d:
            raise ValueError("weights/dimension mismatch")
        basis = self.basis
        if basis is None:
            basis = linalg.identity(d)
        basis = tuple(tuple(Fraction(v) for v in row) for row in basis)
        object.__setattr__(self, "basis", basis)
        if linalg.det(phi) == 0:
            raise ValueError("phi must be invertible")
        if linalg.det(basis) == 0:
            raise ValueError("basis must be invertible")

    @property
    def dim(self) -> int:
        return len(self.weights)

    def phi_in_adapted_basis(self) -> list[list[Fraction]]:
        b = [list(r) for r in self.basis]
        return linalg.mat_mul(linalg.mat_mul(linalg.inverse(b), [list(r) for r in self.phi]), b)

    def fil_indices(self, j: int) -> list[int]:
        """Indices of adapted basis vectors spanning the j-th filtration step."""
        return [i for i, w in enumerate(self.weights) if w >= j]

    def fil_dim(self, j: int) -> int:
        return len(self.fil_indices(j))

    def fil_basis_columns(self, j: int) -> list[list[Fraction]]:
        cols = []
        for i in self.fil_indices(j):
            cols.append([self.basis[r][i] for r in range(self.dim)])
        return cols

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "dim": self.dim,
            "phi": [[_frac_str(v) for v in row] for row in self.phi],
            "weights": list(self.weights),
            "basis": [[_frac_str(v) for v in row] for row in self.basis],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FilteredPhiModule":
        phi = [[Fraction(v) for v in row] for row in data["phi"]]
        basis = data.get("basis")
        if basis is not None:
            basis = [[Fraction(v) for v in row] for row in basis]
        mod = cls(data["p"], phi, tuple(data["weights"]), basis)
        if "dim" in data and data["dim"] != mod.dim:
            raise ValueError("declared dimension does not match the matrix")
        return mod


def _frac_str(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# The three polygons
# ---------------------------------------------------------------------------


def newton_polygon(phi, p: int) -> Polygon:
    """Newton polygon of det(1 - x phi): ascending eigenvalue valuations."""
    phi = linalg.mat(phi)
    if linalg.det(phi) == 0:
        raise ValueError("phi must be invertible")
    chi = linalg.charpoly(phi)
    d = len(phi)
    # det(1 - x phi) has x^i coefficient equal to the t^(d-i) coefficient of chi
    pts = []
    for i in range(d + 1):
        c = chi.coeff(d - i)
        if c != 0:
            pts.append((i, valuation(c, p)))
    return Polygon(tuple(lower_convex_slopes(pts)))


def hodge_polygon(weights) -> Polygon:
    ws = tuple(int(w) for w in weights)
    if list(ws) != sorted(ws):
        raise ValueError("weights must be sorted")
    return Polygon(ws)


def smith_valuations(m, p: int) -> list[Fraction]:
    """Valuations of the p-power elementary divisors, by valuation pivoting.

    The matrix is understood over the local ring of p-integral rationals;
    entries may have negative valuation (the classical extension by a
    p-power denominator).
    """
    work = [row[:] for row in linalg.mat(m)]
    n = len(work)
    if linalg.det(work) == 0:
        raise ValueError("singular matrix")
    vals = []
    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                if work[i][j] == 0:
                    continue
                v = valuation(work[i][j], p)
                if best is None or v < best[0]:
                    best = (v, i, j)
        v, bi, bj = best
        work[t], work[bi] = work[bi], work[t]
        for row in work:
            row[t], row[bj] = row[bj], row[t]
        vals.append(v)
        piv = work[t][t]
        for i in range(t + 1, n):
            if work[i][t]:
                f = work[i][t] / piv  # p-integral by pivot minimality
                for k in range(t, n):
                    work[i][k] -= f * work[t][k]
        for j in range(t + 1, n):
            if work[t][j]:
                f = work[t][j] / piv
                for i in range(t, n):
                    work[i][j] -= f * work[i][t]
    return sorted(vals)


def smith_polygon(m, p: int) -> Polygon:
    return Polygon(tuple(smith_valuations(m, p)))


# ---------------------------------------------------------------------------
# Strong divisibility and the numerical admissibility criterion
# ---------------------------------------------------------------------------


def strongly_divisible_check(d: FilteredPhiModule) -> bool:
    """True iff phi composed with the inverse weight scaling preserves the lattice.

    In the adapted basis this is the matrix phi_B * diag(p^-w_i): all entries
    p-integral and determinant a p-unit.
    """
    m = d.phi_in_adapted_basis()
    p = d.p
    scaled = [
        [m[i][j] * Fraction(p) ** (-d.weights[j]) for j in range(d.dim)]
        for i in range(d.dim)
    ]
    if any(valuation(e, p) < 0 for row in scaled for e in row if e != 0):
        return False
    return valuation(linalg.det(scaled), p) == 0


def adapted_smith_invariants(d: FilteredPhiModule):
    """Per-basis-vector Smith invariants when the basis is phi-adapted.

    The basis is adapted to phi exactly when the column minimal valuations
    of phi in the adapted basis sum to the valuation of det(phi); the
    invariants are then those column minima, paired with the weights.
    Returns (adapted, invariants or None).
    """
    m = d.phi_in_adapted_basis()
    p = d.p
    cols = []
    for j in range(d.dim):
        vs = [valuation(m[i][j], p) for i in range(d.dim) if m[i][j] != 0]
        if not vs:
            raise ValueError("phi has a zero column")
        cols.append(min(vs))
    if sum(cols) == valuation(linalg.det(m), p):
        return True, cols
    return False, None


@dataclass
class AdmissibilityCertificate:
    endpoints_equal: bool
    checked_subspaces: list = field(default_factory=list)
    ok: bool = False
    reason: str = ""


def _rational_eigenvalues(chi: RationalPoly, p: int):
    """All rational roots with multiplicity, or None if factoring fails.

    Uses the rational-root theorem on the primitive integer form, with
    divisor enumeration by trial division (ample for the matrices in scope).
    """
    den = math.lcm(*(c.denominator for c in chi.coeffs))
    ints = [int(c * den) for c in chi.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    ints = [c // g for c in ints]
    roots = []
    work = RationalPoly(ints)
    while work.degree > 0:
        root = _find_rational_root(work)
        if root is None:
            break
        roots.append(root)
        work = work.exact_div(RationalPoly((-root, 1)))
    return roots, work


def _divisors(n: int, limit: int = 10**6):
    n = abs(n)
    out = set()
    f = 1
    while f * f <= n and f <= limit:
        if n % f == 0:
            out.add(f)
            out.add(n // f)
        f += 1
    if f * f <= n:  # incomplete enumeration beyond the trial limit
        return None
    return sorted(out)


def _find_rational_root(f: RationalPoly):
    a0 = int(f.coeff(0))
    ad = int(f.leading())
    if a0 == 0:
        return Fraction(0)
    ps = _divisors(a0)
    qs = _divisors(ad)
    if ps is None or qs is None:
        return None
    for num in ps:
        for den in qs:
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if f(cand) == 0:
                    return cand
    return None


def _eigenvector(phi, alpha) -> list[Fraction]:
    n = len(phi)
    m = [[phi[i][j] - (alpha if i == j else 0) for j in range(n)] for i in range(n)]
    # nullspace vector by Gaussian elimination
    rows, pivots = [row[:] for row in m], []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [e * inv for e in rows[r]]
        for i in range(n):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [e - f * g for e, g in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = next(c for c in range(n) if c not in pivots)
    v = [Fraction(0)] * n
    v[free] = Fraction(1)
    for row_idx, c in enumerate(pivots):
        v[c] = -rows[row_idx][free]
    return v


def induced_weights(d: FilteredPhiModule, vectors) -> list[int]:
    """Hodge-Tate weights of a subspace, via intersection dimensions."""
    s = len(vectors)
    lo, hi = d.weights[0], d.weights[-1]
    dims = {}
    for j in range(lo, hi + 2):
        fil_cols = d.fil_basis_columns(j)
        if not fil_cols:
            dims[j] = 0
            continue
        stacked = [list(v) for v in vectors] + [list(c) for c in fil_cols]
        dims[j] = s + len(fil_cols) - linalg.rank(stacked)
    out = []
    for j in range(lo, hi + 1):
        out.extend([j] * (dims[j] - dims[j + 1]))
    return sorted(out)


def weakly_admissible_check(d: FilteredPhiModule):
    """Numerical admissibility criterion with an explicit certificate.

    Checks (1) equality of the Hodge-Tate and Newton endpoints and (2) for
    every phi-stable subspace spanned by eigenvectors, that the induced
    Hodge-Tate polygon lies below the Newton polygon of the restriction.
    Supported phi shapes: distinct rational eigenvalues (any dimension), or
    irreducible characteristic polynomial in dimension <= 3 (where the only
    stable subspaces are trivial).  Anything else raises.
    """
    p = d.p
    phi = [list(r) for r in d.phi]
    cert = AdmissibilityCertificate(endpoints_equal=False)
    newt = newton_polygon(phi, p)
    hodg = hodge_polygon(d.weights)
    cert.endpoints_equal = newt.same_endpoints(hodg)
    if not cert.endpoints_equal:
        cert.ok = False
        cert.reason = "endpoint mismatch"
        return False, cert
    chi = linalg.charpoly(phi)
    roots, rest = _rational_eigenvalues(chi, p)
    if not roots:
        if d.dim <= 3 and rest.degree == d.dim:
            # irreducible characteristic polynomial: no proper stable subspaces
            cert.ok = hodg.is_below(newt)
            cert.reason = "irreducible characteristic polynomial"
            cert.checked_subspaces.append(("full", cert.ok))
            return cert.ok, cert
        raise ValueError("unsupported phi shape: no rational eigenvalues in dim > 3")
    if rest.degree > 0:
        raise ValueError("unsupported phi shape: partially rational spectrum")
    if len(set(roots)) != len(roots):
        raise ValueError("unsupported phi shape: repeated eigenvalues")
    eigvecs = [_eigenvector(phi, a) for a in roots]
    ok = True
    for mask in range(1, 2 ** len(roots)):
        sel = [i for i in range(len(roots)) if mask >> i & 1]
        vecs = [eigvecs[i] for i in sel]
        sub_newton = Polygon(tuple(sorted(valuation(roots[i], p) for i in sel)))
        sub_hodge = Polygon(tuple(induced_weights(d, vecs)))
        below = sub_hodge.is_below(sub_newton)
        cert.checked_subspaces.append((tuple(sel), below))
        ok = ok and below
    cert.ok = ok
    return ok, cert


# ---------------------------------------------------------------------------
# Refinements and Tate twists
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Refinement:
    """Eigenbasis with its eigenvalues and the unipotent change of basis.

    The columns of ``eigen_basis`` are eigenvectors (ambient coordinates)
    whose leading spans form the phi-stable flag; ``upper`` is the unipotent
    upper-triangular matrix expressing the adapted basis in the eigenbasis.
    """

    eigen_basis: tuple
    eigenvalues: tuple
    upper: tuple

    def __post_init__(self):
        eb = tuple(tuple(Fraction(v) for v in row) for row in self.eigen_basis)
        ev = tuple(Fraction(v) for v in self.eigenvalues)
        up = tuple(tuple(Fraction(v) for v in row) for row in self.upper)
        object.__setattr__(self, "eigen_basis", eb)
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "upper", up)
        n = len(ev)
        for i in range(n):
            if up[i][i] != 1:
                raise ValueError("change of basis must be unipotent")
            for j in range(i):
                if up[i][j] != 0:
                    raise ValueError("change of basis must be upper triangular")

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def ratio(self, i: int, j: int) -> Fraction:
        return self.eigenvalues[i] / self.eigenvalues[j]


def refinement_check(d: FilteredPhiModule, r: Refinement) -> bool:
    """Stability of the flag plus the two exact intersection conditions."""
    if len(set(d.weights)) != d.dim:
        raise ValueError("refinement machinery requires distinct weights")
    phi = [list(row) for row in d.phi]
    n = d.dim
    eb = [list(row) for row in r.eigen_basis]
    for i in range(n):
        col = [eb[row][i] for row in range(n)]
        img = linalg.mat_vec(phi, col)
        if img != [r.eigenvalues[i] * c for c in col]:
            return False
    # the adapted basis must be the eigenbasis times the unipotent matrix
    adapted = linalg.mat_mul(eb, [list(row) for row in r.upper])
    if adapted != [list(row) for row in d.basis]:
        return False
    for i in range(1, n + 1):
        flag = [[eb[row][c] for row in range(n)] for c in range(i)]
        t_i = d.weights[i - 1]
        if _intersection_dim(flag, d.fil_basis_columns(t_i), n) == 0:
            return False
        if _intersection_dim(flag, d.fil_basis_columns(t_i + 1), n) != 0:
            return False
    return True


def _intersection_dim(cols_a, cols_b, n: int) -> int:
    if not cols_a or not cols_b:
        return 0
    stacked = [list(c) for c in cols_a] + [list(c) for c in cols_b]
    return len(cols_a) + len(cols_b) - linalg.rank(stacked)


def unipotent_commutator(r: Refinement) -> list[list[Fraction]]:
    """P V P^-1 V^-1 for P the unipotent matrix and V = diag(eigenvalues).

    The generated lattice is strongly divisible exactly when this matrix is
    p-integral with unit determinant; its entries are the classical explicit
    valuation conditions on the unipotent coefficients.
    """
    n = r.dim
    pmat = [list(row) for row in r.upper]
    v = [[r.eigenvalues[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    vinv = [[1 / r.eigenvalues[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    return linalg.mat_mul(
        linalg.mat_mul(linalg.mat_mul(pmat, v), linalg.inverse(pmat)), vinv
    )


def tate_twist(d: FilteredPhiModule, i: int) -> FilteredPhiModule:
    """Shift weights by i and scale phi by p^i; the basis is unchanged."""
    scale = Fraction(d.p) ** i
    phi = tuple(tuple(v * scale for v in row) for row in d.phi)
    return FilteredPhiModule(d.p, phi, tuple(w + i for w in d.weights), d.basis)
