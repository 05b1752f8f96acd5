"""The level-by-level operator recursion attached to a filtered phi-module.

At each level the diagonal operator multiplying the weight-i component by
the interpolated period for the interval pair (]w_i, w_d] in J) is
conjugated by the (n+1)-st power of phi and composed with the previous
state.  Everything is exact: congruences between consecutive levels,
determinant identities, membership of the columns in the logarithmic
module, elementary-divisor comparisons, and slope traces are all checked
by zero-remainder or rational comparisons.

States are immutable; `advance` returns the next one.  The initial state
sits one level below the first applied operator: identity for the standard
mode, the omega product times the identity for the negative-start mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .cyclotomic import CyclotomicElement, eval_at_special_point
from .padic import beta_tilde, rho_level_log, valuation
from .periods import IntervalPair, xitilde_poly
from .phimod import (
    FilteredPhiModule,
    Refinement,
    adapted_smith_invariants,
    newton_polygon,
)
from .polyring import (
    Interval,
    PolyMatrix,
    RationalPoly,
    ShiftedForm,
    gauss_log_norm,
    mlog,
    omega_prod,
    poly_gcd,
    smith_form,
)

ONE = RationalPoly.one()
ZERO = RationalPoly.zero()


# ---------------------------------------------------------------------------
# Intervals attached to a module
# ---------------------------------------------------------------------------


def newton_slopes(module: FilteredPhiModule) -> list[Fraction]:
    return list(newton_polygon([list(r) for r in module.phi], module.p).slopes)


def top_weight_prime(module: FilteredPhiModule) -> int:
    """Least integer >= w_d whose gap to w_1 strictly exceeds the Newton spread."""
    slopes = newton_slopes(module)
    spread = slopes[-1] - slopes[0]
    w1, wd = module.weights[0], module.weights[-1]
    candidate = w1 + spread
    strict = candidate.numerator // candidate.denominator + 1
    return max(wd, strict)


def default_interval(module: FilteredPhiModule) -> Interval:
    """The canonical choice ]w_1, top_weight_prime]."""
    return Interval.open_closed(module.weights[0], top_weight_prime(module))


def weight_pair(module: FilteredPhiModule, i: int, J: Interval) -> IntervalPair:
    """Interval pair ]w_i, w_d] inside J attached to the i-th basis vector."""
    return IntervalPair(J, Interval.open_closed(module.weights[i], module.weights[-1]))


def theta_operator(module: FilteredPhiModule, n: int, J: Interval, u) -> PolyMatrix:
    """Diagonal operator in the adapted basis at level n.

    Raises when J does not contain ]w_1, top_weight_prime] (the convergence
    hypothesis |J| > Newton spread would fail).
    """
    required = default_interval(module)
    if not J.contains_interval(required):
        raise ValueError(f"J = {J} must contain {required}")
    u = Fraction(u)
    diag = []
    for i in range(module.dim):
        pr = weight_pair(module, i, J)
        diag.append(ONE if pr.Jp.is_empty() else xitilde_poly(module.p, u, n, pr))
    return PolyMatrix.diagonal(diag)


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZState:
    """One level of the recursion; Z is a matrix over Q[x] in `basis_label`."""

    p: int
    u: Fraction
    module: FilteredPhiModule
    J: Interval
    N: int
    n: int
    Z: PolyMatrix
    mode: str = "standard"
    basis_label: str = "adapted"
    refinement: Refinement | None = None

    def phi_matrix(self) -> list[list[Fraction]]:
        if self.basis_label == "eigen":
            ev = self.refinement.eigenvalues
            return [[ev[i] if i == j else Fraction(0) for j in range(len(ev))] for i in range(len(ev))]
        return self.module.phi_in_adapted_basis()

    def theta_matrix(self, n: int) -> PolyMatrix:
        theta = theta_operator(self.module, n, self.J, self.u)
        if self.basis_label == "eigen":
            up = [list(r) for r in self.refinement.upper]
            pinv = linalg.inverse(up)
            return (
                PolyMatrix.from_scalar_matrix(up)
                * theta
                * PolyMatrix.from_scalar_matrix(pinv)
            )
        return theta


def initial_state(
    module: FilteredPhiModule, J: Interval, N: int, u, mode: str = "standard"
) -> ZState:
    """State at level N-1, before the first operator is applied.

    standard: identity.  negativeN: the omega product at level N-1 times
    the identity (N >= 1), whose values vanish at every special point of
    level below N.
    """
    u = Fraction(u)
    theta_operator(module, max(N, 0), J, u)  # validates J against the module
    d = module.dim
    if mode == "standard":
        z = PolyMatrix.identity(d)
    elif mode == "negativeN":
        if N < 1:
            raise ValueError("negativeN mode requires N >= 1")
        z = PolyMatrix.diagonal([omega_prod(J, N - 1, module.p, u)] * d)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return ZState(module.p, u, module, J, N, N - 1, z, mode=mode)


def refinement_initial_state(
    module: FilteredPhiModule, refinement: Refinement, J: Interval, N: int, u
) -> ZState:
    """Identity start in the eigenbasis, with the convergence hypothesis checked."""
    u = Fraction(u)
    ev = refinement.eigenvalues
    p = module.p
    spread = max(
        valuation(ev[j] / ev[i], p) for i in range(len(ev)) for j in range(i, len(ev))
    )
    if J.size <= spread:
        raise ValueError("|J| must exceed the largest eigenvalue ratio valuation")
    theta_operator(module, max(N, 0), J, u)
    return ZState(
        p,
        u,
        module,
        J,
        N,
        N - 1,
        PolyMatrix.identity(module.dim),
        basis_label="eigen",
        refinement=refinement,
    )


def advance(state: ZState, check_congruence: bool = True) -> ZState:
    """Apply the level n+1 operator conjugated by phi^(n+2).

    Asserts the congruence between consecutive levels (zero remainder
    modulo the omega product one level down) unless disabled.
    """
    k = state.n + 1
    a = state.phi_matrix()
    apow = linalg.matrix_power(a, k + 1)
    ainv = linalg.matrix_power(a, -(k + 1))
    theta = state.theta_matrix(k)
    conj = (
        PolyMatrix.from_scalar_matrix(apow)
        * theta
        * PolyMatrix.from_scalar_matrix(ainv)
    )
    znew = conj * state.Z
    if check_congruence and k >= 1:
        diff = znew - state.Z
        for i in range(diff.rows):
            for j in range(diff.cols):
                shifted = ShiftedForm(diff[i, j])
                if not shifted.divisible_by_omega_prod(state.J, k - 1, state.p, state.u):
                    raise AssertionError(
                        f"level congruence failed at entry ({i},{j}), level {k}"
                    )
    return ZState(
        state.p,
        state.u,
        state.module,
        state.J,
        state.N,
        k,
        znew,
        mode=state.mode,
        basis_label=state.basis_label,
        refinement=state.refinement,
    )


def run_recursion(
    module: FilteredPhiModule,
    J: Interval,
    N: int,
    u,
    n_max: int,
    mode: str = "standard",
    refinement: Refinement | None = None,
    check_congruence: bool = True,
) -> list[ZState]:
    """All states from the initial one (level N-1) up to level n_max."""
    if refinement is not None:
        state = refinement_initial_state(module, refinement, J, N, u)
    else:
        state = initial_state(module, J, N, u, mode=mode)
    states = [state]
    while state.n < n_max:
        state = advance(state, check_congruence=check_congruence)
        states.append(state)
    return states


# ---------------------------------------------------------------------------
# Exact identities
# ---------------------------------------------------------------------------


def expected_determinant(state: ZState) -> RationalPoly:
    """Product over levels N..n and basis indices of the diagonal periods."""
    module, u = state.module, state.u
    out = ONE
    for m in range(state.N, state.n + 1):
        for i in range(module.dim):
            pr = weight_pair(module, i, state.J)
            if not pr.Jp.is_empty():
                out = out * xitilde_poly(state.p, u, m, pr)
    if state.mode == "negativeN":
        out = out * omega_prod(state.J, state.N - 1, state.p, u) ** module.dim
    return out


def det_identity_check(state: ZState) -> bool:
    return state.Z.det() == expected_determinant(state)


def evaluate_matrix(m: PolyMatrix, j: int, level: int, p: int, u) -> list[list[CyclotomicElement]]:
    return [
        [eval_at_special_point(m[i, c], j, level, p, u) for c in range(m.cols)]
        for i in range(m.rows)
    ]


def _rational_times_cyclo(a, c):
    rows, cols = len(a), len(c[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = None
            for k in range(len(c)):
                term = c[k][j] * a[i][k]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def _cyclo_times_rational(c, a):
    rows, cols = len(c), len(a[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = None
            for k in range(len(a)):
                term = c[i][k] * a[k][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def membership_check(state: ZState, j: int, level: int) -> bool:
    """Columns of phi^-(m+1) Z land in the filtration step j at level m.

    In the adapted basis this says the rows of weight < j vanish exactly at
    u^j zeta - 1.  For the eigenbasis mode the matrix is converted to the
    adapted basis first.  Levels run in [N, n]; j in ]w_1, w_d].
    """
    module = state.module
    if not state.N <= level <= state.n:
        raise ValueError("level out of range")
    if not module.weights[0] < j <= module.weights[-1]:
        raise ValueError("j out of the nontrivial weight range")
    a = state.phi_matrix()
    w = linalg.matrix_power(a, -(level + 1))
    evaluated = evaluate_matrix(state.Z, j, level, state.p, state.u)
    values = _rational_times_cyclo(w, evaluated)
    if state.basis_label == "eigen":
        up = [list(r) for r in state.refinement.upper]
        values = _cyclo_times_rational(_rational_times_cyclo(linalg.inverse(up), values), up)
    bad_rows = [i for i, wt in enumerate(module.weights) if wt < j]
    return all(values[i][c].is_zero() for i in bad_rows for c in range(module.dim))


def low_level_vanishing_check(state: ZState, j: int, level: int) -> bool:
    """negativeN mode: the whole matrix vanishes at levels below N."""
    if state.mode != "negativeN":
        raise ValueError("only meaningful in negativeN mode")
    if level > state.N - 1:
        raise ValueError("level must be below N")
    values = evaluate_matrix(state.Z, j, level, state.p, state.u)
    return all(v.is_zero() for row in values for v in row)


def theta_surjectivity_check(module: FilteredPhiModule, J: Interval, N: int, u) -> bool:
    """The recursion started one level higher evaluates to the identity at level N."""
    states = run_recursion(module, J, N + 1, u, N + 1, check_congruence=False)
    z = states[-1].Z
    p = module.p
    for j in J.members():
        values = evaluate_matrix(z, j, N, p, Fraction(u))
        for i in range(module.dim):
            for c in range(module.dim):
                expect = 1 if i == c else 0
                if values[i][c] != expect:
                    return False
    return True


def negative_start_surjectivity_check(
    module: FilteredPhiModule, J: Interval, N: int, u
) -> bool:
    """First negative-mode level factors as diag(period values) * phi-power * scalar."""
    u = Fraction(u)
    states = run_recursion(module, J, N, u, N, mode="negativeN", check_congruence=False)
    state = states[-1]
    p = module.p
    a = state.phi_matrix()
    w = linalg.matrix_power(a, -(N + 1))
    for j in J.members():
        lhs = _rational_times_cyclo(w, evaluate_matrix(state.Z, j, N, p, u))
        scalar = eval_at_special_point(omega_prod(J, N - 1, p, u), j, N, p, u)
        diag = [
            eval_at_special_point(
                ONE
                if weight_pair(module, i, J).Jp.is_empty()
                else xitilde_poly(p, u, N, weight_pair(module, i, J)),
                j,
                N,
                p,
                u,
            )
            for i in range(module.dim)
        ]
        for i in range(module.dim):
            for c in range(module.dim):
                if lhs[i][c] != diag[i] * w[i][c] * scalar:
                    return False
    return True


# ---------------------------------------------------------------------------
# Slope traces
# ---------------------------------------------------------------------------


@dataclass
class SlopeTrace:
    records: list
    t_candidate: Fraction
    bounded: bool
    brackets: dict = field(default_factory=dict)
    in_brackets: bool = True


def slope_trace(states: list[ZState], t_candidate) -> SlopeTrace:
    """Log-norm trace of phi^-(n+1) Z_n at the level radii, plus bracket checks.

    The trace records (n, s_n) with s_n the max entry log-norm at radius
    rho_0^(1/p^n).  The candidate slope t is accepted as bounded when the
    normalized sequence s_n - (t + w_d) n never exceeds its maximum over
    the first two levels (a finite-level necessary condition).  The bracket
    checks place t inside the proven slope windows.
    """
    t_candidate = Fraction(t_candidate)
    full = [s for s in states if s.n >= s.N]
    if len(full) < 2:
        raise ValueError("need at least two computed levels")
    head = full[0]
    module, p = head.module, head.p
    wd = module.weights[-1]
    records = []
    for s in full:
        a = s.phi_matrix()
        w = linalg.matrix_power(a, -(s.n + 1))
        m = PolyMatrix.from_scalar_matrix(w) * s.Z
        r_log = rho_level_log(p, s.n)
        norm = max(
            gauss_log_norm(m[i, j], p, r_log) for i in range(m.rows) for j in range(m.cols)
        )
        records.append((s.n, norm))
    normalized = [s_n - (t_candidate + wd) * n for n, s_n in records]
    cap = max(normalized[:2])
    bounded = all(c <= cap for c in normalized)
    brackets = {}
    bt = beta_tilde(head.J.size, p)
    slopes = newton_slopes(module)
    phi_b = module.phi_in_adapted_basis()
    inv_norm = max(
        -valuation(e, p) for row in linalg.inverse(phi_b) for e in row if e != 0
    )
    brackets["general"] = (slopes[0] - wd, inv_norm - module.weights[0] + bt)
    adapted, invariants = adapted_smith_invariants(module)
    if adapted:
        diffs = [s - w for s, w in zip(invariants, module.weights)]
        brackets["smith"] = (min(diffs), max(diffs) + bt)
    if head.refinement is not None:
        ev = head.refinement.eigenvalues
        upper = bt + max(valuation(a, p) for a in ev) - module.weights[0]
        brackets["refinement"] = (None, upper)
    ok = True
    for lo, hi in brackets.values():
        if lo is not None and t_candidate < lo:
            ok = False
        if hi is not None and t_candidate > hi:
            ok = False
    return SlopeTrace(records, t_candidate, bounded, brackets, ok)


# ---------------------------------------------------------------------------
# Elementary divisors at truncation level
# ---------------------------------------------------------------------------


@dataclass
class DivisorCheckReport:
    det_divisible: bool
    divisors: list
    expected: list
    matches: list
    asserted: bool
    pair_gcd_is_mlog: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.det_divisible and (not self.asserted or all(self.matches))


def mlog_power_divisor(state: ZState) -> RationalPoly:
    """Product over j of the level-window mlog for [j], to the codimension power."""
    module, u = state.module, state.u
    out = ONE
    for j in range(module.weights[0] + 1, module.weights[-1] + 1):
        e = module.dim - module.fil_dim(j)
        if e == 0:
            continue
        for m in range(state.N, state.n + 1):
            out = out * mlog(Interval(j, j), m, state.p, u) ** e
    return out


def divisor_check(state: ZState) -> DivisorCheckReport:
    """Determinant divisibility plus the Smith-divisor comparison.

    The expected i-th divisor is the product over computed levels of the
    period for the pair (]w_i, w_d] in J).  With beta_tilde(|J|) = 0 the
    comparison is asserted; otherwise the report also records, for each
    adjacent pair of expected divisors, whether their gcd equals the mlog
    product (the behaviour conjectured for the extra factors).
    """
    module, u, p = state.module, state.u, state.p
    det = state.Z.det()
    det_divisible = (det % mlog_power_divisor(state)).is_zero()
    sf = smith_form(state.Z)
    expected = []
    for i in range(module.dim):
        pr = weight_pair(module, i, state.J)
        acc = ONE
        for m in range(state.N, state.n + 1):
            if not pr.Jp.is_empty():
                acc = acc * xitilde_poly(p, u, m, pr)
        if state.mode == "negativeN":
            acc = acc * omega_prod(state.J, state.N - 1, p, u)
        expected.append(acc.monic() if not acc.is_one() else acc)
    divisors = list(sf.divisors)
    matches = [d == e for d, e in zip(divisors, expected)]
    asserted = beta_tilde(state.J.size, p) == 0
    report = DivisorCheckReport(det_divisible, divisors, expected, matches, asserted)
    if not asserted:
        for i in range(module.dim - 1):
            a, b = expected[i], expected[i + 1]
            if a.is_one() or b.is_one():
                continue
            g = poly_gcd(a, b)
            pr = weight_pair(module, i + 1, state.J)
            acc = ONE
            for m in range(state.N, state.n + 1):
                acc = acc * mlog(pr.Jp, m, p, u)
            report.pair_gcd_is_mlog.append(g == acc.monic())
    return report


def column_divisibility_check(state: ZState) -> bool:
    """Eigenbasis mode: column i is divisible by the level-window mlog product."""
    if state.basis_label != "eigen":
        raise ValueError("column divisibility applies to the eigenbasis mode")
    module, p, u = state.module, state.p, state.u
    for i in range(module.dim):
        pr = weight_pair(module, i, state.J)
        acc = ONE
        for m in range(state.N, state.n + 1):
            acc = acc * mlog(pr.Jp, m, p, u)
        for r in range(module.dim):
            if not (state.Z[r, i] % acc).is_zero():
                return False
    return True
