"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.  Exact tolerances throughout: every comparison is a
rational equality or inequality, never a float.
"""

import random
import time
from fractions import Fraction

import pytest

from logperiods import linalg
from logperiods.iwasawa import (
    default_interval,
    det_identity_check,
    divisor_check,
    membership_check,
    run_recursion,
    slope_trace,
    theta_surjectivity_check,
)
from logperiods.lowdim import (
    dim2_interval,
    dim2_module,
    lambda_degree_check,
    offdiag_closed_form,
    offdiag_evaluation_check,
    offdiag_sequence,
    pollack_diagonal_check,
    refinement_structure_report,
)
from logperiods.padic import beta, beta_tilde, valuation
from logperiods.periods import (
    IntervalPair,
    build_xitilde,
    check_norm_bounds,
    corrected_experimental_mu,
    expected_experimental_invariants,
    unit_quotient,
    valuation_at_higher_level,
)
from logperiods.phimod import (
    FilteredPhiModule,
    Refinement,
    newton_polygon,
    smith_polygon,
    smith_valuations,
    strongly_divisible_check,
    weakly_admissible_check,
)
from logperiods.polyring import Interval, RationalPoly

F = Fraction


def _report(label: str, ok: bool, t0: float) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"{label}: {status} ({time.monotonic() - t0:.1f}s)")


def _grid_intervals():
    for start in (-1, 0):
        for size in (1, 2, 3, 4):
            yield Interval(start, start + size - 1)


@pytest.fixture(scope="module")
def xitilde_grid():
    """All verified constructions on the shared grid of criteria 1-4."""
    t0 = time.monotonic()
    cells = []
    for p in (3, 5):
        u = F(1 + p)
        for n in (1, 2, 3):
            for J in _grid_intervals():
                for Jp in J.subintervals():
                    pair = IntervalPair(J, Jp)
                    x = build_xitilde(p, u, n, pair, verify=True)
                    cells.append(x)
    return cells, time.monotonic() - t0


@pytest.fixture(scope="module")
def recursion_instances():
    """The criterion-8 instances: dim 2 (both reduction types) and dim 3."""
    u = F(4)
    supersingular = dim2_module(3, 1, 0, 1)
    ordinary = dim2_module(3, 1, 7, 2)
    phi3 = [[F(1, 3), 1, 0], [0, 1, 1], [F(1, 3), 0, 1]]
    dim3 = FilteredPhiModule(3, phi3, (-1, 0, 0))
    out = {}
    for name, module in (
        ("dim2-supersingular", supersingular),
        ("dim2-ordinary", ordinary),
        ("dim3", dim3),
    ):
        J = default_interval(module)
        for N in (0, 1):
            out[name, N] = (module, J, run_recursion(module, J, N, u, 4))
    return out


def test_criterion_1_route_agreement(xitilde_grid):
    # both constructions agree exactly and every congruence has remainder
    # zero on the full grid: build_xitilde(verify=True) raises otherwise,
    # so reaching here with all cells constructed is the criterion
    t0 = time.monotonic()
    cells, elapsed = xitilde_grid
    expected_cells = 2 * 3 * 2 * (2 + 4 + 7 + 11)  # p, n, start, subintervals
    ok = len(cells) == expected_cells and elapsed < 60
    _report(f"criterion 1 (route agreement, {len(cells)} cells, grid {elapsed:.1f}s)", ok, t0)
    assert len(cells) == expected_cells
    assert elapsed < 60, f"grid took {elapsed:.1f}s, target < 60s"


def test_criterion_2_norm_bounds(xitilde_grid):
    t0 = time.monotonic()
    cells, _ = xitilde_grid
    violations = [x for x in cells if not check_norm_bounds(x).ok]
    _report("criterion 2 (norm bound suite)", not violations, t0)
    assert not violations


def test_criterion_3_unit_quotients(xitilde_grid):
    t0 = time.monotonic()
    cells, _ = xitilde_grid
    checked = 0
    ok = True
    for x in cells:
        if x.pair.Jp.is_empty() or x.n == 0:
            continue
        v, rep = unit_quotient(x)  # asserts the zero remainder internally
        if beta_tilde(x.pair.J.size, x.p) == 0:
            checked += 1
            if rep.mu != 0 or valuation(v.coeff(0), x.p) != 0:
                ok = False
            if any(valuation(c, x.p) < 0 for c in v.coeffs if c):
                ok = False
    _report(f"criterion 3 (unit quotients, {checked} beta-tilde-zero cells)", ok, t0)
    assert ok and checked > 0


def test_criterion_4_experimental_invariants(xitilde_grid):
    # the published deg and lambda formulas agree on every cell; the
    # published mu formula disagrees exactly on the |J| = p cells, where
    # the proven norm bound forces the factorial variant instead (which
    # the measurements match everywhere); disagreements are surfaced
    t0 = time.monotonic()
    cells, _ = xitilde_grid
    deg_ok = lam_ok = True
    mu_disagreements = set()
    corrected_ok = True
    rows = 0
    for x in cells:
        if not x.pair.full or x.n == 0 or not 2 <= x.pair.J.size <= 4:
            continue
        rows += 1
        _, rep = unit_quotient(x)
        exp = expected_experimental_invariants(x.p, x.n, x.pair.J.size)
        deg_ok = deg_ok and rep.degree == exp.degree
        lam_ok = lam_ok and rep.lam == exp.lam
        if rep.mu != exp.mu:
            mu_disagreements.add((x.p, x.pair.J.size))
        if rep.mu != corrected_experimental_mu(x.p, x.pair.J.size):
            corrected_ok = False
    surfaced = mu_disagreements == {(3, 3)}
    ok = deg_ok and lam_ok and corrected_ok and surfaced
    _report(
        f"criterion 4 (experimental invariants, {rows} rows; "
        f"published-mu disagreements surfaced at {sorted(mu_disagreements)})",
        ok,
        t0,
    )
    assert deg_ok and lam_ok
    assert corrected_ok, "measured mu must equal -ord_p((|J|-1)!) everywhere"
    assert surfaced, f"unexpected disagreement pattern: {mu_disagreements}"


def test_criterion_5_valuation_lemma():
    t0 = time.monotonic()
    p, u = 3, F(4)
    checked = 0
    ok = True
    for n in (1, 2):
        for m in (n + 1, n + 2):
            for J in (Interval(0, 0), Interval(-1, 0), Interval(0, 1)):
                if beta_tilde(J.size, p) != 0:
                    continue
                for Jp in J.subintervals(include_empty=False):
                    x = build_xitilde(p, u, n, IntervalPair(J, Jp), verify=False)
                    for k in (-1, 0, 1):
                        rep = valuation_at_higher_level(x, k, m)
                        checked += 1
                        expected = F(Jp.size, p ** (m - n))
                        if not (rep.exact and rep.ok and rep.value == expected):
                            ok = False
    elapsed = time.monotonic() - t0
    _report(f"criterion 5 (valuation lemma equality, {checked} points)", ok and elapsed < 120, t0)
    assert ok and checked > 0
    assert elapsed < 120, f"{elapsed:.1f}s, target < 120s"


def test_criterion_6_katz_mazur():
    t0 = time.monotonic()
    rng = random.Random(20240811)
    p = 3
    checked = 0
    ok = True
    while checked < 50:
        d = rng.choice((2, 3, 4))
        m = [
            [F(rng.randint(-20, 20), rng.choice((1, 2, 4, 5))) for _ in range(d)]
            for _ in range(d)
        ]
        if linalg.det(m) == 0:
            continue
        checked += 1
        sp = smith_polygon(m, p)
        np_ = newton_polygon(m, p)
        if not (sp.same_endpoints(np_) and sp.is_below(np_)):
            ok = False
    _report(f"criterion 6 (Katz-Mazur, {checked} matrices)", ok, t0)
    assert ok


def test_criterion_7_dim2_module():
    t0 = time.monotonic()
    ok = True
    for p, r, a_p, iota in ((3, 1, 0, 1), (3, 2, 0, 1), (3, 1, 3, 2), (5, 2, 5, 2)):
        d = dim2_module(p, r, a_p, iota)
        if not strongly_divisible_check(d):
            ok = False
        if smith_valuations(d.phi_in_adapted_basis(), p) != [F(-r), F(0)]:
            ok = False
    wa, cert = weakly_admissible_check(dim2_module(3, 1, 0, 1))
    ok = ok and wa and cert.endpoints_equal
    _report("criterion 7 (dim-2 module invariants)", ok, t0)
    assert ok


def test_criterion_8_z_recursion_suite(recursion_instances):
    t0 = time.monotonic()
    u = F(4)
    ok = True
    for (name, N), (module, J, states) in recursion_instances.items():
        # congruences were asserted during construction (advance raises)
        for s in states:
            if s.n >= s.N and not det_identity_check(s):
                ok = False
        last = states[-1]
        for j in range(module.weights[0] + 1, module.weights[-1] + 1):
            for m in range(N, 5):
                if not membership_check(last, j, m):
                    ok = False
        if not theta_surjectivity_check(module, J, N, u):
            ok = False
    elapsed = time.monotonic() - t0
    _report(f"criterion 8 (recursion suite, {len(recursion_instances)} runs)", ok, t0)
    assert ok
    assert elapsed < 600, f"{elapsed:.1f}s, target < 10 min"


def test_criterion_9_pollack_structure(recursion_instances):
    t0 = time.monotonic()
    ok = True
    for N in (0, 1):
        _, _, states = recursion_instances["dim2-supersingular", N]
        if not pollack_diagonal_check(states):
            ok = False
    _report("criterion 9 (plus/minus diagonal structure)", ok, t0)
    assert ok


def test_criterion_10_divisor_theorem():
    t0 = time.monotonic()
    u = F(4)
    ok = True
    instances = [
        dim2_module(3, 1, 0, 1),
        dim2_module(3, 2, 0, 1),
        FilteredPhiModule(3, [[F(1, 3), 1, 0], [0, 1, 1], [F(1, 3), 0, 1]], (-1, 0, 0)),
    ]
    for module in instances:
        J = default_interval(module)
        if beta_tilde(J.size, module.p) != 0:
            ok = False  # the instances are chosen to make the claim assertable
            continue
        states = run_recursion(module, J, 0, u, 3)
        rep = divisor_check(states[-1])
        if not (rep.det_divisible and rep.asserted and all(rep.matches)):
            ok = False
    _report("criterion 10 (elementary divisors at truncation)", ok, t0)
    assert ok


def test_criterion_11_slope_brackets(recursion_instances):
    t0 = time.monotonic()
    ok = True
    for (name, N), (module, J, states) in recursion_instances.items():
        tr = slope_trace(states, 0)
        if not (tr.bounded and tr.in_brackets):
            ok = False
        if "smith" not in tr.brackets:
            ok = False  # all instances are strongly divisible, brackets apply
    _report("criterion 11 (slope trace brackets, t = 0)", ok, t0)
    assert ok


def test_criterion_12_refinement_mode():
    t0 = time.monotonic()
    p, u = 3, F(4)
    ok = True
    # recursion matches closed form; evaluations are -nu^(m+1)
    pair = IntervalPair(Interval(0, 0), Interval(0, 0))
    for nu in (F(-1), F(2, 3), F(5)):
        seq = offdiag_sequence(p, u, pair, 1, 3, nu)
        for n, f_n in zip(range(1, 4), seq):
            if f_n != offdiag_closed_form(p, u, pair, 1, n, nu):
                ok = False
    if not offdiag_evaluation_check(p, u, pair, 1, 3, F(-1)):
        ok = False
    if not offdiag_evaluation_check(p, u, pair, 0, 2, F(2)):
        ok = False
    # dim-3 entrywise structure and the unipotent-degree bound
    upper = [[1, -1, -2], [0, 1, -1], [0, 0, 1]]
    mod3 = FilteredPhiModule(p, [[F(1, 3), 0, 0], [0, 1, 0], [0, 0, 3]], (-1, 0, 1), upper)
    ref3 = Refinement(linalg.identity(3), (F(1, 3), F(1), F(3)), upper)
    J3 = default_interval(mod3)
    states = run_recursion(mod3, J3, 1, u, 3, refinement=ref3)
    rep = refinement_structure_report(states)
    if not (rep.upper_triangular and rep.diagonal_products and rep.offdiag_match):
        ok = False
    if not lambda_degree_check(mod3, ref3, J3, 1, u, 2):
        ok = False
    # dim-2 refined instance: degree bound again, and membership
    lam = F(3)
    ref2 = Refinement(linalg.identity(2), (F(1, 3), F(2)), [[1, -lam], [0, 1]])
    mod2 = FilteredPhiModule(p, [[F(1, 3), 0], [0, 2]], (-1, 0), [[1, -lam], [0, 1]])
    J2 = default_interval(mod2)
    if not lambda_degree_check(mod2, ref2, J2, 1, u, 2):
        ok = False
    states2 = run_recursion(mod2, J2, 1, u, 3, refinement=ref2)
    rep2 = refinement_structure_report(states2)
    ok = ok and rep2.ok
    _report("criterion 12 (refinement recursion and degree bounds)", ok, t0)
    assert ok
