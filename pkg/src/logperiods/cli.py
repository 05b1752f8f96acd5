"""Batch experiment runner over the library, with JSON/CSV reports.

Each subcommand validates its parameters, runs one experiment kind on a
deterministic grid, and emits a report whose rows carry exact rationals
(num/den) plus decimal rendering columns where useful.  Identical inputs
produce byte-identical outputs, whatever the worker pool size.  Exit code
0 means every checked identity or bound held, 1 that some check was
violated, 2 a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .iwasawa import (
    default_interval,
    det_identity_check,
    divisor_check,
    low_level_vanishing_check,
    membership_check,
    negative_start_surjectivity_check,
    run_recursion,
    slope_trace,
    theta_surjectivity_check,
)
from .lowdim import (
    dim2_interval,
    dim2_module,
    lambda_degree_check,
    pollack_diagonal_check,
    refinement_structure_report,
)
from .padic import check_odd_prime
from .periods import (
    IntervalPair,
    build_xitilde,
    check_norm_bounds,
    corrected_experimental_mu,
    expected_experimental_invariants,
    unit_quotient,
)
from .phimod import (
    FilteredPhiModule,
    Refinement,
    adapted_smith_invariants,
    hodge_polygon,
    newton_polygon,
    smith_polygon,
    strongly_divisible_check,
    weakly_admissible_check,
)
from .polyring import Interval
from .reports import decimal_str, write_report

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

KINDS = (
    "periods-invariants",
    "norm-bounds",
    "polygon-suite",
    "z-recursion",
    "dim2-pollack",
    "dim3-check",
    "divisor-check",
    "slope-trace",
)


@dataclass
class ExperimentConfig:
    kind: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    fmt: str = "json"
    figures: bool = False
    jobs: int = 1


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Experiment bodies
# ---------------------------------------------------------------------------


def _periods_cell(cell):
    p, u, n, lo, hi = cell
    pair = IntervalPair(Interval(lo, hi), Interval(lo, hi))
    x = build_xitilde(p, u, n, pair, verify=False)
    bounds = check_norm_bounds(x)
    _, rep = unit_quotient(x)
    expected = expected_experimental_invariants(p, n, pair.J.size)
    corrected = corrected_experimental_mu(p, pair.J.size)
    return {
        "p": p,
        "u": u,
        "N": None,
        "n": n,
        "J": str(pair.J),
        "Jp": str(pair.Jp),
        "degree": rep.degree,
        "mu": rep.mu,
        "lambda": rep.lam,
        "norm_log": bounds.log_norm,
        "norm_log_dec": decimal_str(bounds.log_norm),
        "bounds_ok": bounds.ok,
        "expected_degree": expected.degree,
        "expected_mu": expected.mu,
        "expected_lambda": expected.lam,
        "agree_degree": rep.degree == expected.degree,
        "agree_mu": rep.mu == expected.mu,
        "agree_lambda": rep.lam == expected.lam,
        "corrected_mu": corrected,
        "agree_mu_corrected": rep.mu == corrected,
    }


def run_periods_invariants(cfg: ExperimentConfig) -> dict:
    p, u = cfg.params["p"], cfg.params["u"]
    n_max = cfg.params["n_max"]
    if cfg.params.get("J") is not None:
        intervals = [cfg.params["J"]]
    else:
        lmin, lmax = cfg.params["lmin"], cfg.params["lmax"]
        intervals = [Interval(0, size - 1) for size in range(lmin, lmax + 1)]
    cells = [
        (p, u, n, J.lo, J.hi) for n in range(1, n_max + 1) for J in intervals
    ]
    rows = _map_cells(_periods_cell, cells, cfg.jobs)
    ok = all(
        r["bounds_ok"] and r["agree_degree"] and r["agree_lambda"] and r["agree_mu_corrected"]
        for r in rows
    )
    return {"kind": cfg.kind, "rows": rows, "ok": ok}


def _norm_bound_cell(cell):
    p, u, n, j_lo, j_hi, jp_lo, jp_hi = cell
    pair = IntervalPair(Interval(j_lo, j_hi), Interval(jp_lo, jp_hi))
    try:
        x = build_xitilde(p, u, n, pair, verify=True)
        routes_agree = True
    except AssertionError:
        x = build_xitilde(p, u, n, pair, verify=False)
        routes_agree = False
    bounds = check_norm_bounds(x)
    return {
        "p": p,
        "u": u,
        "N": None,
        "n": n,
        "J": str(pair.J),
        "Jp": str(pair.Jp),
        "degree": x.poly.degree,
        "norm_log": bounds.log_norm,
        "norm_log_dec": decimal_str(bounds.log_norm),
        "lower": bounds.lower,
        "upper": bounds.upper,
        "routes_agree": routes_agree,
        "bounds_ok": bounds.ok,
    }


def run_norm_bounds(cfg: ExperimentConfig) -> dict:
    p, u = cfg.params["p"], cfg.params["u"]
    n_max = cfg.params["n_max"]
    J = cfg.params["J"]
    fixed = cfg.params.get("Jp")
    subintervals = [fixed] if fixed is not None else J.subintervals()
    cells = []
    for n in range(1, n_max + 1):
        for jp in subintervals:
            cells.append((p, u, n, J.lo, J.hi, jp.lo, jp.hi))
    rows = _map_cells(_norm_bound_cell, cells, cfg.jobs)
    ok = all(r["bounds_ok"] and r["routes_agree"] for r in rows)
    return {"kind": cfg.kind, "rows": rows, "ok": ok}


def run_polygon_suite(cfg: ExperimentConfig) -> dict:
    module: FilteredPhiModule = cfg.params["module"]
    p = module.p
    phi = [list(r) for r in module.phi]
    newt = newton_polygon(phi, p)
    hodg = hodge_polygon(module.weights)
    smit = smith_polygon(module.phi_in_adapted_basis(), p)
    km_ok = smit.same_endpoints(newt) and smit.is_below(newt)
    sd = strongly_divisible_check(module)
    try:
        wa, cert = weakly_admissible_check(module)
        wa_note = cert.reason or "eigenline enumeration"
    except ValueError as exc:
        wa, wa_note = None, str(exc)
    adapted, invariants = adapted_smith_invariants(module)
    rows = [
        {
            "polygon": "newton",
            "slopes": list(newt.slopes),
            "vertices": [list(v) for v in newt.vertices],
        },
        {
            "polygon": "hodge_tate",
            "slopes": list(hodg.slopes),
            "vertices": [list(v) for v in hodg.vertices],
        },
        {
            "polygon": "smith",
            "slopes": list(smit.slopes),
            "vertices": [list(v) for v in smit.vertices],
        },
        {
            "polygon": "verdicts",
            "katz_mazur_ok": km_ok,
            "strongly_divisible": sd,
            "weakly_admissible": wa,
            "weakly_admissible_note": wa_note,
            "phi_adapted_basis": adapted,
            "smith_invariants": invariants,
        },
    ]
    ok = km_ok and (sd == (list(smit.slopes) == [Fraction(w) for w in module.weights]))
    report = {"kind": cfg.kind, "rows": rows, "ok": ok}
    if cfg.figures and cfg.out:
        from .figures import render_polygons

        report["figure"] = render_polygons(
            {"newton": newt, "hodge_tate": hodg, "smith": smit},
            _figure_path(cfg.out),
            title="polygon suite",
        )
    return report


def _resolve_recursion_inputs(cfg):
    module: FilteredPhiModule = cfg.params["module"]
    u = cfg.params["u"]
    J = cfg.params.get("J") or default_interval(module)
    return module, u, J


def run_z_recursion(cfg: ExperimentConfig) -> dict:
    module, u, J = _resolve_recursion_inputs(cfg)
    N, n_max = cfg.params["N"], cfg.params["n_max"]
    mode = cfg.params.get("mode", "standard")
    rows = []
    ok = True
    try:
        states = run_recursion(module, J, N, u, n_max, mode=mode)
        congruence_ok = True
    except AssertionError:
        states = run_recursion(module, J, N, u, n_max, mode=mode, check_congruence=False)
        congruence_ok = False
        ok = False
    last = states[-1]
    j_range = range(module.weights[0] + 1, module.weights[-1] + 1)
    for s in states:
        if s.n < s.N:
            continue
        det_ok = det_identity_check(s)
        rows.append({"n": s.n, "det_ok": det_ok, "congruence_ok": congruence_ok})
        ok = ok and det_ok
    membership_ok = all(
        membership_check(last, j, m) for j in j_range for m in range(N, n_max + 1)
    )
    surj = theta_surjectivity_check(module, J, N, u) if mode == "standard" else None
    neg_rows = {}
    if mode == "negativeN":
        neg_rows["low_level_vanishing"] = all(
            low_level_vanishing_check(last, j, m) for j in j_range for m in range(0, N)
        )
        neg_rows["start_surjectivity"] = negative_start_surjectivity_check(module, J, N, u)
        ok = ok and all(neg_rows.values())
    ok = ok and membership_ok and (surj is None or surj)
    rows.append(
        {
            "n": None,
            "membership_ok": membership_ok,
            "theta_surjectivity": surj,
            **neg_rows,
        }
    )
    return {"kind": cfg.kind, "rows": rows, "ok": ok, "J": str(J), "mode": mode}


def run_dim2_pollack(cfg: ExperimentConfig) -> dict:
    p, u = cfg.params["p"], cfg.params["u"]
    r, iota = cfg.params["r"], cfg.params["iota"]
    N, n_max = cfg.params["N"], cfg.params["n_max"]
    module = dim2_module(p, r, 0, iota)
    J = dim2_interval(p, r, 0)
    states = run_recursion(module, J, N, u, n_max)
    split_ok = pollack_diagonal_check(states)
    rows = []
    for s in states:
        if s.n < s.N:
            continue
        odd = [m for m in range(N, s.n + 1) if m % 2 == 1]
        even = [m for m in range(N, s.n + 1) if m % 2 == 0]
        rows.append(
            {
                "n": s.n,
                "plus_minus_ok": split_ok,
                "odd_levels": odd,
                "even_levels": even,
                "diag0_degree": s.Z[0, 0].degree,
                "diag1_degree": s.Z[1, 1].degree,
            }
        )
    return {"kind": cfg.kind, "rows": rows, "ok": split_ok, "J": str(J)}


def run_dim3_check(cfg: ExperimentConfig) -> dict:
    p, u = cfg.params["p"], cfg.params["u"]
    weights = cfg.params["weights"]
    alphas = cfg.params["alphas"]
    lams = cfg.params["lambdas"]
    N, n_max = cfg.params["N"], cfg.params["n_max"]
    upper = [
        [1, -lams[0], -lams[1]],
        [0, 1, -lams[2]],
        [0, 0, 1],
    ]
    phi = [[alphas[i] if i == j else Fraction(0) for j in range(3)] for i in range(3)]
    module = FilteredPhiModule(p, phi, tuple(weights), upper)
    ref = Refinement(linalg.identity(3), tuple(alphas), upper)
    J = cfg.params.get("J") or default_interval(module)
    states = run_recursion(module, J, N, u, n_max, refinement=ref)
    rep = refinement_structure_report(states)
    deg_ok = lambda_degree_check(module, ref, J, N, u, min(n_max, N + 1))
    rows = [
        {
            "upper_triangular": rep.upper_triangular,
            "diagonal_products": rep.diagonal_products,
            "offdiag_match": rep.offdiag_match,
            "lambda_degree_ok": deg_ok,
        }
    ]
    ok = rep.ok and deg_ok
    return {"kind": cfg.kind, "rows": rows, "ok": ok, "J": str(J)}


def run_divisor_check(cfg: ExperimentConfig) -> dict:
    module, u, J = _resolve_recursion_inputs(cfg)
    N, n_max = cfg.params["N"], cfg.params["n_max"]
    states = run_recursion(module, J, N, u, n_max)
    rep = divisor_check(states[-1])
    rows = []
    for i, (dv, ev, match) in enumerate(zip(rep.divisors, rep.expected, rep.matches)):
        rows.append(
            {
                "index": i,
                "divisor_degree": dv.degree,
                "expected_degree": ev.degree,
                "match": match,
                "asserted": rep.asserted,
            }
        )
    rows.append(
        {
            "index": None,
            "det_divisible": rep.det_divisible,
            "pair_gcd_is_mlog": rep.pair_gcd_is_mlog,
        }
    )
    return {"kind": cfg.kind, "rows": rows, "ok": rep.ok, "J": str(J)}


def run_slope_trace(cfg: ExperimentConfig) -> dict:
    module, u, J = _resolve_recursion_inputs(cfg)
    N, n_max = cfg.params["N"], cfg.params["n_max"]
    t_candidate = cfg.params.get("t_candidate", Fraction(0))
    states = run_recursion(module, J, N, u, n_max)
    tr = slope_trace(states, t_candidate)
    rows = []
    wd = module.weights[-1]
    for n, s_n in tr.records:
        rows.append(
            {
                "n": n,
                "log_norm": s_n,
                "log_norm_dec": decimal_str(s_n),
                "normalized": s_n - (Fraction(t_candidate) + wd) * n,
            }
        )
    rows.append(
        {
            "n": None,
            "t_candidate": Fraction(t_candidate),
            "bounded": tr.bounded,
            "in_brackets": tr.in_brackets,
            "brackets": {
                k: [lo, hi] for k, (lo, hi) in tr.brackets.items()
            },
        }
    )
    ok = tr.bounded and tr.in_brackets
    report = {"kind": cfg.kind, "rows": rows, "ok": ok, "J": str(J)}
    if cfg.figures and cfg.out:
        from .figures import render_slope_trace

        report["figure"] = render_slope_trace(
            tr.records, t_candidate, wd, _figure_path(cfg.out), title="slope trace"
        )
    return report


RUNNERS = {
    "periods-invariants": run_periods_invariants,
    "norm-bounds": run_norm_bounds,
    "polygon-suite": run_polygon_suite,
    "z-recursion": run_z_recursion,
    "dim2-pollack": run_dim2_pollack,
    "dim3-check": run_dim3_check,
    "divisor-check": run_divisor_check,
    "slope-trace": run_slope_trace,
}


def _map_cells(fn, cells, jobs):
    if jobs <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, cells))


def _figure_path(out_path: str) -> str:
    stem = out_path.rsplit(".", 1)[0] if "." in out_path else out_path
    return stem + ".png"


def run(config: ExperimentConfig) -> int:
    """Run one experiment, write its report, and return the exit status."""
    runner = RUNNERS.get(config.kind)
    if runner is None:
        raise UsageError(f"unknown experiment kind {config.kind!r}")
    report = runner(config)
    text = write_report(report, config.out, config.fmt)
    if not config.out:
        sys.stdout.write(text)
    return EXIT_OK if report["ok"] else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _fraction(text: str) -> Fraction:
    return Fraction(text)


def _interval(text: str) -> Interval:
    try:
        return Interval.parse(text)
    except Exception as exc:
        raise argparse.ArgumentTypeError(f"bad interval {text!r}: {exc}") from exc


def _fraction_list(text: str) -> list[Fraction]:
    return [Fraction(t) for t in text.split(",")]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logperiods",
        description="exact verification experiments for interpolated log periods",
    )
    sub = parser.add_subparsers(dest="kind", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=3, help="odd prime (default 3)")
    common.add_argument("--u", type=_fraction, default=None, help="unit u (default 1+p)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument(
        "--figures", action="store_true", help="render figures next to --out"
    )

    mod = argparse.ArgumentParser(add_help=False)
    mod.add_argument("--module", default=None, help="filtered phi-module JSON file")
    mod.add_argument("--r", type=int, default=None, help="dim-2 weight parameter")
    mod.add_argument("--ap", type=_fraction, default=Fraction(0))
    mod.add_argument("--iota", type=_fraction, default=Fraction(1))
    mod.add_argument("--interval", type=_interval, default=None, help="J as lo..hi")

    sp = sub.add_parser("periods-invariants", parents=[common])
    sp.add_argument("--nmax", type=int, default=3)
    sp.add_argument("--lmin", type=int, default=2)
    sp.add_argument("--lmax", type=int, default=4)
    sp.add_argument("--interval", type=_interval, default=None)

    sn = sub.add_parser("norm-bounds", parents=[common])
    sn.add_argument("--nmax", type=int, default=2)
    sn.add_argument("--interval", type=_interval, required=True)
    sn.add_argument("--subinterval", type=_interval, default=None)

    sub.add_parser("polygon-suite", parents=[common, mod])

    sz = sub.add_parser("z-recursion", parents=[common, mod])
    sz.add_argument("--N", type=int, default=0)
    sz.add_argument("--nmax", type=int, default=3)
    sz.add_argument("--mode", choices=("standard", "negativeN"), default="standard")

    s2 = sub.add_parser("dim2-pollack", parents=[common])
    s2.add_argument("--r", type=int, default=1)
    s2.add_argument("--iota", type=_fraction, default=Fraction(1))
    s2.add_argument("--N", type=int, default=0)
    s2.add_argument("--nmax", type=int, default=4)

    s3 = sub.add_parser("dim3-check", parents=[common])
    s3.add_argument("--weights", type=_int_list, default=[-1, 0, 1])
    s3.add_argument("--alphas", type=_fraction_list, default=_fraction_list("1/3,1,3"))
    s3.add_argument("--lambdas", type=_fraction_list, default=_fraction_list("1,2,1"))
    s3.add_argument("--interval", type=_interval, default=None)
    s3.add_argument("--N", type=int, default=1)
    s3.add_argument("--nmax", type=int, default=2)

    sd = sub.add_parser("divisor-check", parents=[common, mod])
    sd.add_argument("--N", type=int, default=0)
    sd.add_argument("--nmax", type=int, default=2)

    ss = sub.add_parser("slope-trace", parents=[common, mod])
    ss.add_argument("--N", type=int, default=0)
    ss.add_argument("--nmax", type=int, default=4)
    ss.add_argument("--t-candidate", type=_fraction, default=Fraction(0))

    return parser


def _load_module(args) -> FilteredPhiModule:
    if args.module:
        with open(args.module, "r", encoding="utf-8") as fh:
            return FilteredPhiModule.from_json_dict(json.load(fh))
    if args.r is not None:
        return dim2_module(args.p, args.r, args.ap, args.iota)
    raise UsageError("provide --module or the dim-2 parameters (--r, --ap, --iota)")


def config_from_args(args) -> ExperimentConfig:
    check_odd_prime(args.p)
    u = args.u if args.u is not None else Fraction(1 + args.p)
    params: dict = {"p": args.p, "u": u}
    kind = args.kind
    if args.figures and not args.out:
        raise UsageError("--figures requires --out")
    if kind == "periods-invariants":
        params.update(
            n_max=args.nmax, lmin=args.lmin, lmax=args.lmax, J=args.interval
        )
    elif kind == "norm-bounds":
        params.update(n_max=args.nmax, J=args.interval, Jp=args.subinterval)
    elif kind == "polygon-suite":
        params["module"] = _load_module(args)
    elif kind in ("z-recursion", "divisor-check", "slope-trace"):
        params["module"] = _load_module(args)
        params["J"] = args.interval
        params["N"] = args.N
        params["n_max"] = args.nmax
        if kind == "z-recursion":
            params["mode"] = args.mode
        if kind == "slope-trace":
            params["t_candidate"] = args.t_candidate
    elif kind == "dim2-pollack":
        params.update(r=args.r, iota=args.iota, N=args.N, n_max=args.nmax)
    elif kind == "dim3-check":
        params.update(
            weights=args.weights,
            alphas=args.alphas,
            lambdas=args.lambdas,
            J=args.interval,
            N=args.N,
            n_max=args.nmax,
        )
    return ExperimentConfig(
        kind=kind,
        params=params,
        out=args.out,
        fmt=args.format,
        figures=args.figures,
        jobs=args.jobs,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        return run(config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
