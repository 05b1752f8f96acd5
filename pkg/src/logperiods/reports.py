"""Deterministic report serialization: JSON and CSV with exact rationals.

Rationals never pass through floats: JSON carries them as ["num", "den"]
string pairs, CSV as "num/den" strings, optionally accompanied by a
decimal rendering column.  Identical inputs produce byte-identical files
(sorted keys, fixed separators, trailing newline, no timestamps).
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .polyring import Interval, RationalPoly


def frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def frac_pair(q) -> list[str]:
    q = Fraction(q)
    return [str(q.numerator), str(q.denominator)]


def decimal_str(q, places: int = 6) -> str:
    q = Fraction(q)
    scaled = round(q * 10**places)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, frac = divmod(scaled, 10**places)
    return f"{sign}{whole}.{str(frac).zfill(places)}"


def poly_coeff_strings(f: RationalPoly) -> list[str]:
    return [frac_str(c) for c in f.coeffs]


def json_value(v):
    """Render a report cell for the JSON output."""
    if v is None or isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, Fraction):
        return frac_pair(v)
    if isinstance(v, float):  # only the +-inf sentinels ever reach here
        return repr(v)
    if isinstance(v, Interval):
        return str(v)
    if isinstance(v, RationalPoly):
        return poly_coeff_strings(v)
    if isinstance(v, (list, tuple)):
        return [json_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): json_value(x) for k, x in sorted(v.items())}
    raise TypeError(f"cannot serialize {type(v)!r}")


def csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, str)):
        return str(v)
    if isinstance(v, Fraction):
        return frac_str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Interval):
        return str(v)
    # nested values: compact canonical JSON
    return json.dumps(json_value(v), sort_keys=True, separators=(",", ":"))


def render_json(report: dict) -> str:
    return json.dumps(json_value(report), sort_keys=True, indent=2) + "\n"


def render_csv(rows: list[dict]) -> str:
    fieldnames = []
    for row in rows:
        for key in row:
            if key not in fieldnames:
                fieldnames.append(key)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: csv_value(v) for k, v in row.items()})
    return buf.getvalue()


def write_report(report: dict, out_path: str | None, fmt: str) -> str:
    """Serialize and optionally write; returns the rendered text."""
    if fmt == "json":
        text = render_json(report)
    elif fmt == "csv":
        text = render_csv(report["rows"])
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def zstate_json(state) -> dict:
    """ZState as JSON: polynomial entries as coefficient arrays of num/den strings."""
    return {
        "p": state.p,
        "u": frac_str(state.u),
        "J": str(state.J),
        "N": state.N,
        "n": state.n,
        "mode": state.mode,
        "basis": state.basis_label,
        "Z": [
            [poly_coeff_strings(state.Z[i, j]) for j in range(state.Z.cols)]
            for i in range(state.Z.rows)
        ],
    }
