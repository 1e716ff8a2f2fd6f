"""Row builders and CSV/JSON writers for the command-line reports.

Exact rationals are written as "p/r" strings.  Floats are written in
shortest round-trip form, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Iterable, Sequence

from . import asymptotics as asy
from .ensemble import (
    EnsembleSpec,
    MomentReport,
    empirical_S,
    empirical_T,
    exact_M_sum,
    exact_N_sum,
)
from .lfunction import build_l, rh_roots_check
from .poly import enumerate_squarefree
from .quadvalue import QuadValue

MOMENT_COLUMNS = (
    "q", "parity", "g", "mu", "ensemble_size", "empirical_a", "empirical_b", "empirical_float",
    "predicted_float", "abs_dev", "rel_dev", "error_budget", "runtime_ms",
)
COMPONENT_COLUMNS = (
    "kind", "q", "parity", "g", "h", "m", "empirical_a", "empirical_b", "empirical_float",
    "predicted_float", "abs_dev", "normalized_dev", "error_budget",
)
GVALUE_COLUMNS = ("q", "m", "cutoff", "partial", "partial_float", "tail_bound")
ZERO_COLUMNS = ("q", "parity", "g", "D", "max_deviation", "unit_roots", "ok")
VERIFY_COLUMNS = ("suite", "passed", "detail")

NORMALIZATION = {"odd": "(ln q)^mu", "even": "(-ln q)^mu"}


def rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def real(x) -> float:
    return float(x)


def moment_rows(reports: Sequence[MomentReport], timing: bool = False) -> list[dict]:
    """One row per report; error_budget uses C fitted per (parity, mu) group over the g grid."""
    groups: dict[tuple, list[MomentReport]] = {}
    for r in reports:
        groups.setdefault((r.spec.parity, r.spec.mu), []).append(r)
    constants = {k: asy.fit_constant([r.abs_dev for r in v], [r.error_scale for r in v])
                 for k, v in groups.items()}
    rows = []
    for r in reports:
        C = constants[(r.spec.parity, r.spec.mu)]
        rows.append({
            "q": r.spec.q,
            "parity": r.spec.parity,
            "g": r.spec.g,
            "mu": r.spec.mu,
            "ensemble_size": r.ensemble_size,
            "empirical_a": rational(r.empirical.a),
            "empirical_b": rational(r.empirical.b),
            "empirical_float": real(r.empirical_float),
            "predicted_float": real(r.predicted),
            "abs_dev": real(r.abs_dev),
            "rel_dev": real(r.rel_dev),
            "error_budget": real(C * r.error_scale),
            "runtime_ms": int(round(r.runtime_ms)) if timing else 0,
        })
    return rows


def moment_checks(reports: Sequence[MomentReport]) -> list[tuple[str, bool]]:
    """Per (parity, mu) group: rel_dev strictly decreasing in g and normalized deviation not growing.

    Only g >= 2 enters the trend; g = 1 rows are error-dominated.
    """
    groups: dict[tuple, list[MomentReport]] = {}
    for r in sorted(reports, key=lambda r: r.spec.g):
        if r.spec.g >= 2:
            groups.setdefault((r.spec.parity, r.spec.mu), []).append(r)
    out = []
    for (parity, mu), rs in sorted(groups.items()):
        rel = [r.rel_dev for r in rs]
        dec = all(b < a for a, b in zip(rel, rel[1:]))
        out.append((f"{parity} mu={mu}: rel_dev strictly decreasing over g={[r.spec.g for r in rs]}", dec))
        out.append((f"{parity} mu={mu}: normalized deviation shows no growth",
                    asy.no_growth([r.normalized_dev for r in rs])))
    return out


def _component_row(kind, q, parity, g, h, m, empirical, predicted: float, scale: float, budget: float) -> dict:
    if isinstance(empirical, QuadValue):
        a, b, f = empirical.a, empirical.b, float(empirical)
    else:
        a, b, f = Fraction(empirical), Fraction(0), float(empirical)
    dev = abs(f - predicted)
    return {
        "kind": kind, "q": q, "parity": parity, "g": g, "h": h, "m": m,
        "empirical_a": rational(a), "empirical_b": rational(b), "empirical_float": real(f),
        "predicted_float": real(predicted), "abs_dev": real(dev), "normalized_dev": real(dev / scale),
        "error_budget": real(budget), "_scale": scale,
    }


def component_rows(q: int, parities: Iterable[str], gs: Sequence[int], m_max: int,
                   cutoff: int, workers: int | None = None) -> list[dict]:
    """S, T (ensemble) and M, N (exact defining sums) against their main terms.

    S and T are normalized by |D|^(7/8) (log_q |D|)^max(m,1); M carries the
    exact tail budget; N is normalized by g |D|^(3/4).
    """
    rows = []
    for parity in parities:
        for g in gs:
            spec = EnsembleSpec(q, parity, g)
            D, logD = spec.norm, spec.degree
            for h in (g - 1, g):
                if h < 0:
                    continue
                for m in range(m_max + 1):
                    pred = asy.lemma_main("M", h, m, q, g, max(m, 1), cutoff, parity)
                    scale = D**0.875 * logD ** max(m, 1)
                    rows.append(_component_row("S", q, parity, g, h, m,
                                               empirical_S(parity, h, m, g, q, workers),
                                               pred.value, scale, float("nan")))
                    rows.append(_component_row("M", q, parity, g, h, m, exact_M_sum(h, m, q, g, parity),
                                               pred.value, pred.error_budget, pred.error_budget))
                if parity == "even":
                    pred = asy.lemma_main("N", h, 0, q, g, 1, cutoff, parity)
                    rows.append(_component_row("T", q, parity, g, h, 0, empirical_T(h, g, q, workers),
                                               pred.value, D**0.875 * logD, float("nan")))
                    rows.append(_component_row("N", q, parity, g, h, 0, exact_N_sum(h, q, g, parity),
                                               pred.value, pred.error_budget, float("nan")))
    _fill_fitted_budgets(rows)
    return rows


def _fill_fitted_budgets(rows: list[dict]) -> None:
    """S, T, N budgets: C * scale with C fitted per (kind, parity, g - h, m) over the g grid."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        if r["kind"] != "M":
            groups.setdefault((r["kind"], r["parity"], r["g"] - r["h"], r["m"]), []).append(r)
    for rs in groups.values():
        C = asy.fit_constant([r["abs_dev"] for r in rs], [r["_scale"] for r in rs])
        for r in rs:
            r["error_budget"] = C * r["_scale"]


def component_checks(rows: Sequence[dict]) -> list[tuple[str, bool]]:
    """M within its exact tail budget; S/T/N normalized deviations without growth in g.

    As for the moments, only g >= 2 enters the trend.
    """
    out = []
    m_rows = [r for r in rows if r["kind"] == "M"]
    out.append(("M sums within exact tail budget",
                all(r["abs_dev"] <= r["error_budget"] for r in m_rows)))
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        if r["kind"] in ("S", "T", "N") and r["g"] >= 2:
            key = (r["kind"], r["parity"], r["g"] - r["h"], r["m"])
            groups.setdefault(key, []).append(r)
    for (kind, parity, off, m), rs in sorted(groups.items()):
        rs.sort(key=lambda r: r["g"])
        label = f"{kind} {parity} h=g-{off} m={m}: normalized deviation shows no growth"
        out.append((label, asy.no_growth([r["normalized_dev"] for r in rs])))
    return out


def gvalue_rows(q: int, ms: Sequence[int], cutoffs: Sequence[int]) -> list[dict]:
    rows = []
    for m in ms:
        for N in cutoffs:
            v = asy.g_deriv_series(m, N, q)
            rows.append({"q": q, "m": m, "cutoff": N, "partial": rational(v.partial),
                         "partial_float": real(float(v.partial)), "tail_bound": real(v.tail_bound)})
    return rows


def zero_rows(q: int, parities: Iterable[str], gs: Sequence[int], tol: float = 1e-8) -> list[dict]:
    rows = []
    for parity in parities:
        for g in gs:
            n = 2 * g + 1 if parity == "odd" else 2 * g + 2
            for D in enumerate_squarefree(q, n):
                rep = rh_roots_check(build_l(D), tol)
                rows.append({"q": q, "parity": parity, "g": g, "D": str(D),
                             "max_deviation": real(rep.max_deviation), "unit_roots": rep.unit_roots,
                             "ok": rep.ok})
    return rows


def render(rows: Sequence[dict], columns: Sequence[str], fmt: str, meta: dict | None = None) -> str:
    """CSV (fixed header) or JSON (same keys per row, plus an optional ``meta`` block)."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _csv_cell(r[k]) for k in columns})
        return buf.getvalue()
    if fmt == "json":
        body = {"rows": [{k: _json_cell(r[k]) for k in columns} for r in rows]}
        if meta:
            body["meta"] = meta
        return json.dumps(body, indent=2, sort_keys=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def _json_cell(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v
