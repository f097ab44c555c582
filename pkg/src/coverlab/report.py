"""JSON serialization of a pipeline run.

Exact rationals are written as integers when integral and as ``"p/q"``
strings otherwise; tower elements use their string form, e.g.
``"2*sqrt(-3)"``.  Keys are sorted so equal runs give identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from importlib import resources
from typing import Any

from .field import FieldElement
from .group import Character, GroupElement
from .tower import TowerReport

SCHEMA_VERSION = "1.0"


def exact(value: Any) -> Any:
    """Convert exact numbers and library objects into JSON-ready values."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, FieldElement):
        return exact(value.to_fraction()) if value.is_rational() else str(value)
    if isinstance(value, Character):
        return value.label()
    if isinstance(value, GroupElement):
        return value.label()
    if isinstance(value, dict):
        return {str(exact(k)): exact(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [exact(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(exact(v) for v in value)
    if is_dataclass(value):
        return exact(asdict(value))
    if isinstance(value, float):
        raise TypeError("floats have no place in an exact report")
    return str(value)


def _config_section(report: TowerReport) -> dict:
    cfg = report.config
    return {
        "source": cfg.source,
        "lines": {k: list(v) for k, v in sorted(cfg.lines.items())},
        "H1": list(cfg.h1),
        "H2": list(cfg.h2) if cfg.h2 is not None else None,
        "pencil_parameter": cfg.pencil_parameter,
        "generators": list(cfg.generators),
        "building_data": [{"name": n, "sigma": s, "components": list(c)} for n, s, c in cfg.building_data],
    }


def _nodes_section(report: TowerReport) -> list[dict]:
    if report.inventory is None:
        return []
    gens = report.config.generators
    labels = report.configuration.building_data.radical_labels()
    sheets = {}
    if report.evaluation is not None:
        sheets = {p.node.index: p for p in report.evaluation.points}
    out = []
    for n in report.inventory.nodes:
        rec = n.record
        entry = {
            "index": n.index,
            "plane_point": [exact(c) for c in rec.location.coords] if rec.location is not None else None,
            "components": list(rec.components),
            "divisors": list(rec.divisors),
            "branch_type": rec.branch_type,
            "inertia": sorted(g.label(gens) for g in rec.inertia),
            "preimage_count": rec.preimage_count,
            "sheet": n.sheet.label(gens),
            "provenance": n.provenance(gens),
        }
        sp = sheets.get(n.index)
        if sp is not None:
            entry["radicals"] = {labels[c]: exact(sp.value(c)) for c in sorted(labels, key=lambda c: labels[c])}
        out.append(entry)
    return out


def _certificates_section(report: TowerReport) -> dict | None:
    b = report.certificates
    if b is None:
        return None

    def one(res):
        d = {"subset": sorted(res.subset), "status": res.status, "L2": exact(res.L_squared),
             "LK": exact(res.L_dot_K), "reasons": list(res.reasons)}
        if res.certificate is not None:
            c = res.certificate
            d["identity"] = f"{c.lhs} = 2*({c.witness}) + sum of A_i over the subset"
            d["description"] = c.description
            d["audit"] = {k: [exact(a), exact(b)] for k, (a, b) in sorted(res.audit.items())}
        return d

    return {
        "tacnodal": one(b.tacnodal),
        "line": one(b.line),
        "union": one(b.union),
        "classes": [{"name": r.name, "pairings": exact(r.row), "derivation": r.derivation} for r in b.rows],
        "line_multiplicities": {f"A{i}": m for i, m in sorted(b.line_multiplicities.items())},
    }


def _bicanonical_section(report: TowerReport) -> dict | None:
    c = report.bicanonical
    if c is None:
        return None
    return {
        "sections": report.evaluation.column_labels(),
        "rank": c.rank,
        "kernel_dimension": c.kernel_dimension,
        "kernel": exact(c.kernel),
        "kernel_section": c.kernel_section,
        "radicand": list(c.radicand_names),
        "radicand_squarefree": c.radicand_squarefree,
        "zero_columns": c.zero_columns,
        "quadric_rank": c.quadric_rank,
        "premises": c.premises,
        "h0_K_plus_L": 0 if c.h0_K_plus_L_vanishes else None,
    }


def _levels_section(report: TowerReport) -> dict:
    out = {}
    for name, lev in report.levels.items():
        out[name] = {"chi": lev.chi, "p_g": lev.p_g, "q": lev.q, "K2": lev.K2, "nodes": lev.nodes,
                     "canonical_degree": lev.canonical_degree, "note": lev.note}
    return out


def build_report(report: TowerReport, include_timing: bool = False) -> dict:
    data = {
        "schema_version": SCHEMA_VERSION,
        "passed": report.passed,
        "failed_stage": report.failed_stage,
        "error": report.error,
        "headline": report.headline,
        "config": _config_section(report),
        "checks": [{"key": c.key, "stage": c.stage, "passed": c.passed, "message": c.message,
                    "details": c.details} for c in report.checks],
        "levels": _levels_section(report),
        "nodes": _nodes_section(report),
        "certificates": _certificates_section(report),
        "bicanonical": _bicanonical_section(report),
        "bound": report.bound,
        "assumptions": list(report.assumptions),
    }
    if include_timing:
        data["timing_seconds"] = {k: f"{v:.6f}" for k, v in report.timings.items()}
    return exact(data)


def dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def matrix_dump(report: TowerReport) -> dict:
    ev = report.evaluation
    if ev is None:
        raise ValueError("the evaluation matrix was not computed")
    gens = report.config.generators
    rows = []
    for p, row in zip(ev.points, ev.matrix.rows):
        rows.append({"node": p.node.index, "sheet": p.node.sheet.label(gens),
                     "provenance": p.node.provenance(gens), "entries": [exact(v) for v in row]})
    return {"schema_version": SCHEMA_VERSION, "columns": ev.column_labels(),
            "shape": list(ev.matrix.shape), "rows": rows}


def load_schema() -> dict:
    text = resources.files("coverlab").joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate_report(data: dict) -> None:
    """Raise ``jsonschema.ValidationError`` when ``data`` does not match the published schema."""
    import jsonschema

    jsonschema.validate(data, load_schema())
