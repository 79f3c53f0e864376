"""Report assembly and canonical serialization.

Every output path (CLI files, HTTP responses) goes through the builders
here and through to_json_bytes, so identical inputs yield byte-identical
reports. Reports carry no timestamps; provenance is the dataset content
hash, the hash of the canonical audit parameters, and the generator seed
when one exists, so replaying a report's inputs reproduces it exactly.
"""

from __future__ import annotations

import hashlib
import io
import json
from typing import Iterable, Mapping

from . import __version__
from .classical import ClassicalCriterion, GapReport, classical_gap, standard_criteria
from .data import ClaimsDifferentiator, ClaimsKind, Dataset, dataset_hash
from .equivalence import (
    EquivalenceReport,
    WeightConditionFinding,
    classify_weights,
    verify_proposition,
)
from .errors import ConditionViolated, UndefinedResult
from .patterns import PatternSpec, evaluate_pattern
from .rules import FrontierPoint, OptimizationResult, RuleSpace
from .utility import UtilityProfile, UtilityWeights, utility_profile


def _num(x: float) -> float:
    # +0.0 folds negative zero into plain zero for stable output.
    return float(x) + 0.0


def to_json_bytes(report: Mapping) -> bytes:
    return (json.dumps(report, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def canonical_params(
    weights: UtilityWeights,
    cd: ClaimsDifferentiator,
    patterns: Iterable[PatternSpec],
    tol: float,
) -> dict:
    return {
        "weights": weights.to_dict(),
        "claims": cd.to_dict(),
        "patterns": [p.to_dict() for p in patterns],
        "tol": tol,
    }


def config_hash(params: Mapping) -> str:
    canon = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def profile_rows(profile: UtilityProfile) -> list[dict]:
    rows = []
    for key in profile.sorted_keys:
        e = profile.entries[key]
        rows.append(
            {
                "group": key.a,
                "stratum": profile.cd.label(key.j),
                "expected_utility": _num(e.expected_utility),
                "n": _num(e.n),
            }
        )
    return rows


def _pattern_block(profile: UtilityProfile, spec: PatternSpec, tol: float) -> dict:
    result = evaluate_pattern(profile, spec, tol=tol)
    block: dict = {"kind": result.kind.value}
    if spec.k is not None:
        block["k"] = _num(spec.k)
    if spec.t is not None:
        block["t"] = _num(spec.t)
    block.update(
        {
            "value": _num(result.value),
            "direction": result.direction.value,
            "satisfied": result.satisfied,
            "per_stratum": {k: _num(v) for k, v in sorted(result.per_stratum.items())},
        }
    )
    return block


def _gap_block(rep: GapReport) -> dict:
    return {
        "criterion": rep.criterion.label(),
        "gaps": {k: _num(v) for k, v in sorted(rep.gaps.items())},
        "overall": _num(rep.overall),
        "satisfied": rep.satisfied,
    }


def _finding_block(finding: WeightConditionFinding) -> dict:
    block: dict = {
        "matched": finding.matched.label() if finding.matched else None,
        "required_claims": finding.required_cd.to_dict(),
        "conditions": [[cond, holds] for cond, holds in finding.conditions_checked],
        "multiplier": _num(finding.multiplier) if finding.multiplier is not None else None,
    }
    if finding.stratum_multipliers is not None:
        cd = finding.required_cd
        block["stratum_multipliers"] = {
            cd.label(j): _num(m) for j, m in sorted(finding.stratum_multipliers.items(), key=lambda kv: str(kv[0]))
        }
    return block


def _verification_block(rep: EquivalenceReport) -> dict:
    return {
        "f_egal": _num(rep.f_egal),
        "classical_gap": _num(rep.classical_gap),
        "multiplier": _num(rep.multiplier),
        "residual": _num(rep.residual),
        "verdict": rep.verdict,
        "per_stratum": [
            {
                "stratum": c.stratum,
                "f_egal": _num(c.f_egal),
                "classical_gap": _num(c.classical_gap),
                "multiplier": _num(c.multiplier),
                "residual": _num(c.residual),
            }
            for c in rep.per_stratum
        ],
    }


def build_audit_report(
    ds: Dataset,
    weights: UtilityWeights,
    cd: ClaimsDifferentiator,
    patterns: Iterable[PatternSpec],
    tol: float = 1e-9,
    seed: int | None = None,
) -> dict:
    """Full audit: utility profile, pattern metrics, classical gaps, and
    the weight-condition finding with numerical verification when the
    weights encode a criterion.

    Criteria whose rates are undefined on this data are reported as
    undefined entries instead of failing the audit.
    """
    patterns = list(patterns)
    profile = utility_profile(ds, cd, weights)
    covered = sum(e.n for e in profile.entries.values())
    pattern_blocks = []
    for spec in patterns:
        try:
            pattern_blocks.append(_pattern_block(profile, spec, tol))
        except UndefinedResult as err:
            pattern_blocks.append({"kind": spec.kind.value, "undefined": str(err)})
    classical_blocks = []
    for criterion in standard_criteria(ds):
        try:
            classical_blocks.append(_gap_block(classical_gap(ds, criterion, tol)))
        except UndefinedResult as err:
            classical_blocks.append({"criterion": criterion.label(), "undefined": str(err)})
    finding = classify_weights(weights, cd)
    equivalence_block = _finding_block(finding)
    if finding.matched is not None:
        try:
            equivalence_block["verification"] = _verification_block(
                verify_proposition(ds, weights, cd, tol=tol)
            )
        except UndefinedResult as err:
            equivalence_block["verification"] = {"undefined": str(err)}
    else:
        equivalence_block["verification"] = None
    return {
        "report": "audit",
        "version": __version__,
        "provenance": {
            "dataset_hash": dataset_hash(ds),
            "config_hash": config_hash(canonical_params(weights, cd, patterns, tol)),
            "seed": seed,
        },
        "dataset": {
            "n_records": len(ds.records),
            "groups": list(ds.groups),
            "excluded_records": int(len(ds.records) - round(covered)),
            "empty_relevant_groups": [
                f"a={k.a}, {cd.label(k.j)}" for k in profile.empty_keys
            ],
        },
        "claims": cd.to_dict(),
        "weights": weights.to_dict(),
        "tolerance": tol,
        "profile": profile_rows(profile),
        "patterns": pattern_blocks,
        "classical": classical_blocks,
        "equivalence": equivalence_block,
    }


def build_classical_report(ds: Dataset, tol: float = 1e-9) -> dict:
    blocks = []
    for criterion in standard_criteria(ds):
        try:
            blocks.append(_gap_block(classical_gap(ds, criterion, tol)))
        except UndefinedResult as err:
            blocks.append({"criterion": criterion.label(), "undefined": str(err)})
    return {
        "report": "classical",
        "version": __version__,
        "provenance": {"dataset_hash": dataset_hash(ds)},
        "dataset": {"n_records": len(ds.records), "groups": list(ds.groups)},
        "tolerance": tol,
        "criteria": blocks,
    }


def build_classify_report(finding: WeightConditionFinding, weights: UtilityWeights) -> dict:
    block = _finding_block(finding)
    return {
        "report": "classify_weights",
        "version": __version__,
        "weights": weights.to_dict(),
        **block,
    }


def build_optimize_report(
    result: OptimizationResult,
    ds: Dataset,
    weights: UtilityWeights,
    cd: ClaimsDifferentiator,
    space: RuleSpace,
    tol: float = 1e-9,
    seed: int | None = None,
) -> dict:
    out: dict = {
        "report": "optimize",
        "version": __version__,
        "provenance": {
            "dataset_hash": dataset_hash(ds),
            "config_hash": config_hash(
                {
                    **canonical_params(weights, cd, [result.objective], tol),
                    "rulespace": {
                        "kind": space.kind.value,
                        "grids": {a: list(g) for a, g in sorted(space.grids.items())},
                    },
                }
            ),
            "seed": seed,
        },
        "claims": cd.to_dict(),
        "weights": weights.to_dict(),
        "objective": result.objective.to_dict(),
        "candidates": result.candidates,
        "skipped": result.skipped,
        "best_rule": result.best_rule.to_dict(),
        "best_value": _num(result.best_value),
        "profile_at_best": profile_rows(result.profile_at_best),
    }
    if result.frontier is not None:
        out["frontier"] = [
            {
                "rule": p.rule.to_dict()["params"],
                "total_utility": _num(p.total_utility),
                "egalitarian_gap": _num(p.egalitarian_gap),
            }
            for p in result.frontier
        ]
    return out


def build_suite_report(summary) -> dict:
    return {"report": "equivalence_suite", "version": __version__, **summary.to_dict()}


def frontier_csv_text(frontier: Iterable[FrontierPoint], groups: Iterable[str]) -> str:
    """Delimited frontier: one parameter column per group, then totals."""
    import csv as _csv

    groups = list(groups)
    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow([f"p_{a}" for a in groups] + ["total_utility", "egal_gap"])
    for p in frontier:
        writer.writerow(
            [repr(_num(p.rule.params[a])) for a in groups]
            + [repr(_num(p.total_utility)), repr(_num(p.egalitarian_gap))]
        )
    return buf.getvalue()


def render_audit_text(report: Mapping) -> str:
    """Human-readable audit summary for the terminal."""
    lines: list[str] = []
    ds = report["dataset"]
    lines.append(
        f"dataset: {ds['n_records']} records, groups {', '.join(ds['groups'])}"
        + (f", {ds['excluded_records']} excluded by claims restriction" if ds["excluded_records"] else "")
    )
    if ds["empty_relevant_groups"]:
        lines.append("empty relevant groups: " + "; ".join(ds["empty_relevant_groups"]))
    lines.append("")
    lines.append(f"{'group':<10} {'stratum':<16} {'E[utility]':>12} {'n':>10}")
    for row in report["profile"]:
        lines.append(
            f"{row['group']:<10} {row['stratum']:<16} {row['expected_utility']:>12.6g} {row['n']:>10.6g}"
        )
    lines.append("")
    for p in report["patterns"]:
        if "undefined" in p:
            lines.append(f"pattern {p['kind']}: undefined ({p['undefined']})")
            continue
        verdict = (
            ""
            if p["satisfied"] is None
            else ("  [satisfied]" if p["satisfied"] else "  [not satisfied]")
        )
        lines.append(f"pattern {p['kind']}: {p['value']:.6g}{verdict}")
    lines.append("")
    lines.append(f"{'classical criterion':<42} {'gap':>12}  verdict")
    for c in report["classical"]:
        if "undefined" in c:
            lines.append(f"{c['criterion']:<42} {'undefined':>12}")
        else:
            verdict = "within tol" if c["satisfied"] else "violated"
            lines.append(f"{c['criterion']:<42} {c['overall']:>12.6g}  {verdict}")
    lines.append("")
    eq = report["equivalence"]
    if eq["matched"]:
        lines.append(f"weights encode: {eq['matched']}")
        ver = eq.get("verification")
        if ver and "undefined" not in ver:
            lines.append(
                f"  identity check: gap x multiplier residual {ver['residual']:.3e} "
                f"({'ok' if ver['verdict'] else 'FAILED'})"
            )
        elif ver:
            lines.append(f"  identity check undefined: {ver['undefined']}")
    else:
        lines.append("weights encode no classical criterion for these claims")
    prov = report["provenance"]
    lines.append("")
    lines.append(f"config {prov['config_hash'][:12]}  data {prov['dataset_hash'][:12]}")
    return "\n".join(lines) + "\n"


def render_suite_text(report: Mapping) -> str:
    lines = [f"{'criterion':<38} {'trials':>7} {'verified':>9} {'skipped':>8} {'max residual':>14}"]
    for row in report["rows"]:
        lines.append(
            f"{row['criterion']:<38} {row['trials']:>7} {row['verified']:>9} "
            f"{row['skipped']:>8} {row['max_residual']:>14.3e}"
        )
    lines.append("")
    lines.append(
        f"max residual {report['max_residual']:.3e} against tol {report['tol']:g}: "
        + ("ok" if report["ok"] else "FAILED")
    )
    return "\n".join(lines) + "\n"
