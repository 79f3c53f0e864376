"""INI-style run configuration.

Four sections, all flat key/value pairs:

  [weights]    w11, w10, w01, w00; optional per-group overrides as
               <group>.w11 etc. (partial overrides complete from shared)
  [claims]     kind = none|outcome|decision|legitimate; attr for
               legitimate; values as a comma list
  [pattern]    kind = comma list of patterns (first one is the objective
               for rule search); k, t, tol as needed
  [rulespace]  kind = group_rates|group_thresholds; grid as a comma list
               or start:stop:count; optional <group>.grid overrides
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import ClaimsDifferentiator, ClaimsKind
from .errors import InvalidSpec
from .patterns import PatternKind, PatternSpec
from .rules import RuleKind, RuleSpace
from .utility import UtilityWeights, WeightTable

_WEIGHT_KEYS = ("w11", "w10", "w01", "w00")


@dataclass(frozen=True)
class RunConfig:
    weights: UtilityWeights
    cd: ClaimsDifferentiator
    patterns: tuple[PatternSpec, ...]
    tol: float | None = None
    rule_kind: RuleKind | None = None
    grids: dict | None = None

    def rulespace_for(self, groups: tuple[str, ...]) -> RuleSpace:
        if self.rule_kind is None or self.grids is None:
            raise InvalidSpec("config has no [rulespace] section")
        default = self.grids.get(None)
        grids = {}
        for a in groups:
            grid = self.grids.get(a, default)
            if grid is None:
                raise InvalidSpec(f"no grid for group {a!r} and no default grid")
            grids[a] = grid
        return RuleSpace(kind=self.rule_kind, grids=grids)

    def objective(self) -> PatternSpec:
        return self.patterns[0]


def _parse_float(raw: str, context: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise InvalidSpec(f"{context}: expected a number, got {raw!r}") from None
    if not np.isfinite(v):
        raise InvalidSpec(f"{context}: expected a finite number, got {raw!r}")
    return v


def _parse_grid(raw: str, context: str) -> tuple[float, ...]:
    raw = raw.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise InvalidSpec(f"{context}: grid ranges are start:stop:count, got {raw!r}")
        start = _parse_float(parts[0], context)
        stop = _parse_float(parts[1], context)
        try:
            count = int(parts[2])
        except ValueError:
            raise InvalidSpec(f"{context}: grid count must be an integer, got {parts[2]!r}") from None
        if count < 1:
            raise InvalidSpec(f"{context}: grid count must be >= 1")
        return tuple(float(v) for v in np.linspace(start, stop, count))
    return tuple(_parse_float(part.strip(), context) for part in raw.split(",") if part.strip())


def _parse_weights(section: configparser.SectionProxy) -> UtilityWeights:
    shared_vals = {}
    for key in _WEIGHT_KEYS:
        if key not in section:
            raise InvalidSpec(f"[weights] is missing {key}")
        shared_vals[key] = _parse_float(section[key], f"[weights] {key}")
    shared = WeightTable(**shared_vals)
    overrides: dict[str, dict[str, float]] = {}
    for key, raw in section.items():
        if key in _WEIGHT_KEYS:
            continue
        if "." not in key:
            raise InvalidSpec(f"[weights] has unknown key {key!r}")
        group, _, entry = key.rpartition(".")
        if entry not in _WEIGHT_KEYS or not group:
            raise InvalidSpec(f"[weights] has unknown key {key!r}")
        overrides.setdefault(group, {})[entry] = _parse_float(raw, f"[weights] {key}")
    if not overrides:
        return UtilityWeights(shared=shared)
    per_group = {
        g: WeightTable(**{**shared_vals, **vals}) for g, vals in sorted(overrides.items())
    }
    return UtilityWeights(shared=shared, per_group=per_group)


def _parse_claims(section: configparser.SectionProxy | None) -> ClaimsDifferentiator:
    if section is None:
        return ClaimsDifferentiator.none()
    kind_raw = section.get("kind", "none").strip().lower()
    try:
        kind = ClaimsKind(kind_raw)
    except ValueError:
        raise InvalidSpec(f"[claims] kind must be one of none/outcome/decision/legitimate, got {kind_raw!r}") from None
    if kind is ClaimsKind.NONE:
        return ClaimsDifferentiator.none()
    raw_values = section.get("values", "").strip()
    if kind in (ClaimsKind.OUTCOME, ClaimsKind.DECISION):
        values = []
        for part in raw_values.split(","):
            part = part.strip()
            if not part:
                continue
            if part not in ("0", "1"):
                raise InvalidSpec(f"[claims] values for {kind.value} must be 0 or 1, got {part!r}")
            values.append(int(part))
        if not values:
            raise InvalidSpec(f"[claims] kind {kind.value} needs values")
        if kind is ClaimsKind.OUTCOME:
            return ClaimsDifferentiator.outcome(values)
        return ClaimsDifferentiator.decision(values)
    attr = section.get("attr", "").strip()
    values = [part.strip() for part in raw_values.split(",") if part.strip()]
    return ClaimsDifferentiator.legitimate(attr, values)


def _parse_patterns(section: configparser.SectionProxy | None) -> tuple[tuple[PatternSpec, ...], float | None]:
    if section is None:
        kinds = [PatternKind.EGALITARIAN, PatternKind.MAXIMIN]
        return tuple(PatternSpec(kind=k) for k in kinds), None
    tol = None
    if "tol" in section:
        tol = _parse_float(section["tol"], "[pattern] tol")
    k = _parse_float(section["k"], "[pattern] k") if "k" in section else None
    t = _parse_float(section["t"], "[pattern] t") if "t" in section else None
    raw = section.get("kind", "egalitarian,maximin")
    specs = []
    for part in raw.split(","):
        part = part.strip().lower()
        if not part:
            continue
        try:
            kind = PatternKind(part)
        except ValueError:
            raise InvalidSpec(f"[pattern] unknown kind {part!r}") from None
        specs.append(
            PatternSpec(
                kind=kind,
                k=k if kind is PatternKind.PRIORITARIAN else None,
                t=t if kind is PatternKind.SUFFICIENTARIAN else None,
            )
        )
    if not specs:
        raise InvalidSpec("[pattern] kind lists no patterns")
    return tuple(specs), tol


def load_config(path: str | Path) -> RunConfig:
    parser = configparser.ConfigParser()
    parser.optionxform = str  # group labels and attr names are case-sensitive
    read = parser.read(path)
    if not read:
        raise InvalidSpec(f"config file {path} not found")
    if "weights" not in parser:
        raise InvalidSpec("config needs a [weights] section")
    weights = _parse_weights(parser["weights"])
    cd = _parse_claims(parser["claims"] if "claims" in parser else None)
    patterns, tol = _parse_patterns(parser["pattern"] if "pattern" in parser else None)
    rule_kind = None
    grids = None
    if "rulespace" in parser:
        section = parser["rulespace"]
        kind_raw = section.get("kind", "").strip().lower()
        try:
            rule_kind = RuleKind(kind_raw)
        except ValueError:
            raise InvalidSpec(
                f"[rulespace] kind must be group_rates or group_thresholds, got {kind_raw!r}"
            ) from None
        grids = {}
        if "grid" in section:
            grids[None] = _parse_grid(section["grid"], "[rulespace] grid")
        for key, raw in section.items():
            if key in ("kind", "grid"):
                continue
            group, _, tail = key.rpartition(".")
            if tail != "grid" or not group:
                raise InvalidSpec(f"[rulespace] has unknown key {key!r}")
            grids[group] = _parse_grid(raw, f"[rulespace] {key}")
        if not grids:
            raise InvalidSpec("[rulespace] needs a grid")
    return RunConfig(
        weights=weights,
        cd=cd,
        patterns=patterns,
        tol=tol,
        rule_kind=rule_kind,
        grids=grids,
    )
