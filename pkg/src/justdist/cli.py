"""Command line interface.

Subcommands cover the audit workflow (utility profile, pattern metrics,
classical gaps, weight classification), the randomized equivalence
suite, rule-space optimization with its utility/equality frontier,
synthetic data generation, and an HTTP service exposing the same
reports byte for byte.

Exit codes: 0 on success, 1 on validation or configuration errors, 2
when ``audit --assert`` finds an unsatisfied pattern or the equivalence
suite exceeds its residual tolerance.
"""

from __future__ import annotations

import functools
import os
from pathlib import Path
from typing import Sequence

import click

from .config import RunConfig, load_config
from .data import (
    ClaimsKind,
    ColumnSchema,
    Dataset,
    GroupSpec,
    SyntheticSpec,
    dataset_hash,
    generate_synthetic,
    load_dataset,
    write_dataset,
)
from .equivalence import randomized_equivalence_suite
from .errors import InvalidSpec, JustdistError
from .report import (
    build_audit_report,
    build_classical_report,
    build_optimize_report,
    build_suite_report,
    frontier_csv_text,
    render_audit_text,
    render_suite_text,
    to_json_bytes,
)
from .rules import optimize as optimize_rules, pareto_frontier


def _domain_errors(fn):
    """Map library errors to exit code 1 with a message on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except JustdistError as err:
            click.echo(f"error: {err}", err=True)
            raise SystemExit(1) from err

    return wrapper


def _resolved_tol(flag: float | None, cfg: RunConfig) -> float:
    if flag is not None:
        return flag
    if cfg.tol is not None:
        return cfg.tol
    return 1e-9


def _load_data(path: str, cfg: RunConfig, extra_legit: Sequence[str]) -> Dataset:
    legit = list(extra_legit)
    if cfg.cd.kind is ClaimsKind.LEGITIMATE and cfg.cd.attr not in legit:
        legit.append(cfg.cd.attr)
    return load_dataset(path, ColumnSchema(legit=tuple(legit)))


def _write_json(report: dict, out: str | None) -> None:
    if out is not None:
        Path(out).write_bytes(to_json_bytes(report))


@click.group()
@click.version_option(package_name="justdist")
def main() -> None:
    """Audit binary decision systems for distributive fairness."""


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False), help="Dataset CSV.")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False), help="INI run config.")
@click.option("--legit", multiple=True, help="Extra CSV column to load as a legitimate attribute (repeatable).")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the full JSON report here.")
@click.option("--figures", type=click.Path(file_okay=False), default=None, help="Directory for profile and gap charts.")
@click.option("--assert", "assert_", is_flag=True, help="Exit 2 if any requested pattern is not satisfied.")
@click.option("--tol", type=float, default=None, help="Override the tolerance from the config.")
@_domain_errors
def audit(data: str, config_path: str, legit: tuple[str, ...], out: str | None, figures: str | None, assert_: bool, tol: float | None) -> None:
    """Profile utilities and evaluate patterns plus classical gaps."""
    cfg = load_config(config_path)
    ds = _load_data(data, cfg, legit)
    report = build_audit_report(ds, cfg.weights, cfg.cd, cfg.patterns, tol=_resolved_tol(tol, cfg))
    _write_json(report, out)
    if figures is not None:
        from . import plots

        os.makedirs(figures, exist_ok=True)
        profile_png = os.path.join(figures, "profile.png")
        gaps_png = os.path.join(figures, "classical_gaps.png")
        plots.save_profile_chart(report, profile_png)
        plots.save_gaps_chart(report, gaps_png)
        click.echo(f"figures: {profile_png}, {gaps_png}", err=True)
    click.echo(render_audit_text(report), nl=False)
    if assert_:
        failed = [p["kind"] for p in report["patterns"] if p.get("satisfied") is False]
        undecidable = [p["kind"] for p in report["patterns"] if "undefined" in p]
        if undecidable:
            click.echo(f"error: cannot assert, undefined pattern(s): {', '.join(undecidable)}", err=True)
            raise SystemExit(1)
        if failed:
            click.echo(f"assertion failed: {', '.join(failed)}", err=True)
            raise SystemExit(2)


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False), help="Dataset CSV.")
@click.option("--legit", multiple=True, help="CSV column to load as a legitimate attribute (repeatable).")
@click.option("--tol", type=float, default=1e-9, show_default=True, help="Gap tolerance for the satisfied verdicts.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the JSON report here.")
@_domain_errors
def classical(data: str, legit: tuple[str, ...], tol: float, out: str | None) -> None:
    """Report classical group fairness gaps on a dataset."""
    ds = load_dataset(data, ColumnSchema(legit=tuple(legit)))
    report = build_classical_report(ds, tol=tol)
    _write_json(report, out)
    click.echo(f"{'criterion':<42} {'gap':>12}  verdict")
    for c in report["criteria"]:
        if "undefined" in c:
            click.echo(f"{c['criterion']:<42} {'undefined':>12}")
        else:
            verdict = "within tol" if c["satisfied"] else "violated"
            click.echo(f"{c['criterion']:<42} {c['overall']:>12.6g}  {verdict}")


@main.command()
@click.option("--trials", type=int, default=200, show_default=True, help="Random datasets per criterion.")
@click.option("--n", type=int, default=1000, show_default=True, help="Records per group in each trial.")
@click.option("--seed", type=int, default=0, show_default=True, help="Suite seed.")
@click.option("--tol", type=float, default=1e-9, show_default=True, help="Residual tolerance.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the JSON summary here.")
@_domain_errors
def equivalence(trials: int, n: int, seed: int, tol: float, out: str | None) -> None:
    """Stress-test the pattern/criterion correspondence on random data.

    Exits 2 when any verified trial leaves a residual above the
    tolerance, or a criterion never verifies at all.
    """
    summary = randomized_equivalence_suite(trials=trials, n=n, seed=seed, tol=tol)
    report = build_suite_report(summary)
    _write_json(report, out)
    click.echo(render_suite_text(report), nl=False)
    if not summary.ok:
        raise SystemExit(2)


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False), help="Dataset CSV.")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False), help="INI run config with a [rulespace] section.")
@click.option("--legit", multiple=True, help="Extra CSV column to load as a legitimate attribute (repeatable).")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the JSON report here.")
@click.option("--frontier/--no-frontier", "with_frontier", default=False, show_default=True, help="Include the utility/equality frontier in the report.")
@click.option("--tol", type=float, default=None, help="Override the tolerance from the config.")
@_domain_errors
def optimize(data: str, config_path: str, legit: tuple[str, ...], out: str | None, with_frontier: bool, tol: float | None) -> None:
    """Search the rule space for the pattern-optimal decision rule.

    The objective is the first pattern listed in the config.
    """
    cfg = load_config(config_path)
    ds = _load_data(data, cfg, legit)
    space = cfg.rulespace_for(ds.groups)
    objective = cfg.objective()
    result = optimize_rules(ds, space, cfg.cd, cfg.weights, objective, include_frontier=with_frontier)
    report = build_optimize_report(result, ds, cfg.weights, cfg.cd, space, tol=_resolved_tol(tol, cfg))
    _write_json(report, out)
    params = ", ".join(f"{a}={v:g}" for a, v in sorted(result.best_rule.params.items()))
    click.echo(f"objective {objective.kind.value}: best value {result.best_value:.6g}")
    click.echo(f"best rule ({space.kind.value}): {params}")
    click.echo(f"candidates {result.candidates}, skipped {result.skipped}")
    if result.frontier is not None:
        click.echo(f"frontier: {len(result.frontier)} non-dominated rules")


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False), help="Dataset CSV.")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False), help="INI run config with a [rulespace] section.")
@click.option("--legit", multiple=True, help="Extra CSV column to load as a legitimate attribute (repeatable).")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Frontier CSV path; the chart lands next to it.")
@click.option("--plot/--no-plot", default=True, show_default=True, help="Render the frontier scatter as PNG.")
@_domain_errors
def frontier(data: str, config_path: str, legit: tuple[str, ...], out: str, plot: bool) -> None:
    """Trace the utility/equality frontier of a rule space to CSV."""
    cfg = load_config(config_path)
    ds = _load_data(data, cfg, legit)
    space = cfg.rulespace_for(ds.groups)
    points = pareto_frontier(ds, space, cfg.cd, cfg.weights)
    Path(out).write_text(frontier_csv_text(points, ds.groups), encoding="utf-8")
    lines = [f"frontier: {len(points)} non-dominated rules -> {out}"]
    if plot:
        from . import plots

        png = str(Path(out).with_suffix(".png"))
        plots.save_frontier_chart(
            [
                {"egalitarian_gap": p.egalitarian_gap, "total_utility": p.total_utility}
                for p in points
            ],
            png,
        )
        lines.append(f"chart -> {png}")
    click.echo("\n".join(lines))


def _parse_group_spec(raw: str, accept_pos: float, accept_neg: float) -> tuple[str, GroupSpec]:
    parts = raw.split(":")
    if len(parts) != 3 or not parts[0]:
        raise InvalidSpec(f"--group takes label:n:base_rate, got {raw!r}")
    try:
        n = int(parts[1])
        rate = float(parts[2])
    except ValueError:
        raise InvalidSpec(f"--group takes label:n:base_rate, got {raw!r}") from None
    return parts[0], GroupSpec(n=n, base_rate=rate, accept_pos=accept_pos, accept_neg=accept_neg)


def _parse_legit_spec(raw: str) -> tuple[str, tuple[str, ...]]:
    attr, sep, values = raw.partition("=")
    if not sep or not attr:
        raise InvalidSpec(f"--legit takes attr=v1|v2|..., got {raw!r}")
    parsed = tuple(v for v in values.split("|") if v)
    if not parsed:
        raise InvalidSpec(f"--legit takes attr=v1|v2|..., got {raw!r}")
    return attr, parsed


@main.command()
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Where to write the CSV.")
@click.option("--group", "group_specs", multiple=True, required=True, help="label:n:base_rate (repeatable).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--accept-pos", type=float, default=0.6, show_default=True, help="P(D=1 | Y=1) for every group.")
@click.option("--accept-neg", type=float, default=0.3, show_default=True, help="P(D=1 | Y=0) for every group.")
@click.option("--score-noise", type=float, default=0.25, show_default=True, help="Gaussian noise on the score.")
@click.option("--legit", "legit_specs", multiple=True, help="attr=v1|v2|... drawn uniformly (repeatable).")
@_domain_errors
def generate(out: str, group_specs: tuple[str, ...], seed: int, accept_pos: float, accept_neg: float, score_noise: float, legit_specs: tuple[str, ...]) -> None:
    """Write a synthetic dataset CSV."""
    groups = dict(_parse_group_spec(raw, accept_pos, accept_neg) for raw in group_specs)
    if len(groups) != len(group_specs):
        raise InvalidSpec("--group labels must be distinct")
    legit = dict(_parse_legit_spec(raw) for raw in legit_specs) or None
    ds = generate_synthetic(SyntheticSpec(groups=groups, score_noise=score_noise, legit=legit), seed=seed)
    write_dataset(ds, out)
    click.echo(f"{len(ds.records)} records, groups {', '.join(ds.groups)} -> {out}")
    click.echo(f"dataset hash {dataset_hash(ds)}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True, envvar="JUSTDIST_PORT", help="Port (env JUSTDIST_PORT).")
@_domain_errors
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


def cli_run(argv: Sequence[str] | None = None) -> int:
    """Invoke the CLI programmatically and return its exit code."""
    try:
        main.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.ClickException as err:
        err.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return 0


def entry() -> None:
    raise SystemExit(cli_run())
