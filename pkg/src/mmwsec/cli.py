"""Command-line interface: evaluate, simulate, sweep, validate, presets.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical failure.  CSV output is byte-stable for identical inputs and
seed: floats are printed with shortest round-trip repr and rows are ordered
by sweep value, then by the method order given on the command line.
"""

from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import analytic, montecarlo
from .analytic import RateReport, SystemConfig, UlaLink, secrecy_rate
from .configio import (
    ConfigError,
    SweepSpec,
    apply_sweep_value,
    dump_config,
    load_config,
    sweep_values,
)
from .geometry import LosBall
from .numerics import QuadratureError
from .presets import figure_preset

__all__ = [
    "ANALYTIC_METHODS",
    "CSV_HEADER",
    "ValidationRow",
    "ValidationReport",
    "run_eval",
    "run_sweep",
    "run_validate",
    "main",
]

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

CSV_HEADER = ("sweep_var", "sweep_value", "method", "rate_typical_bps_hz",
              "rate_eve_bps_hz", "rate_secrecy_bps_hz", "ci_low", "ci_high",
              "n_trials", "error")

ANALYTIC_METHODS = ("exact", "lower", "losball", "ula", "an-exact", "an-lower")


def _pair_report(method: str, r_typ: float, r_eve: float) -> RateReport:
    return RateReport(rate_typical=r_typ, rate_eve=r_eve,
                      rate_secrecy=secrecy_rate(r_typ, r_eve),
                      method=f"analytic_{method.replace('-', '_')}")


def run_eval(cfg: SystemConfig, method: str) -> RateReport:
    """Evaluate one analytic method family on a scenario.

    ``exact`` and ``lower`` describe plain transmission (any jamming section
    is ignored so the no-jamming baseline of a jamming scenario can be
    computed from the same file); ``losball``/``ula``/``an-*`` require the
    matching model ingredients.
    """
    if method not in ANALYTIC_METHODS:
        raise ConfigError(f"unknown method '{method}'; choose from "
                          f"{', '.join(ANALYTIC_METHODS)} (or 'mc' in sweeps)")
    try:
        if method == "exact":
            return _pair_report(method, analytic.avg_rate_typical_exact(cfg),
                                analytic.avg_rate_eve_exact(cfg))
        if method == "lower":
            return _pair_report(method, analytic.avg_rate_typical_lower(cfg),
                                analytic.avg_rate_eve_exact(cfg))
        if method == "losball":
            if not isinstance(cfg.blockage, LosBall):
                raise ConfigError("method 'losball' needs blockage model "
                                  "'los_ball'")
            return _pair_report(method,
                                analytic.avg_rate_typical_exact_losball(cfg),
                                analytic.avg_rate_eve_exact_losball(cfg))
        if method == "ula":
            if not isinstance(cfg.gain_model, UlaLink):
                raise ConfigError("method 'ula' needs antennas model 'ula'")
            return _pair_report(method,
                                analytic.avg_rate_typical_lower_ula(cfg),
                                analytic.avg_rate_eve_exact_ula(cfg))
        if cfg.an is None:
            raise ConfigError(f"method '{method}' needs an 'an' section")
        if method == "an-exact":
            return _pair_report(method, analytic.avg_rate_typical_exact_an(cfg),
                                analytic.avg_rate_eve_exact_an(cfg))
        return _pair_report(method, analytic.avg_rate_typical_lower_an(cfg),
                            analytic.avg_rate_eve_exact_an(cfg))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"method '{method}': {exc}") from exc


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def run_sweep(cfg: SystemConfig, sweep: SweepSpec, methods: list[str],
              out_path: str | Path, trials: int = 2000, seed: int = 1,
              window_radius: float | None = None) -> int:
    """Evaluate methods across a sweep and write the CSV; returns row count.

    A failing point is recorded in its row's error column; the sweep itself
    keeps going.  Method 'mc' runs the simulator with the given trial count
    and seed.
    """
    rows = []
    for value in sweep_values(sweep):
        try:
            point_cfg = apply_sweep_value(cfg, sweep.variable, value)
        except ConfigError as exc:
            for method in methods:
                rows.append((sweep.variable, value, method, None, None, None,
                             None, None, None, str(exc)))
            continue
        for method in methods:
            try:
                if method == "mc":
                    rep = montecarlo.estimate_rates(point_cfg, trials, seed,
                                                    window_radius)
                else:
                    rep = run_eval(point_cfg, method)
                rows.append((sweep.variable, value, method, rep.rate_typical,
                             rep.rate_eve, rep.rate_secrecy, rep.ci_low,
                             rep.ci_high, rep.n_trials, ""))
            except (ConfigError, QuadratureError, ValueError) as exc:
                rows.append((sweep.variable, value, method, None, None, None,
                             None, None, None, str(exc)))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    Path(out_path).write_text(buf.getvalue())
    return len(rows)


@dataclass(frozen=True)
class ValidationRow:
    check: str
    kind: str            # 'match' (analytic == MC) or 'bound' (analytic <= MC)
    analytic: float
    mc_mean: float
    mc_std_error: float
    n_trials: int
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ValidationRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def _validation_plan(cfg: SystemConfig) -> list[tuple[str, str, str]]:
    """(check name, evaluator attr, side) per applicable exact evaluator."""
    if cfg.an is not None:
        return [("jamming typical exact", "avg_rate_typical_exact_an", "typ"),
                ("jamming interceptor exact", "avg_rate_eve_exact_an", "eve")]
    if isinstance(cfg.gain_model, UlaLink):
        return [("ula typical lower bound", "avg_rate_typical_lower_ula", "typ-bound"),
                ("ula interceptor exact", "avg_rate_eve_exact_ula", "eve")]
    if isinstance(cfg.blockage, LosBall):
        return [("los-ball typical exact", "avg_rate_typical_exact_losball", "typ"),
                ("los-ball interceptor exact", "avg_rate_eve_exact_losball", "eve")]
    return [("typical exact", "avg_rate_typical_exact", "typ"),
            ("interceptor exact", "avg_rate_eve_exact", "eve")]


def run_validate(cfg: SystemConfig, n_trials: int, tolerance: float,
                 seed: int = 1,
                 window_radius: float | None = None) -> ValidationReport:
    """Compare every applicable analytic evaluator against the simulator.

    An exact evaluator passes when |analytic - MC| <= max(tolerance * |MC|,
    3 standard errors); a bound evaluator passes when it does not exceed the
    MC estimate by more than 3 standard errors.
    """
    if n_trials < 100:
        raise ConfigError("validation needs at least 100 trials")
    typ, eve = montecarlo.run_trials(cfg, n_trials, seed, window_radius)
    rows = []
    for name, attr, side in _validation_plan(cfg):
        value = getattr(analytic, attr)(cfg)
        ref = typ if side.startswith("typ") else eve
        if side.endswith("bound"):
            ok = value <= ref.mean + 3.0 * ref.std_error + 1e-9
            kind = "bound"
        else:
            ok = abs(value - ref.mean) <= max(tolerance * abs(ref.mean),
                                              3.0 * ref.std_error)
            kind = "match"
        rows.append(ValidationRow(name, kind, value, ref.mean, ref.std_error,
                                  n_trials, ok))
    return ValidationReport(tuple(rows))


def _write_validation_csv(report: ValidationReport, out_path: str | Path):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("check", "kind", "analytic", "mc_mean", "mc_std_error",
                     "n_trials", "passed"))
    for r in report.rows:
        writer.writerow((r.check, r.kind, _fmt(r.analytic), _fmt(r.mc_mean),
                         _fmt(r.mc_std_error), r.n_trials, str(r.passed)))
    Path(out_path).write_text(buf.getvalue())


# ---------------------------------------------------------------------------
# click commands


@click.group(help=__doc__)
def main():
    pass


def _load(path: str) -> SystemConfig:
    try:
        return load_config(path)
    except (ConfigError, OSError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)


def _echo_report(rep: RateReport):
    click.echo(f"method:        {rep.method}")
    click.echo(f"rate_typical:  {rep.rate_typical:.6f} bits/s/Hz")
    click.echo(f"rate_eve:      {rep.rate_eve:.6f} bits/s/Hz")
    click.echo(f"rate_secrecy:  {rep.rate_secrecy:.6f} bits/s/Hz")
    if rep.n_trials is not None:
        click.echo(f"trials:        {rep.n_trials}")
        click.echo(f"diff 95% CI:   [{rep.ci_low:.6f}, {rep.ci_high:.6f}]")


@main.command("eval", help="Evaluate one analytic method on a scenario.")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--method", required=True,
              type=click.Choice(ANALYTIC_METHODS))
def cmd_eval(config_path, method):
    cfg = _load(config_path)
    try:
        rep = run_eval(cfg, method)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except QuadratureError as exc:
        click.echo(f"numerical error: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL_ERROR)
    _echo_report(rep)


@main.command("sim", help="Monte Carlo rate estimate for a scenario.")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--trials", default=20000, show_default=True, type=int)
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--window-radius", default=None, type=float,
              help="Sampling disc radius in meters (default: automatic).")
def cmd_sim(config_path, trials, seed, window_radius):
    cfg = _load(config_path)
    try:
        rep = montecarlo.estimate_rates(cfg, trials, seed, window_radius)
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    _echo_report(rep)


@main.command("sweep", help="Sweep one variable and write a CSV.")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--var", "variable", required=True)
@click.option("--from", "start", required=True, type=float)
@click.option("--to", "stop", required=True, type=float)
@click.option("--steps", required=True, type=int)
@click.option("--log", "log_scale", is_flag=True, default=False)
@click.option("--methods", required=True,
              help="Comma-separated: exact,lower,losball,ula,an-exact,"
                   "an-lower,mc")
@click.option("--out", "out_path", required=True,
              type=click.Path(dir_okay=False))
@click.option("--trials", default=2000, show_default=True, type=int,
              help="Trials per point for the 'mc' method.")
@click.option("--seed", default=1, show_default=True, type=int)
def cmd_sweep(config_path, variable, start, stop, steps, log_scale, methods,
              out_path, trials, seed):
    cfg = _load(config_path)
    method_list = [m.strip() for m in methods.split(",") if m.strip()]
    for m in method_list:
        if m != "mc" and m not in ANALYTIC_METHODS:
            click.echo(f"config error: unknown method '{m}'", err=True)
            sys.exit(EXIT_CONFIG_ERROR)
    try:
        spec = SweepSpec(variable, start, stop, steps,
                         "log" if log_scale else "linear")
        n = run_sweep(cfg, spec, method_list, out_path, trials, seed)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except QuadratureError as exc:
        click.echo(f"numerical error: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL_ERROR)
    click.echo(f"wrote {n} rows to {out_path}")


@main.command("validate",
              help="Check analytic evaluators against the simulator.")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--trials", default=20000, show_default=True, type=int)
@click.option("--tolerance", default=0.05, show_default=True, type=float)
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--out", "out_path", default=None,
              type=click.Path(dir_okay=False),
              help="Also write the comparison table as CSV.")
def cmd_validate(config_path, trials, tolerance, seed, out_path):
    cfg = _load(config_path)
    try:
        report = run_validate(cfg, trials, tolerance, seed)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except QuadratureError as exc:
        click.echo(f"numerical error: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL_ERROR)
    for r in report.rows:
        status = "PASS" if r.passed else "FAIL"
        rel = "bound" if r.kind == "bound" else (
            f"{abs(r.analytic - r.mc_mean) / max(abs(r.mc_mean), 1e-300):.2%}")
        click.echo(f"{status} {r.check}: analytic={r.analytic:.6f} "
                   f"mc={r.mc_mean:.6f} +/- {r.mc_std_error:.6f} ({rel})")
    if out_path:
        _write_validation_csv(report, out_path)
    if not report.passed:
        sys.exit(EXIT_VALIDATION_FAILED)


@main.command("preset", help="Emit a canned scenario (figures 1-8) as YAML.")
@click.option("--figure", required=True, type=click.IntRange(1, 8))
@click.option("--frequency", default=None, type=float,
              help="Carrier in GHz for multi-band figures.")
@click.option("--out", "out_path", default=None,
              type=click.Path(dir_okay=False))
def cmd_preset(figure, frequency, out_path):
    try:
        preset = figure_preset(figure, frequency)
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    text = dump_config(preset.config, comment=preset.comment)
    sweep = preset.sweep
    text += (f"# suggested sweep: --var {sweep.variable} "
             f"--from {sweep.start} --to {sweep.stop} --steps {sweep.steps}"
             f"{' --log' if sweep.scale == 'log' else ''}\n")
    if out_path:
        Path(out_path).write_text(text)
        click.echo(f"wrote preset for figure {figure} to {out_path}")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
