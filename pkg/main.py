"""
Command-line surface: spectra, persistent currents, parameter sweeps and the
oracle golden fixture. Tables go to stdout (or --out); logs go to stderr.

    python main.py spectrum --config configs/default.json --ell 0 --s +1 --methods exact,oracle
    python main.py current --methods case2 --phi-override 3.141592653589793 --ell=-2..2 --s +1
    python main.py scan --sweep r_a=0.5,1,1.5 --methods exact --format json
    python main.py golden --out tests/data/golden.json
"""

import functools
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import click

from asymptotics import Case1Params, case1_comparison, energy_case1, energy_case2, n_max
from constants import (
    DEFAULT_ELL_MIN, DEFAULT_ELL_MAX, DEFAULT_EMAX, METHODS, SWEEP_PARAMETERS,
    OUTPUT_FORMATS, PHASE_CONVENTIONS, ORACLE_NODES, GOLDEN_NODES, VALIDITY_SAMPLES, VERSION,
)
from currents import (
    OccupationWindow, case1_source, case2_source, current_case1, current_case1_levelwise,
    current_case2, current_case2_levelwise, current_exact_source, current_numeric,
)
from errors import CavityError, ConfigError, ConvergenceFailure, SpectrumError, UnboundSpectrumError
from logconfig import configure_logging
from model import Channel, PhysicalConfig, derive, load_config, missing_line_charge
from oracle import GridSpec, fd_spectrum, golden_entry, sturm_count, write_golden
from quantize import EnergyLevel, SearchControls, levels_from_oracle, solve_channels, with_validity
from tables import Table, render

logger = logging.getLogger("main")

SPECTRUM_COLUMNS = ("method", "ell", "s", "n", "branch", "energy", "residual",
                    "validity_fraction", "gamma", "y_a", "phi_mac")
CURRENT_COLUMNS = ("method", "s", "branch", "ell_min", "ell_max", "phi_mac",
                   "literal", "levelwise", "numeric", "numeric_minus_levelwise")
COMPARISON_COLUMNS = ("ell", "s", "n", "exact", "case1_plus", "case1_minus")


def exit_code_for(exc):
    # rho <= 0 is a bad input, not a solver failure
    if isinstance(exc, (ConfigError, UnboundSpectrumError)):
        return 2
    if isinstance(exc, (SpectrumError, ConvergenceFailure)):
        return 3
    return 1


# ============================================================================
# MANIFEST
# ============================================================================

@dataclass(frozen=True)
class RunManifest:
    """What to compute: config, channels, methods, optional sweep, output format."""

    config: PhysicalConfig
    channels: tuple
    methods: tuple
    sweep: Optional[tuple] = None       # (parameter, values)
    output_format: str = "csv"
    e_max: float = DEFAULT_EMAX         # in units of omega_AC

    def __post_init__(self):
        if not self.channels:
            raise ConfigError("empty", parameter="channels")
        if not self.methods:
            raise ConfigError("empty", parameter="methods")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown method(s) {unknown}, expected a subset of {METHODS}", parameter="methods")
        if self.sweep is not None:
            name, values = self.sweep
            if name not in SWEEP_PARAMETERS:
                raise ConfigError(f"cannot sweep {name!r}, expected one of {SWEEP_PARAMETERS}", parameter="sweep")
            if not values:
                raise ConfigError("no sweep values", parameter="sweep")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"unknown format {self.output_format!r}", parameter="format")
        if not self.e_max > 0:
            raise ConfigError(f"must be > 0, got {self.e_max}", parameter="emax")

    def with_config(self, cfg):
        return RunManifest(cfg, self.channels, self.methods, self.sweep, self.output_format, self.e_max)


def parse_ell(text):
    """'a..b' or a single integer -> list of ell."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(text)]
    except ValueError:
        raise ConfigError(f"expected an integer or 'a..b', got {text!r}", parameter="ell") from None


def parse_spins(text):
    text = text.strip().lower()
    if text == "both":
        return [1, -1]
    if text in ("+1", "1", "+"):
        return [1]
    if text in ("-1", "-"):
        return [-1]
    raise ConfigError(f"expected +1, -1 or both, got {text!r}", parameter="s")


def parse_list(text, parameter):
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ConfigError("empty", parameter=parameter)
    return items


def parse_sweep(text):
    name, sep, values = text.partition("=")
    if not sep:
        raise ConfigError(f"expected <param>=<v1,v2,...>, got {text!r}", parameter="sweep")
    try:
        return name.strip(), tuple(float(v) for v in parse_list(values, "sweep"))
    except ValueError:
        raise ConfigError(f"non-numeric sweep value in {values!r}", parameter="sweep") from None


def build_config(config_path, phi_override=None, convention=None):
    cfg = load_config(config_path) if config_path else PhysicalConfig()
    if phi_override is not None:
        cfg = cfg.with_value("phi_override", phi_override)
    if convention is not None:
        cfg = cfg.with_value("phase_convention", convention)
    return cfg


def build_manifest(config_path, ell, spins, methods, e_max, output_format,
                   phi_override=None, convention=None, sweep=None):
    cfg = build_config(config_path, phi_override, convention)
    channels = tuple(Channel(l, s) for l in parse_ell(ell) for s in parse_spins(spins))
    return RunManifest(
        config=cfg,
        channels=channels,
        methods=tuple(parse_list(methods, "methods")),
        sweep=parse_sweep(sweep) if sweep else None,
        output_format=output_format,
        e_max=e_max,
    )


def metadata(manifest, command):
    cfg = manifest.config
    meta = {
        "version": VERSION,
        "command": command,
        "config": cfg.to_dict(),
        "phase_convention": cfg.phase_convention,
        "omega_ac": cfg.omega_ac,
        "missing_line_charge": missing_line_charge(cfg),
        "methods": list(manifest.methods),
        "e_max_omega": manifest.e_max,
    }
    if cfg.non_physical:
        meta["non_physical_phase"] = "phi_override replaces pi mu rho r_a^2"
    if manifest.sweep is not None:
        meta["sweep"] = {"parameter": manifest.sweep[0], "values": list(manifest.sweep[1])}
    return meta


# ============================================================================
# COMMAND BODIES
# ============================================================================

def _level_row(level, dp):
    return {
        "method": level.method, "ell": level.ell, "s": level.s, "n": level.n,
        "branch": level.branch,
        "energy": level.energy,
        "residual": level.residual if level.method == "exact" else None,
        "validity_fraction": level.validity_fraction,
        "gamma": dp.gamma, "y_a": dp.y_a, "phi_mac": dp.phi_mac,
    }


def _row_order(row):
    branch = {None: 0, "+": 0, "-": 1}[row["branch"]]
    return METHODS.index(row["method"]), row["ell"], row["s"], row["n"], branch


def spectrum_rows(manifest, controls=None, workers=1, oracle_nodes=ORACLE_NODES):
    """
    One row per level for every requested method and channel, ordered by
    (method, ell, s, n, branch).
    """
    cfg = manifest.config
    params = {ch: derive(cfg, ch) for ch in manifest.channels}
    e_abs = manifest.e_max * cfg.omega_ac
    rows = []

    if "exact" in manifest.methods:
        levels = solve_channels(cfg, manifest.channels, e_abs, controls, workers)
        for ch, dp in params.items():
            mine = [lv for lv in levels if (lv.ell, lv.s) == (ch.ell, ch.s)]
            rows.extend(_level_row(lv, dp) for lv in with_validity(mine, dp, VALIDITY_SAMPLES))

    for ch, dp in params.items():
        if "case1" in manifest.methods:
            top = n_max(dp)
            for n in range(0 if top is None else top + 1):
                for branch in ("+", "-"):
                    energy = energy_case1(Case1Params(branch, n, ch.ell, ch.s), dp)
                    rows.append(_level_row(EnergyLevel(n, ch.ell, ch.s, energy, "case1", branch=branch), dp))
        if "case2" in manifest.methods:
            n = 0
            while (energy := energy_case2(n, ch, dp)) <= e_abs:
                rows.append(_level_row(EnergyLevel(n, ch.ell, ch.s, energy, "case2"), dp))
                n += 1
        if "oracle" in manifest.methods:
            grid = GridSpec.for_params(dp, oracle_nodes)
            k = sturm_count(dp, grid, e_abs)
            if k:
                for lv in levels_from_oracle(fd_spectrum(dp, grid, k), dp):
                    rows.append(_level_row(lv, dp))
    return sorted(rows, key=_row_order)


def comparison_table(manifest, controls=None):
    """Exact levels next to both case-1 branches, reported without judgement."""
    cfg = manifest.config
    table = Table(COMPARISON_COLUMNS, metadata=metadata(manifest, "spectrum-comparison"))
    levels = solve_channels(cfg, manifest.channels, manifest.e_max * cfg.omega_ac, controls)
    for ch in manifest.channels:
        dp = derive(cfg, ch)
        mine = [lv for lv in levels if (lv.ell, lv.s) == (ch.ell, ch.s)]
        for row in case1_comparison(mine, dp):
            table.add(ell=ch.ell, s=ch.s, n=row.n, exact=row.exact, case1_plus=row.plus, case1_minus=row.minus)
    return table


def current_rows(manifest, branches, n_values=None, step=None, controls=None):
    """Literal, level-wise and numeric-derivative currents side by side."""
    cfg = manifest.config
    ells = sorted({ch.ell for ch in manifest.channels})
    spins = sorted({ch.s for ch in manifest.channels}, reverse=True)
    window = OccupationWindow(ells[0], ells[-1], n_values)
    rows = []
    for s in spins:
        dps = [derive(cfg, Channel(ell, s)) for ell in window.ells]
        phi = dps[0].phi_mac
        base = {"s": s, "ell_min": window.ell_min, "ell_max": window.ell_max, "phi_mac": phi}
        if "case1" in manifest.methods:
            for branch in branches:
                literal = current_case1(dps[0], window, branch)
                levelwise = current_case1_levelwise(dps[0], window, branch)
                numeric = current_numeric(case1_source(cfg, s, window, branch), window, phi, step)
                rows.append(dict(base, method="case1", branch=branch, literal=literal,
                                 levelwise=levelwise, numeric=numeric))
        if "case2" in manifest.methods:
            w2 = window if n_values else OccupationWindow(window.ell_min, window.ell_max, (0,))
            literal = current_case2(dps, s)
            levelwise = current_case2_levelwise(dps, w2.n_values)
            numeric = current_numeric(case2_source(cfg, s, w2), w2, phi, step)
            rows.append(dict(base, method="case2", branch=None, literal=literal,
                             levelwise=levelwise, numeric=numeric))
        if "exact" in manifest.methods:
            source = current_exact_source(cfg, s, window, manifest.e_max * cfg.omega_ac, controls)
            numeric = current_numeric(source, window, phi, step)
            rows.append(dict(base, method="exact", branch=None, literal=None,
                             levelwise=None, numeric=numeric))
    for row in rows:
        lw = row["levelwise"]
        row["numeric_minus_levelwise"] = None if lw is None else row["numeric"] - lw
    return rows


def scan_table(manifest, quantity, **kwargs):
    """Long-format table: one block of spectrum or current rows per swept value."""
    name, values = manifest.sweep
    columns = SPECTRUM_COLUMNS if quantity == "spectrum" else CURRENT_COLUMNS
    table = Table(("parameter", "value") + columns, metadata=metadata(manifest, f"scan-{quantity}"))
    for value in values:
        point = manifest.with_config(manifest.config.with_value(name, value))
        logger.info("scan %s = %g", name, value)
        if quantity == "spectrum":
            rows = spectrum_rows(point, **kwargs)
        else:
            rows = current_rows(point, **kwargs)
        for row in rows:
            table.add(parameter=name, value=value, **row)
    return table


def emit(text, out):
    if out:
        Path(out).write_text(text)
        logger.info("wrote %s", out)
    else:
        click.echo(text, nl=False)


# ============================================================================
# CLICK WIRING
# ============================================================================

class CavityGroup(click.Group):
    """Click group whose usage errors also print a single error[...] line."""

    def main(self, args=None, prog_name=None, **extra):
        extra.pop("standalone_mode", None)
        try:
            return super().main(args, prog_name, standalone_mode=False, **extra)
        except click.ClickException as exc:
            click.echo(f"error[usage]: {' '.join(exc.format_message().split())}", err=True)
            raise SystemExit(exc.exit_code)
        except click.Abort:
            click.echo("error[aborted]: interrupted", err=True)
            raise SystemExit(1)


def guarded(fn):
    """Map package errors to exit codes and one-line reasons on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CavityError as exc:
            logger.debug("command failed", exc_info=True)
            click.echo(exc.one_line(), err=True)
            raise SystemExit(exit_code_for(exc))
        except (ValueError, ArithmeticError) as exc:
            logger.debug("command failed", exc_info=True)
            click.echo(f"error[internal]: {' '.join(str(exc).split())}", err=True)
            raise SystemExit(1)

    return wrapper


def manifest_options(default_methods):
    def decorate(fn):
        options = [
            click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                         help="PhysicalConfig JSON (defaults: m = mu = rho = r_a = 1, r_b = 4)"),
            click.option("--ell", default=f"{DEFAULT_ELL_MIN}..{DEFAULT_ELL_MAX}", show_default=True,
                         help="ell or inclusive range a..b"),
            click.option("--s", "spins", default="both", show_default=True, help="+1, -1 or both"),
            click.option("--methods", default=default_methods, show_default=True,
                         help=f"comma-separated subset of {','.join(METHODS)}"),
            click.option("--emax", "e_max", type=float, default=DEFAULT_EMAX, show_default=True,
                         help="energy window in units of omega_AC"),
            click.option("--phi-override", type=float, default=None,
                         help="replace pi mu rho r_a^2 (non-physical, labelled in output)"),
            click.option("--convention", type=click.Choice(PHASE_CONVENTIONS), default=None,
                         help="phase convention entering gamma"),
            click.option("--format", "output_format", type=click.Choice(OUTPUT_FORMATS), default="csv",
                         show_default=True),
            click.option("--out", type=click.Path(dir_okay=False), default=None, help="write here instead of stdout"),
            click.option("--workers", type=int, default=1, show_default=True,
                         help="processes for the exact solver"),
            click.option("--oracle-nodes", type=int, default=ORACLE_NODES, show_default=True),
            click.option("--verify/--no-verify", default=False,
                         help="check exact root counts against the oracle"),
        ]
        for option in reversed(options):
            fn = option(fn)
        return fn
    return decorate


@click.group(cls=CavityGroup)
@click.version_option(VERSION, prog_name="cavity-spectrum")
@click.option("--log-level", default="WARNING", show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.option("--log-json/--no-log-json", default=False, help="JSON log records on stderr")
def main(log_level, log_json):
    """Bound states and persistent spin currents of a dipole outside a charged cavity."""
    configure_logging(log_level, json_format=log_json)


@main.command()
@manifest_options("exact,case2,oracle")
@click.option("--compare-out", type=click.Path(dir_okay=False), default=None,
              help="also write exact vs case-1 levels to this file")
@guarded
def spectrum(config_path, ell, spins, methods, e_max, phi_override, convention, output_format,
             out, workers, oracle_nodes, verify, compare_out):
    """Energy levels by every requested method."""
    manifest = build_manifest(config_path, ell, spins, methods, e_max, output_format,
                              phi_override, convention)
    controls = SearchControls(verify_with_oracle=verify, oracle_nodes=oracle_nodes)
    table = Table(SPECTRUM_COLUMNS, metadata=metadata(manifest, "spectrum"))
    for row in spectrum_rows(manifest, controls, workers, oracle_nodes):
        table.add(**row)
    emit(render(table, output_format), out)
    if compare_out:
        Path(compare_out).write_text(render(comparison_table(manifest, controls), output_format))


@main.command()
@manifest_options("case1,case2")
@click.option("--branch", type=click.Choice(["+", "-", "both"]), default="both", show_default=True,
              help="case-1 branch")
@click.option("--n", "n_list", default=None, help="comma-separated radial indices (default: all admissible / n = 0)")
@click.option("--step", type=float, default=None, help="central-difference step in Phi_MAC")
@guarded
def current(config_path, ell, spins, methods, e_max, phi_override, convention, output_format,
            out, workers, oracle_nodes, verify, branch, n_list, step):
    """Persistent spin currents: literal, level-wise and numeric columns."""
    manifest = build_manifest(config_path, ell, spins, methods, e_max, output_format,
                              phi_override, convention)
    controls = SearchControls(verify_with_oracle=verify, oracle_nodes=oracle_nodes)
    branches = ["+", "-"] if branch == "both" else [branch]
    n_values = tuple(int(n) for n in parse_list(n_list, "n")) if n_list else None
    table = Table(CURRENT_COLUMNS, metadata=metadata(manifest, "current"))
    for row in current_rows(manifest, branches, n_values, step, controls):
        table.add(**row)
    emit(render(table, output_format), out)


@main.command()
@manifest_options("exact,case2")
@click.option("--sweep", required=True, help="<param>=<v1,v2,...> with param in " + ",".join(SWEEP_PARAMETERS))
@click.option("--quantity", type=click.Choice(["spectrum", "current"]), default="spectrum", show_default=True)
@guarded
def scan(config_path, ell, spins, methods, e_max, phi_override, convention, output_format,
         out, workers, oracle_nodes, verify, sweep, quantity):
    """Spectrum or current against a swept parameter (long format)."""
    manifest = build_manifest(config_path, ell, spins, methods, e_max, output_format,
                              phi_override, convention, sweep)
    controls = SearchControls(verify_with_oracle=verify, oracle_nodes=oracle_nodes)
    if quantity == "spectrum":
        kwargs = {"controls": controls, "workers": workers, "oracle_nodes": oracle_nodes}
    else:
        kwargs = {"branches": ["+", "-"], "controls": controls}
    emit(render(scan_table(manifest, quantity, **kwargs), output_format), out)


@main.command()
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
@click.option("--ell", default="0", show_default=True)
@click.option("--s", "spins", default="+1", show_default=True)
@click.option("--k", type=int, default=5, show_default=True, help="eigenvalues per channel")
@click.option("--nodes", type=int, default=GOLDEN_NODES, show_default=True)
@guarded
def golden(out, config_path, ell, spins, k, nodes):
    """Write the oracle golden fixture (Richardson-extrapolated eigenvalues)."""
    cfg = build_config(config_path)
    channels = [Channel(l, s) for l in parse_ell(ell) for s in parse_spins(spins)]
    if not channels:
        raise ConfigError("empty", parameter="channels")
    write_golden(out, [golden_entry(cfg, ch, k, nodes) for ch in channels])


if __name__ == "__main__":
    sys.exit(main())
