"""
Exact bound-state solver.

A level is a root in E of the wall condition U(a_bar(E), b_bar; y_a) = 0.
a_bar is affine in E, so the scan runs in a_bar (step 0.05, starting at
a_bar = b_bar and moving down to a_bar(E_max)), sign changes are bisected,
and the root count can be checked against the finite-difference oracle.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson

from constants import (
    SCAN_STEP, BISECTION_REL_WIDTH, BISECTION_MAX_ITER, MAX_SCAN_REFINEMENTS,
    RESIDUAL_FLAG_FRACTION, PROFILE_SAMPLES, PROFILE_DECAY_LENGTHS,
    TAIL_WARN_FRACTION, ORACLE_NODES, METHODS,
)
from errors import ConfigError, MissedRootError, SolverConvergenceError
from model import derive
from specfun import tricomi_u

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchControls:
    """Per-call overrides of the scan and bisection knobs."""

    scan_step: float = SCAN_STEP
    rel_width: float = BISECTION_REL_WIDTH
    max_iter: int = BISECTION_MAX_ITER
    max_refinements: int = MAX_SCAN_REFINEMENTS
    verify_with_oracle: bool = False
    oracle_nodes: int = ORACLE_NODES
    strict: bool = False        # raise MissedRootError instead of only logging

    def __post_init__(self):
        if not 0 < self.scan_step <= 0.5:
            raise ConfigError(f"scan step must be in (0, 0.5], got {self.scan_step}", parameter="scan_step")
        if not 0 < self.rel_width < 1:
            raise ConfigError(f"relative width must be in (0, 1), got {self.rel_width}", parameter="rel_width")


@dataclass(frozen=True)
class EnergyLevel:
    """One bound state and how it was obtained."""

    n: int
    ell: int
    s: int
    energy: float
    method: str
    residual: float = 0.0
    bracket_width: float = 0.0
    residual_scale: float = 1.0     # max |U| at the initial bracket ends
    flagged: bool = False           # an evaluation err exceeded 10% of the local |U| scale
    validity_fraction: Optional[float] = None
    branch: Optional[str] = None    # "+" / "-" for case 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if self.n < 0:
            raise ValueError(f"radial index must be >= 0, got {self.n}")

    @property
    def label(self):
        return (self.n, self.ell, self.s)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Sampled, normalised radial wavefunction f_s(r) on [r_a, r_max]."""

    radii: np.ndarray
    values: np.ndarray
    norm: float
    mass_beyond_rb: float
    tail_fraction: float
    wall_residual: float

    @property
    def nodes(self):
        """Sign changes on (r_a, r_max), wall sample excluded."""
        v = self.values[1:]
        v = v[np.abs(v) > 1e-10 * np.max(np.abs(v))]
        return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


# ============================================================================
# RESIDUAL
# ============================================================================

def _wall_value(a, dp):
    return tricomi_u(a, dp.b_bar, dp.y_a)


def _unreliable(err, scale):
    return err > RESIDUAL_FLAG_FRACTION * scale


def quantization_residual(energy, dp):
    """
    U(a_bar, b_bar; y_a) at energy E.

    a_bar = |gamma|/2 + 1/2 - tau(E) / (2 m omega_AC), b_bar = |gamma| + 1.
    Evaluations whose error estimate exceeds 10% of |U| are logged.
    """
    a = dp.a_bar(energy)
    value = _wall_value(a, dp)
    if _unreliable(value.abs_err_estimate, abs(value.value)):
        logger.warning("unreliable wall value U(%.6g, %.6g; %.6g) = %.3e +- %.1e",
                       a, dp.b_bar, dp.y_a, value.value, value.abs_err_estimate)
    return value.value


# ============================================================================
# ROOT ENUMERATION
# ============================================================================

def _scan(dp, a_top, a_bottom, step):
    """
    U on a descending a-grid. A sample is flagged when its error estimate
    exceeds 10% of the largest |U| among itself and its two neighbours, so a
    sample that merely sits next to a zero is not.
    """
    count = max(1, int(math.ceil((a_top - a_bottom) / step)))
    grid = np.linspace(a_top, a_bottom, count + 1)
    evals = [_wall_value(float(a), dp) for a in grid]
    values = [e.value for e in evals]
    flags = []
    for i, e in enumerate(evals):
        scale = max(abs(v) for v in values[max(0, i - 1):i + 2])
        flagged = _unreliable(e.abs_err_estimate, scale)
        if flagged:
            logger.warning("unreliable wall value U(%.6g, %.6g; %.6g) = %.3e +- %.1e",
                           grid[i], dp.b_bar, dp.y_a, e.value, e.abs_err_estimate)
        flags.append(flagged)
    return grid, values, flags


def _bisect(dp, a_hi, a_lo, u_hi, u_lo, controls):
    """
    Bisect a sign change of U between a_hi > a_lo; returns (a, |U|, width, flagged).

    Midpoint errors are judged against the larger |U| at the initial bracket
    ends: |U| at the midpoints goes to zero by construction.
    """
    span = a_hi - a_lo
    scale = max(abs(u_hi), abs(u_lo))
    worst = 0.0
    for _ in range(controls.max_iter):
        if a_hi - a_lo <= controls.rel_width * span:
            break
        mid = 0.5 * (a_hi + a_lo)
        value = _wall_value(mid, dp)
        worst = max(worst, value.abs_err_estimate)
        if value.value == 0.0:
            a_hi = a_lo = mid
            u_hi = u_lo = 0.0
            break
        if (value.value > 0) == (u_hi > 0):
            a_hi, u_hi = mid, value.value
        else:
            a_lo, u_lo = mid, value.value
    else:
        raise SolverConvergenceError(
            f"bisection did not reach relative width {controls.rel_width:g} in {controls.max_iter} steps",
            parameter="rel_width")
    flagged = _unreliable(worst, scale)
    if flagged:
        logger.warning("unreliable root bracket [%.12g, %.12g] of U(a, %.6g; %.6g): error %.1e against |U| %.3e",
                       a_lo, a_hi, dp.b_bar, dp.y_a, worst, scale)
    # keep the endpoint with the smaller |U|
    if abs(u_hi) <= abs(u_lo):
        return a_hi, abs(u_hi), a_hi - a_lo, flagged
    return a_lo, abs(u_lo), a_hi - a_lo, flagged


def _roots(dp, e_max, controls):
    a_top = dp.b_bar
    a_bottom = dp.a_bar(e_max)
    if a_bottom >= a_top:
        return []
    grid, values, flags = _scan(dp, a_top, a_bottom, controls.scan_step)
    roots = []
    for i in range(len(grid) - 1):
        a_hi, a_lo = float(grid[i]), float(grid[i + 1])
        u_hi, u_lo = values[i], values[i + 1]
        if u_hi == 0.0 and i > 0:
            continue        # counted as the lower end of the previous cell
        if u_lo == 0.0:
            roots.append((a_lo, 0.0, 0.0, flags[i + 1], abs(u_hi)))
            continue
        if (u_hi > 0) == (u_lo > 0):
            continue
        a, res, width, bad = _bisect(dp, a_hi, a_lo, u_hi, u_lo, controls)
        roots.append((a, res, width, bad or flags[i] or flags[i + 1], max(abs(u_hi), abs(u_lo))))
    return roots


def _levels_from_roots(roots, dp):
    levels = []
    for n, (a, res, width, flagged, scale) in enumerate(sorted(roots, key=lambda r: -r[0])):
        levels.append(EnergyLevel(
            n=n, ell=dp.ell, s=dp.s,
            energy=dp.energy_of_a_bar(a),
            method="exact",
            residual=res,
            bracket_width=width * dp.omega_ac,
            residual_scale=scale,
            flagged=flagged,
        ))
    return levels


def _oracle_count(dp, e_max, controls):
    from oracle import GridSpec, sturm_count

    grid = GridSpec.for_params(dp, controls.oracle_nodes)
    return sturm_count(dp, grid, e_max)


def solve_channel(dp, e_max, controls=None):
    """
    All exact levels of one channel with E in (E_min, E_max), E_min at a_bar = b_bar.

    Args:
        dp: DerivedParams of the channel
        e_max: upper energy bound, > 0
        controls: SearchControls; with verify_with_oracle the root count is
            compared with the oracle's Sturm count and the scan is refined
            (step halved) up to max_refinements times on disagreement

    Returns:
        list[EnergyLevel]: indexed n = 0, 1, ... by increasing energy

    Raises:
        MissedRootError: counts still disagree and controls.strict is set
    """
    controls = controls or SearchControls()
    if not e_max > 0:
        raise ConfigError(f"E_max must be > 0, got {e_max}", parameter="emax")

    roots = _roots(dp, e_max, controls)
    if controls.verify_with_oracle:
        expected = _oracle_count(dp, e_max, controls)
        step = controls.scan_step
        for attempt in range(controls.max_refinements):
            if len(roots) >= expected:
                break
            step /= 2.0
            logger.info("ell=%d s=%+d: %d roots vs %d oracle levels, refining scan step to %g",
                        dp.ell, dp.s, len(roots), expected, step)
            roots = _roots(dp, e_max, replace(controls, scan_step=step))
        if len(roots) != expected:
            message = (f"ell={dp.ell} s={dp.s:+d}: found {len(roots)} roots below E_max = {e_max:g}, "
                       f"oracle counts {expected}")
            logger.warning("suspected missed root: %s", message)
            if controls.strict:
                raise MissedRootError(message, found=len(roots), expected=expected, parameter="emax")

    levels = _levels_from_roots(roots, dp)
    logger.debug("ell=%d s=%+d: %d exact levels below %g", dp.ell, dp.s, len(levels), e_max)
    return levels


def _solve_one(args):
    cfg, ch, e_max, controls = args
    return solve_channel(derive(cfg, ch), e_max, controls)


def solve_channels(cfg, channels, e_max, controls=None, workers=1):
    """
    solve_channel over several channels, optionally in worker processes.

    Results are merged in (ell, s, n) order regardless of completion order.
    """
    jobs = [(cfg, ch, e_max, controls) for ch in channels]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_solve_one, jobs))
    else:
        results = [_solve_one(job) for job in jobs]
    merged = [level for levels in results for level in levels]
    return sorted(merged, key=lambda lv: (lv.ell, lv.s, lv.n))


def levels_from_oracle(spectrum, dp):
    """EnergyLevel rows (method "oracle") from an oracle.OracleSpectrum."""
    return [
        EnergyLevel(n=n, ell=dp.ell, s=dp.s, energy=float(e), method="oracle",
                    residual=0.0, bracket_width=0.0,
                    validity_fraction=spectrum.validity_fractions[n])
        for n, e in enumerate(spectrum.best)
    ]


# ============================================================================
# WAVEFUNCTION
# ============================================================================

def wavefunction(level, dp, r_max=None, n_samples=PROFILE_SAMPLES):
    """
    f_s(y) = e^{-y/2} y^{|gamma|/2} U(a_bar, b_bar; y), y = m omega r^2 / 2,
    sampled on a geometric grid over [r_a, r_max] and normalised with the
    measure 2 pi r dr. The Gaussian tail past r_max is estimated and a
    warning is logged when it exceeds 1e-6 of the norm.
    """
    if (level.ell, level.s) != (dp.ell, dp.s):
        raise ConfigError(f"level (ell={level.ell}, s={level.s}) does not belong to this channel",
                          parameter="level")
    if n_samples < 3:
        raise ConfigError(f"need at least 3 samples, got {n_samples}", parameter="n_samples")
    r_max = r_max or dp.r_a + PROFILE_DECAY_LENGTHS * dp.decay_length
    if r_max <= dp.r_a:
        raise ConfigError(f"r_max = {r_max} must exceed r_a = {dp.r_a}", parameter="r_max")

    a = dp.a_bar(level.energy)
    b = dp.b_bar
    k = dp.m * dp.omega_ac / 2.0
    radii = np.geomspace(dp.r_a, r_max, n_samples)
    values = np.empty(n_samples)
    for i, r in enumerate(radii):
        y = k * r * r
        values[i] = math.exp(-y / 2.0) * y ** (abs(dp.gamma) / 2.0) * tricomi_u(a, b, y).value
    wall = float(values[0])
    values[0] = 0.0

    density = 2.0 * np.pi * radii * values ** 2
    body = float(simpson(density, x=radii))
    # f^2 ~ exp(-m omega r^2 / 2) past r_max
    tail = 2.0 * np.pi * values[-1] ** 2 / (dp.m * dp.omega_ac)
    total = body + tail
    tail_fraction = tail / total
    if tail_fraction > TAIL_WARN_FRACTION:
        logger.warning("wavefunction n=%d ell=%d s=%+d: tail past r_max = %g holds %.2e of the norm",
                       level.n, level.ell, level.s, r_max, tail_fraction)

    scale = 1.0 / math.sqrt(total)
    values *= scale
    density *= scale ** 2
    if dp.r_b < r_max:
        cumulative = cumulative_trapezoid(density, x=radii, initial=0.0)
        inside = float(np.interp(dp.r_b, radii, cumulative)) / float(cumulative[-1])
        mass_beyond = max(0.0, 1.0 - inside * (1.0 - tail_fraction))
    else:
        mass_beyond = tail_fraction
    norm = float(simpson(density, x=radii)) + tail / total
    return RadialProfile(radii, values, norm, mass_beyond, tail_fraction, wall * scale)


def with_validity(levels, dp, n_samples=PROFILE_SAMPLES):
    """Attach the probability fraction beyond r_b to each exact level."""
    return [replace(lv, validity_fraction=wavefunction(lv, dp, n_samples=n_samples).mass_beyond_rb)
            for lv in levels]


# ============================================================================
# TESTING (run this file directly for a quick self-check)
# ============================================================================

if __name__ == "__main__":
    from model import Channel, PhysicalConfig

    dp = derive(PhysicalConfig(), Channel(0, 1))
    print("Exact solver self-check\n" + "=" * 50)
    print(f"gamma = {dp.gamma}, b_bar = {dp.b_bar}, y_a = {dp.y_a}")
    for level in solve_channel(dp, 12.0):
        profile = wavefunction(level, dp, n_samples=400)
        print(f"n = {level.n}: E = {level.energy:.12f}  |U| = {level.residual:.1e}  "
              f"nodes = {profile.nodes}  beyond r_b = {profile.mass_beyond_rb:.2e}")
