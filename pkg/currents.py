"""
Persistent spin currents at T = 0, I = -sum dE/dPhi_MAC.

The case-1 and case-2 closed forms are kept term for term. Next to
them sit level-wise sums of the analytic derivative of each closed-form
level and a central-difference current for any spectrum source. The
literal forms and the level-wise sums are different quantities: the
literal forms carry their bare terms once rather than once per level.
All derivatives are taken in Phi_MAC with omega_AC held fixed.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

from asymptotics import PI3, Case1Params, admissible, energy_case1, energy_case2, n_max, radicand
from constants import CURRENT_PHASE_STEP
from errors import ConfigError, DegenerateGammaError, ImaginaryCurrentError, LabelMismatchError
from model import Channel, derive
from quantize import EnergyLevel, solve_channel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OccupationWindow:
    """
    Occupied states: ell in [ell_min, ell_max] and either every admissible n
    (n_values None, case 1) or an explicit list of radial indices.
    """

    ell_min: int
    ell_max: int
    n_values: Optional[tuple] = None

    def __post_init__(self):
        if self.ell_min > self.ell_max:
            raise ConfigError(f"empty ell window [{self.ell_min}, {self.ell_max}]", parameter="ell")
        if self.n_values is not None:
            if len(self.n_values) == 0:
                raise ConfigError("n list is empty", parameter="n")
            if any(n < 0 for n in self.n_values):
                raise ConfigError(f"negative radial index in {self.n_values}", parameter="n")
            object.__setattr__(self, "n_values", tuple(sorted(set(int(n) for n in self.n_values))))

    @property
    def ells(self):
        return range(self.ell_min, self.ell_max + 1)

    def contains(self, level):
        return (self.ell_min <= level.ell <= self.ell_max
                and (self.n_values is None or level.n in self.n_values))


# ============================================================================
# CASE 1
# ============================================================================

def _case1_indices(dp, w):
    if w.n_values is None:
        top = n_max(dp)
        return [] if top is None else list(range(top + 1))
    for n in w.n_values:
        if not admissible(n, dp):
            logger.debug("imaginary current: n=%d beyond n_max=%s", n, n_max(dp))
            raise ImaginaryCurrentError(
                f"n = {n} has radicand {radicand(n, dp):.6g} < 0 "
                f"(n_max = {n_max(dp)}); the current would be imaginary", parameter="n")
    return list(w.n_values)


def _case1_bracket(n, dp):
    """s omega / pi^3 sqrt(R) + omega (4n+1) / (4 Phi sqrt(R))."""
    root = math.sqrt(radicand(n, dp))
    w = dp.omega_ac
    return dp.s * w / PI3 * root + w * (4 * n + 1) / (4.0 * dp.phi_mac * root)


def current_case1(dp, w, branch):
    """
    I = omega/(2 pi) - s omega/pi^3 +- sum_n [ s omega/pi^3 sqrt(R_n)
        + omega (4n+1) / (4 Phi sqrt(R_n)) ],  R_n = 1 - pi^3 (4n+1) / (2 s Phi).

    Raises:
        ImaginaryCurrentError: a requested n is past the cutoff
    """
    sign = Case1Params(branch, 0, dp.ell, dp.s).sign
    terms = [_case1_bracket(n, dp) for n in _case1_indices(dp, w)]
    return dp.omega_ac / (2.0 * math.pi) - dp.s * dp.omega_ac / PI3 + sign * math.fsum(terms)


def current_case1_levelwise(dp, w, branch):
    """-sum over (ell, n) of the analytic dE/dPhi of each case-1 level."""
    sign = Case1Params(branch, 0, dp.ell, dp.s).sign
    bare = dp.omega_ac / (2.0 * math.pi) + dp.s * dp.omega_ac / PI3
    per_ell = [bare + sign * _case1_bracket(n, dp) for n in _case1_indices(dp, w)]
    return len(w.ells) * math.fsum(per_ell)


# ============================================================================
# CASE 2
# ============================================================================

def _sign_gamma(dp):
    if dp.gamma == 0.0:
        logger.debug("degenerate gamma at ell=%d", dp.ell)
        raise DegenerateGammaError(f"gamma = 0 at ell = {dp.ell}: gamma/|gamma| is undefined", ell=dp.ell)
    return 1.0 if dp.gamma > 0 else -1.0


def current_case2(dps, s):
    """
    I = s omega/(4 pi) + sum_ell omega/(4 pi) gamma/|gamma|.

    Args:
        dps: DerivedParams for each summed ell (same omega_AC)
        s: spin projection
    """
    if not dps:
        raise ConfigError("no channels to sum over", parameter="ell")
    w = dps[0].omega_ac
    unit = w / (4.0 * math.pi)
    return s * unit + math.fsum(unit * _sign_gamma(dp) for dp in dps)


def current_case2_levelwise(dps, n_values=(0,)):
    """-sum over (ell, n) of the analytic dE/dPhi of each case-2 level."""
    if not dps:
        raise ConfigError("no channels to sum over", parameter="ell")
    terms = []
    for dp in dps:
        slope = 0.5 * (_sign_gamma(dp) + dp.s) * dp.dgamma_dphi
        terms.extend(-dp.omega_ac * slope for _ in n_values)
    return math.fsum(terms)


# ============================================================================
# NUMERIC DERIVATIVE
# ============================================================================

SpectrumSource = Callable[[float], list]


def current_numeric(source, w, phi, h=None):
    """
    I = -sum (E(Phi + h) - E(Phi - h)) / (2h) over the levels in w.

    Args:
        source: callable Phi_MAC -> list of EnergyLevel
        w: OccupationWindow
        phi: Phi_MAC at which to differentiate
        h: step; default CURRENT_PHASE_STEP * |phi| (or CURRENT_PHASE_STEP at phi = 0)

    Raises:
        LabelMismatchError: the (n, ell, s) labels differ between Phi +- h
    """
    h = h or CURRENT_PHASE_STEP * (abs(phi) if phi != 0 else 1.0)
    plus = {lv.label: lv.energy for lv in source(phi + h) if w.contains(lv)}
    minus = {lv.label: lv.energy for lv in source(phi - h) if w.contains(lv)}
    if plus.keys() != minus.keys():
        lost = sorted(set(plus) ^ set(minus))
        raise LabelMismatchError(f"level labels change between Phi +- h: {lost[:5]}", parameter="phi")
    # fixed (ell, s, n) order
    keys = sorted(plus, key=lambda k: (k[1], k[2], k[0]))
    return -math.fsum((plus[k] - minus[k]) / (2.0 * h) for k in keys)


def case1_source(cfg, s, w, branch):
    """Phi -> case-1 levels of every ell in w (admissible n, or w.n_values)."""
    bases = [derive(cfg, Channel(ell, s)) for ell in w.ells]

    def source(phi):
        levels = []
        for base in bases:
            dp = base.with_phase(phi)
            indices = w.n_values if w.n_values is not None else range((n_max(dp) or -1) + 1)
            for n in indices:
                if admissible(n, dp):
                    energy = energy_case1(Case1Params(branch, n, dp.ell, dp.s), dp)
                    levels.append(EnergyLevel(n, dp.ell, dp.s, energy, "case1", branch=branch))
        return levels

    return source


def case2_source(cfg, s, w):
    """Phi -> case-2 levels of every ell in w, n in w.n_values (default n = 0)."""
    bases = [derive(cfg, Channel(ell, s)) for ell in w.ells]
    indices = w.n_values if w.n_values is not None else (0,)

    def source(phi):
        levels = []
        for base in bases:
            dp = base.with_phase(phi)
            ch = Channel(dp.ell, dp.s)
            levels.extend(EnergyLevel(n, dp.ell, dp.s, energy_case2(n, ch, dp), "case2") for n in indices)
        return levels

    return source


def current_exact_source(cfg, s, w, e_max, controls=None, padding=1.25):
    """
    Phi -> exact levels. The labels are fixed by a solve at the configured
    phase (levels below e_max); shifted solves search up to padding * e_max
    so a level near the top of the window is still found at Phi +- h.
    """
    bases = [derive(cfg, Channel(ell, s)) for ell in w.ells]
    labels = {lv.label for base in bases for lv in solve_channel(base, e_max, controls)}

    def source(phi):
        levels = []
        for base in bases:
            found = solve_channel(base.with_phase(phi), padding * e_max, controls)
            levels.extend(lv for lv in found if lv.label in labels)
        return levels

    return source


# ============================================================================
# TESTING (run this file directly for a quick self-check)
# ============================================================================

if __name__ == "__main__":
    from model import PhysicalConfig

    cfg = PhysicalConfig(phi_override=2.0 * PI3)
    dp = derive(cfg, Channel(0, 1))
    window = OccupationWindow(0, 0, (0,))
    print("Persistent current self-check\n" + "=" * 50)
    print(f"case 1 literal   = {current_case1(dp, window, '+'):.7f}   (expect 0.1594892)")
    print(f"case 1 levelwise = {current_case1_levelwise(dp, window, '+'):.10f}")
    print(f"case 1 numeric   = {current_numeric(case1_source(cfg, 1, window, '+'), window, dp.phi_mac):.10f}")

    cfg = PhysicalConfig()
    dps = [derive(cfg, Channel(ell, 1)) for ell in range(-2, 3)]
    window = OccupationWindow(-2, 2, (0,))
    print(f"case 2 literal   = {current_case2(dps, 1):.10f}   (expect 0)")
    print(f"case 2 levelwise = {current_case2_levelwise(dps):.10f}")
    print(f"case 2 numeric   = {current_numeric(case2_source(cfg, 1, window), window, dps[0].phi_mac):.10f}")
