"""
Closed-form spectra in the two asymptotic regimes.

Case 1 (a_bar -> infinity, y_a fixed): the cosine form of U gives negative
levels with a radial cutoff n <= n_max. Case 2 (y_a << 1): U is dominated
by 1/Gamma(a_bar) and levels sit at a_bar = -n.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from errors import ConfigError, CutoffViolation
from specfun import log_gamma, rgamma, tricomi_u

logger = logging.getLogger(__name__)

PI3 = math.pi ** 3
BRANCHES = ("+", "-")


@dataclass(frozen=True)
class Case1Params:
    """The branch of the +- and the radial index of a case-1 level."""

    branch: str
    n: int
    ell: int
    s: int

    def __post_init__(self):
        if self.branch not in BRANCHES:
            raise ConfigError(f"branch must be '+' or '-', got {self.branch!r}", parameter="branch")
        if self.n < 0:
            raise ConfigError(f"radial index must be >= 0, got {self.n}", parameter="n")

    @classmethod
    def checked(cls, branch, n, dp):
        """Build and enforce the cutoff n <= n_max for dp."""
        params = cls(branch, n, dp.ell, dp.s)
        _require_admissible(n, dp)
        return params

    @property
    def sign(self):
        return 1.0 if self.branch == "+" else -1.0


def n_max(dp) -> Optional[int]:
    """
    Largest integer n with n < s Phi_MAC / (2 pi^3) - 1/4, or None when
    no n qualifies (including s Phi_MAC <= 0).
    """
    s_phi = dp.s * dp.phi_mac
    if s_phi <= 0:
        return None
    bound = s_phi / (2.0 * PI3) - 0.25
    top = math.ceil(bound) - 1
    return top if top >= 0 else None


def radicand(n, dp):
    """1 - pi^3 (4n + 1) / (2 s Phi_MAC)."""
    return 1.0 - PI3 * (4 * n + 1) / (2.0 * dp.s * dp.phi_mac)


def admissible(n, dp):
    top = n_max(dp)
    return top is not None and n <= top


def _require_admissible(n, dp):
    if not admissible(n, dp):
        top = n_max(dp)
        logger.debug("cutoff: n=%d s=%+d Phi=%g n_max=%s", n, dp.s, dp.phi_mac, top)
        raise CutoffViolation(
            f"n = {n} exceeds the radial cutoff n_max = {top} at s Phi_MAC = {dp.s * dp.phi_mac:g}",
            n=n, n_max=top)


def energy_case1(p, dp):
    """
    E = -omega [n - (s/2)(ell + (1-s)/2 - s Phi/pi) + 3/4]
        - (s Phi / pi^3) omega [1 +- sqrt(1 - pi^3 (4n+1) / (2 s Phi))]

    Raises:
        CutoffViolation: n > n_max (the square root would be imaginary)
    """
    _require_admissible(p.n, dp)
    w, s, phi = dp.omega_ac, p.s, dp.phi_mac
    head = -w * (p.n - 0.5 * s * (p.ell + 0.5 * (1 - s) - s * phi / math.pi) + 0.75)
    tail = -(s * phi / PI3) * w * (1.0 + p.sign * math.sqrt(radicand(p.n, dp)))
    return head + tail


def energy_case2(n, ch, dp):
    """E = omega [n + |gamma|/2 + (s/2) gamma + 1]; no upper limit on n."""
    if n < 0:
        raise ConfigError(f"radial index must be >= 0, got {n}", parameter="n")
    g = dp.gamma
    return dp.omega_ac * (n + 0.5 * abs(g) + 0.5 * ch.s * g + 1.0)


def energy_landau(n, ch, dp):
    """Landau-Aharonov-Casher reference: case 2 with the missing phase switched off."""
    return energy_case2(n, ch, dp.with_phase(0.0))


def u_asymptotic_cosine(a, b, x):
    """cos(sqrt(2bx - 4ax) - b pi/2 + a pi + pi/4), the large -a shape of U(a, b; x)."""
    return math.cos(_cosine_phase(a, b, x))


def _cosine_phase(a, b, x):
    return math.sqrt(2.0 * b * x - 4.0 * a * x) - b * math.pi / 2.0 + a * math.pi + math.pi / 4.0


def u_small_y_form(a, b, x):
    """Gamma(b - a) / Gamma(a) * x^{1-b}, the small-y shape that vanishes at a = -n."""
    if rgamma(a) == 0.0:
        return 0.0
    lg, sign = log_gamma(b - a)
    return sign * math.exp(lg) * rgamma(a) * x ** (1.0 - b)


# ============================================================================
# DIAGNOSTICS
# ============================================================================

def cosine_zeros(b, x, a_lo, a_hi, step=0.05):
    """Zeros in a of the cosine form on [a_lo, a_hi], a_hi < 0."""
    grid = np.arange(a_hi, a_lo - step, -step)
    values = [u_asymptotic_cosine(a, b, x) for a in grid]
    zeros = []
    for i in range(len(grid) - 1):
        if values[i] == 0.0:
            zeros.append(float(grid[i]))
        elif values[i] * values[i + 1] < 0:
            zeros.append(brentq(u_asymptotic_cosine, grid[i + 1], grid[i], args=(b, x), xtol=1e-13))
    return sorted(zeros)


def u_zeros(b, x, a_lo, a_hi, step=0.05):
    """Sign changes in a of tricomi_u on [a_lo, a_hi], refined with brentq."""
    f = lambda a: tricomi_u(a, b, x).value
    grid = np.arange(a_hi, a_lo - step, -step)
    values = [f(a) for a in grid]
    zeros = []
    for i in range(len(grid) - 1):
        if values[i] == 0.0:
            zeros.append(float(grid[i]))
        elif values[i] * values[i + 1] < 0:
            zeros.append(brentq(f, grid[i + 1], grid[i], xtol=1e-13))
    return sorted(zeros)


@dataclass(frozen=True)
class Case1Comparison:
    n: int
    exact: float
    plus: Optional[float]
    minus: Optional[float]


def case1_comparison(exact_levels, dp):
    """
    Exact levels next to both case-1 branches (None past the cutoff).
    Reported only; the two are not expected to agree.
    """
    rows = []
    for level in exact_levels:
        if admissible(level.n, dp):
            plus = energy_case1(Case1Params("+", level.n, dp.ell, dp.s), dp)
            minus = energy_case1(Case1Params("-", level.n, dp.ell, dp.s), dp)
        else:
            plus = minus = None
        rows.append(Case1Comparison(level.n, level.energy, plus, minus))
    return rows


# ============================================================================
# TESTING (run this file directly for a quick self-check)
# ============================================================================

if __name__ == "__main__":
    from model import Channel, PhysicalConfig, derive

    cfg = PhysicalConfig(phi_override=2.0 * PI3)
    ch = Channel(0, 1)
    dp = derive(cfg, ch)
    print("Closed-form spectra self-check\n" + "=" * 50)
    print(f"n_max = {n_max(dp)}   radicand(0) = {radicand(0, dp):.6f}")
    print(f"E_case1(+, n=0) = {energy_case1(Case1Params('+', 0, 0, 1), dp):.7f}   (expect -14.3516552)")
    dp2 = derive(PhysicalConfig(), Channel(1, -1))
    print(f"E_case2(n=2, ell=1, s=-1) = {energy_case2(2, Channel(1, -1), dp2):.7f}   (expect 3)")
    print(f"cosine zeros on [-12, -8]: {np.round(cosine_zeros(1.0, 0.5, -12.0, -8.0), 4)}")
    print(f"U zeros on [-12, -8]:      {np.round(u_zeros(1.0, 0.5, -12.0, -8.0), 4)}")
