"""
Physical configuration and everything derived from it.

Field of the charged shell, the two effective vector potentials, the missing
phase, the reduced radial parameters (omega_AC, Phi_MAC, gamma, y_a, tau) and
a three-route diagnostic of the radial effective potential.
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from constants import (
    DEFAULT_MASS, DEFAULT_MU, DEFAULT_RHO, DEFAULT_R_A, DEFAULT_R_B,
    PHASE_CONVENTIONS, DEFAULT_PHASE_CONVENTION,
)
from errors import ConfigError, DomainError, UnboundSpectrumError

logger = logging.getLogger(__name__)

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "m": {"type": "number"},
        "mu": {"type": "number"},
        "rho": {"type": "number"},
        "r_a": {"type": "number"},
        "r_b": {"type": "number"},
        "phi_override": {"type": ["number", "null"]},
        "phase_convention": {"enum": list(PHASE_CONVENTIONS)},
    },
    "required": ["m", "mu", "rho", "r_a", "r_b"],
    "additionalProperties": False,
}


# ============================================================================
# CONFIGURATION
# ============================================================================

@dataclass(frozen=True)
class PhysicalConfig:
    """
    The experiment's dials, natural units (hbar = c = epsilon_0 = 1).

    phi_override replaces pi mu rho r_a^2 as the phase magnitude; the stored
    Phi_MAC is then s * phi_override. It is a methodological knob and is
    labelled non-physical in every output that uses it.
    """

    m: float = DEFAULT_MASS
    mu: float = DEFAULT_MU
    rho: float = DEFAULT_RHO
    r_a: float = DEFAULT_R_A
    r_b: float = DEFAULT_R_B
    phi_override: Optional[float] = None
    phase_convention: str = DEFAULT_PHASE_CONVENTION

    def __post_init__(self):
        for name in ("m", "mu", "rho", "r_a", "r_b"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"must be a finite number, got {value!r}", parameter=name)
        if self.m <= 0:
            raise ConfigError(f"mass must be > 0, got {self.m}", parameter="m")
        if self.mu <= 0:
            raise ConfigError(f"dipole moment must be > 0, got {self.mu}", parameter="mu")
        if self.r_a <= 0:
            raise ConfigError(f"inner radius must be > 0, got {self.r_a}", parameter="r_a")
        if self.r_b < self.r_a:
            raise ConfigError(f"outer radius {self.r_b} is below r_a = {self.r_a}", parameter="r_b")
        if self.phi_override is not None and not math.isfinite(self.phi_override):
            raise ConfigError(f"must be finite, got {self.phi_override}", parameter="phi_override")
        if self.phase_convention not in PHASE_CONVENTIONS:
            raise ConfigError(
                f"unknown convention {self.phase_convention!r}, expected one of {PHASE_CONVENTIONS}",
                parameter="phase_convention")

    @property
    def omega_ac(self):
        return self.mu * self.rho / self.m

    @property
    def non_physical(self):
        return self.phi_override is not None

    def to_dict(self):
        out = {"m": self.m, "mu": self.mu, "rho": self.rho, "r_a": self.r_a, "r_b": self.r_b}
        if self.phi_override is not None:
            out["phi_override"] = self.phi_override
        if self.phase_convention != DEFAULT_PHASE_CONVENTION:
            out["phase_convention"] = self.phase_convention
        return out

    def with_value(self, name, value):
        """Copy with one dial changed (used by sweeps)."""
        return replace(self, **{name: value})

    @classmethod
    def from_dict(cls, data):
        """Validate a decoded JSON document and build the config."""
        error = best_match(Draft202012Validator(CONFIG_SCHEMA).iter_errors(data))
        if error is not None:
            raise ConfigError(error.message, parameter=_offending_key(error, data))
        return cls(**data)


def _offending_key(error, data):
    if error.path:
        return str(error.path[-1])
    if error.validator == "required":
        missing = [k for k in CONFIG_SCHEMA["required"] if k not in data]
        return missing[0] if missing else None
    if error.validator == "additionalProperties" and isinstance(data, dict):
        extra = sorted(set(data) - set(CONFIG_SCHEMA["properties"]))
        return extra[0] if extra else None
    return None


def load_config(path):
    """Read a PhysicalConfig from a JSON file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"no such file: {path}", parameter="config") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})",
                          parameter="config") from exc
    cfg = PhysicalConfig.from_dict(data)
    logger.debug("loaded config %s from %s", cfg.to_dict(), path)
    return cfg


@dataclass(frozen=True)
class Channel:
    """One symmetry sector (ell, s) with p_z = 0."""

    ell: int
    s: int
    p_z: float = field(default=0.0)

    def __post_init__(self):
        if isinstance(self.ell, bool) or int(self.ell) != self.ell:
            raise ConfigError(f"ell must be an integer, got {self.ell!r}", parameter="ell")
        if self.s not in (1, -1):
            raise ConfigError(f"spin projection must be +1 or -1, got {self.s!r}", parameter="s")
        if self.p_z != 0.0:
            raise ConfigError("only p_z = 0 is supported", parameter="p_z")
        object.__setattr__(self, "ell", int(self.ell))
        object.__setattr__(self, "s", int(self.s))


# ============================================================================
# DERIVED PARAMETERS
# ============================================================================

@dataclass(frozen=True)
class DerivedParams:
    """
    Reduced radial parameters of one channel.

    tau(E) = 2 m E - s m omega gamma - m omega is affine with slope 2m;
    the wall condition uses a_bar(E) = |gamma|/2 + 1/2 - tau(E) / (2 m omega)
    and b_bar = |gamma| + 1.
    """

    m: float
    omega_ac: float
    phi_mac: float
    gamma: float
    y_a: float
    ell: int
    s: int
    r_a: float
    r_b: float
    convention: str = DEFAULT_PHASE_CONVENTION

    def tau_of_E(self, energy):
        return 2.0 * self.m * energy - self.s * self.m * self.omega_ac * self.gamma - self.m * self.omega_ac

    def energy_of_tau(self, tau):
        return (tau + self.s * self.m * self.omega_ac * self.gamma + self.m * self.omega_ac) / (2.0 * self.m)

    @property
    def b_bar(self):
        return abs(self.gamma) + 1.0

    def a_bar(self, energy):
        return abs(self.gamma) / 2.0 + 0.5 - self.tau_of_E(energy) / (2.0 * self.m * self.omega_ac)

    def energy_of_a_bar(self, a):
        # a_bar = |g|/2 + s g/2 + 1 - E/omega
        return self.omega_ac * (abs(self.gamma) / 2.0 + self.s * self.gamma / 2.0 + 1.0 - a)

    @property
    def decay_length(self):
        """1/sqrt(m omega), the Gaussian length of the radial tail."""
        return 1.0 / math.sqrt(self.m * self.omega_ac)

    @property
    def dgamma_dphi(self):
        return -1.0 / (2.0 * math.pi) if self.convention == "literal" else -self.s / (2.0 * math.pi)

    def with_phase(self, phi_mac):
        """Same channel with Phi_MAC replaced, omega_AC and y_a held fixed."""
        return replace(self, phi_mac=phi_mac,
                       gamma=_gamma(self.ell, self.s, phi_mac, self.convention))


def _gamma(ell, s, phi_mac, convention):
    if convention == "literal":
        return ell + 0.5 * (1 - s) - phi_mac / (2.0 * math.pi)
    # the phase entering gamma carries no s
    return ell + 0.5 * (1 - s) - s * phi_mac / (2.0 * math.pi)


def phase_magnitude(cfg):
    """|Phi_MAC|: pi mu rho r_a^2, or phi_override when set."""
    if cfg.phi_override is not None:
        return float(cfg.phi_override)
    return math.pi * cfg.mu * cfg.rho * cfg.r_a ** 2


def derive(cfg, ch, convention=None):
    """
    Derived parameters of channel ch.

    Args:
        cfg: PhysicalConfig
        ch: Channel
        convention: "literal" or "unsigned"; defaults to cfg.phase_convention

    Raises:
        UnboundSpectrumError: omega_AC <= 0 (no confining oscillator)
    """
    convention = convention or cfg.phase_convention
    if convention not in PHASE_CONVENTIONS:
        raise ConfigError(f"unknown convention {convention!r}", parameter="phase_convention")
    omega = cfg.omega_ac
    if omega <= 0:
        raise UnboundSpectrumError(
            f"omega_AC = mu rho / m = {omega:g} <= 0: the effective oscillator does not bind",
            parameter="rho")
    phi = ch.s * phase_magnitude(cfg)
    return DerivedParams(
        m=cfg.m,
        omega_ac=omega,
        phi_mac=phi,
        gamma=_gamma(ch.ell, ch.s, phi, convention),
        y_a=cfg.m * omega * cfg.r_a ** 2 / 2.0,
        ell=ch.ell,
        s=ch.s,
        r_a=cfg.r_a,
        r_b=cfg.r_b,
        convention=convention,
    )


# ============================================================================
# FIELDS AND POTENTIALS
# ============================================================================

def electric_field(r, cfg):
    """Radial field E_r = rho r / 2 - rho r_a^2 / (2 r); zero in the cavity."""
    if r <= 0:
        raise DomainError(f"radius must be > 0, got {r}", parameter="r")
    if r < cfg.r_a:
        return 0.0
    return cfg.rho * r / 2.0 - cfg.rho * cfg.r_a ** 2 / (2.0 * r)


def _radial_curl(flux, r, r_a, h):
    """(1/r) d(flux)/dr; second-order one-sided when the stencil would cross r_a."""
    if r >= r_a > r - h:
        return (-3.0 * flux(r) + 4.0 * flux(r + h) - flux(r + 2.0 * h)) / (2.0 * h * r)
    return (flux(r + h) - flux(r - h)) / (2.0 * h * r)


def field_divergence(r, cfg, h=None):
    """(1/r) d(r E_r)/dr by finite difference."""
    h = h or 1e-5 * r
    return _radial_curl(lambda x: x * electric_field(x, cfg), r, cfg.r_a, h)


def effective_potentials(r, ch, cfg):
    """
    Azimuthal components (A1, A2) of mu sigma x E with sigma^3 -> s.

    A1 = s mu rho r / 2 gives the uniform effective field,
    A2 = s mu rho r_a^2 / (2 r) carries the missing phase.
    """
    if r < cfg.r_a:
        raise DomainError(f"potentials are defined for r >= r_a = {cfg.r_a}, got {r}", parameter="r")
    a1 = ch.s * cfg.mu * cfg.rho * r / 2.0
    a2 = ch.s * cfg.mu * cfg.rho * cfg.r_a ** 2 / (2.0 * r)
    return a1, a2


def missing_phase(cfg, s):
    """Phi_MAC = s pi mu rho r_a^2."""
    return s * math.pi * cfg.mu * cfg.rho * cfg.r_a ** 2


def missing_line_charge(cfg):
    """Charge per unit length absent from the cavity, rho r_a^2."""
    return cfg.rho * cfg.r_a ** 2


def effective_magnetic_field(ch, cfg):
    """z-component of curl A1, s mu rho."""
    return ch.s * cfg.mu * cfg.rho


def a2_loop_integral(r, ch, cfg, nodes=10_000):
    """Trapezoid quadrature of A2 . dl around the circle of radius r."""
    phi = np.linspace(0.0, 2.0 * np.pi, nodes + 1)
    _, a2 = effective_potentials(r, ch, cfg)
    integrand = np.full_like(phi, a2 * r)
    return float(np.trapezoid(integrand, phi))


def curl_a1(r, ch, cfg, h=None):
    """(1/r) d(r A1)/dr by finite difference."""
    h = h or 1e-5 * r
    return _radial_curl(lambda x: x * effective_potentials(x, ch, cfg)[0], r, cfg.r_a, h)


# ============================================================================
# CONSISTENCY DIAGNOSTIC
# ============================================================================

@dataclass(frozen=True)
class ConsistencyRow:
    r: float
    direct: float       # assembled from pi^2, -mu^2 E^2/2m, mu div E / 2m
    reduced: float      # read off the reduced radial equation
    expanded: float     # term by term from the expanded wave equation

    @property
    def direct_minus_reduced(self):
        return self.direct - self.reduced

    @property
    def expanded_minus_reduced(self):
        return self.expanded - self.reduced


@dataclass(frozen=True)
class ConsistencyReport:
    ell: int
    s: int
    convention: str
    centrifugal: float      # gamma^2, coefficient of 1/r^2
    r2_coefficient: float   # m^2 omega^2 / 4
    tau_offset: float       # s m omega gamma + m omega
    rows: tuple

    @property
    def max_abs_difference(self):
        return max((max(abs(row.direct_minus_reduced), abs(row.expanded_minus_reduced))
                    for row in self.rows), default=0.0)


def _direct_potential(r, ch, cfg):
    """
    Effective radial potential assembled from the Pauli Hamiltonian.

    pi_phi = (ell + 1/2 - s/2) / r + s mu E_r, pi_z = -mu sigma_phi E_r,
    so pi_z^2 cancels -mu^2 E^2 / 2m exactly.
    """
    e_r = electric_field(r, cfg)
    j = ch.ell + 0.5
    pi_phi = (j - ch.s / 2.0) / r + ch.s * cfg.mu * e_r
    pi_z_sq = (cfg.mu * e_r) ** 2
    return (pi_phi ** 2 + pi_z_sq - (cfg.mu * e_r) ** 2 + cfg.mu * field_divergence(r, cfg)) / (2.0 * cfg.m)


def _reduced_potential(r, dp):
    m, w, g = dp.m, dp.omega_ac, dp.gamma
    return g * g / (2.0 * m * r * r) + m * w * w * r * r / 8.0 + dp.s * w * g / 2.0 + w / 2.0


def _expanded_potential(r, dp, cfg):
    m, s = cfg.m, dp.s
    j = dp.ell + 0.5
    f = dp.phi_mac / (2.0 * math.pi)
    mr = m * r * r
    terms = (
        j * j / (2.0 * mr),                  # -(1/2m r^2) d^2/dphi^2
        -s * j / (2.0 * mr),                 # i sigma^3 / (2 m r^2) d/dphi
        1.0 / (8.0 * mr),
        s * f / (2.0 * mr),
        -2.0 * f * j / (2.0 * mr),           # i/(m r^2) (Phi/2pi) d/dphi
        f * f / (2.0 * mr),
        cfg.mu * cfg.rho / (4.0 * m),
        s * j * cfg.mu * cfg.rho / (2.0 * m),
        (cfg.mu * cfg.rho) ** 2 * r * r / (8.0 * m),
        -s * f * cfg.mu * cfg.rho / (2.0 * m),
    )
    return math.fsum(terms)


def consistency_report(cfg, ch, r_samples, convention=None):
    """
    Compare the radial effective potential built three ways at each radius.

    Informational only: agreement is reported, never asserted. Under the
    literal phase convention the three routes coincide to rounding; the
    unsigned convention shifts gamma for s = -1 and the difference shows up
    in the direct-minus-reduced column.
    """
    dp = derive(cfg, ch, convention)
    rows = []
    for r in r_samples:
        r = float(r)
        if not cfg.r_a <= r <= 10.0 * cfg.r_a:
            raise DomainError(f"sample radius {r} outside [r_a, 10 r_a]", parameter="r_samples")
        rows.append(ConsistencyRow(
            r=r,
            direct=_direct_potential(r, ch, cfg),
            reduced=_reduced_potential(r, dp),
            expanded=_expanded_potential(r, dp, cfg),
        ))
    report = ConsistencyReport(
        ell=ch.ell,
        s=ch.s,
        convention=dp.convention,
        centrifugal=dp.gamma ** 2,
        r2_coefficient=dp.m ** 2 * dp.omega_ac ** 2 / 4.0,
        tau_offset=dp.s * dp.m * dp.omega_ac * dp.gamma + dp.m * dp.omega_ac,
        rows=tuple(rows),
    )
    logger.debug("consistency report ell=%d s=%+d: max |diff| = %.3e",
                 ch.ell, ch.s, report.max_abs_difference)
    return report


# ============================================================================
# TESTING (run this file directly for a quick self-check)
# ============================================================================

if __name__ == "__main__":
    cfg = PhysicalConfig()
    ch = Channel(0, 1)
    dp = derive(cfg, ch)
    print("Model self-check\n" + "=" * 50)
    print(f"omega_AC = {dp.omega_ac:g}   Phi_MAC = {dp.phi_mac:.10f}   gamma = {dp.gamma:g}   y_a = {dp.y_a:g}")
    print(f"E_r(2)   = {electric_field(2.0, cfg):g}   div E(2) = {field_divergence(2.0, cfg):.10f}")
    print(f"loop(A2) = {a2_loop_integral(3.0, ch, cfg):.12f}")
    for row in consistency_report(cfg, Channel(1, -1), [1.0, 2.0, 5.0]).rows:
        print(f"r = {row.r:4.1f}  direct - reduced = {row.direct_minus_reduced:+.2e}"
              f"  expanded - reduced = {row.expanded_minus_reduced:+.2e}")
