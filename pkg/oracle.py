"""
Finite-difference eigenvalue oracle for the radial equation.

With u = sqrt(r) f the radial equation becomes

    -u'' + [(gamma^2 - 1/4) / r^2 + m^2 omega^2 r^2 / 4] u = tau u

on [r_a, r_max] with Dirichlet ends. Second-order central differences give
a symmetric tridiagonal matrix whose eigenvalues are counted with a Sturm
sequence and isolated by bisection (LAPACK stebz via scipy). Eigenvalues
come back as energies through the inverse of tau(E).
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match
from scipy.linalg import eigh_tridiagonal

from constants import (
    EPS, ORACLE_NODES, ORACLE_MIN_NODES, ORACLE_DECAY_LENGTHS,
    ORACLE_MIN_DECAY_LENGTHS, ORACLE_ABS_TOL, TRUNCATION_MASS, GOLDEN_NODES,
)
from errors import ConfigError
from model import Channel, PhysicalConfig, derive

logger = logging.getLogger(__name__)

SCHEME = "liouville-central2"

GOLDEN_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "config": {"type": "object"},
            "channel": {
                "type": "object",
                "properties": {"ell": {"type": "integer"}, "s": {"enum": [1, -1]}},
                "required": ["ell", "s"],
            },
            "grid": {
                "type": "object",
                "properties": {
                    "r_min": {"type": "number"},
                    "r_max": {"type": "number"},
                    "n_nodes": {"type": "integer"},
                    "scheme": {"type": "string"},
                },
                "required": ["r_min", "r_max", "n_nodes"],
            },
            "eigenvalues": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        },
        "required": ["config", "channel", "grid", "eigenvalues"],
    },
}


@dataclass(frozen=True)
class GridSpec:
    """Uniform interior grid r_min + h * (1..n_nodes), h = (r_max - r_min) / (n_nodes + 1)."""

    r_min: float
    r_max: float
    n_nodes: int = ORACLE_NODES
    scheme: str = SCHEME

    def __post_init__(self):
        if self.n_nodes < ORACLE_MIN_NODES:
            raise ConfigError(f"need at least {ORACLE_MIN_NODES} nodes, got {self.n_nodes}",
                              parameter="n_nodes")
        if not self.r_max > self.r_min > 0:
            raise ConfigError(f"need 0 < r_min < r_max, got [{self.r_min}, {self.r_max}]",
                              parameter="r_max")
        if self.scheme != SCHEME:
            raise ConfigError(f"unsupported scheme {self.scheme!r}", parameter="scheme")

    @classmethod
    def for_params(cls, dp, n_nodes=ORACLE_NODES, decay_lengths=ORACLE_DECAY_LENGTHS):
        return cls(dp.r_a, dp.r_a + decay_lengths * dp.decay_length, n_nodes)

    @property
    def h(self):
        return (self.r_max - self.r_min) / (self.n_nodes + 1)

    def nodes(self):
        return self.r_min + self.h * np.arange(1, self.n_nodes + 1)

    def refined(self):
        """Same interval with h halved (2N + 1 interior nodes)."""
        return GridSpec(self.r_min, self.r_max, 2 * self.n_nodes + 1, self.scheme)

    def check(self, dp):
        if abs(self.r_min - dp.r_a) > 1e-12 * dp.r_a:
            raise ConfigError(f"grid starts at {self.r_min}, wall is at r_a = {dp.r_a}",
                              parameter="r_min")
        needed = dp.r_a + ORACLE_MIN_DECAY_LENGTHS * dp.decay_length
        if self.r_max < needed * (1.0 - 1e-12):
            raise ConfigError(
                f"r_max = {self.r_max:g} does not cover {ORACLE_MIN_DECAY_LENGTHS:g} decay lengths "
                f"(needs >= {needed:g})", parameter="r_max")

    def to_dict(self):
        return {"r_min": self.r_min, "r_max": self.r_max, "n_nodes": self.n_nodes, "scheme": self.scheme}


@dataclass(frozen=True)
class OracleSpectrum:
    """Lowest-k oracle energies plus the diagnostics that go with them."""

    energies: np.ndarray                 # on the given grid
    refined: Optional[np.ndarray]        # on the h/2 grid
    extrapolated: Optional[np.ndarray]   # Richardson (4 E_h/2 - E_h) / 3
    node_counts: tuple
    validity_fractions: tuple            # eigenvector mass beyond r_b
    truncation_mass: float               # outer-10% mass of the k-th eigenvector
    grid: GridSpec

    @property
    def best(self):
        return self.extrapolated if self.extrapolated is not None else self.energies

    @property
    def truncated(self):
        return self.truncation_mass > TRUNCATION_MASS


def tridiagonal(dp, grid):
    """Diagonal and off-diagonal of the discretised operator, in tau units."""
    r = grid.nodes()
    h2 = grid.h ** 2
    d = 2.0 / h2 + (dp.gamma ** 2 - 0.25) / r ** 2 + (dp.m * dp.omega_ac * r) ** 2 / 4.0
    e = np.full(grid.n_nodes - 1, -1.0 / h2)
    return d, e


def _tau_tol(dp):
    return 2.0 * dp.m * ORACLE_ABS_TOL * dp.omega_ac


def _lowest(dp, grid, k, vectors=False):
    d, e = tridiagonal(dp, grid)
    return eigh_tridiagonal(d, e, eigvals_only=not vectors, select="i",
                            select_range=(0, k - 1), lapack_driver="stebz", tol=_tau_tol(dp))


def _outer_mass(vec):
    tail = vec[int(0.9 * len(vec)):]
    return float(np.dot(tail, tail) / np.dot(vec, vec))


def eigenvector_nodes(vec, rel_floor=1e-10):
    """Interior sign changes, ignoring entries below rel_floor * max|vec|."""
    v = vec[np.abs(vec) > rel_floor * np.max(np.abs(vec))]
    return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


def fd_eigenvalues(dp, grid, k, check_truncation=True):
    """
    Lowest k Dirichlet eigenvalues on grid, as energies.

    Args:
        dp: DerivedParams
        grid: GridSpec covering [r_a, r_max]
        k: number of eigenvalues, >= 1
        check_truncation: log a warning when the k-th eigenvector leaks
            more than TRUNCATION_MASS into the outer 10% of the grid

    Returns:
        np.ndarray: k energies, increasing
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}", parameter="k")
    grid.check(dp)
    taus = _lowest(dp, grid, k)
    if check_truncation:
        d, e = tridiagonal(dp, grid)
        _, vec = eigh_tridiagonal(d, e, select="i", select_range=(k - 1, k - 1),
                                  lapack_driver="stebz", tol=_tau_tol(dp))
        mass = _outer_mass(vec[:, 0])
        if mass > TRUNCATION_MASS:
            logger.warning("oracle grid truncates level %d (ell=%d s=%+d): outer mass %.2e",
                           k - 1, dp.ell, dp.s, mass)
    return dp.energy_of_tau(np.asarray(taus))


def fd_spectrum(dp, grid, k, richardson=True):
    """
    fd_eigenvalues plus Richardson extrapolation over h and h/2, node counts,
    the eigenvector mass beyond r_b and the truncation diagnostic.
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}", parameter="k")
    grid.check(dp)
    taus, vecs = _lowest(dp, grid, k, vectors=True)
    energies = dp.energy_of_tau(np.asarray(taus))

    r = grid.nodes()
    beyond = r > dp.r_b
    validity = []
    nodes = []
    for j in range(k):
        u = vecs[:, j]
        total = float(np.dot(u, u))
        validity.append(float(np.dot(u[beyond], u[beyond]) / total) if total > 0 else 0.0)
        nodes.append(eigenvector_nodes(u))
    mass = _outer_mass(vecs[:, k - 1])
    if mass > TRUNCATION_MASS:
        logger.warning("oracle grid truncates level %d (ell=%d s=%+d): outer mass %.2e",
                       k - 1, dp.ell, dp.s, mass)

    refined = extrapolated = None
    if richardson:
        fine = grid.refined()
        refined = dp.energy_of_tau(np.asarray(_lowest(dp, fine, k)))
        extrapolated = (4.0 * refined - energies) / 3.0
    return OracleSpectrum(energies, refined, extrapolated, tuple(nodes), tuple(validity), mass, grid)


def _sturm(d, e2, x):
    count = 0
    q = 1.0
    for i, di in enumerate(d):
        q = di - x - (e2[i - 1] / q if i else 0.0)
        if q == 0.0:
            q = -EPS * (abs(di) + abs(x))
        if q < 0.0:
            count += 1
    return count


def sturm_count(dp, grid, energy):
    """Number of oracle eigenvalues strictly below energy (negative LDL^T pivots)."""
    grid.check(dp)
    d, e = tridiagonal(dp, grid)
    return _sturm(d.tolist(), (e * e).tolist(), dp.tau_of_E(energy))


def fitted_order(dp, n_nodes, k, levels=3):
    """
    Observed convergence order of the lowest k eigenvalues from three grids
    N, 2N+1, 4N+3 (h, h/2, h/4). One order per eigenvalue.
    """
    grid = GridSpec.for_params(dp, n_nodes)
    runs = []
    for _ in range(levels):
        runs.append(fd_eigenvalues(dp, grid, k, check_truncation=False))
        grid = grid.refined()
    e0, e1, e2 = runs[:3]
    return np.log2(np.abs(e0 - e1) / np.abs(e1 - e2))


# ============================================================================
# GOLDEN FIXTURE
# ============================================================================

@dataclass(frozen=True)
class GoldenEntry:
    config: PhysicalConfig
    channel: Channel
    grid: GridSpec
    eigenvalues: tuple


def golden_entry(cfg, ch, k=5, n_nodes=GOLDEN_NODES):
    """Richardson-extrapolated oracle energies for one channel."""
    dp = derive(cfg, ch)
    grid = GridSpec.for_params(dp, n_nodes)
    spectrum = fd_spectrum(dp, grid, k)
    return GoldenEntry(cfg, ch, grid, tuple(float(x) for x in spectrum.best))


def write_golden(path, entries):
    payload = [
        {
            "config": entry.config.to_dict(),
            "channel": {"ell": entry.channel.ell, "s": entry.channel.s},
            "grid": entry.grid.to_dict(),
            "eigenvalues": list(entry.eigenvalues),
        }
        for entry in entries
    ]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
    logger.info("wrote %d golden entries to %s", len(payload), path)


def load_golden(path):
    """Read a golden fixture file back into GoldenEntry records."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read golden file {path}: {exc}", parameter="golden") from exc
    error = best_match(Draft202012Validator(GOLDEN_SCHEMA).iter_errors(data))
    if error is not None:
        raise ConfigError(error.message, parameter="golden")
    entries = []
    for item in data:
        grid = item["grid"]
        entries.append(GoldenEntry(
            config=PhysicalConfig.from_dict(item["config"]),
            channel=Channel(item["channel"]["ell"], item["channel"]["s"]),
            grid=GridSpec(grid["r_min"], grid["r_max"], grid["n_nodes"], grid.get("scheme", SCHEME)),
            eigenvalues=tuple(item["eigenvalues"]),
        ))
    return entries


# ============================================================================
# TESTING (run this file directly for a quick self-check)
# ============================================================================

if __name__ == "__main__":
    dp = derive(PhysicalConfig(), Channel(0, 1))
    grid = GridSpec.for_params(dp, 4000)
    spectrum = fd_spectrum(dp, grid, 5)
    print("Finite-difference oracle self-check\n" + "=" * 50)
    for n, (e, x) in enumerate(zip(spectrum.energies, spectrum.best)):
        print(f"n = {n}: E_h = {e:.10f}   E_rich = {x:.10f}   nodes = {spectrum.node_counts[n]}")
    mid = 0.5 * (spectrum.energies[2] + spectrum.energies[3])
    print(f"sturm_count between levels 2 and 3: {sturm_count(dp, grid, mid)}")
    print(f"fitted order: {fitted_order(dp, 2000, 3)}")
    print(f"missing phase check: gamma = {dp.gamma}, Phi = {dp.phi_mac / math.pi:g} pi")
