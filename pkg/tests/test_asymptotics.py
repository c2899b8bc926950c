import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from asymptotics import (
    PI3, Case1Params, admissible, case1_comparison, cosine_zeros, energy_case1, energy_case2,
    energy_landau, n_max, radicand, u_asymptotic_cosine, u_small_y_form, u_zeros,
)
from errors import ConfigError, CutoffViolation
from model import Channel, PhysicalConfig, derive
from quantize import EnergyLevel
from specfun import tricomi_u

E_CASE1_GROUND = -14.351655208658


@pytest.fixture
def case1_dp():
    return derive(PhysicalConfig(phi_override=2.0 * PI3), Channel(0, 1))


# ============================================================================
# case 1
# ============================================================================

def test_case1_ground_state(case1_dp):
    assert n_max(case1_dp) == 0
    assert radicand(0, case1_dp) == pytest.approx(0.75, rel=1e-14)
    energy = energy_case1(Case1Params.checked("+", 0, case1_dp), case1_dp)
    assert energy == pytest.approx(E_CASE1_GROUND, rel=1e-7)


def test_case1_branches_straddle_the_bare_term(case1_dp):
    plus = energy_case1(Case1Params("+", 0, 0, 1), case1_dp)
    minus = energy_case1(Case1Params("-", 0, 0, 1), case1_dp)
    # the branches differ by 2 (s Phi / pi^3) omega sqrt(R)
    assert minus - plus == pytest.approx(4.0 * math.sqrt(0.75), rel=1e-13)


def test_case1_past_cutoff_raises(case1_dp):
    with pytest.raises(CutoffViolation) as info:
        Case1Params.checked("+", 1, case1_dp)
    assert (info.value.n, info.value.n_max) == (1, 0)
    with pytest.raises(CutoffViolation):
        energy_case1(Case1Params("-", 3, 0, 1), case1_dp)


def test_case1_params_validation():
    with pytest.raises(ConfigError):
        Case1Params("0", 0, 0, 1)
    with pytest.raises(ConfigError):
        Case1Params("+", -1, 0, 1)


def test_no_cutoff_levels_without_positive_phase():
    assert n_max(derive(PhysicalConfig(phi_override=0.0), Channel(0, 1))) is None
    assert n_max(derive(PhysicalConfig(phi_override=-5.0), Channel(0, 1))) is None
    # default Phi = pi is far below the first threshold pi^3 / 2
    assert n_max(derive(PhysicalConfig(), Channel(0, -1))) is None


@given(
    st.floats(min_value=0.01, max_value=5000.0, allow_nan=False),
    st.integers(min_value=0, max_value=40),
)
@settings(max_examples=1000, deadline=None, derandomize=True)
def test_cutoff_law(phi, n):
    dp = derive(PhysicalConfig(phi_override=phi), Channel(0, 1))
    r = radicand(n, dp)
    assume(abs(r) > 1e-9)
    top = n_max(dp)
    if r > 0:
        assert top is not None and n <= top
        assert math.isfinite(energy_case1(Case1Params("+", n, 0, 1), dp))
    else:
        assert not admissible(n, dp)
        with pytest.raises(CutoffViolation):
            energy_case1(Case1Params("+", n, 0, 1), dp)


# ============================================================================
# case 2 and the Landau reference
# ============================================================================

def test_case2_fixture(default_cfg):
    ch = Channel(1, -1)
    dp = derive(default_cfg, ch)
    assert energy_case2(2, ch, dp) == pytest.approx(3.0, rel=1e-14)


def test_case2_degenerate_without_phase():
    cfg = PhysicalConfig(phi_override=0.0)
    for ell in range(-4, 1):
        ch = Channel(ell, 1)
        assert energy_case2(0, ch, derive(cfg, ch)) == 1.0
    ch = Channel(2, 1)
    assert energy_case2(0, ch, derive(cfg, ch)) == 3.0


def test_case2_rejects_negative_n(default_dp):
    with pytest.raises(ConfigError):
        energy_case2(-1, Channel(0, 1), default_dp)


@pytest.mark.parametrize("ell,s", [(0, 1), (2, -1), (-3, 1)])
def test_landau_reference_drops_the_missing_phase(default_cfg, ell, s):
    ch = Channel(ell, s)
    dp = derive(default_cfg, ch)
    bare = derive(PhysicalConfig(phi_override=0.0), ch)
    for n in range(4):
        assert energy_landau(n, ch, dp) == pytest.approx(energy_case2(n, ch, bare), rel=1e-15)


# ============================================================================
# asymptotic shapes
# ============================================================================

def test_cosine_zeros_are_unit_spaced_at_large_negative_a():
    zeros = cosine_zeros(1.0, 0.5, -60.0, -40.0)
    assert len(zeros) >= 15
    gaps = np.diff(zeros)
    assert np.all(np.abs(gaps - 1.0) < 0.05)


@pytest.mark.parametrize("n", [0, 1, 4])
def test_small_y_form_vanishes_at_negative_integers(n):
    assert u_small_y_form(-float(n), 2.5, 1e-3) == 0.0
    assert u_small_y_form(-n - 0.5, 2.5, 1e-3) != 0.0


def test_case1_comparison_stops_at_the_cutoff(case1_dp):
    levels = [EnergyLevel(n, 0, 1, 1.0 + n, "exact") for n in range(3)]
    rows = case1_comparison(levels, case1_dp)
    assert [row.n for row in rows] == [0, 1, 2]
    assert rows[0].plus == pytest.approx(E_CASE1_GROUND, rel=1e-7)
    assert rows[0].minus > rows[0].plus
    assert all(row.plus is None and row.minus is None for row in rows[1:])
    assert [row.exact for row in rows] == [1.0, 2.0, 3.0]


def test_cosine_form_vanishes_at_its_zeros():
    for a in cosine_zeros(1.5, 2.0, -30.0, -20.0):
        assert abs(u_asymptotic_cosine(a, 1.5, 2.0)) < 1e-10


def test_u_zeros_are_roots_of_u():
    zeros = u_zeros(1.0, 0.5, -12.0, -8.0)
    assert len(zeros) >= 3
    assert np.all(np.diff(zeros) > 0.5)
    for a in zeros:
        scale = abs(tricomi_u(a - 0.25, 1.0, 0.5).value) + abs(tricomi_u(a + 0.25, 1.0, 0.5).value)
        assert abs(tricomi_u(a, 1.0, 0.5).value) < 1e-8 * scale


def test_cosine_zeros_track_u_zeros_at_large_negative_a():
    # the cosine shape is the leading term as a -> -inf; its zeros drift from U's like 1/|a|
    b, x = 1.0, 0.5
    exact = u_zeros(b, x, -40.0, -20.0)
    shape = cosine_zeros(b, x, -40.5, -19.5)
    assert len(exact) >= 15
    matched = []
    for a in exact:
        nearest = min(shape, key=lambda z: abs(z - a))
        assert abs(nearest - a) <= 4.0 / abs(a)
        matched.append(nearest)
    assert len(set(matched)) == len(matched)


# ============================================================================
# phase relabeling and degeneracy
# ============================================================================

@pytest.mark.parametrize("s", [1, -1])
@pytest.mark.parametrize("phi", [0.0, 1.0, 2.5])
def test_case2_relabels_ell_under_a_flux_quantum(s, phi):
    # Phi_MAC = s |Phi|, so Phi_MAC -> Phi_MAC + 2 pi is |Phi| -> |Phi| + 2 pi s
    for ell in range(-5, 6):
        ch, moved = Channel(ell, s), Channel(ell + 1, s)
        dp = derive(PhysicalConfig(phi_override=phi), ch)
        shifted = derive(PhysicalConfig(phi_override=phi + 2.0 * math.pi * s), moved)
        assert shifted.phi_mac == pytest.approx(dp.phi_mac + 2.0 * math.pi, rel=1e-15, abs=1e-15)
        assert shifted.gamma == pytest.approx(dp.gamma, abs=1e-14)
        for n in range(3):
            assert energy_case2(n, moved, shifted) == pytest.approx(energy_case2(n, ch, dp), rel=1e-13)


def test_case2_stays_degenerate_where_s_gamma_is_negative():
    cfg = PhysicalConfig(phi_override=1.0)
    energies = {energy_case2(0, Channel(ell, 1), derive(cfg, Channel(ell, 1))) for ell in range(-10, 1)}
    assert energies == {1.0}
