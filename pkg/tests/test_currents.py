import math

import pytest

from asymptotics import PI3
from currents import (
    OccupationWindow, case1_source, case2_source, current_case1, current_case1_levelwise,
    current_case2, current_case2_levelwise, current_exact_source, current_numeric,
)
from errors import ConfigError, DegenerateGammaError, ImaginaryCurrentError, LabelMismatchError
from model import Channel, PhysicalConfig, derive
from quantize import EnergyLevel

I_CASE1_GROUND = 0.159489164811


@pytest.fixture
def case1_cfg():
    return PhysicalConfig(phi_override=2.0 * PI3)


# ============================================================================
# occupation window
# ============================================================================

def test_window_normalises_n_values():
    w = OccupationWindow(-1, 1, (3, 0, 3, 1))
    assert w.n_values == (0, 1, 3)
    assert list(w.ells) == [-1, 0, 1]
    assert w.contains(EnergyLevel(1, 0, 1, 2.0, "exact"))
    assert not w.contains(EnergyLevel(2, 0, 1, 2.0, "exact"))
    assert not w.contains(EnergyLevel(0, 2, 1, 2.0, "exact"))


@pytest.mark.parametrize("args", [(2, 1), (0, 0, ()), (0, 0, (-1,))])
def test_window_validation(args):
    with pytest.raises(ConfigError):
        OccupationWindow(*args)


# ============================================================================
# case 1
# ============================================================================

def test_case1_literal_current(case1_cfg):
    dp = derive(case1_cfg, Channel(0, 1))
    w = OccupationWindow(0, 0, (0,))
    assert current_case1(dp, w, "+") == pytest.approx(I_CASE1_GROUND, rel=1e-7)
    assert current_case1(dp, OccupationWindow(0, 0), "+") == current_case1(dp, w, "+")


def test_case1_current_without_admissible_levels(default_dp):
    # Phi = pi has no level below the cutoff; only the bare terms remain
    w = OccupationWindow(0, 0)
    expected = 1.0 / (2.0 * math.pi) - 1.0 / PI3
    assert current_case1(default_dp, w, "+") == pytest.approx(expected, rel=1e-15)
    assert current_case1(default_dp, w, "-") == pytest.approx(expected, rel=1e-15)
    assert current_case1_levelwise(default_dp, w, "+") == 0.0


def test_case1_imaginary_current(case1_cfg):
    dp = derive(case1_cfg, Channel(0, 1))
    with pytest.raises(ImaginaryCurrentError) as info:
        current_case1(dp, OccupationWindow(0, 0, (0, 1)), "+")
    assert info.value.parameter == "n"


@pytest.mark.parametrize("branch", ["+", "-"])
def test_case1_numeric_matches_levelwise(case1_cfg, branch):
    w = OccupationWindow(-1, 1, (0,))
    dp = derive(case1_cfg, Channel(0, 1))
    numeric = current_numeric(case1_source(case1_cfg, 1, w, branch), w, dp.phi_mac)
    assert numeric == pytest.approx(current_case1_levelwise(dp, w, branch), rel=1e-7)


def test_case1_literal_and_levelwise_differ(case1_cfg):
    dp = derive(case1_cfg, Channel(0, 1))
    w = OccupationWindow(0, 0, (0,))
    literal = current_case1(dp, w, "+")
    levelwise = current_case1_levelwise(dp, w, "+")
    # one level: the forms differ only in the sign of the s omega / pi^3 term
    assert levelwise - literal == pytest.approx(2.0 / PI3, rel=1e-12)


# ============================================================================
# case 2
# ============================================================================

def _case2_dps(phi, ells=range(-2, 3), s=1):
    cfg = PhysicalConfig(phi_override=phi)
    return [derive(cfg, Channel(ell, s)) for ell in ells]


def test_case2_symmetric_window_cancels():
    assert current_case2(_case2_dps(math.pi), 1) == pytest.approx(0.0, abs=1e-15)


def test_case2_jumps_when_gamma_changes_sign():
    unit = 1.0 / (4.0 * math.pi)
    before = current_case2(_case2_dps(math.pi), 1)
    after = current_case2(_case2_dps(3.0 * math.pi), 1)
    assert after - before == pytest.approx(-2.0 * unit, rel=1e-12)
    # constant between sign changes
    assert current_case2(_case2_dps(1.9 * math.pi), 1) == before


def test_case2_degenerate_gamma():
    with pytest.raises(DegenerateGammaError) as info:
        current_case2(_case2_dps(0.0), 1)
    assert info.value.ell == 0
    with pytest.raises(ConfigError):
        current_case2([], 1)


@pytest.mark.parametrize("s", [1, -1])
def test_case2_numeric_matches_levelwise(s):
    cfg = PhysicalConfig()
    w = OccupationWindow(-2, 2, (0, 1))
    dps = [derive(cfg, Channel(ell, s)) for ell in w.ells]
    numeric = current_numeric(case2_source(cfg, s, w), w, dps[0].phi_mac)
    assert numeric == pytest.approx(current_case2_levelwise(dps, w.n_values), rel=1e-8, abs=1e-12)


# ============================================================================
# numeric derivative
# ============================================================================

def test_numeric_current_rejects_label_changes():
    def source(phi):
        return [EnergyLevel(0, 0, 1, phi, "exact")] if phi > 1.0 else []

    with pytest.raises(LabelMismatchError):
        current_numeric(source, OccupationWindow(0, 0), 1.0)


def test_numeric_current_of_linear_source():
    def source(phi):
        return [EnergyLevel(n, 0, 1, (n + 1) * 0.25 * phi, "exact") for n in range(3)]

    w = OccupationWindow(0, 0, (0, 2))
    assert current_numeric(source, w, 2.0) == pytest.approx(-(0.25 + 0.75), rel=1e-9)


def test_exact_current_is_step_stable():
    cfg = PhysicalConfig()
    w = OccupationWindow(0, 1, (0, 1))
    source = current_exact_source(cfg, 1, w, 6.0)
    phi = derive(cfg, Channel(0, 1)).phi_mac
    coarse = current_numeric(source, w, phi, h=1e-4)
    fine = current_numeric(source, w, phi, h=5e-5)
    assert fine == pytest.approx(coarse, rel=1e-5)
