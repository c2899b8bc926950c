import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from model import Channel, PhysicalConfig, derive  # noqa: E402


@pytest.fixture
def default_cfg():
    return PhysicalConfig()


@pytest.fixture
def default_dp(default_cfg):
    """ell = 0, s = +1 at the default config: gamma = -1/2, y_a = 1/2."""
    return derive(default_cfg, Channel(0, 1))


def _config_for_y_a(y_a, **extra):
    r_a = (2.0 * y_a) ** 0.5
    return PhysicalConfig(r_a=r_a, r_b=max(4.0, 2.0 * r_a), **extra)


@pytest.fixture
def config_for_y_a():
    """Factory: omega_AC = 1 and r_a chosen so that m omega r_a^2 / 2 = y_a."""
    return _config_for_y_a
