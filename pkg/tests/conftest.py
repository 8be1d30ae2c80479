import numpy as np
import pytest

#: one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []

from tsresolvent.baseflow import cgl_plane_wave, trivial_base_flow, vdp_orbit
from tsresolvent.floquet import floquet_pair
from tsresolvent.grid import SpectralGrid
from tsresolvent.systems import CglParams, build_system


@pytest.fixture(scope="session")
def mathieu():
    return build_system("mathieu")


@pytest.fixture(scope="session")
def mathieu_base(mathieu):
    return trivial_base_flow(mathieu, SpectralGrid(5, np.sqrt(2.0)))


@pytest.fixture(scope="session")
def vdp():
    return build_system("vdp")


@pytest.fixture(scope="session")
def vdp_base(vdp):
    return vdp_orbit(vdp, 31)


@pytest.fixture(scope="session")
def vdp_pair(vdp, vdp_base):
    return floquet_pair(vdp_base, vdp)


@pytest.fixture(scope="session")
def vdp_base_fine(vdp):
    return vdp_orbit(vdp, 101)


@pytest.fixture(scope="session")
def vdp_pair_fine(vdp, vdp_base_fine):
    return floquet_pair(vdp_base_fine, vdp)


@pytest.fixture(scope="session")
def vdp_base_small(vdp):
    return vdp_orbit(vdp, 11)


@pytest.fixture(scope="session")
def vdp_pair_small(vdp, vdp_base_small):
    return floquet_pair(vdp_base_small, vdp)


@pytest.fixture(scope="session")
def cgl():
    return build_system("cgl")


@pytest.fixture(scope="session")
def cgl_base(cgl):
    return cgl_plane_wave(CglParams(), SpectralGrid(21, cgl.base_frequency_hint))


@pytest.fixture(scope="session")
def cgl_pair(cgl, cgl_base):
    return floquet_pair(cgl_base, cgl)


_PAIR = {}


def _cache_pair():
    """Module-level pair for hypothesis tests, which cannot take fixtures."""
    if "vdp" not in _PAIR:
        sys_ = build_system("vdp")
        _PAIR["vdp"] = floquet_pair(vdp_orbit(sys_, 31), sys_)
    return _PAIR["vdp"]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
