import pytest

from geometry import ReferenceDisk, LagrangianMap, GeometryCache

from seeds import ASPECT


@pytest.fixture
def disk():
    return ReferenceDisk(17, 32)


@pytest.fixture
def cache(disk):
    return GeometryCache(LagrangianMap.identity(disk))


@pytest.fixture
def ellipse_map(disk):
    """x = (a y1, y2 / a): area pi, boundary x1^2 / a^2 + a^2 x2^2 = 1."""
    return LagrangianMap.from_function(disk, lambda y1, y2: (ASPECT * y1, y2 / ASPECT))


@pytest.fixture
def ellipse_cache(ellipse_map):
    return GeometryCache(ellipse_map)


@pytest.fixture
def bubble(disk):
    """1 - r^2 on the reference grid."""
    rr, _ = disk.mesh
    return 1 - rr ** 2
