"""Internal Hankel evaluation against published values and scipy."""

import numpy as np
import pytest
from scipy import special

from elascat.errors import SingularPoint
from elascat.hankel import SERIES_ASYMPTOTIC_SWITCH, hankel1_0, hankel1_1

# Abramowitz & Stegun style anchors (15+ digits)
TABLE = [
    # x, J0, Y0, J1, Y1
    (1.0, 0.7651976865579666, 0.08825696421567696,
     0.4400505857449335, -0.7812128213002887),
    (5.0, -0.17759677131433830, -0.30851762524903376,
     -0.32757913759146523, 0.14786314339122683),
    (10.0, -0.24593576445134834, 0.055671167283599395,
     0.04347274616886144, 0.24901542420695388),
]


@pytest.mark.parametrize("x,j0,y0,j1,y1", TABLE)
def test_published_table_values(x, j0, y0, j1, y1):
    h0 = hankel1_0(x)
    h1 = hankel1_1(x)
    assert h0.real == pytest.approx(j0, rel=1e-13)
    assert h0.imag == pytest.approx(y0, rel=1e-13)
    assert h1.real == pytest.approx(j1, rel=1e-13)
    assert h1.imag == pytest.approx(y1, rel=1e-13)


def test_against_scipy_across_the_switch():
    x = np.concatenate([np.geomspace(1e-4, 11.99, 2000),
                        np.linspace(12.0, 200.0, 2000)])
    for ours, order in ((hankel1_0(x), 0), (hankel1_1(x), 1)):
        ref = special.hankel1(order, x)
        rel = np.abs(ours - ref) / np.abs(ref)
        assert rel.max() < 1e-10


def test_branch_continuity_at_switch():
    s = SERIES_ASYMPTOTIC_SWITCH
    below = hankel1_0(np.nextafter(s, 0.0))
    above = hankel1_0(s)
    assert abs(below - above) / abs(above) < 1e-10


def test_scalar_and_array_shapes():
    assert np.isscalar(complex(hankel1_0(1.5)))
    assert hankel1_1(np.ones((3, 4))).shape == (3, 4)


def test_nonpositive_argument_rejected():
    with pytest.raises(SingularPoint):
        hankel1_0(0.0)
    with pytest.raises(SingularPoint):
        hankel1_1(np.array([1.0, -2.0]))
