import math

import pytest

from steindecomp.special import chi2_cdf, chi2_sf, norm_cdf


def test_norm_cdf_values():
    assert norm_cdf(0.0) == 0.5
    assert norm_cdf(0.1) - norm_cdf(0.0) == pytest.approx(0.0398278372770289837, abs=1e-15)
    assert norm_cdf(-40.0) == 0.0
    assert norm_cdf(-10.0) == pytest.approx(7.6198530241605260e-24, rel=1e-12)


def test_chi2_closed_forms():
    # d = 2: 1 - exp(-x/2)
    for x in (0.1, 1.0, 2.0, 7.5):
        assert chi2_cdf(x, 2) == pytest.approx(1 - math.exp(-x / 2), rel=1e-12)
    assert chi2_cdf(2.0, 3) == pytest.approx(0.42759329552912017, rel=1e-12)
    assert chi2_cdf(3.0, 5) + chi2_sf(3.0, 5) == pytest.approx(1.0)
