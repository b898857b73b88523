import math

import numpy as np
import pytest
from scipy import special

from domain.entities.geometry import Point2
from domain.exceptions import BesselOrderRangeError
from domain.services.dictionaries import eval_fourier_bessel
from domain.services.special_functions import (
    MAX_BESSEL_ORDER,
    bessel_integral,
    bessel_j,
    bessel_j_orders,
    fb_log_norm_sq,
    fb_norm_sq,
    fb_norms_sq,
    i_power,
    log_abs_bessel_j,
    log_radial_norm_series,
    radial_norm_quadrature,
    radial_norm_series,
)


class TestBesselJ:
    def test_reference_values(self):
        assert bessel_j(0, 0.0) == 1.0
        assert bessel_j(3, 0.0) == 0.0
        assert bessel_j(1, 2.0) == pytest.approx(0.5767248077568734, abs=1e-12)

    def test_negative_order_symmetry(self):
        x = np.linspace(0.0, 30.0, 61)
        for j in range(0, 41):
            difference = bessel_j(-j, x) - (-1) ** j * bessel_j(j, x)
            assert np.max(np.abs(difference)) < 1e-14

    def test_order_outside_range(self):
        with pytest.raises(BesselOrderRangeError) as excinfo:
            bessel_j(MAX_BESSEL_ORDER + 1, 1.0)
        assert excinfo.value.order == MAX_BESSEL_ORDER + 1
        # también es un ValueError
        with pytest.raises(ValueError):
            bessel_j(-(MAX_BESSEL_ORDER + 5), 1.0)

    def test_negative_argument_rejected(self):
        with pytest.raises(ValueError):
            bessel_j(2, -0.5)

    def test_order_table_matches_scipy(self):
        x = np.linspace(0.0, 12.0, 25)
        orders = [-4, -1, 0, 3, 7]
        table = bessel_j_orders(orders, x)
        assert table.shape == (5, 25)
        for row, j in zip(table, orders):
            np.testing.assert_allclose(row, special.jv(j, x), atol=1e-14)


class TestFourierBesselNorms:
    def test_small_wavenumber_limit(self):
        assert fb_norm_sq(0, 1e-6, 0.0) == pytest.approx(1.0, rel=1e-9)

    def test_boundary_only_measure(self, wavenumber):
        assert fb_norm_sq(5, wavenumber, 1.0) == pytest.approx(special.jv(5, wavenumber) ** 2, rel=1e-14)

    def test_mixed_measure_matches_quadrature(self, wavenumber):
        expected = 0.5 * radial_norm_quadrature(5, wavenumber) + 0.5 * special.jv(5, wavenumber) ** 2
        assert fb_norm_sq(5, wavenumber, 0.5) == pytest.approx(expected, rel=1e-10)
        assert fb_norm_sq(5, wavenumber, 0.5, method="quadrature") == pytest.approx(expected, rel=1e-14)

    def test_series_identity_against_quadrature(self, wavenumber):
        for j in range(0, 51):
            series = radial_norm_series(j, wavenumber)
            quadrature = radial_norm_quadrature(j, wavenumber)
            assert abs(series - quadrature) / quadrature < 1e-10, f"j={j}"

    def test_strictly_positive(self, wavenumber):
        for alpha in (0.0, 0.3, 1.0):
            assert np.all(fb_norms_sq(range(-20, 21), wavenumber, alpha) > 0)

    def test_decay_beyond_wavenumber(self, wavenumber):
        norms = [fb_norm_sq(j, wavenumber, 0.0) for j in range(13, 42)]
        assert all(later < earlier for earlier, later in zip(norms, norms[1:]))

    def test_norm_vector_is_even_in_order(self, wavenumber):
        norms = fb_norms_sq([-7, 7, -2, 2], wavenumber, 0.4)
        assert norms[0] == norms[1]
        assert norms[2] == norms[3]

    def test_invalid_alpha_and_method(self, wavenumber):
        with pytest.raises(ValueError):
            fb_norm_sq(1, wavenumber, 1.5)
        with pytest.raises(ValueError):
            fb_norm_sq(1, wavenumber, 0.5, method="trapezoid")


class TestHighOrderNorms:
    def test_supported_range_reaches_200(self):
        assert MAX_BESSEL_ORDER == 200
        assert bessel_j(200, 12.0) > 0.0

    def test_log_bessel_below_underflow(self, wavenumber):
        assert log_abs_bessel_j(40, wavenumber) == pytest.approx(math.log(special.jv(40, wavenumber)), rel=1e-12)
        # J_200(12) ~ 1e-219: representable, su cuadrado no
        assert log_abs_bessel_j(200, wavenumber) == pytest.approx(math.log(special.jv(200, wavenumber)), rel=1e-10)
        assert math.isfinite(log_abs_bessel_j(200, 1.0))

    def test_log_series_against_quadrature(self, wavenumber):
        for j in (60, 120):
            expected = math.log(radial_norm_quadrature(j, wavenumber))
            assert log_radial_norm_series(j, wavenumber) == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_log_norms_decrease_up_to_max_order(self, alpha, wavenumber):
        logs = [fb_log_norm_sq(j, wavenumber, alpha) for j in range(13, MAX_BESSEL_ORDER + 1)]
        assert all(math.isfinite(value) for value in logs)
        assert all(later < earlier for earlier, later in zip(logs, logs[1:]))

    def test_boundary_ratio_at_order_200(self, wavenumber):
        # J_j(lambda)^2 / ||J_j||^2 -> j + 1 cuando j >> lambda
        ratio = math.exp(2 * log_abs_bessel_j(200, wavenumber) - fb_log_norm_sq(200, wavenumber, 0.0))
        assert ratio == pytest.approx(201.0, rel=0.01)

    @pytest.mark.parametrize("alpha", [0.0, 0.5])
    def test_norm_representable_at_order_150(self, alpha, wavenumber):
        norm = fb_norm_sq(150, wavenumber, alpha)
        assert norm > 0.0
        assert math.log(norm) == pytest.approx(fb_log_norm_sq(150, wavenumber, alpha), rel=1e-10)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_underflowing_norm_raises(self, alpha, wavenumber):
        with pytest.raises(BesselOrderRangeError) as excinfo:
            fb_norm_sq(200, wavenumber, alpha)
        assert excinfo.value.order == 200
        assert "underflows" in str(excinfo.value)

    def test_norm_vector_propagates_underflow(self, wavenumber):
        with pytest.raises(BesselOrderRangeError):
            fb_norms_sq(range(190, 201), wavenumber, 0.0)


def test_i_power_cycles():
    np.testing.assert_array_equal(i_power(np.arange(-4, 5)),
                                  [1, -1j, -1, 1j, 1, 1j, -1, -1j, 1])


@pytest.mark.parametrize("j", [0, 3, -5, 10])
def test_bessel_integral_reproduces_fourier_bessel(j, wavenumber):
    n_nodes = 2 * abs(j) + int(2 * wavenumber) + 64
    for x, y in [(0.0, 0.0), (0.3, -0.4), (0.6, 0.8), (-0.95, 0.1)]:
        expected = eval_fourier_bessel(j, wavenumber, Point2(x, y))
        assert abs(bessel_integral(j, wavenumber, x, y, n_nodes) - expected) < 1e-12


def test_bessel_integral_at_origin_is_kronecker(wavenumber):
    assert bessel_integral(0, wavenumber, 0.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert abs(bessel_integral(4, wavenumber, 0.0, 0.0)) < 1e-15
    assert math.isfinite(abs(bessel_integral(-4, wavenumber, 0.5, 0.5)))
