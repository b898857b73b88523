import cmath
import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss
from scipy import special

from domain.entities.dictionary_spec import DictionaryKind, DictionarySpec
from domain.entities.geometry import Point2
from domain.services.dictionaries import (
    alias_orders,
    alias_series,
    aliased_atoms,
    atom_evaluator,
    direction_angles,
    eval_aliased_fb,
    eval_fourier_bessel,
    eval_plane_wave,
    eval_square_fourier,
    evaluate_atoms,
    evaluate_expansion,
    fourier_bessel_atoms,
    helmholtz_residual,
    jacobi_anger_plane_wave,
    plane_wave_atoms,
    square_fourier_atoms,
)
from domain.services.special_functions import fb_norm_sq
from domain.services.stability import aliased_norm_sq

ORIGIN = Point2(0.0, 0.0)


class TestFourierBessel:
    def test_values_at_origin(self, wavenumber):
        assert eval_fourier_bessel(0, wavenumber, ORIGIN) == 1
        assert eval_fourier_bessel(2, wavenumber, ORIGIN) == 0

    def test_value_on_boundary(self, wavenumber):
        assert eval_fourier_bessel(2, wavenumber, Point2(1.0, 0.0)) == pytest.approx(special.jv(2, 12.0), abs=1e-14)

    def test_modulus_independent_of_angle(self, wavenumber):
        moduli = [abs(eval_fourier_bessel(5, wavenumber, Point2.from_polar(0.7, t)))
                  for t in np.linspace(-np.pi, np.pi, 9)]
        assert max(moduli) - min(moduli) < 1e-14

    def test_vectorized_matches_pointwise(self, wavenumber, disk_points):
        orders = [-3, 0, 4]
        atoms = fourier_bessel_atoms(orders, wavenumber, disk_points)
        for row, (x, y) in zip(atoms, disk_points):
            expected = [eval_fourier_bessel(j, wavenumber, Point2(x, y)) for j in orders]
            np.testing.assert_allclose(row, expected, atol=1e-14)


class TestPlaneWaves:
    def test_origin_is_one(self, wavenumber):
        for j in range(-5, 6):
            assert eval_plane_wave(j, 5, wavenumber, ORIGIN) == 1

    def test_direct_substitution(self, wavenumber):
        assert eval_plane_wave(0, 5, wavenumber, Point2(1.0, 0.0)) == pytest.approx(cmath.exp(12j), abs=1e-14)

    def test_unit_modulus(self, wavenumber, disk_points):
        values = plane_wave_atoms(7, wavenumber, disk_points)
        np.testing.assert_allclose(np.abs(values), 1.0, atol=1e-14)

    def test_index_outside_grid(self, wavenumber):
        with pytest.raises(ValueError):
            eval_plane_wave(6, 5, wavenumber, ORIGIN)

    def test_direction_grid(self):
        angles = direction_angles(2)
        np.testing.assert_allclose(angles, 2 * np.pi * np.array([-2, -1, 0, 1, 2]) / 5)


class TestAliasedFrame:
    def test_values_at_origin(self, wavenumber):
        assert eval_aliased_fb(0, 20, wavenumber, ORIGIN) == pytest.approx(1.0, abs=1e-14)
        assert abs(eval_aliased_fb(3, 20, wavenumber, ORIGIN)) < 1e-14

    def test_alias_series_at_point(self, wavenumber):
        p = Point2(0.7, 0.3)
        expected = alias_series(3, 20, wavenumber, np.array([[p.x, p.y]]), p_max=2)[0]
        assert abs(eval_aliased_fb(3, 20, wavenumber, p) - expected) < 1e-10

    @pytest.mark.parametrize("m, p_max", [(20, 3), (40, 1)])
    def test_aliasing_identity(self, m, p_max, wavenumber, disk_points):
        atoms = aliased_atoms(m, wavenumber, disk_points, method="fft")
        for column, j in enumerate(range(-m, m + 1)):
            series = alias_series(j, m, wavenumber, disk_points, p_max=p_max)
            assert np.max(np.abs(atoms[:, column] - series)) < 1e-10, f"j={j}"

    def test_fft_matches_direct_sum(self, wavenumber, disk_points):
        atoms = aliased_atoms(5, wavenumber, disk_points[:10], method="fft")
        for row, (x, y) in zip(atoms, disk_points[:10]):
            expected = [eval_aliased_fb(j, 5, wavenumber, Point2(x, y)) for j in range(-5, 6)]
            np.testing.assert_allclose(row, expected, atol=1e-13)

    @pytest.mark.parametrize("m", [5, 20])
    def test_series_matches_fft(self, m, wavenumber, disk_points):
        np.testing.assert_allclose(aliased_atoms(m, wavenumber, disk_points),
                                   aliased_atoms(m, wavenumber, disk_points, method="fft"), atol=1e-12)

    @pytest.mark.parametrize("j", [40, -40, 39])
    def test_series_keeps_relative_accuracy_on_boundary(self, j, wavenumber):
        # |b_j^40(1, 0)| ~ 1e-17: por debajo del redondeo de la suma sobre direcciones
        m = 40
        boundary = np.array([[1.0, 0.0], [0.0, 1.0]])
        atoms = aliased_atoms(m, wavenumber, boundary)
        expected = alias_series(j, m, wavenumber, boundary, p_max=1)
        np.testing.assert_allclose(atoms[:, j + m], expected, rtol=1e-10)
        assert np.all(np.abs(expected) < 1e-12)

    def test_unknown_method(self, wavenumber, disk_points):
        with pytest.raises(ValueError):
            aliased_atoms(5, wavenumber, disk_points, method="direct")

    def test_alias_orders(self, wavenumber):
        orders, log_total = alias_orders(40, 40, wavenumber)
        assert list(orders) == [-41, 40]
        assert math.exp(log_total) == pytest.approx(fb_norm_sq(40, wavenumber, 0.0) + fb_norm_sq(41, wavenumber, 0.0),
                                                    rel=1e-12)
        with pytest.raises(ValueError):
            alias_orders(41, 40, wavenumber)

    def test_sup_norm_at_most_one(self, wavenumber, disk_points):
        assert np.max(np.abs(aliased_atoms(9, wavenumber, disk_points))) <= 1.0 + 1e-12

    @pytest.mark.parametrize("j", [0, 5, -20])
    def test_norm_is_sum_of_aliased_norms(self, j, wavenumber, probability_quadrature):
        m = 20
        atoms = aliased_atoms(m, wavenumber, probability_quadrature.nodes)
        measured = probability_quadrature.integrate(np.abs(atoms[:, j + m]) ** 2)
        assert measured == pytest.approx(aliased_norm_sq(j, m, wavenumber, 0.0), rel=1e-9)


class TestSquareFourier:
    def test_reference_values(self):
        assert eval_square_fourier(0, 0, math.pi, Point2(0.3, -0.2)) == 1
        assert eval_square_fourier(1, 0, math.pi, Point2(1.0, 0.0)) == pytest.approx(-1.0, abs=1e-15)

    def test_modes_orthogonal_on_square(self):
        t, w = leggauss(40)
        gx, gy = np.meshgrid(t, t, indexing='ij')
        weights = np.outer(w, w).ravel() / 4.0
        xy = np.column_stack((gx.ravel(), gy.ravel()))
        modes = square_fourier_atoms(2, math.pi, xy)
        gram = modes.conj().T @ (modes * weights[:, None])
        assert np.max(np.abs(gram - np.eye(25))) < 1e-12

    def test_row_major_order_and_subset(self, disk_points):
        spec = DictionarySpec(kind=DictionaryKind.SQUARE_FOURIER, order=1, wavenumber=12.0)
        atoms = evaluate_atoms(spec, disk_points)
        for column, (kx, ky) in enumerate(spec.square_indices()):
            x, y = disk_points[3]
            assert atoms[3, column] == pytest.approx(eval_square_fourier(kx, ky, math.pi, Point2(x, y)))
        subset = evaluate_atoms(spec, disk_points, columns=np.array([0, 4, 8]))
        np.testing.assert_allclose(subset, atoms[:, [0, 4, 8]], atol=1e-15)


class TestExpansion:
    @pytest.mark.parametrize("kind", list(DictionaryKind))
    def test_column_subset_matches_full_matrix(self, kind, wavenumber, disk_points):
        spec = DictionarySpec(kind=kind, order=3, wavenumber=wavenumber)
        full = evaluate_atoms(spec, disk_points)
        columns = np.array([1, 4, 6])
        np.testing.assert_allclose(evaluate_atoms(spec, disk_points, columns=columns), full[:, columns],
                                   atol=1e-14)

    def test_sparse_expansion_in_chunks(self, wavenumber, disk_points, rng):
        spec = DictionarySpec(kind=DictionaryKind.FOURIER_BESSEL, order=6, wavenumber=wavenumber)
        coefficients = np.zeros(spec.dimension, dtype=complex)
        coefficients[[0, 5, 9]] = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        expected = evaluate_atoms(spec, disk_points) @ coefficients
        np.testing.assert_allclose(evaluate_expansion(spec, coefficients, disk_points, chunk_size=7), expected,
                                   atol=1e-13)

    def test_zero_expansion(self, wavenumber, disk_points):
        spec = DictionarySpec(kind=DictionaryKind.PLANE_WAVE, order=2, wavenumber=wavenumber)
        assert not np.any(evaluate_expansion(spec, np.zeros(5), disk_points))


class TestIdentities:
    def test_jacobi_anger(self, wavenumber, disk_points):
        for phi in (0.0, 0.37, -2.5, math.pi / 3):
            exact = np.exp(1j * wavenumber * (disk_points[:, 0] * math.cos(phi) + disk_points[:, 1] * math.sin(phi)))
            approx = jacobi_anger_plane_wave(phi, wavenumber, disk_points, q_max=40)
            assert np.max(np.abs(exact - approx)) < 1e-8


class TestHelmholtzResidual:
    def test_plane_wave_is_solution(self, wavenumber):
        spec = DictionarySpec(kind=DictionaryKind.PLANE_WAVE, order=5, wavenumber=wavenumber)
        assert helmholtz_residual(atom_evaluator(spec, 7), wavenumber, h=1e-3) < 0.03

    def test_fourier_bessel_is_solution(self, wavenumber):
        spec = DictionarySpec(kind=DictionaryKind.FOURIER_BESSEL, order=4, wavenumber=wavenumber)
        # columna de j = 4
        assert helmholtz_residual(atom_evaluator(spec, 8), wavenumber, h=1e-3) < 0.03

    def test_aliased_atom_is_solution(self, wavenumber):
        spec = DictionarySpec(kind=DictionaryKind.ALIASED_PW, order=10, wavenumber=wavenumber)
        assert helmholtz_residual(atom_evaluator(spec, 12), wavenumber, h=1e-3) < 0.03

    def test_square_mode_is_not_a_solution(self, wavenumber):
        spec = DictionarySpec(kind=DictionaryKind.SQUARE_FOURIER, order=3, wavenumber=wavenumber)
        column = spec.square_indices().index((3, 0))
        assert helmholtz_residual(atom_evaluator(spec, column), wavenumber, h=1e-3) > 1.0

    def test_vanishing_field(self, wavenumber):
        assert helmholtz_residual(lambda xy: np.zeros(len(xy)), wavenumber) == float('inf')
