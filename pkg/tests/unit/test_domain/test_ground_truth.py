import math

import numpy as np
import pytest

from domain.entities.dictionary_spec import DictionaryKind, DictionarySpec
from domain.entities.experiment import GroundTruthKind, GroundTruthSpec
from domain.entities.geometry import QuadratureMeasure
from domain.exceptions import ConfigurationError, UndefinedErrorMetric
from domain.services.dictionaries import evaluate_atoms, helmholtz_residual
from domain.services.ground_truth import (
    ExpansionField,
    PlaneWaveField,
    best_approximation_error,
    l2_error,
    synth_solution,
)
from domain.services.special_functions import fb_norm_sq


@pytest.fixture
def truth():
    return synth_solution(GroundTruthSpec(kind=GroundTruthKind.RANDOM_PLANE_WAVES, count=20, seed=4))


class TestSynthSolution:
    def test_single_wave_is_one_at_origin(self):
        u = synth_solution(GroundTruthSpec(kind=GroundTruthKind.RANDOM_PLANE_WAVES, count=1, seed=0))
        assert abs(u(np.zeros((1, 2)))[0]) == pytest.approx(abs(u.amplitudes[0]), rel=1e-14)
        field = PlaneWaveField(12.0, np.array([0.4]), np.array([1.0]))
        assert field(np.zeros((1, 2)))[0] == 1

    def test_solves_helmholtz(self, truth):
        assert helmholtz_residual(truth, 12.0, h=1e-3) < 0.03

    def test_same_seed_same_field(self, disk_points):
        spec = GroundTruthSpec(kind=GroundTruthKind.RANDOM_PLANE_WAVES, count=5, seed=77)
        np.testing.assert_array_equal(synth_solution(spec)(disk_points), synth_solution(spec)(disk_points))

    def test_generator_algorithm_changes_the_draw(self, disk_points):
        philox = GroundTruthSpec(kind=GroundTruthKind.RANDOM_PLANE_WAVES, count=5, seed=77)
        pcg = GroundTruthSpec(kind=GroundTruthKind.RANDOM_PLANE_WAVES, count=5, seed=77, rng_algorithm="pcg64")
        assert philox.rng_algorithm == "philox"
        assert not np.allclose(synth_solution(philox).directions, synth_solution(pcg).directions)
        np.testing.assert_array_equal(synth_solution(pcg)(disk_points), synth_solution(pcg)(disk_points))

    def test_unknown_generator_algorithm(self):
        with pytest.raises(ConfigurationError):
            synth_solution(GroundTruthSpec(kind=GroundTruthKind.RANDOM_PLANE_WAVES, seed=1, rng_algorithm="mt"))

    def test_linear_in_amplitudes(self, disk_points):
        directions = np.array([0.1, 2.0])
        first = PlaneWaveField(12.0, directions, np.array([1.0, 0.0]))
        second = PlaneWaveField(12.0, directions, np.array([0.0, 1.0]))
        both = PlaneWaveField(12.0, directions, np.array([2.0, -1j]))
        np.testing.assert_allclose(both(disk_points), 2.0 * first(disk_points) - 1j * second(disk_points),
                                   atol=1e-13)

    def test_coefficient_field(self, disk_points):
        spec = DictionarySpec(kind=DictionaryKind.FOURIER_BESSEL, order=2, wavenumber=12.0)
        coefficients = np.array([0, 1, 0, 2j, 0])
        u = synth_solution(GroundTruthSpec(kind=GroundTruthKind.COEFFICIENTS, dictionary=spec,
                                           coefficients=coefficients))
        assert isinstance(u, ExpansionField)
        np.testing.assert_allclose(u(disk_points), evaluate_atoms(spec, disk_points) @ coefficients, atol=1e-14)

    def test_coefficient_count_checked(self):
        spec = DictionarySpec(kind=DictionaryKind.FOURIER_BESSEL, order=2, wavenumber=12.0)
        with pytest.raises(ConfigurationError):
            GroundTruthSpec(kind=GroundTruthKind.COEFFICIENTS, dictionary=spec, coefficients=np.ones(3))


class TestRelativeError:
    def test_exact_estimate(self, truth, area_quadrature):
        assert l2_error(truth, truth, area_quadrature) == 0.0

    def test_zero_estimate(self, truth, area_quadrature):
        assert l2_error(truth, lambda xy: np.zeros(len(xy)), area_quadrature) == pytest.approx(1.0)

    def test_perturbation_by_one_atom(self, truth, area_quadrature):
        spec = DictionarySpec(kind=DictionaryKind.FOURIER_BESSEL, order=5, wavenumber=12.0)
        atom = ExpansionField(spec, np.eye(11)[10])
        u_norm_sq = area_quadrature.integrate(np.abs(truth(area_quadrature.nodes)) ** 2)
        expected = math.sqrt(math.pi * fb_norm_sq(5, 12.0, 0.0) / u_norm_sq)
        error = l2_error(truth, lambda xy: truth(xy) + atom(xy), area_quadrature)
        assert error == pytest.approx(expected, rel=1e-9)

    def test_vanishing_reference(self, area_quadrature):
        with pytest.raises(UndefinedErrorMetric):
            l2_error(lambda xy: np.zeros(len(xy)), lambda xy: np.ones(len(xy)), area_quadrature)


class TestBestApproximation:
    def test_zero_inside_the_space(self, area_quadrature):
        spec = DictionarySpec(kind=DictionaryKind.FOURIER_BESSEL, order=6, wavenumber=12.0)
        u = ExpansionField(spec.with_order(4), np.arange(1, 10) * (1 + 0.5j))
        assert best_approximation_error(u, spec, area_quadrature) < 1e-10

    def test_nonincreasing_in_order(self, truth, area_quadrature):
        errors = [best_approximation_error(truth, DictionarySpec(kind=DictionaryKind.FOURIER_BESSEL, order=m,
                                                                 wavenumber=12.0), area_quadrature)
                  for m in range(2, 22, 3)]
        assert all(later <= earlier + 1e-12 for earlier, later in zip(errors, errors[1:]))

    def test_decays_past_the_wavenumber(self, truth, area_quadrature):
        u_norm = math.sqrt(area_quadrature.integrate(np.abs(truth(area_quadrature.nodes)) ** 2))
        spec = DictionarySpec(kind=DictionaryKind.FOURIER_BESSEL, order=30, wavenumber=12.0)
        assert best_approximation_error(truth, spec, area_quadrature) / u_norm < 1e-6

    def test_chunking_does_not_change_result(self, truth, area_quadrature):
        spec = DictionarySpec(kind=DictionaryKind.PLANE_WAVE, order=8, wavenumber=12.0)
        whole = best_approximation_error(truth, spec, area_quadrature)
        chunked = best_approximation_error(truth, spec, area_quadrature, chunk_size=1000)
        assert chunked == pytest.approx(whole, rel=1e-10)

    def test_area_quadrature_measure(self, area_quadrature):
        assert area_quadrature.measure == QuadratureMeasure.AREA
