"""Tests for the space contract, the Euclidean space and the property checks."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from services.errors import DomainError
from services.geometry.euclidean import EuclideanSpace
from services.geometry.open_book import BookSpace
from services.geometry.properties import (
    check_metric_axioms,
    midpoint_gap,
    npc_gap,
    variance_gap,
)
from services.geometry.space import validate_t, validate_weights
from services.geometry.spd import SpdSpace, commuting_barycenter, random_spd

coords = st.lists(st.floats(min_value=-1e3, max_value=1e3, allow_nan=False), min_size=3, max_size=3)


class TestValidation:
    def test_t_outside_unit_interval_is_rejected(self):
        with pytest.raises(DomainError):
            validate_t(1.5)
        with pytest.raises(DomainError):
            validate_t(-0.1)

    def test_uniform_weights_when_none(self):
        np.testing.assert_allclose(validate_weights(None, 4), [0.25] * 4)

    @pytest.mark.parametrize("weights", [[0.5, 0.6], [1.5, -0.5], [1.0], [np.nan, 1.0]])
    def test_invalid_weights(self, weights):
        with pytest.raises(DomainError) as exc:
            validate_weights(weights, 2)
        assert exc.value.field == "weights"

    def test_empty_point_set(self):
        with pytest.raises(DomainError):
            validate_weights(None, 0)


class TestEuclidean:
    def test_distance_and_interpolate(self, euclid3):
        x, y = np.zeros(3), np.array([3.0, 4.0, 0.0])
        assert euclid3.distance(x, y) == pytest.approx(5.0)
        np.testing.assert_allclose(euclid3.interpolate(x, y, 0.25), [0.75, 1.0, 0.0])

    def test_endpoints_are_exact(self, euclid3, rng):
        x, y = rng.normal(size=3), rng.normal(size=3)
        assert np.array_equal(euclid3.interpolate(x, y, 0.0), x)
        assert np.array_equal(euclid3.interpolate(x, y, 1.0), y)

    def test_dimension_mismatch(self, euclid3):
        with pytest.raises(DomainError):
            euclid3.distance(np.zeros(3), np.zeros(2))

    def test_batch_against_point(self, euclid3, rng):
        batch = rng.normal(size=(5, 3))
        y = rng.normal(size=3)
        d = euclid3.distance(batch, y)
        assert d.shape == (5,)
        for i in range(5):
            assert d[i] == pytest.approx(euclid3.distance(batch[i], y))

    def test_diameter(self, rng):
        space = EuclideanSpace(2)
        points = [rng.normal(size=2) for _ in range(12)]
        exact = space.diameter(points)
        approx = space.diameter(points, approximate=True)
        brute = max(np.linalg.norm(p - q) for p in points for q in points)
        assert exact == pytest.approx(brute)
        assert exact <= approx + 1e-12
        assert approx <= 2 * exact + 1e-12

    @pytest.mark.parametrize("space", [EuclideanSpace(3), SpdSpace(2)], ids=["euclidean", "spd"])
    def test_stack_rejects_empty_sequence(self, space):
        with pytest.raises(DomainError):
            space.stack([])


class TestNpcGap:
    def test_flat_example(self):
        space = EuclideanSpace(1)
        assert npc_gap(space, np.array([0.0]), np.array([2.0]), np.array([1.0]), 0.5) == pytest.approx(0.0, abs=1e-14)

    def test_endpoint_identity(self, spd2, rng):
        x, y = random_spd(2, 50.0, rng), random_spd(2, 50.0, rng)
        assert npc_gap(spd2, x, y, x, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_spd_diagonal_example(self, spd2):
        x, y, z = np.eye(2), np.diag([4.0, 1.0]), np.diag([1.0, 4.0])
        gap = npc_gap(spd2, x, y, z, 0.5)
        # diagonal matrices span a flat, so both sides agree
        lhs = spd2.distance(z, spd2.interpolate(x, y, 0.5)) ** 2
        rhs = 0.5 * spd2.distance(z, x) ** 2 + 0.5 * spd2.distance(z, y) ** 2 - 0.25 * spd2.distance(x, y) ** 2
        assert gap >= -1e-12
        assert gap == pytest.approx(rhs - lhs, abs=1e-12)

    def test_t_out_of_range(self, euclid3):
        with pytest.raises(DomainError):
            npc_gap(euclid3, np.zeros(3), np.ones(3), np.ones(3), 2.0)

    @given(coords, coords, coords, st.floats(min_value=0.0, max_value=1.0))
    def test_euclidean_npc_gap_vanishes(self, x, y, z, t):
        space = EuclideanSpace(3)
        x, y, z = np.array(x), np.array(y), np.array(z)
        gap = npc_gap(space, x, y, z, t)
        scale = 1.0 + space.distance(x, y) ** 2 + space.distance(z, x) ** 2 + space.distance(z, y) ** 2
        assert abs(gap) <= 1e-12 * scale

    def test_spd_npc_gap_nonnegative(self, rng):
        space = SpdSpace(3)
        for _ in range(50):
            x, y, z = (random_spd(3, 100.0, rng) for _ in range(3))
            t = rng.uniform()
            scale = 1.0 + space.distance(x, y) ** 2 + space.distance(z, x) ** 2
            assert npc_gap(space, x, y, z, t) >= -1e-8 * scale
            assert midpoint_gap(space, x, y, z) >= -1e-8 * scale


class TestVarianceGap:
    def test_euclidean_equality_at_mean(self, euclid3, rng):
        points = [rng.normal(size=3) for _ in range(7)]
        mean = np.mean(points, axis=0)
        z = rng.normal(size=3)
        assert variance_gap(euclid3, points, None, mean, z) == pytest.approx(0.0, abs=1e-10)

    def test_single_point(self, euclid3, rng):
        x = rng.normal(size=3)
        assert variance_gap(euclid3, [x], [1.0], x, rng.normal(size=3)) == pytest.approx(0.0, abs=1e-12)

    def test_commuting_spd_barycenter(self, spd2, rng, commuting_family):
        for _ in range(20):
            family = commuting_family(rng, 5)
            weights = rng.dirichlet(np.ones(5))
            mean = commuting_barycenter(family, weights)
            z = random_spd(2, 100.0, rng)
            assert variance_gap(spd2, family, weights, mean, z) >= -1e-8

    def test_invalid_weights(self, euclid3):
        with pytest.raises(DomainError):
            variance_gap(euclid3, [np.zeros(3), np.ones(3)], [0.2, 0.2], np.zeros(3), np.ones(3))

    @pytest.mark.parametrize("space", [EuclideanSpace(2), SpdSpace(2)], ids=["euclidean", "spd"])
    def test_empty_point_set(self, space):
        with pytest.raises(DomainError) as exc:
            variance_gap(space, [], None, np.eye(2), np.eye(2))
        assert exc.value.field == "points"


class TestMetricAxioms:
    @pytest.mark.parametrize("dim", [1, 3])
    def test_euclidean(self, dim, rng):
        space = EuclideanSpace(dim)
        report = check_metric_axioms(space, lambda: space.sample(rng), 1000, 1e-10, rng=rng)
        assert report.passed, report.violations
        assert report.violations["identity"] == 0.0
        assert report.violations["symmetry"] == 0.0

    @pytest.mark.parametrize("dim", [2, 5])
    def test_spd(self, dim, rng):
        space = SpdSpace(dim)
        report = check_metric_axioms(space, lambda: space.sample(rng), 1000, 1e-8, rng=rng)
        assert report.passed, report.violations

    @pytest.mark.parametrize("k,d", [(3, 1), (4, 2)])
    def test_open_book(self, k, d, rng):
        space = BookSpace(k=k, d=d)
        report = check_metric_axioms(space, lambda: space.sample(rng), 1000, 1e-10, rng=rng)
        assert report.passed, report.violations

    def test_report_flags_failures(self, euclid3, rng):
        report = check_metric_axioms(euclid3, lambda: euclid3.sample(rng), 10, -1.0, rng=rng)
        assert not report.passed
        assert set(report.failed_items) == set(report.violations)

    def test_needs_at_least_one_case(self, euclid3, rng):
        with pytest.raises(DomainError):
            check_metric_axioms(euclid3, lambda: euclid3.sample(rng), 0, 1e-8)
