"""Tests for the Lim–Palfia scheme and the closed-form barycenter oracles."""

import numpy as np
import pytest

from models.book_point import BookPoint
from services.errors import DomainError
from services.frechet import OracleSpace, frechet_oracle, lim_palfia, weighted_schedule
from services.geometry.euclidean import EuclideanSpace
from services.geometry.properties import variance_gap


def book_instance(space, rng, n):
    return [space.canonicalize(BookPoint(int(rng.integers(1, space.k + 1)), float(rng.uniform(0, 3)),
                                         tuple(rng.uniform(-2, 2, size=space.d))))
            for _ in range(n)]


class TestLimPalfia:
    def test_single_point(self, euclid3):
        x = np.array([1.0, -2.0, 0.5])
        result = lim_palfia(euclid3, [x], total_steps=5)
        np.testing.assert_allclose(result.estimate, x)
        assert result.error_certificate == 0.0

    def test_commuting_pair(self, spd2):
        a = np.diag([1.0, 1.0])
        b = np.diag([4.0, 4.0])
        result = lim_palfia(spd2, [a, b])
        assert result.cycles_used == 4
        assert result.diameter == pytest.approx(spd2.distance(a, b))
        assert spd2.distance(result.estimate, np.diag([2.0, 2.0])) <= result.error_certificate

    def test_budget_below_n(self, euclid3):
        with pytest.raises(DomainError) as exc:
            lim_palfia(euclid3, [np.zeros(3), np.ones(3), np.ones(3)], total_steps=2)
        assert exc.value.field == "total_steps"

    def test_empty(self, euclid3):
        with pytest.raises(DomainError):
            lim_palfia(euclid3, [])

    def test_full_cycles_give_mean(self, euclid3, rng):
        points = [rng.normal(size=3) for _ in range(5)]
        result = lim_palfia(euclid3, points, total_steps=5)
        np.testing.assert_allclose(result.estimate, np.mean(points, axis=0), atol=1e-12)

    def test_error_trace(self, euclid3, rng):
        points = [rng.normal(size=3) for _ in range(4)]
        mean = np.mean(points, axis=0)
        result = lim_palfia(euclid3, points, total_steps=40, reference=mean, record_every=4)
        assert [m for m, _ in result.error_trace] == list(range(4, 41, 4))
        assert all(d <= 1e-12 for _, d in result.error_trace)

    def test_certificate_in_every_space(self, rng, commuting_family, spd2, book31):
        euclid = EuclideanSpace(2)
        for _ in range(200):
            n = int(rng.integers(1, 6))
            k = int(rng.integers(n, 6 * n + 1))

            points = [rng.normal(size=2) for _ in range(n)]
            result = lim_palfia(euclid, points, total_steps=k)
            oracle = frechet_oracle(OracleSpace.EUCLIDEAN, points)
            assert euclid.distance(result.estimate, oracle) <= result.error_certificate + 1e-9

            family = commuting_family(rng, n)
            result = lim_palfia(spd2, family, total_steps=k)
            oracle = frechet_oracle(OracleSpace.SPD_COMMUTING, family)
            assert spd2.distance(result.estimate, oracle) <= result.error_certificate + 1e-9

            book = book_instance(book31, rng, n)
            result = lim_palfia(book31, book, total_steps=k)
            oracle = frechet_oracle(OracleSpace.OPEN_BOOK, book, space=book31)
            assert book31.distance(result.estimate, oracle) <= result.error_certificate + 1e-9

    def test_approximate_diameter_is_conservative(self, book31, rng):
        points = book_instance(book31, rng, 6)
        exact = lim_palfia(book31, points, total_steps=36)
        approx = lim_palfia(book31, points, total_steps=36, approximate_diameter=True)
        assert exact.error_certificate <= approx.error_certificate + 1e-12
        assert exact.estimate == approx.estimate

    def test_more_steps_help(self):
        # whole cycles of a Euclidean scheme hit the mean exactly, so use k = m·n + 1
        space = EuclideanSpace(1)
        points = [np.array([v]) for v in (0.0, 1.0, 5.0)]
        mean = np.mean(points, axis=0)
        coarse = lim_palfia(space, points, total_steps=31).estimate
        fine = lim_palfia(space, points, total_steps=121).estimate
        assert space.distance(fine, mean) < space.distance(coarse, mean)

    def test_more_steps_help_on_average(self, book31, rng):
        coarse, fine = [], []
        for _ in range(30):
            points = book_instance(book31, rng, 4)
            oracle = frechet_oracle(OracleSpace.OPEN_BOOK, points, space=book31)
            coarse.append(book31.distance(lim_palfia(book31, points, total_steps=9).estimate, oracle))
            fine.append(book31.distance(lim_palfia(book31, points, total_steps=401).estimate, oracle))
        assert np.mean(fine) < np.mean(coarse)

    def test_variance_inequality_at_estimate(self, book31, rng):
        # d(z,b)² <= Σ d(x,z)²/n − Σ d(x,b)²/n moves by at most c(2·max d(x,est) + c) + c(2·d(est,z) + c)
        for _ in range(50):
            points = book_instance(book31, rng, 4)
            result = lim_palfia(book31, points, total_steps=100)
            est = result.estimate
            c = result.error_certificate
            z = book31.sample(rng)
            spread = float(np.max(book31.distance(book31.stack(points), est)))
            slack = c * (2 * spread + c) + c * (2 * book31.distance(est, z) + c)
            assert variance_gap(book31, points, None, est, z) >= -slack - 1e-9

    def test_weighted_euclidean(self, euclid3, rng):
        points = [rng.normal(size=3) for _ in range(3)]
        weights = [0.5, 0.3, 0.2]
        result = lim_palfia(euclid3, points, weights=weights, total_steps=100)
        exact = frechet_oracle("euclidean", points, weights)
        # counts stay within two of their share, so the error is below 2Δ·n/k
        assert euclid3.distance(result.estimate, exact) <= 2 * result.diameter * 3 / 100 + 1e-12


class TestWeightedSchedule:
    def test_uniform_is_cycle(self):
        np.testing.assert_array_equal(weighted_schedule(np.full(3, 1 / 3), 9), [0, 1, 2] * 3)

    def test_counts_track_shares(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 7))
            weights = rng.dirichlet(np.ones(n))
            order = weighted_schedule(weights, 200)
            for m in (17, 50, 123, 200):
                counts = np.bincount(order[:m], minlength=n)
                assert np.all(np.abs(counts - weights * m) <= 2.0)

    def test_zero_weight_never_used(self):
        order = weighted_schedule(np.array([0.5, 0.0, 0.5]), 50)
        assert 1 not in order


class TestFrechetOracle:
    def test_euclidean(self):
        out = frechet_oracle(OracleSpace.EUCLIDEAN, [np.array([0.0]), np.array([4.0])], [0.5, 0.5])
        np.testing.assert_allclose(out, [2.0])

    def test_commuting(self):
        out = frechet_oracle("spd_commuting", [np.diag([1.0, 4.0]), np.diag([4.0, 1.0])])
        np.testing.assert_allclose(out, np.diag([2.0, 2.0]))

    def test_open_book_symmetric(self):
        points = [BookPoint(s, 1.0, (0.0,)) for s in (1, 2, 3)]
        assert frechet_oracle(OracleSpace.OPEN_BOOK, points) == BookPoint(1, 0.0, (0.0,))

    def test_non_commuting(self):
        with pytest.raises(DomainError):
            frechet_oracle(OracleSpace.SPD_COMMUTING, [np.diag([1.0, 2.0]), np.array([[2.0, 1.0], [1.0, 2.0]])])

    def test_unknown_space(self):
        with pytest.raises(DomainError) as exc:
            frechet_oracle("hyperbolic", [np.zeros(2)])
        assert exc.value.field == "space_tag"

    def test_invalid_weights(self):
        with pytest.raises(DomainError):
            frechet_oracle(OracleSpace.EUCLIDEAN, [np.zeros(2), np.ones(2)], [0.9, 0.9])
