import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schmidtgame.errors import SpecError
from schmidtgame.fractal import (AuditGrid, DecayParams, IFS, SimilarityMap,
                                 Verdict, audit_measure, binary_support,
                                 cantor_measure, cantor_support, check_alpha,
                                 check_absolute_decay, check_efd,
                                 check_federer, check_power_law,
                                 decay_from_federer_efd, efd_to_exponent,
                                 federer_to_exponent, find_point_in_gap,
                                 lebesgue_measure, lower_pointwise_dimension,
                                 max_alpha)
from schmidtgame.numerics import LogRatio, make_exponent


@pytest.fixture(scope="module")
def cantor():
    return cantor_measure()


@pytest.fixture(scope="module")
def lebesgue():
    return lebesgue_measure()


@pytest.fixture(scope="module")
def cantor_decay():
    c1, g1 = federer_to_exponent(F(1, 3), F(1, 2))
    c2, g2 = efd_to_exponent(F(1, 3), F(1, 2))
    return decay_from_federer_efd(c1, g1, c2, g2, 1)


class TestIFSValidation:
    def test_rejects_non_contraction(self):
        with pytest.raises(SpecError):
            SimilarityMap(F(3, 2), 0)

    def test_rejects_bad_weights(self):
        maps = [SimilarityMap(F(1, 3), 0), SimilarityMap(F(1, 3), F(2, 3))]
        with pytest.raises(SpecError):
            IFS(maps, [F(1, 2), F(1, 3)])
        with pytest.raises(SpecError):
            IFS(maps, [F(3, 2), F(-1, 2)])

    def test_rejects_overlapping_images(self):
        maps = [SimilarityMap(F(2, 3), 0), SimilarityMap(F(2, 3), F(1, 3))]
        ifs = IFS(maps, [F(1, 2), F(1, 2)])
        with pytest.raises(SpecError):
            from schmidtgame.fractal import FractalSupport
            FractalSupport(ifs, (F(0), F(1)))

    def test_rejects_shared_fixed_point(self):
        with pytest.raises(SpecError):
            IFS([SimilarityMap(F(1, 3), 0), SimilarityMap(F(1, 2), 0)],
                [F(1, 2), F(1, 2)])

    def test_json_round_trip(self):
        doc = {"maps": [{"r": "1/3", "a": "0"}, {"r": "1/3", "a": "2/3"}],
               "weights": ["1/2", "1/2"]}
        ifs = IFS.from_json(doc)
        assert ifs.to_json() == doc


class TestSupportPoints:
    def test_cantor_points(self):
        K = cantor_support()
        assert K.canonical_point == 0
        assert K.point((1,)) == F(2, 3)
        assert K.point((0, 1)) == F(2, 9)
        assert K.point((1, 0, 1)) == F(2, 3) + F(2, 27)

    def test_locate_recovers_word(self):
        K = cantor_support()
        for word in [(0,), (1, 0), (0, 1, 1), (1, 1, 0, 1)]:
            x = K.point(word)
            got = K.locate(x)
            assert got is not None and K.point(got) == x

    def test_locate_rejects_outsider(self):
        K = cantor_support()
        assert K.locate(F(1, 2), max_depth=12) is None

    def test_cylinder_geometry(self):
        K = cantor_support()
        c = K.cylinder((1, 0))
        assert (c.lo, c.hi) == (F(2, 3), F(2, 3) + F(1, 9))
        assert c.mass == F(1, 4)
        assert c.hi - c.lo == F(1, 9)


class TestBallMass:
    def test_frozen_examples(self, cantor):
        assert cantor.ball_mass(0, F(1, 3), 2) == (F(1, 2), F(1, 2))
        lo, hi = cantor.ball_mass(F(1, 2), F(1, 6), 4)
        assert hi <= F(1, 8)  # the whole ball sits in the first deleted gap
        assert cantor.ball_mass(F(1, 2), 1, 1) == (F(1), F(1))

    def test_depth_monotonicity(self, cantor):
        rng = random.Random(3)
        for _ in range(40):
            c = F(rng.randint(0, 64), 64)
            r = F(rng.randint(1, 32), 96)
            prev = cantor.ball_mass(c, r, 1)
            for depth in range(2, 9):
                cur = cantor.ball_mass(c, r, depth)
                assert prev[0] <= cur[0] <= cur[1] <= prev[1]
                prev = cur

    def test_normalization(self, cantor, lebesgue):
        for measure in (cantor, lebesgue):
            for depth in range(1, 7):
                assert sum(c.mass for c in measure.support.cylinders(depth)) == 1

    def test_lebesgue_interior_is_length(self, lebesgue):
        # dyadic intervals resolve exactly: mass = length
        assert lebesgue.interval_mass(F(1, 4), F(5, 8), 6) == (F(3, 8), F(3, 8))

    def test_point_touch_is_null(self, cantor):
        # [1/3, 2/3] meets K in exactly two points; exact mass 0
        assert cantor.interval_mass(F(1, 3), F(2, 3), 3) == (F(0), F(0))


class TestFindPointInGap:
    def test_frozen_examples(self):
        K = cantor_support()
        got = find_point_in_gap(K, (F(0), F(1)), [(F(2, 5), F(3, 5))])
        assert got is not None
        x, word = got
        assert K.verify_point(x, word)
        assert not F(2, 5) <= x <= F(3, 5)

        got = find_point_in_gap(K, (F(0), F(1, 3)), [])
        assert got is not None and F(0) <= got[0] <= F(1, 3)

        assert find_point_in_gap(K, (F(2, 5), F(3, 5)), []) is None

    def test_fully_covered_inside(self):
        K = cantor_support()
        assert find_point_in_gap(K, (F(0), F(1)), [(F(-1), F(2))]) is None

    def test_membership_always_verifiable(self):
        K = cantor_support()
        rng = random.Random(11)
        for _ in range(60):
            lo = F(rng.randint(0, 80), 81)
            hi = lo + F(rng.randint(1, 30), 81)
            forb = []
            for _ in range(rng.randint(0, 3)):
                flo = F(rng.randint(0, 80), 81)
                forb.append((flo, flo + F(rng.randint(0, 20), 81)))
            got = find_point_in_gap(K, (lo, hi), forb)
            if got is not None:
                x, word = got
                assert K.verify_point(x, word)
                assert lo <= x <= hi
                assert all(not (a <= x <= b) for a, b in
                           [(min(p), max(p)) for p in forb])

    def test_degenerate_inside(self):
        K = cantor_support()
        got = find_point_in_gap(K, (F(2, 9), F(2, 9)), [])
        assert got is not None and got[0] == F(2, 9)
        assert find_point_in_gap(K, (F(1, 2), F(1, 2)), []) is None


class TestConversions:
    def test_federer_frozen(self):
        assert federer_to_exponent(F(1, 2), F(1, 4)) == (F(1, 4), F(2))
        assert federer_to_exponent(F(1, 2), F(1, 2)) == (F(1, 2), F(1))

    def test_efd_frozen(self):
        assert efd_to_exponent(F(1, 2), F(1, 4)) == (F(4), F(2))

    def test_combination_frozen(self):
        dp = decay_from_federer_efd(F(1, 4), F(2), F(4), F(1), 1)
        assert (dp.C, dp.gamma, dp.rho0) == (F(144), F(1), F(1, 3))
        dp = decay_from_federer_efd(F(1), F(1), F(1), F(1), 3)
        assert (dp.C, dp.gamma, dp.rho0) == (F(3), F(1), F(1))

    def test_cantor_pipeline(self, cantor_decay):
        assert cantor_decay.C == 8
        assert cantor_decay.gamma == LogRatio(2, 3)
        assert cantor_decay.rho0 == F(1, 3)

    def test_irrational_C_rejected(self):
        with pytest.raises(SpecError):
            decay_from_federer_efd(F(1, 2), LogRatio(2, 5), F(2), F(1), 1)


class TestAlphaBound:
    def test_cantor_max_alpha(self, cantor_decay):
        a = max_alpha(cantor_decay)
        assert a == F(3, 2048)
        assert check_alpha(a, cantor_decay)
        assert not check_alpha(a + F(1, 4096), cantor_decay)

    def test_exact_boundary(self):
        # C=1/3, gamma=1: bound is alpha <= 1/4 exactly
        dp = DecayParams(F(1, 3), F(1), 1)
        assert check_alpha(F(1, 4), dp)
        assert not check_alpha(F(1, 4) + F(1, 1000), dp)


class TestAudits:
    def test_lebesgue_decay_passes(self, lebesgue):
        grid = AuditGrid.default(lebesgue.support, 1)
        out = check_absolute_decay(lebesgue, DecayParams(2, F(1), 1), grid)
        assert out.verdict is Verdict.PASS

    def test_cantor_decay_passes(self, cantor, cantor_decay):
        grid = AuditGrid.default(cantor.support, cantor_decay.rho0)
        out = check_absolute_decay(cantor, cantor_decay, grid)
        assert out.verdict is Verdict.PASS

    def test_cantor_small_C_fails_with_witness(self, cantor, cantor_decay):
        grid = AuditGrid.default(cantor.support, F(1, 3))
        bad = DecayParams(F(1, 10), cantor_decay.gamma, F(1, 3))
        out = check_absolute_decay(cantor, bad, grid)
        assert out.verdict is Verdict.FAIL
        assert out.witness is not None
        # witness reproduces: re-check the single violating tuple
        w = out.witness.point
        single = AuditGrid(xs=[w["x"]], rhos=[w["rho"]], eps=[w["eps"]],
                           offsets=[(w["y"] - w["x"]) / w["rho"]])
        again = check_absolute_decay(cantor, bad, single)
        assert again.verdict is Verdict.FAIL

    def test_lebesgue_federer_efd(self, lebesgue):
        grid = AuditGrid.default(lebesgue.support, 1)
        assert check_federer(lebesgue, F(1, 2), F(1, 2), grid).passed
        assert check_efd(lebesgue, F(1, 2), F(3, 4), grid).passed

    def test_cantor_federer(self, cantor):
        grid = AuditGrid.default(cantor.support, F(1, 3))
        assert check_federer(cantor, F(1, 3), F(1, 2), grid).passed
        assert check_efd(cantor, F(1, 3), F(1, 2), grid).passed

    def test_power_law(self, cantor, lebesgue):
        grid_l = AuditGrid.default(lebesgue.support, 1)
        assert check_power_law(lebesgue, 1, 2, F(1), grid_l).passed
        grid_c = AuditGrid.default(cantor.support, F(1, 3))
        assert check_power_law(cantor, F(1, 4), 4, LogRatio(2, 3), grid_c).passed
        out = check_power_law(cantor, F(1, 4), 4, F(1), grid_c)
        assert out.verdict is Verdict.FAIL

    def test_audit_measure_pipeline(self, cantor):
        grid = AuditGrid.default(cantor.support, F(1, 3))
        report = audit_measure(cantor, grid,
                               federer=(F(1, 3), F(1, 2)),
                               efd=(F(1, 3), F(1, 2)),
                               derive_decay_rho0=1,
                               power_law=(F(1, 4), 4, LogRatio(2, 3)))
        assert report.all_passed
        assert report.decay.C == 8
        assert report.derived["C"] == 8
        rows = report.csv_rows()
        assert rows[0] == ["check", "params", "grid_point", "verdict"]
        assert all(r[3] == "pass" for r in rows[1:])

    def test_decay_implies_efd_constants(self, cantor, cantor_decay):
        # with x = y the decay inequality is an efd bound with c = C
        grid = AuditGrid.default(cantor.support, cantor_decay.rho0)
        for eps in grid.eps:
            out = check_efd(cantor, eps, min(F(8) * eps ** 0, F(99, 100)), grid)
            # delta = min(C eps^gamma, ~1): for eps = 3^-j this is 8 * 2^-j
            delta = F(8, 2 ** ([F(1, 3), F(1, 9), F(1, 27)].index(eps) + 1))
            if delta < 1:
                assert check_efd(cantor, eps, delta, grid).passed


class TestDimension:
    def test_cantor_exact_at_powers(self, cantor):
        ests = lower_pointwise_dimension(cantor, 0, [F(1, 3) ** k for k in range(1, 13)])
        bound = LogRatio(2, 3)
        for e in ests:
            assert e.exact
            assert e.value == bound

    def test_lebesgue_interior(self, lebesgue):
        # mass of B(1/2, 2^-k) is 2^(1-k), so the estimate is (k-1)/k -> 1
        ests = lower_pointwise_dimension(lebesgue, F(1, 2), [F(1, 2) ** k for k in range(2, 9)])
        for k, e in zip(range(2, 9), ests):
            assert e.exact
            assert e.value == F(k - 1, k)

    def test_mass_zero_scale(self, cantor):
        est = lower_pointwise_dimension(cantor, F(1, 3), [F(1, 12)])[0]
        assert est.mass_lower <= est.mass_upper
