import random
from fractions import Fraction as F

import pytest

from schmidtgame.alice import (BAStrategy, BiLipschitzMap, ConstTargets,
                               ExcludeCountable, GeometricTerms,
                               LacunarySpec, LacunaryStrategy, ListTargets,
                               ListTerms, PeriodicTargets, affine_map,
                               affine_to_sequence, avoidance_step,
                               _block_candidates, danger_set, index_block,
                               interleave, plan_ba, plan_lacunary)
from schmidtgame.errors import (HorizonMismatch, InvalidAlpha,
                                NoPointFound, PrecisionCapExceeded,
                                ScheduleOverlap, SpecError)
from schmidtgame.fractal import (DecayParams, cantor_support,
                                 decay_from_federer_efd, efd_to_exponent,
                                 federer_to_exponent, max_alpha)
from schmidtgame.game import (Ball, GameParams, HoldCenter, Variant,
                              outcome_interval, run_game, validate_transcript)
from schmidtgame.numerics import (IntervalScalar, circle_dist,
                                  circle_dist_range, fractions_in_interval)


@pytest.fixture(scope="module")
def K():
    return cantor_support()


@pytest.fixture(scope="module")
def cantor_decay():
    c1, g1 = federer_to_exponent(F(1, 3), F(1, 2))
    c2, g2 = efd_to_exponent(F(1, 3), F(1, 2))
    return decay_from_federer_efd(c1, g1, c2, g2, F(1))


@pytest.fixture(scope="module")
def cantor_alpha(cantor_decay):
    return max_alpha(cantor_decay)


# a permissive synthetic decay so alpha = 1/4 passes the admissibility check
LOOSE = DecayParams(C=F(1, 4), gamma=F(1), rho0=F(1))
QUARTER = GameParams(F(1, 4), F(1, 4))
ID = BiLipschitzMap.identity()


def lac2():
    return LacunarySpec(GeometricTerms(F(2)), ConstTargets(F(0)))


class TestBiLipschitzMap:
    def test_identity_and_affine(self):
        assert ID.apply(F(5, 7)) == F(5, 7)
        assert ID.lipschitz == 1
        m = BiLipschitzMap.affine(F(-2), F(3))
        assert m.apply(F(1, 2)) == 2
        assert m.inverse(2) == F(1, 2)
        assert m.lipschitz == 2

    def test_two_piece(self):
        # slope 2 left of 0, slope 1/3 right, continuous through (0, 1)
        m = BiLipschitzMap.from_slopes([F(0)], [F(2), F(1, 3)], F(1))
        assert m.apply(F(-1)) == -1
        assert m.apply(F(3)) == 2
        assert m.inverse(2) == 3
        assert m.inverse(-1) == -1
        assert m.lipschitz == 3
        assert m.preimage_interval(F(-1), F(2)) == (F(-1), F(3))

    def test_apply_inverse_round_trip(self):
        rng = random.Random(7)
        m = BiLipschitzMap.from_slopes([F(-1), F(1, 2)],
                                       [F(3, 2), F(1, 2), F(4)], F(-2))
        for _ in range(200):
            x = F(rng.randint(-50, 50), rng.randint(1, 20))
            assert m.inverse(m.apply(x)) == x

    def test_lipschitz_bound_property(self):
        m = BiLipschitzMap.from_slopes([F(0)], [F(2), F(1, 3)], F(0))
        L = m.lipschitz
        rng = random.Random(11)
        for _ in range(100):
            x = F(rng.randint(-40, 40), rng.randint(1, 9))
            y = F(rng.randint(-40, 40), rng.randint(1, 9))
            if x == y:
                continue
            ratio = abs(m.apply(x) - m.apply(y)) / abs(x - y)
            assert 1 / L <= ratio <= L

    def test_validation(self):
        with pytest.raises(SpecError):
            BiLipschitzMap((), (F(0),), (F(0), F(0)))
        with pytest.raises(SpecError):
            BiLipschitzMap.from_slopes([F(0)], [F(1), F(-1)], F(0))
        with pytest.raises(SpecError):
            BiLipschitzMap.from_slopes([F(1), F(0)], [F(1), F(1), F(1)], F(0))

    def test_json_round_trip(self):
        m = BiLipschitzMap.from_slopes([F(0), F(1)], [F(2), F(1, 2), F(3)], F(5))
        back = BiLipschitzMap.from_json(m.to_json())
        assert back == m


class TestRules:
    def test_geometric_tail_shift(self):
        t = GeometricTerms(F(2), scale=F(1, 8))
        # 2/8, 4/8, 8/8 are all <= 1; first kept term is 2
        assert t.term(1) == 2 and t.term(2) == 4

    def test_list_terms_drop_and_ratio(self):
        t = ListTerms((F(1, 2), F(1), F(3), F(6), F(12)), F(2))
        assert t.term(1) == 3 and t.horizon == 3
        with pytest.raises(HorizonMismatch):
            t.term(4)
        with pytest.raises(SpecError):
            ListTerms((F(2), F(3)), F(2))  # ratio 3/2 < declared 2

    def test_targets(self):
        assert ConstTargets(F(7, 3)).target(5) == F(1, 3)
        p = PeriodicTargets((F(0), F(1, 2)))
        assert [p.target(n) for n in (1, 2, 3, 4)] == [0, F(1, 2), 0, F(1, 2)]
        l = ListTargets((F(1, 4), F(3, 4)))
        assert l.target(2) == F(3, 4)
        with pytest.raises(HorizonMismatch):
            l.target(3)

    def test_spec_lacunarity_guard(self):
        with pytest.raises(SpecError):
            LacunarySpec(GeometricTerms(F(2)), ConstTargets(F(0)),
                         lacunarity=F(3))
        s = LacunarySpec(GeometricTerms(F(2)), ConstTargets(F(0)))
        assert s.M == 2

    def test_spec_json_round_trip(self):
        s = LacunarySpec(GeometricTerms(F(3), F(1, 2)),
                         PeriodicTargets((F(0), F(1, 2))))
        back = LacunarySpec.from_json(s.to_json())
        assert back.terms.term(4) == s.terms.term(4)
        assert back.targets.target(2) == F(1, 2)
        assert back.M == 3


class TestAvoidanceStep:
    def test_no_points_keeps_center(self, K):
        got = avoidance_step(K, Ball(F(1, 3), F(1, 9)), F(1, 12), [])
        assert (got.center, got.radius) == (F(1, 3), F(1, 108))

    def test_far_point_keeps_center(self, K):
        got = avoidance_step(K, Ball(F(0), F(1, 9)), F(1, 12), [F(10)])
        assert got.center == 0

    def test_crowded_with_oversized_alpha_has_no_exit(self, K):
        # alpha = 1/12 is far above the decay bound for this support: the
        # crowded branch must leave [x-rho, x+rho] minus three balls of
        # radius 4*alpha*rho, and that region misses the support entirely.
        with pytest.raises(NoPointFound):
            avoidance_step(K, Ball(F(1, 3), F(1, 9)), F(1, 12), [F(1, 3)])

    def test_crowded_with_valid_alpha(self, K, cantor_alpha):
        a = cantor_alpha
        rho = F(1, 9)
        got = avoidance_step(K, Ball(F(1, 3), rho), a, [F(1, 3)])
        assert abs(got.center - F(1, 3)) > 2 * a * rho
        assert abs(got.center - F(1, 3)) <= rho - got.radius
        assert K.verify_point(got.center, got.word)

    def test_alpha_domain(self, K):
        with pytest.raises(InvalidAlpha):
            avoidance_step(K, Ball(F(0), F(1, 3)), F(2), [])

    def test_randomized_postconditions(self, K, cantor_alpha):
        # the containment and distance guarantees, asserted exactly
        rng = random.Random(20260814)
        a = cantor_alpha
        for _ in range(200):
            d = rng.randint(1, 6)
            word = tuple(rng.choice((0, 1)) for _ in range(d))
            center = K.point(word)
            rho = K.diameter * K.contraction ** d / rng.choice((1, 2, 4))
            n_pts = rng.randint(0, 7)
            pts = []
            for _ in range(n_pts):
                off = F(rng.randint(-8, 8), rng.randint(1, 64))
                pts.append(center + off * rho)
            ball = Ball(center, rho, word)
            got = avoidance_step(K, ball, a, pts)
            assert got.radius == a * rho
            assert abs(got.center - center) <= rho - got.radius
            cleared = [y for y in pts if abs(y - got.center) - got.radius > got.radius]
            assert 2 * len(cleared) >= len(pts)


class TestPlanLacunary:
    def test_minimal_capacity_frozen(self):
        st = plan_lacunary(lac2(), ID, QUARTER, LOOSE, Ball(F(0), F(1)))
        assert (st.N, st.r) == (20, 5)
        assert (st.k0, st.rho) == (2, F(1, 16))
        assert st.c == F(1, 16) ** 16

    def test_boundary_equality_capacity(self):
        spec = LacunarySpec(GeometricTerms(F(16)), ConstTargets(F(0)))
        st = plan_lacunary(spec, ID, QUARTER, LOOSE, Ball(F(0), F(1)))
        assert (st.N, st.r) == (1, 1)

    def test_rho_bound_with_small_rho0(self):
        st = plan_lacunary(lac2(), ID, QUARTER,
                           DecayParams(F(1, 4), F(1), F(1, 100)),
                           Ball(F(0), F(1)))
        assert st.rho < F(1, 100)
        assert st.rho == F(1, 16) ** (st.k0 - 1)

    def test_inadmissible_alpha(self, cantor_decay):
        with pytest.raises(InvalidAlpha):
            plan_lacunary(lac2(), ID, QUARTER, cantor_decay, Ball(F(0), F(1)))

    def test_strong_variant_rejected(self):
        params = GameParams(F(1, 4), F(1, 4), Variant.STRONG)
        with pytest.raises(SpecError):
            plan_lacunary(lac2(), ID, params, LOOSE, Ball(F(0), F(1)))


class TestIndexBlock:
    def test_blocks_frozen(self):
        st = plan_lacunary(lac2(), ID, QUARTER, LOOSE, Ball(F(0), F(1)))
        assert index_block(st, lac2(), 1) == list(range(1, 20))
        assert index_block(st, lac2(), 2) == list(range(20, 40))

    def test_one_term_per_block(self):
        # terms 16^n / 2 with ratio 16: each block holds exactly one index
        spec = LacunarySpec(GeometricTerms(F(16), F(1, 2)), ConstTargets(F(0)))
        st = plan_lacunary(spec, ID, QUARTER, LOOSE, Ball(F(0), F(1)))
        assert st.r == 1
        for k in (1, 2, 3, 7):
            assert index_block(st, spec, k) == [k]

    def test_irrational_boundary_requests_precision(self):
        # a sourceless enclosure of the base cannot be refined, and its
        # 20th power straddles the block boundary 16^5 = 2^20
        base = IntervalScalar(F(2), F(2) + F(1, 10 ** 9))
        spec = LacunarySpec(GeometricTerms(base), ConstTargets(F(0)),
                            lacunarity=F(2))
        st = plan_lacunary(spec, ID, QUARTER, LOOSE, Ball(F(0), F(1)))
        with pytest.raises(PrecisionCapExceeded):
            index_block(st, spec, 1)


class TestDangerSet:
    def setup_method(self):
        self.st = plan_lacunary(
            LacunarySpec(ListTerms((F(32),), F(2)), ConstTargets(F(0))),
            ID, QUARTER, LOOSE, Ball(F(0), F(1)))

    def test_single_translate(self):
        spec = LacunarySpec(ListTerms((F(32),), F(2)), ConstTargets(F(0)))
        got = danger_set(self.st, spec, ID, 1, Ball(F(1, 3), F(1, 64)))
        assert got == [F(11, 32)]

    def test_no_translate_in_tiny_ball(self):
        spec = LacunarySpec(ListTerms((F(32),), F(2)), ConstTargets(F(1, 2)))
        assert danger_set(self.st, spec, ID, 1, Ball(F(0), F(1, 100))) == []

    def test_far_ball_empty(self):
        spec = LacunarySpec(ListTerms((F(32),), F(2)), ConstTargets(F(0)))
        assert danger_set(self.st, spec, ID, 1, Ball(F(1, 128), F(1, 1000))) == []

    def test_phi_preimage_enumeration(self):
        # under x -> 2x the ball [2/3-1/32, 2/3+1/32] pulls back to
        # [1/3-1/64, 1/3+1/64], so the same translate answers, mapped forward
        phi = BiLipschitzMap.affine(F(2))
        spec = LacunarySpec(ListTerms((F(32),), F(2)), ConstTargets(F(0)))
        got = danger_set(self.st, spec, phi, 1, Ball(F(2, 3), F(1, 32)))
        assert got == [F(11, 16)]


def orbit_claim_holds(spec, state, lo, hi, phi=ID):
    """Exhaustively check circle separation over every covered term."""
    bound = (1 / state.ab) ** (state.r * state.blocks_cleared)
    u, v = phi.preimage_interval(lo, hi)
    n = 0
    for n, t in spec.terms.enumerate():
        if t >= bound:
            break
        y = spec.targets.target(n)
        dmin, _ = circle_dist_range(t * u, t * v, y)
        if dmin < state.c:
            return False, n
    return True, n


class TestLacunaryEndToEnd:
    def test_cantor_50_rounds(self, K, cantor_decay, cantor_alpha):
        params = GameParams(cantor_alpha, F(1, 4))
        alice = LacunaryStrategy(lac2(), decay=cantor_decay)
        t = run_game(K, params, alice, HoldCenter(), rounds=50)
        st = alice.state
        assert (st.N, st.r, st.k0) == (80, 7, 2)
        assert st.blocks_cleared == 5
        assert st.c == st.rho * st.ab ** 21
        lo, hi = outcome_interval(t)
        ok, last_n = orbit_claim_holds(lac2(), st, lo, hi)
        assert ok and last_n >= 399
        validate_transcript(t, K)

    def test_single_point_blocks(self, K, cantor_decay, cantor_alpha):
        # lacunarity above 1/(alpha*beta) gives N = 1, r = 1: every block
        # is cleared by a single avoidance step
        spec = LacunarySpec(GeometricTerms(F(2731)), ConstTargets(F(1, 2)))
        params = GameParams(cantor_alpha, F(1, 4))
        alice = LacunaryStrategy(spec, decay=cantor_decay)
        t = run_game(K, params, alice, HoldCenter(), rounds=20)
        st = alice.state
        assert (st.N, st.r) == (1, 1)
        assert st.blocks_cleared == 18
        lo, hi = outcome_interval(t)
        ok, _ = orbit_claim_holds(spec, st, lo, hi)
        assert ok

    def test_piecewise_phi_run(self, K, cantor_decay, cantor_alpha):
        phi = BiLipschitzMap.affine(F(3, 2), F(1, 7))
        params = GameParams(cantor_alpha, F(1, 4))
        alice = LacunaryStrategy(lac2(), phi=phi, decay=cantor_decay)
        t = run_game(K, params, alice, HoldCenter(), rounds=45)
        st = alice.state
        assert st.L == F(3, 2)
        lo, hi = outcome_interval(t)
        ok, _ = orbit_claim_holds(lac2(), st, lo, hi, phi=phi)
        assert ok


class TestPlanBA:
    def test_growth_rate_frozen(self):
        st = plan_ba(ID, GameParams(F(1, 4), F(1, 9)), LOOSE, Ball(F(0), F(1)))
        assert st.R == 6

    def test_plan_cantor_frozen(self, cantor_decay, cantor_alpha):
        st = plan_ba(ID, GameParams(cantor_alpha, F(1, 4)), cantor_decay,
                     Ball(F(0), F(1)))
        ab = cantor_alpha / 4
        assert st.k0 == 4 and st.rho == ab ** 3
        assert st.c == st.rho / F(1, 4)
        assert st.rho < min(ab / 2, F(1, 3))

    def test_inadmissible_alpha(self, cantor_decay):
        with pytest.raises(InvalidAlpha):
            plan_ba(ID, GameParams(F(1, 5), F(1, 4)), cantor_decay,
                    Ball(F(0), F(1)))


class TestBAEndToEnd:
    def test_block_candidate_enumeration(self):
        st = plan_ba(ID, GameParams(F(1, 4), F(1, 9)), LOOSE, Ball(F(0), F(1)))
        got = _block_candidates(st, ID, 1, F(49, 100), F(51, 100))
        assert got == [F(1, 2)]

    def test_cantor_40_rounds(self, K, cantor_decay, cantor_alpha):
        params = GameParams(cantor_alpha, F(1, 4))
        ba = BAStrategy(decay=cantor_decay)
        t = run_game(K, params, ba, HoldCenter(), rounds=40)
        st = ba.state
        assert st.blocks_done == 38
        lo, hi = outcome_interval(t)
        c = st.c
        for f in fractions_in_interval(lo - c, hi + c, 10 ** 6):
            d = max(F(0), lo - f, f - hi)
            assert d > c / f.denominator ** 2
        validate_transcript(t, K)


class TestExcludeCountable:
    def test_excludes_current_center(self, K, cantor_alpha):
        params = GameParams(cantor_alpha, F(1, 4))
        alice = ExcludeCountable([F(0)])
        t = run_game(K, params, alice, HoldCenter(), rounds=3)
        lo, hi = outcome_interval(t)
        assert lo > 0 or hi < 0  # the excluded point is outside

    def test_waits_for_rho0(self, K, cantor_alpha):
        params = GameParams(cantor_alpha, F(1, 4))
        alice = ExcludeCountable([F(0)], rho0=F(1, 10))
        t = run_game(K, params, alice, HoldCenter(), rounds=4)
        # first move happens while radius 1 > 1/10: held center
        assert t.moves[1][1].center == t.moves[0][1].center
        lo, hi = outcome_interval(t)
        assert lo > 0 or hi < 0

    def test_empty_list_is_canonical(self, K, cantor_alpha):
        params = GameParams(cantor_alpha, F(1, 4))
        a = ExcludeCountable([])
        t = run_game(K, params, a, HoldCenter(), rounds=3)
        assert all(b.center == t.moves[0][1].center for _, b in t.moves)


class TestInterleave:
    def test_overlap_rejected(self):
        with pytest.raises(ScheduleOverlap):
            interleave([HoldCenter(), HoldCenter()], [(1, 2), (3, 2)])

    def test_gap_rejected(self):
        with pytest.raises(ScheduleOverlap):
            interleave([HoldCenter(), HoldCenter()], [(1, 3), (2, 3)])

    def test_trivial_schedule_matches_solo(self, K, cantor_decay, cantor_alpha):
        params = GameParams(cantor_alpha, F(1, 4))
        solo = LacunaryStrategy(lac2(), decay=cantor_decay)
        t1 = run_game(K, params, solo, HoldCenter(), rounds=25)
        wrapped = interleave([LacunaryStrategy(lac2(), decay=cantor_decay)],
                             [(1, 1)])
        t2 = run_game(K, params, wrapped, HoldCenter(), rounds=25)
        assert t1.to_jsonl() == t2.to_jsonl()

    def test_two_way_certificates(self, K, cantor_decay, cantor_alpha):
        params = GameParams(cantor_alpha, F(1, 4))
        lac = LacunaryStrategy(lac2(), decay=cantor_decay)
        ba = BAStrategy(decay=cantor_decay)
        duo = interleave([lac, ba], [(1, 2), (2, 2)])
        t = run_game(K, params, duo, HoldCenter(), rounds=60)
        lo, hi = outcome_interval(t)
        # both sub-plans ran under beta_eff = beta*(alpha*beta)
        ab_eff = params.alpha * params.beta * (params.alpha * params.beta)
        assert lac.state.ab == ab_eff and ba.state.ab == ab_eff
        assert lac.state.blocks_cleared >= 1
        assert ba.state.blocks_done >= 1
        ok, _ = orbit_claim_holds(lac2(), lac.state, lo, hi)
        assert ok
        c = ba.state.c
        inv = 1 / ba.state.ab
        from schmidtgame.numerics import floor_sqrt
        Q = min(floor_sqrt(inv ** ba.state.blocks_done), 10 ** 5)
        for f in fractions_in_interval(lo - c, hi + c, Q):
            d = max(F(0), lo - f, f - hi)
            assert d > c / f.denominator ** 2


class TestAffineReduction:
    def test_zero_shift(self):
        spec = affine_to_sequence(2, F(0), F(1, 3), 10)
        assert all(spec.targets.target(n) == F(1, 3) for n in range(1, 11))

    def test_half_shift_frozen(self):
        spec = affine_to_sequence(2, F(1, 2), F(0), 12)
        assert all(spec.targets.target(n) == F(1, 2) for n in range(1, 13))

    def test_third_shift_frozen(self):
        spec = affine_to_sequence(3, F(1, 3), F(0), 5)
        assert spec.targets.target(2) == F(2, 3)

    def test_iteration_agrees_pointwise(self):
        # d(f^n(x), y) must equal d(b^n x, y_n) for every x and n
        rng = random.Random(3)
        for b, c in ((2, F(1, 2)), (3, F(1, 3)), (2, F(3, 7)), (5, F(2, 9))):
            y = F(rng.randint(0, 8), 9)
            spec = affine_to_sequence(b, c, y, 20)
            for _ in range(10):
                x = F(rng.randint(0, 999), 1000)
                z = x
                for n in range(1, 21):
                    z = affine_map(b, c, z)
                    lhs = circle_dist(z, y)
                    rhs = circle_dist(F(b) ** n * x, spec.targets.target(n))
                    assert lhs == rhs
