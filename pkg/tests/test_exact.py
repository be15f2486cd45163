import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from ldwalk import MeasureZbar, TransitionProfile, empirical_measure, kr_distance
from ldwalk.exact import (
    BALL_ENUM_CAP,
    BlockObservable,
    DecayReport,
    ball_prob_enum,
    counterexample_blocks,
    endpoint_distribution,
    excursion_log_prob,
    excursion_prob,
    meander_log_prob,
    meander_prob,
    observable_ball_log_prob,
    observable_ball_prob,
    rate_slope,
    starting_point_comparison,
)
from ldwalk.state_space import _one_sided_gap
from ldwalk.trajectories import path_prob, region


def _all_words(n, start=0):
    for mask in range(1 << (n - 1)):
        w = [start]
        for j in range(n - 1):
            w.append(w[-1] + (1 if (mask >> j) & 1 else -1))
        yield tuple(w)


# -------------------------------------------------------------- excursions


def test_excursion_frozen_values():
    p5 = TransitionProfile.homogeneous(0.5)
    assert excursion_prob(p5, 1, 1, 3) == pytest.approx(0.25, abs=1e-15)
    assert excursion_prob(p5, 1, 1, 5) == pytest.approx(0.125, abs=1e-15)
    assert excursion_prob(p5, 1, 1, 4) == 0.0
    assert excursion_prob(p5, 1, 1, 1) == 1.0
    assert excursion_log_prob(p5, 1, 1, 4) == -math.inf


def test_excursion_catalan_cross_check():
    # homogeneous p: P(excursion of 2m+1 letters) = Catalan(m) p^m (1-p)^m
    for p in (0.3, 0.62):
        prof = TransitionProfile.homogeneous(p)
        for m in range(9):
            cat = math.comb(2 * m, m) // (m + 1)
            expect = cat * (p * (1 - p)) ** m
            for sigma in (-1, 1):
                got = excursion_prob(prof, 3, sigma, 2 * m + 1)
                assert got == pytest.approx(expect, rel=1e-12), (p, m, sigma)


def test_excursion_homogeneous_independent_of_radius():
    prof = TransitionProfile.homogeneous(0.41)
    vals = {excursion_prob(prof, R, 1, 11) for R in (1, 2, 7)}
    assert len(vals) == 1


def test_excursion_matches_enumeration():
    prof = TransitionProfile(-1, 2, {-1: 0.45, 0: 0.5, 1: 0.55, 2: 0.6},
                             tail_minus=0.45, tail_plus=0.6)
    R, sigma, n = 2, 1, 11
    brute = sum(
        path_prob(prof, (sigma * R,) + w[1:])
        for w in _all_words(n, sigma * R)
        if w[-1] == sigma * R and all(region(x, R) == sigma for x in w)
    )
    assert excursion_prob(prof, R, sigma, n) == pytest.approx(brute, abs=1e-13)
    # mirrored side
    brute_m = sum(
        path_prob(prof, w)
        for w in _all_words(n, -R)
        if w[-1] == -R and all(region(x, R) == -1 for x in w)
    )
    assert excursion_prob(prof, R, -1, n) == pytest.approx(brute_m, abs=1e-13)


# ---------------------------------------------------------------- meanders


def test_meander_frozen_values():
    assert meander_prob(TransitionProfile.homogeneous(0.5), 2, 1, 1) == 1.0
    prof = TransitionProfile.homogeneous(0.7)
    assert meander_prob(prof, 3, 1, 2) == pytest.approx(0.7, abs=1e-15)


def test_meander_monotone_and_dominates_excursion():
    prof = TransitionProfile.two_sided(0.45, 0.55)
    prev = 1.0
    for n in range(1, 30):
        m = meander_prob(prof, 2, 1, n)
        assert m <= prev + 1e-15
        assert m >= excursion_prob(prof, 2, 1, n) - 1e-15
        prev = m


def test_meander_ruin_floor_drifting_up():
    # p > 1/2: survival probability decreases to (2p-1)/p
    prof = TransitionProfile.homogeneous(0.7)
    floor = (2 * 0.7 - 1) / 0.7
    vals = [meander_prob(prof, 4, 1, n) for n in (11, 101, 501)]
    for v in vals:
        assert v > floor - 1e-12
    assert vals[0] > floor + 1e-4
    assert vals[-1] - floor < 1e-9  # geometric convergence: done by n ~ 500


def test_meander_matches_enumeration():
    prof = TransitionProfile(-2, 1, {-2: 0.52, -1: 0.48, 0: 0.5, 1: 0.44},
                             tail_minus=0.52, tail_plus=0.44)
    R, n = 1, 12
    brute = sum(
        path_prob(prof, w)
        for w in _all_words(n, -R)
        if all(region(x, R) == -1 for x in w)
    )
    assert meander_prob(prof, R, -1, n) == pytest.approx(brute, abs=1e-13)


def test_meander_log_rescale_deep_decay():
    # strong down-drift: survival above 0 for 1501 letters underflows doubles
    prof = TransitionProfile.homogeneous(0.1)
    lp = meander_log_prob(prof, 1, 1, 1501)
    assert lp < -600.0
    assert math.isfinite(lp)
    # per-step cost approaches the confinement rate -log(2 sqrt(pq))
    step = (meander_log_prob(prof, 1, 1, 1501) - meander_log_prob(prof, 1, 1, 1499)) / 2
    assert step == pytest.approx(0.5 * math.log(4 * 0.1 * 0.9), abs=5e-3)


def test_profile_wiggle_sandwich():
    # inside A^+ the per-step probabilities deviate from the limit by at most
    # G relatively, so confined-path probabilities match the homogeneous
    # analogue within (1 +- G)^(n-1)
    prof = TransitionProfile(0, 6, {0: 0.6, 1: 0.63, 2: 0.58, 3: 0.61,
                                    4: 0.6, 5: 0.64, 6: 0.6},
                             tail_minus=0.6, tail_plus=0.6)
    hom = TransitionProfile.homogeneous(0.6)
    R = 3
    G = _one_sided_gap(prof, 1, R)
    assert 0.0 < G < 1.0
    for n in (11, 15):
        ratio = excursion_prob(prof, R, 1, n) / excursion_prob(hom, R, 1, n)
        assert (1 - G) ** (n - 1) - 1e-12 <= ratio <= (1 + G) ** (n - 1) + 1e-12
        ratio_m = meander_prob(prof, R, 1, n) / meander_prob(hom, R, 1, n)
        assert (1 - G) ** (n - 1) - 1e-12 <= ratio_m <= (1 + G) ** (n - 1) + 1e-12


# ---------------------------------------------------------------- endpoints


def test_endpoint_frozen_values():
    p5 = TransitionProfile.homogeneous(0.5)
    assert endpoint_distribution(p5, 0, 1) == {0: 1.0}
    law = endpoint_distribution(p5, 0, 3)
    assert law == {-2: 0.25, 0: 0.5, 2: 0.25}
    law7 = endpoint_distribution(TransitionProfile.homogeneous(0.7), 0, 2)
    assert law7[1] == pytest.approx(0.7) and law7[-1] == pytest.approx(0.3)


def test_endpoint_binomial():
    p = 0.62
    prof = TransitionProfile.homogeneous(p)
    n = 9  # 8 steps
    law = endpoint_distribution(prof, 3, n)
    for k in range(9):
        pos = 3 + 2 * k - 8
        expect = math.comb(8, k) * p ** k * (1 - p) ** (8 - k)
        assert law[pos] == pytest.approx(expect, rel=1e-12)


def test_endpoint_matches_enumeration():
    prof = TransitionProfile(-1, 1, {-1: 0.7, 0: 0.5, 1: 0.3},
                             tail_minus=0.7, tail_plus=0.3)
    n = 11
    brute = {}
    for w in _all_words(n):
        brute[w[-1]] = brute.get(w[-1], 0.0) + path_prob(prof, w)
    law = endpoint_distribution(prof, 0, n)
    assert set(law) == set(brute)
    for k in law:
        assert law[k] == pytest.approx(brute[k], abs=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 0.8), st.integers(-3, 3), st.integers(1, 40))
def test_endpoint_mass_and_parity(p, start, n):
    law = endpoint_distribution(TransitionProfile.homogeneous(p), start, n)
    assert abs(math.fsum(law.values()) - 1.0) < 1e-12
    for k in law:
        assert (k - start - (n - 1)) % 2 == 0


# ----------------------------------------------------------- ball enumeration


def test_ball_everything_within_radius_two():
    prof = TransitionProfile.homogeneous(0.44)
    assert ball_prob_enum(prof, MeasureZbar({0: 1.0}), 2.0, 6) == pytest.approx(
        1.0, abs=1e-13
    )


def test_ball_tiny_radius_empty():
    prof = TransitionProfile.homogeneous(0.5)
    assert ball_prob_enum(prof, MeasureZbar({0: 1.0}), 1e-6, 2) == 0.0


def test_ball_cap_enforced():
    prof = TransitionProfile.homogeneous(0.5)
    with pytest.raises(ValueError):
        ball_prob_enum(prof, MeasureZbar({0: 1.0}), 0.5, BALL_ENUM_CAP + 1)


def test_ball_matches_bruteforce_with_measures_module():
    prof = TransitionProfile.two_sided(0.55, 0.45)
    mu = MeasureZbar({0: 0.4, 1: 0.3, -1: 0.2, 2: 0.1})
    for eps, n in ((0.3, 8), (0.55, 10)):
        brute = sum(
            path_prob(prof, w)
            for w in _all_words(n)
            if kr_distance(empirical_measure(w), mu) < eps
        )
        assert ball_prob_enum(prof, mu, eps, n) == pytest.approx(brute, abs=1e-13)


def test_ball_with_ideal_atoms_matches_bruteforce():
    prof = TransitionProfile.homogeneous(0.62)
    mu = MeasureZbar({float("inf"): 0.5, 0: 0.3, 1: 0.2})
    eps, n = 0.65, 9
    brute = sum(
        path_prob(prof, w)
        for w in _all_words(n)
        if kr_distance(empirical_measure(w), mu) < eps
    )
    assert ball_prob_enum(prof, mu, eps, n) == pytest.approx(brute, abs=1e-13)


def test_ball_class_partition():
    prof = TransitionProfile.two_sided(0.6, 0.6)
    mu = MeasureZbar({float("inf"): 0.4, 0: 0.35, 1: 0.25})
    eps, n = 0.8, 10
    total = ball_prob_enum(prof, mu, eps, n)
    parts = [ball_prob_enum(prof, mu, eps, n, class_filter=s, R=2)
             for s in (-1, 0, 1)]
    assert sum(parts) == pytest.approx(total, abs=1e-13)
    assert total > 0.0


def test_starting_point_comparison_cases():
    prof = TransitionProfile.homogeneous(0.5)
    mu = MeasureZbar({0: 0.5, 1: 0.25, -1: 0.25})
    lhs, rhs = starting_point_comparison(prof, mu, 1.0, 10, 0)
    assert lhs >= rhs
    lhs, rhs = starting_point_comparison(prof, mu, 1.0, 10, 1)
    assert lhs >= rhs > 0.0
    lhs, rhs = starting_point_comparison(
        TransitionProfile.homogeneous(0.6), mu, 1.0, 12, -2
    )
    assert lhs >= rhs > 0.0


def test_starting_point_comparison_needs_room():
    prof = TransitionProfile.homogeneous(0.5)
    mu = MeasureZbar({0: 1.0})
    with pytest.raises(ValueError):
        starting_point_comparison(prof, mu, 0.5, 20, 3)  # 20 <= 4*3/0.5


# ----------------------------------------------------------- block observable


def test_counterexample_blocks_frozen():
    assert counterexample_blocks(1) == [(1, 2)]
    assert counterexample_blocks(2) == [(1, 2), (4, 12)]
    assert counterexample_blocks(3) == [(1, 2), (4, 12), (144, 576)]
    b5 = counterexample_blocks(5)
    assert b5[3] == (331776, 1658880)
    assert b5[4] == (2751882854400, 16511297126400)
    # recurrence honored exactly
    for (c1, d1), (c2, d2) in zip(b5, b5[1:]):
        assert c2 == d1 * d1
    for k, (c, d) in enumerate(b5, start=1):
        assert d == (k + 1) * c


def test_counterexample_blocks_overflow():
    with pytest.raises(OverflowError):
        counterexample_blocks(6)
    with pytest.raises(ValueError):
        counterexample_blocks(0)


def test_block_observable_values():
    f = BlockObservable(((1, 2), (4, 12)))
    assert [f.value(x) for x in (0, 1, 2, 3, 4, 12, 13, -1)] == \
        [0, 1, 1, 0, 1, 1, 0, 0]
    with pytest.raises(ValueError):
        BlockObservable(((1, 2), (2, 5)))
    with pytest.raises(ValueError):
        BlockObservable(((3, 1),))


def test_observable_trivial_and_unreachable():
    prof = TransitionProfile.homogeneous(0.7)
    f = BlockObservable(((1, 2),))
    assert observable_ball_prob(prof, f, 0.0, 1.1, 17) == pytest.approx(1.0, abs=1e-12)
    far = BlockObservable(((144, 576),))
    assert observable_ball_prob(prof, far, 1.0, 0.1, 20) == 0.0
    assert observable_ball_log_prob(prof, far, 1.0, 0.1, 20) == -math.inf


def test_observable_matches_enumeration():
    prof = TransitionProfile.homogeneous(0.66)
    f = BlockObservable(((1, 2), (4, 12)))
    n = 12
    for target, eps in ((1.0, 0.25), (0.5, 0.2), (0.0, 0.35)):
        brute = sum(
            path_prob(prof, w)
            for w in _all_words(n)
            if abs(sum(f.value(x) for x in w) / n - target) < eps
        )
        got = observable_ball_prob(prof, f, target, eps, n)
        assert got == pytest.approx(brute, abs=1e-13), (target, eps)


def test_observable_two_scale_gap_frozen():
    # per-step log-probabilities of |ell_n(f) - 1| < 1/4 at the block scales
    prof = TransitionProfile.homogeneous(0.7)
    f = BlockObservable(tuple(counterexample_blocks(3)))
    v12 = observable_ball_log_prob(prof, f, 1.0, 0.25, 12) / 12
    v144 = observable_ball_log_prob(prof, f, 1.0, 0.25, 144) / 144
    assert v12 == pytest.approx(-0.140227173962, abs=1e-9)
    assert v144 == pytest.approx(-0.067745076096, abs=1e-9)
    assert abs(v12) - abs(v144) > 0.05


def test_observable_cap():
    prof = TransitionProfile.homogeneous(0.7)
    f = BlockObservable(((1, 2),))
    with pytest.raises(ValueError):
        observable_ball_prob(prof, f, 0.5, 0.1, 401)


# ---------------------------------------------------------------- rate slope


def test_rate_slope_geometric_exact():
    pts = [(n, -0.1 * n) for n in range(5, 30, 2)]
    rep = rate_slope(pts, 2)
    assert rep.slope == pytest.approx(-0.1, abs=1e-15)
    assert rep.residual == pytest.approx(0.0, abs=1e-15)
    assert rep.method == "last_difference"


def test_rate_slope_richardson_removes_log_prefactor():
    pts = [(n, -0.1 * n - 1.5 * math.log(n)) for n in range(300, 401, 2)]
    rep = rate_slope(pts, 2, method="richardson")
    assert rep.slope == pytest.approx(-0.1, abs=1e-4)
    assert rep.residual < 1e-6
    plain = rate_slope(pts, 2)
    assert abs(plain.slope + 0.1) > abs(rep.slope + 0.1)


def test_rate_slope_validation():
    with pytest.raises(ValueError):
        rate_slope([(2, -0.1), (4, -0.2)], 2)
    with pytest.raises(ValueError):
        rate_slope([(2, -0.1), (5, -0.2), (6, -0.3)], 2)
    with pytest.raises(ValueError):
        DecayReport(points=((2, -0.1), (2, -0.2), (4, -0.3)), slope=0.0,
                    method="last_difference", residual=0.0)
    with pytest.raises(ValueError):
        DecayReport(points=((2, 0.1), (4, -0.2), (6, -0.3)), slope=0.0,
                    method="last_difference", residual=0.0)
    with pytest.raises(ValueError):
        DecayReport(points=((2, -0.1), (4, -0.2), (6, -0.3)), slope=0.0,
                    method="secant", residual=0.0)


def test_excursion_series_slope_toward_cramer_zero():
    # moderate-n preview of the acceptance-scale series
    prof = TransitionProfile.homogeneous(0.3)
    pts = [(n, excursion_log_prob(prof, 5, 1, n)) for n in range(151, 202, 2)]
    rep = rate_slope(pts, 2)
    z = -0.5 * math.log(4 * 0.3 * 0.7)
    assert rep.slope == pytest.approx(-z, abs=2e-2)


if __name__ == "__main__":
    prof = TransitionProfile.homogeneous(0.7)
    f = BlockObservable(tuple(counterexample_blocks(3)))
    for n in (12, 24, 48, 96, 144, 288):
        lp = observable_ball_log_prob(prof, f, 1.0, 0.25, n)
        print(n, lp / n)
