"""End-to-end acceptance checks for the whole toolkit.

One test per headline guarantee; each prints a single PASS/FAIL line with
the measured margin (shown under ``pytest -s``, or in the captured-output
block when a criterion fails).  These are deliberately heavier than the
unit suites -- budget a couple of minutes for the Monte Carlo ones.
"""

import math
import random
import time

from ldwalk import exact, verify
from ldwalk.measures import kr_norm
from ldwalk.monte_carlo import ExcursionEvent, TiltSchedule, importance_estimate, mc_rate
from ldwalk.rates import (
    composite_rate,
    composite_rate_closed,
    composite_rate_variational,
    cramer_at_zero,
    dv_rate_kernel_form,
    dv_rate_variational,
)
from ldwalk.state_space import MINUS_INF, PLUS_INF, TransitionProfile, dist
from ldwalk.measures import MeasureZbar, compose, decompose

from _kr_oracle import kr_norm_bruteforce

SEED = 20260823


def _verdict(num, label, ok, detail):
    print("[%02d] %-32s %s  %s" % (num, label, "PASS" if ok else "FAIL", detail))
    assert ok, "[%02d] %s: %s" % (num, label, detail)


def test_criterion_01_excursion_decay_slope():
    t0 = time.perf_counter()
    rep = verify.excursion_decay_check(p=0.3, R=5, sigma=1, n_max=401, tol=5e-3)
    dt = time.perf_counter() - t0
    ok = rep["pass"] and dt < 30.0
    _verdict(1, "excursion decay slope",
             ok, "gap=%.2e tol=5e-3 runtime=%.1fs" % (rep["gap"], dt))


def test_criterion_02_meander_decay_slopes():
    up = verify.meander_decay_check(0.7, R=5, sigma=1, n_max=401, tol=1e-2)
    down = verify.meander_decay_check(0.3, R=5, sigma=1, n_max=401, tol=1e-2)
    assert abs(up.get("predicted", 0.0)) < 1e-15  # outward drift is free
    assert down["predicted"] == -cramer_at_zero(0.3)
    ok = up["pass"] and down["pass"]
    _verdict(2, "meander decay slopes", ok,
             "gap(p=.7)=%.2e gap(p=.3)=%.2e tol=1e-2" %
             (up["gap"], down["gap"]))


def _acc_profile(rng, regime):
    lo = lambda: rng.uniform(0.15, 0.45)
    hi = lambda: rng.uniform(0.55, 0.85)
    pm = lo() if regime in ("ll", "lh") else hi()
    pp = lo() if regime in ("ll", "hl") else hi()
    table = {k: rng.uniform(0.2, 0.8) for k in range(-2, 3)}
    return TransitionProfile(-2, 2, table, tail_minus=pm, tail_plus=pp)


def _acc_flow_measure(rng, lo, size):
    # stationary-by-construction central law: edge flows first
    rho = [rng.uniform(0.05, 1.0) for _ in range(size)]
    s = sum(rho)
    rho = [r / (2 * s) for r in rho]
    mu = {}
    for i in range(size + 1):
        left = rho[i - 1] if i - 1 >= 0 else 0.0
        right = rho[i] if i < size else 0.0
        mu[lo + i] = left + right
    return mu


def _acc_measure(rng):
    am = rng.uniform(0, 1)
    ap = rng.uniform(0, 1 - am)
    if rng.random() < 0.3:
        scale = am + ap
        if scale == 0:
            return MeasureZbar({PLUS_INF: 1.0})
        return MeasureZbar({MINUS_INF: am / scale, PLUS_INF: ap / scale})
    mu0 = _acc_flow_measure(rng, rng.randint(-3, 1), rng.randint(1, 3))
    return compose(am, mu0, ap)


def test_criterion_03_rate_form_equivalence():
    rng = random.Random(SEED)
    regimes_seen = set()
    worst_closed = worst_var = 0.0
    for k in range(200):
        regime = ("ll", "lh", "hl", "hh")[k % 4]
        prof = _acc_profile(rng, regime)
        mu = _acc_measure(rng)
        d = decompose(mu)
        dv = dv_rate_variational(d.mu_zero, prof) if d.alpha_zero > 0 else None
        r_min = composite_rate(mu, prof, dv=dv)
        r_closed = composite_rate_closed(mu, prof, dv=dv)
        r_var = composite_rate_variational(mu, prof, dv=dv)
        regimes_seen.add(r_closed.certificate["regime"])
        if math.isinf(r_min.value):
            assert math.isinf(r_closed.value) and math.isinf(r_var.value)
            continue
        worst_closed = max(worst_closed, abs(r_min.value - r_closed.value))
        worst_var = max(worst_var, abs(r_min.value - r_var.value))
    ok = (worst_closed <= 1e-12 and worst_var <= 1e-8
          and len(regimes_seen) == 4)
    _verdict(3, "three rate forms agree", ok,
             "closed=%.1e var=%.1e regimes=%d/4" %
             (worst_closed, worst_var, len(regimes_seen)))


def _truncated_invariant(p_plus, p_minus, radius):
    w = {}
    for k in range(0, radius + 1):
        w[k] = (p_plus / (1 - p_plus)) ** k
    for k in range(-radius, 0):
        w[k] = ((1 - p_plus) / p_minus) * ((1 - p_minus) / p_minus) ** (-k - 1)
    tot = math.fsum(w.values())
    return {k: v / tot for k, v in w.items()}


def test_criterion_04_dv_routes_agree():
    rng = random.Random(SEED + 4)
    worst = 0.0
    for _ in range(100):
        prof = TransitionProfile(
            -2, 2, {k: rng.uniform(0.2, 0.8) for k in range(-2, 3)},
            tail_minus=rng.uniform(0.2, 0.8), tail_plus=rng.uniform(0.2, 0.8))
        mu0 = _acc_flow_measure(rng, rng.randint(-4, 2), rng.randint(1, 4))
        assert len(mu0) <= 5
        ker = dv_rate_kernel_form(mu0, prof)
        var = dv_rate_variational(mu0, prof)
        assert math.isfinite(ker.value)
        worst = max(worst, abs(var.value - ker.value))
    # stationary law of the inward-drifting walk, truncated: nearly free
    prof = TransitionProfile.two_sided(0.65, 0.35)
    pi12 = _truncated_invariant(0.35, 0.65, 12)
    near = max(dv_rate_kernel_form(pi12, prof).value,
               dv_rate_variational(pi12, prof).value)
    # an isolated atom cannot be stationary for a walk that always moves
    sentinel = dv_rate_variational({0: 1.0}, prof)
    ok = worst <= 3e-3 and 0.0 <= near <= 1e-3 and math.isinf(sentinel.value)
    _verdict(4, "DV variational vs kernel", ok,
             "worst=%.1e invariant=%.1e sentinel=%s" %
             (worst, near, sentinel.value))


def test_criterion_05_kr_norm_vs_bruteforce():
    rng = random.Random(SEED + 5)
    points = list(range(-6, 7)) + [MINUS_INF, PLUS_INF]
    worst = 0.0
    for _ in range(500):
        supp = rng.sample(points, rng.randint(1, 4))
        atoms = {h: rng.uniform(-1.0, 1.0) for h in supp}
        worst = max(worst, abs(kr_norm(atoms) - kr_norm_bruteforce(atoms)))
    prob_dev = 0.0
    dirac_slack = -math.inf
    for _ in range(200):
        supp = rng.sample(points, rng.randint(1, 4))
        w = [rng.uniform(0.05, 1.0) for _ in supp]
        tot = sum(w)
        prob = {h: wi / tot for h, wi in zip(supp, w)}
        prob_dev = max(prob_dev, abs(kr_norm(prob) - 1.0))
        h, k = rng.sample(points, 2)
        dirac_slack = max(dirac_slack,
                          kr_norm({h: 1.0, k: -1.0}) - dist(h, k))
    ok = worst <= 1e-7 and prob_dev <= 1e-9 and dirac_slack <= 1e-12
    _verdict(5, "KR norm LP vs brute force", ok,
             "worst=%.1e prob_dev=%.1e dirac_slack=%.1e" %
             (worst, prob_dev, dirac_slack))


def test_criterion_06_lemma_property_suites():
    results = verify.run_suites(sorted(verify.SUITES), SEED, 1000)
    results.append(verify.roundtrip_exhaustive(16))
    results.append(verify.roundtrip_sampled(random.Random(SEED + 6),
                                            samples=10000, n=200))
    failures = sum(r.failures for r in results)
    instances = sum(r.instances for r in results)
    ok = failures == 0 and all(r.ok for r in results)
    _verdict(6, "lemma property suites", ok,
             "%d checks %d instances %d failures" %
             (len(results), instances, failures))


def test_criterion_07_monte_carlo_cross_validation():
    prof4 = TransitionProfile.homogeneous(0.4)
    ev = ExcursionEvent(R=5, sigma=1)
    est = importance_estimate(prof4, ev, 101, 10 ** 6, SEED, start=ev.start,
                              schedule=TiltSchedule.constant(0.0, 101))
    truth = exact.excursion_prob(prof4, 5, 1, 101)
    rel_log = abs(math.log(est.mean) - math.log(truth)) / abs(math.log(truth))

    # same event family as criterion 1; Richardson strips the n^{-3/2} factor
    prof3 = TransitionProfile.homogeneous(0.3)
    rep = mc_rate(prof3, ExcursionEvent(R=5, sigma=1), [101, 151, 201],
                  10 ** 6, SEED + 7, start=5, schedule_for=0.0,
                  method="richardson")
    slope_err = abs(rep.slope - (-cramer_at_zero(0.3)))
    ok = rel_log <= 0.05 and slope_err <= 1e-2 and not rep.unreliable
    _verdict(7, "Monte Carlo vs exact DP", ok,
             "rel_log_err=%.3f slope_err=%.2e unreliable=%s" %
             (rel_log, slope_err, rep.unreliable))


def test_criterion_08_two_scale_decay_gap():
    t0 = time.perf_counter()
    rep = verify.counterexample_gap(pbar=0.7, eps=0.25)
    dt = time.perf_counter() - t0
    ok = rep["pass"] and rep["gap"] >= 0.05 and dt < 60.0
    _verdict(8, "two-scale decay gap", ok,
             "gap=%.4f (>=0.05) runtime=%.1fs" % (rep["gap"], dt))


def test_criterion_09_segment_figure():
    rows = verify.figure1_rows(2001)
    rep = verify.figure1_report(rows)
    blue = [(a, y) for a, y, _ in rows]
    peak_a, peak_y = max(blue, key=lambda t: t[1])
    assert rows[0][1] == rows[0][2] == 0.0
    assert rows[-1][1] == rows[-1][2] == 0.0
    for col in (1, 2):
        ys = [r[col] for r in rows]
        for i in range(1, len(ys) - 1):
            assert ys[i + 1] - 2 * ys[i] + ys[i - 1] <= 1e-9
    ok = (rep["pass"] and abs(peak_y - 0.02149) <= 1e-4
          and abs(peak_a - 0.7244) <= 1e-3)
    _verdict(9, "segment figure reproduction", ok,
             "peak=%.6f@%.4f (want 0.02149@0.7244)" % (peak_y, peak_a))


def test_criterion_10_class_partition_exact():
    rng = random.Random(SEED + 10)
    rep12 = verify.ball_partition_check(rng, count=5, n=12, tol=1e-13)
    rep14 = verify.ball_partition_check(rng, count=2, n=14, tol=1e-13)
    worst = max(rep12["worst_gap"], rep14["worst_gap"])
    ok = rep12["pass"] and rep14["pass"]
    _verdict(10, "class partition exactness", ok,
             "worst_gap=%.1e tol=1e-13 (n<=14)" % worst)
