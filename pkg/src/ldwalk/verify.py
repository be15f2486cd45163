"""Verification campaigns: property suites over random instances, decay-slope
checks against the closed-form rates, and the two-scale counterexample gap.

Everything here is shared between the CLI ``verify`` subcommands and the
acceptance tests, so a command-line PASS and a pytest PASS mean the same
computation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .exact import (
    ball_prob_enum,
    counterexample_blocks,
    excursion_log_prob,
    meander_log_prob,
    observable_ball_log_prob,
    rate_slope,
    BlockObservable,
)
from .instances import (
    boundary_instance,
    central_instance,
    push_deep,
    typical_instance,
    walk,
)
from .measures import (
    MeasureZbar,
    decompose,
    empirical_measure,
    kr_distance,
    occupation_counts,
    r_mu0,
    restricted_empirical,
)
from .rates import cramer_at_zero, cramer_inf
from .state_space import TransitionProfile, p_star, r_zbar
from .trajectories import (
    alpha_bar,
    build_typical,
    cut_sequence,
    is_excursion_word,
    is_meander_word,
    path_log_prob,
    reconstruct,
    region,
    stitch,
    typical_times,
)


@dataclass(frozen=True)
class CheckResult:
    """Aggregated outcome of one named inequality over many instances.

    worst_margin is the smallest slack (bound minus measured) seen; a
    negative margin is a failure."""

    name: str
    instances: int
    failures: int
    worst_margin: float

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.instances > 0

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "instances": self.instances,
            "failures": self.failures,
            "worst_margin": self.worst_margin,
            "pass": self.ok,
        }


class _Tally:
    def __init__(self, name):
        self.name = name
        self.instances = 0
        self.failures = 0
        self.worst = math.inf

    def add(self, margin: float):
        self.instances += 1
        if margin < 0:
            self.failures += 1
        self.worst = min(self.worst, margin)

    def result(self) -> CheckResult:
        worst = self.worst if self.instances else math.nan
        return CheckResult(self.name, self.instances, self.failures, worst)


# ----------------------------------------------------- occupation inequalities


def occupation_suite(rng: random.Random, count: int = 1000) -> list:
    """Regional occupation vs masses, boundary-site rarity, endpoint
    confinement, and the restricted central law, on random in-ball words."""
    t_region = _Tally("region_counts_within_2eps")
    t_sites = _Tally("boundary_sites_below_3eps")
    t_end = _Tally("endpoint_within_R_plus_2eps")
    t_restr = _Tally("restricted_law_within_6eps_over_alpha0")

    prof_b = TransitionProfile.two_sided(0.45, 0.68)
    draws = 0
    while t_region.instances < count and draws < 40 * count:
        draws += 1
        n = rng.randint(300, 700)
        eps = rng.uniform(0.05, 0.11)
        w = walk(prof_b, n, rng)
        mu = push_deep(w, 22)
        d = decompose(mu)
        R = max(r_mu0(d.mu_zero, eps) + 1, 2)
        if R > 26:
            continue
        if kr_distance(empirical_measure(w), mu) >= 2.0 ** (-R) * eps:
            continue
        regions, sites = occupation_counts(w, R)
        alphas = {-1: d.alpha_minus, 0: d.alpha_zero, 1: d.alpha_plus}
        t_region.add(min(
            2 * eps * n - abs(regions[s] - alphas[s] * n) for s in (-1, 0, 1)
        ))
        t_sites.add(min(
            3 * eps * n - sites.get(m, 0) for m in (-R, -R + 1, R - 1, R)
        ))

    prof_a = TransitionProfile.homogeneous(0.5)
    for _ in range(count):
        n = rng.randint(200, 500)
        eps = rng.uniform(0.05, 0.11)
        w = walk(prof_a, n, rng)
        mu = empirical_measure(w)  # alpha_0 = 1, in-ball at distance zero
        R = r_mu0(decompose(mu).mu_zero, eps) + 1
        t_end.add(R + 2 * eps * n - abs(w[-1]))

    prof_c = TransitionProfile.two_sided(0.45, 0.65)
    draws = 0
    while t_restr.instances < count and draws < 40 * count:
        draws += 1
        n = rng.randint(400, 800)
        w = walk(prof_c, n, rng)
        mu = push_deep(w, 24)
        d = decompose(mu)
        if d.alpha_zero == 0.0:
            continue
        eps = min(0.11, d.alpha_zero / 2 * 0.9) * rng.uniform(0.6, 1.0)
        R = max(r_mu0(d.mu_zero, eps), r_zbar(eps)) + 1
        if R > 28:
            continue
        if kr_distance(empirical_measure(w), mu) >= 2.0 ** (-R) * eps:
            continue
        ell0 = MeasureZbar(restricted_empirical(w, R))
        bound = 6 * eps / d.alpha_zero
        t_restr.add(bound - kr_distance(ell0, MeasureZbar(d.mu_zero)))

    return [t.result() for t in (t_region, t_sites, t_end, t_restr)]


# -------------------------------------------------- typical-trajectory suite


def typical_suite(rng: random.Random, count: int = 1000) -> list:
    """Connector budget, target occupation, surgery cost, and class
    membership of assembled typical words."""
    t_extras = _Tally("connector_budget_9eps")
    t_shallow = _Tally("central_endpoint_shallow")
    t_occ = _Tally("occupation_within_22eps")
    t_prob = _Tally("probability_cost_10eps")
    t_class = _Tally("class_membership")
    for _ in range(count):
        prof, mu, eps, R, n, sigma, comps = typical_instance(rng)
        t = typical_times(mu, eps, n)
        extras = n - sum(t.values())
        t_extras.add(min(9 * eps * n - extras, extras))
        t_shallow.add(R + 2 * eps * n - abs(comps[0][-1]))
        psi = build_typical(sigma, *comps, mu, eps, R, n)
        t_occ.add(22 * eps - kr_distance(empirical_measure(psi), mu))
        lhs = path_log_prob(prof, psi)
        parts = sum(path_log_prob(prof, c) for c in comps)
        t_prob.add(lhs - (10 * eps * n * math.log(p_star(prof)) + parts) + 1e-9)
        ok = (len(psi) == n and psi[0] == 0 and region(psi[-1], R) == sigma)
        t_class.add(0.0 if ok else -1.0)
    return [t.result() for t in (t_extras, t_shallow, t_occ, t_prob, t_class)]


def assembly_injectivity_check(n: int = 24, R: int = 2) -> CheckResult:
    """Distinct component tuples assemble to distinct words (small frames)."""
    t = _Tally("assembly_injective")
    mu = MeasureZbar({0: 1.0})
    eps = 0.1
    centrals = [(0, 1, 2), (0, 1, 0), (0, -1, 0), (0, -1, -2)]
    excs = [(-R, -R - 1, -R)]  # the excursion leg lives in A^(-sigma)
    meas = [(R, R + 1, R), (R, R + 1, R + 2)]
    seen = {}
    for vc in centrals:
        for ve in excs:
            for vm in meas:
                psi = build_typical(1, vc, ve, vm, mu, eps, R, n,
                                    mode="permissive")
                key = psi
                margin = -1.0 if key in seen and seen[key] != (vc, ve, vm) \
                    else 0.0
                seen[key] = (vc, ve, vm)
                t.add(margin)
    return t.result()


# ----------------------------------------------------------- stitching suite


def stitch_suite(rng: random.Random, count: int = 1000) -> list:
    """Subword counts, stitched lengths and memberships, central
    concentration, exact reconstruction, and the probability factorization."""
    t_count = _Tally("subword_count_below_6eps")
    t_len = _Tally("stitched_length_exact")
    t_member = _Tally("stitched_class_words")
    t_conc = _Tally("central_stitch_within_40eps")
    t_round = _Tally("reconstruct_identity")
    t_fact = _Tally("probability_factorization_69eps")
    for i in range(count):
        maker = central_instance if i % 2 == 0 else boundary_instance
        prof, w, mu, eps, R = maker(rng)
        n = len(w)
        d = decompose(mu)
        alphas = {-1: d.alpha_minus, 0: d.alpha_zero, 1: d.alpha_plus}
        cuts = cut_sequence(w, R)
        rho = region(w[-1], R)
        stitched = {}
        len_ok = member_ok = True
        worst_count = math.inf
        for s in (-1, 0, 1):
            worst_count = min(
                worst_count, 6 * eps * n + 1 - len(cuts.index_set(s))
            )
            phi = stitch(w, s, mu, eps, R)
            stitched[s] = phi
            if len(phi) != alpha_bar(alphas[s], eps, n):
                len_ok = False
            if s != 0:
                good = is_meander_word(phi, s, R) if s == rho \
                    else is_excursion_word(phi, s, R)
                member_ok = member_ok and good
        t_count.add(worst_count)
        t_len.add(0.0 if len_ok else -1.0)
        t_member.add(0.0 if member_ok else -1.0)
        ell0 = empirical_measure(stitched[0])
        bound = 40.0 * eps / alphas[0]
        t_conc.add(bound - kr_distance(ell0, MeasureZbar(d.mu_zero)))
        t_round.add(0.0 if reconstruct(stitched, cuts) == w else -1.0)
        lhs = path_log_prob(prof, w)
        rhs = sum(path_log_prob(prof, stitched[s]) for s in (-1, 0, 1))
        slack = 69.0 * eps * n * math.log(1.0 / p_star(prof))
        t_fact.add(rhs + slack - lhs + 1e-9)
    return [t.result() for t in (t_count, t_len, t_member, t_conc, t_round,
                                 t_fact)]


# ------------------------------------------------------ cut/reassemble identity


def _stitch_roundtrip_ok(w, R: int) -> bool:
    mu_dummy = MeasureZbar({0: 1.0})
    cuts = cut_sequence(w, R)
    target = 4 * len(w) + 5  # room for every subword plus connectors
    pieces = {
        s: stitch(w, s, mu_dummy, 0.02, R, mode="permissive",
                  target_len=target)
        for s in set(cuts.sigmas)
    }
    return reconstruct(pieces, cuts) == w


def roundtrip_exhaustive(n_max: int = 16, R: int = 2) -> CheckResult:
    """Cut, stitch each region, reconstruct: identity on every word from 0."""
    t = _Tally("roundtrip_exhaustive")
    for n in range(1, n_max + 1):
        for mask in range(1 << (n - 1)):
            w = [0]
            for j in range(n - 1):
                w.append(w[-1] + (1 if (mask >> j) & 1 else -1))
            t.add(0.0 if _stitch_roundtrip_ok(tuple(w), R) else -1.0)
    return t.result()


def roundtrip_sampled(rng: random.Random, samples: int = 10000,
                      n: int = 200) -> CheckResult:
    t = _Tally("roundtrip_sampled")
    for _ in range(samples):
        prof = TransitionProfile.homogeneous(rng.uniform(0.3, 0.7))
        w = walk(prof, n, rng, start=rng.randint(-3, 3))
        t.add(0.0 if _stitch_roundtrip_ok(w, rng.randint(1, 3)) else -1.0)
    return t.result()


SUITES = {
    "occupation": lambda rng, count: occupation_suite(rng, count),
    "typical": lambda rng, count: typical_suite(rng, count)
    + [assembly_injectivity_check()],
    "stitch": lambda rng, count: stitch_suite(rng, count),
    "roundtrip": lambda rng, count: [
        roundtrip_exhaustive(12),
        roundtrip_sampled(rng, min(count, 2000)),
    ],
}


def run_suites(names, seed: int, count: int) -> list:
    rng = random.Random(seed)
    out = []
    for name in names:
        if name not in SUITES:
            raise ValueError("unknown suite %r" % (name,))
        out.extend(SUITES[name](rng, count))
    return out


# ------------------------------------------------------------- decay slopes


def excursion_decay_check(p: float = 0.3, R: int = 5, sigma: int = 1,
                          n_max: int = 401, tol: float = 5e-3,
                          profile: TransitionProfile | None = None) -> dict:
    """DP series of excursion log-probabilities vs the Legendre value at 0.

    With an inhomogeneous profile the prediction uses the tail limit; it is
    exact only asymptotically in R, so wild windows may honestly miss tol."""
    prof = profile if profile is not None else TransitionProfile.homogeneous(p)
    plim = prof.limit(sigma)
    pts = [(n, excursion_log_prob(prof, R, sigma, n))
           for n in range(3, n_max + 1, 2)]
    rep = rate_slope(pts, 2)
    predicted = -cramer_at_zero(plim)
    gap = abs(rep.slope - predicted)
    return {
        "check": "excursion_decay", "p": plim, "R": R, "sigma": sigma,
        "n_max": n_max, "slope": rep.slope, "predicted": predicted,
        "gap": gap, "tol": tol, "residual": rep.residual,
        "points": list(rep.points), "pass": bool(gap <= tol),
    }


def meander_decay_check(p: float, R: int = 5, sigma: int = 1,
                        n_max: int = 401, tol: float = 1e-2,
                        profile: TransitionProfile | None = None) -> dict:
    """Meander series; the predicted slope is 0 on the escaping side."""
    prof = profile if profile is not None else TransitionProfile.homogeneous(p)
    plim = prof.limit(sigma)
    pts = [(n, meander_log_prob(prof, R, sigma, n))
           for n in range(3, n_max + 1, 2)]
    rep = rate_slope(pts, 2)
    side = "nonneg" if sigma == 1 else "nonpos"
    predicted = -cramer_inf(plim, side)
    gap = abs(rep.slope - predicted)
    return {
        "check": "meander_decay", "p": plim, "R": R, "sigma": sigma,
        "n_max": n_max, "slope": rep.slope, "predicted": predicted,
        "gap": gap, "tol": tol, "residual": rep.residual,
        "points": list(rep.points), "pass": bool(gap <= tol),
    }


# ---------------------------------------------------------- ball partition


def ball_partition_check(rng: random.Random, count: int = 5, n: int = 12,
                         tol: float = 1e-13) -> dict:
    """Per-class ball probabilities must sum to the unfiltered one exactly."""
    worst = 0.0
    cases = []
    for _ in range(count):
        prof = TransitionProfile.two_sided(rng.uniform(0.35, 0.65),
                                           rng.uniform(0.35, 0.65))
        seedw = walk(prof, n, rng)
        mu = push_deep(seedw, rng.randint(3, 5))
        eps = rng.uniform(0.3, 0.8)
        total = ball_prob_enum(prof, mu, eps, n)
        parts = [ball_prob_enum(prof, mu, eps, n, class_filter=s)
                 for s in (-1, 0, 1)]
        gap = abs(sum(parts) - total)
        worst = max(worst, gap)
        cases.append({"eps": eps, "total": total, "gap": gap})
    return {
        "check": "ball_class_partition", "n": n, "count": count,
        "worst_gap": worst, "tol": tol, "cases": cases,
        "pass": bool(worst <= tol),
    }


# ----------------------------------------------------- two-scale observable


def counterexample_gap(pbar: float = 0.7, eps: float = 0.25,
                       blocks_m: int = 3, n_small: int = 12,
                       n_large: int = 144, threshold: float = 0.05) -> dict:
    """Per-step decay of P(|ell_n(f) - 1| < eps) at the block scale d_2
    versus the scale c_3: the small scale decays faster by >= threshold,
    so no single exponential rate fits both subsequences."""
    prof = TransitionProfile.homogeneous(pbar)
    f = BlockObservable(tuple(counterexample_blocks(blocks_m)))
    v_small = observable_ball_log_prob(prof, f, 1.0, eps, n_small) / n_small
    v_large = observable_ball_log_prob(prof, f, 1.0, eps, n_large) / n_large
    gap = abs(v_small) - abs(v_large)
    return {
        "check": "two_scale_gap", "p": pbar, "eps": eps,
        "n_small": n_small, "n_large": n_large,
        "per_step_small": v_small, "per_step_large": v_large,
        "gap": gap, "threshold": threshold, "pass": bool(gap >= threshold),
    }


# -------------------------------------------------------- boundary segment


FIGURE1_BLUE = TransitionProfile.two_sided(0.31, 0.62)
FIGURE1_RED = TransitionProfile.two_sided(0.35, 0.8)


def figure1_rows(grid: int = 2001) -> list:
    """(alpha, rate_blue, rate_red) along the segment between the two ideal
    Diracs, for the two standard outward-drifting parameter pairs."""
    from .rates import segment_profile

    if grid < 3:
        raise ValueError("grid must have at least 3 points")
    alphas = [i / (grid - 1) for i in range(grid)]
    blue = segment_profile(FIGURE1_BLUE, alphas)
    red = segment_profile(FIGURE1_RED, alphas)
    return [(a, b[1], r[1]) for a, b, r in zip(alphas, blue, red)]


def figure1_report(rows, peak_tol: float = 1e-4,
                   loc_tol: float = 1e-3) -> dict:
    """Concavity, vanishing endpoints, and the blue-curve peak location/value
    against the min-of-affines closed form."""
    alphas = [r[0] for r in rows]
    checks = {}
    for col, name, prof in ((1, "blue", FIGURE1_BLUE), (2, "red", FIGURE1_RED)):
        ys = [r[col] for r in rows]
        endpoint_ok = abs(ys[0]) < 1e-12 and abs(ys[-1]) < 1e-12
        concave_ok = all(
            ys[i - 1] + ys[i + 1] - 2 * ys[i] <= 1e-9
            for i in range(1, len(ys) - 1)
        )
        checks[name] = {"endpoints_zero": endpoint_ok, "concave": concave_ok}
    blue_ys = [r[1] for r in rows]
    i_peak = max(range(len(blue_ys)), key=blue_ys.__getitem__)
    a = cramer_at_zero(FIGURE1_BLUE.limit(-1))  # left-tail confinement cost
    b = cramer_at_zero(FIGURE1_BLUE.limit(1))
    alpha_star = a / (a + b)
    peak_star = a * b / (a + b)
    peak_ok = abs(blue_ys[i_peak] - peak_star) <= peak_tol
    loc_ok = abs(alphas[i_peak] - alpha_star) <= loc_tol
    checks["blue_peak"] = {
        "alpha": alphas[i_peak], "value": blue_ys[i_peak],
        "alpha_predicted": alpha_star, "value_predicted": peak_star,
        "value_ok": peak_ok, "location_ok": loc_ok,
    }
    ok = all(c["endpoints_zero"] and c["concave"]
             for c in (checks["blue"], checks["red"])) and peak_ok and loc_ok
    return {"check": "figure1", "grid": len(rows), "checks": checks,
            "pass": bool(ok)}


if __name__ == "__main__":
    import json

    rng = random.Random(0)
    for r in run_suites(["occupation"], seed=1, count=40):
        print(r.as_dict())
    print(json.dumps(counterexample_gap(), indent=2))
    rep = figure1_report(figure1_rows(2001))
    print(json.dumps(rep, indent=2))
