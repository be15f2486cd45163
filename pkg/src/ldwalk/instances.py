"""Shared generators of (word, measure, eps, R) instances satisfying the
standing hypotheses of the surgery constructions.

Three families:

* ``central_instance`` -- purely central mass: mu is exactly the occupation
  measure of a simple-random-walk word, so the ball hypothesis holds with
  distance zero and R floats with the realized range of the walk.
* ``boundary_instance`` -- genuine mass at +-oo: a transient walk's deep
  letters (|k| >= depth) are reassigned to the ideal points, which costs at
  most ~2^-depth in Kantorovich distance; instances are redrawn until that
  cost sits strictly inside the 2^-R eps ball.
* ``typical_instance`` -- a target measure built around the occupation of a
  positive-recurrent ("confined") walk, together with sampled components for
  the typical-trajectory assembly.
"""

import math

from .measures import (
    MINUS_INF,
    PLUS_INF,
    MeasureZbar,
    decompose,
    empirical_measure,
    kr_distance,
    r_mu0,
)
from .state_space import TransitionProfile, r_zbar
from .trajectories import (
    _ceil_int,
    sample_typical_components,
    typical_times,
)


def walk(profile, n, rng, start=0):
    w = [start]
    for _ in range(n - 1):
        x = w[-1]
        w.append(x + 1 if rng.random() < profile.p(x) else x - 1)
    return tuple(w)


def push_deep(word, depth):
    """Occupation measure of the word with sites |k| >= depth sent to +-oo."""
    atoms = dict(empirical_measure(word).atoms)
    out = {}
    for k, v in atoms.items():
        if k >= depth:
            out[PLUS_INF] = out.get(PLUS_INF, 0.0) + v
        elif k <= -depth:
            out[MINUS_INF] = out.get(MINUS_INF, 0.0) + v
        else:
            out[k] = out.get(k, 0.0) + v
    return MeasureZbar(out)


def central_instance(rng, n=700):
    """(profile, word, mu, eps, R) with mu = ell(word) exactly (alpha_0 = 1)."""
    profile = TransitionProfile.homogeneous(0.4 + 0.2 * rng.random())
    w = walk(profile, n, rng)
    mu = empirical_measure(w)
    eps = 0.018 + 0.006 * rng.random()
    d = decompose(mu)
    R = max(r_mu0(d.mu_zero, eps), r_zbar(eps)) + 1
    return profile, w, mu, eps, R


def boundary_instance(rng, n=700, depth=60, max_tries=80):
    """(profile, word, mu, eps, R) with boundary mass; in-ball guaranteed.

    The walk drifts outward on both tails, so it escapes to one of the ideal
    points; redraw until the central fraction is comfortable and the cost of
    idealizing the deep letters clears the ball radius.
    """
    profile = TransitionProfile.two_sided(0.3, 0.7)
    eps = 0.02
    for _ in range(max_tries):
        w = walk(profile, n, rng)
        mu = push_deep(w, depth)
        d = decompose(mu)
        pos = [a for a in (d.alpha_minus, d.alpha_zero, d.alpha_plus) if a > 0]
        if d.alpha_minus + d.alpha_plus == 0 or d.alpha_zero < 0.08:
            continue
        if eps >= 0.5 * min(pos):
            continue
        R = max(r_mu0(d.mu_zero, eps), r_zbar(eps)) + 1
        if kr_distance(empirical_measure(w), mu) < 2.0 ** (-R) * eps:
            return profile, w, mu, eps, R
    raise RuntimeError("no admissible boundary instance in %d tries" % max_tries)


CONFINED = TransitionProfile(-1, 1, {-1: 0.8, 0: 0.5, 1: 0.2},
                             tail_minus=0.8, tail_plus=0.2)


def typical_instance(rng, n=1600, eps=0.05):
    """(profile, mu, eps, R, n, sigma, components) for the typical assembly.

    mu_0 is the exact occupation law of the sampled central component, so the
    in-ball requirement on the central piece holds with distance zero.
    """
    alpha0 = 0.45 + 0.15 * rng.random()
    alpham = 0.18 + 0.07 * rng.random()
    alphap = 1.0 - alpha0 - alpham
    assert min(alpha0, alpham, alphap) > 3.0 * eps
    t0 = max(2 * _ceil_int((alpha0 - 3.0 * eps) * n / 2.0) + 1, 1)
    z = walk(CONFINED, t0, rng)
    mu0 = dict(empirical_measure(z).atoms)
    atoms = {k: alpha0 * v for k, v in mu0.items()}
    atoms[MINUS_INF] = alpham
    atoms[PLUS_INF] = alphap
    total = math.fsum(atoms.values())
    atoms = {k: v / total for k, v in atoms.items()}
    mu = MeasureZbar(atoms)
    R = max(r_mu0(dict(decompose(mu).mu_zero), eps), r_zbar(eps)) + 1
    assert n > (4 * R + 9) / eps, "confined walk range blew up; enlarge n"
    sigma = 1 if rng.random() < 0.5 else -1
    assert typical_times(mu, eps, n)[0] == len(z)
    comps = sample_typical_components(sigma, mu, eps, R, n, rng, central=z)
    return CONFINED, mu, eps, R, n, sigma, comps
