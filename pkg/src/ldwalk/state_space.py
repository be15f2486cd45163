"""State space for nearest-neighbour walks on the two-point compactification of Z.

The compactified line Zbar = Z u {-oo, +oo} is metrized through the embedding

    phi(+oo) = 1,   phi(-oo) = -1,
    phi(k)   = 1 - 2^(-k)        for k >= 0,
    phi(k)   = -1 + 2^(-|k|)     for k < 0,

with d(h, k) = |phi(h) - phi(k)|.  Under d the sets {k : k >= R} shrink into
+oo geometrically in R, which is what makes empirical measures of walks with
escaping mass converge in this topology.

Finite points are plain ints; the ideal points are ``PLUS_INF`` and
``MINUS_INF`` (float infinities, hashable, usable as dict keys alongside ints).

A walk is described by a :class:`TransitionProfile`: an explicit table of
up-probabilities p(k) on a finite window and two constants taking over beyond
it.  Both one-sided limits p(+-oo) therefore exist, and every p(k) lies in
(0, 1), which is the standing assumption throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

PLUS_INF = math.inf
MINUS_INF = -math.inf

# Exponents below -1074 underflow even in subnormal range; clamping keeps
# phi exact (the difference is below resolvable float spacing anyway).
_EXP_CLAMP = 1074


def is_finite_point(k) -> bool:
    """True for the integer points of Zbar, False for the two ideal points."""
    return not (k == PLUS_INF or k == MINUS_INF)


def varphi(k) -> float:
    """Embedding of Zbar into [-1, 1]; strictly increasing in the natural order."""
    if k == PLUS_INF:
        return 1.0
    if k == MINUS_INF:
        return -1.0
    j = int(k)
    m = min(abs(j), _EXP_CLAMP)
    if j >= 0:
        return 1.0 - 2.0 ** (-m)
    return -1.0 + 2.0 ** (-m)


def dist(h, k) -> float:
    """Metric on Zbar: d(h, k) = |phi(h) - phi(k)|.  Diameter is 2."""
    return abs(varphi(h) - varphi(k))


def r_zbar(eps: float) -> int:
    """Smallest R >= 1 such that every k with sigma*k >= R is eps-close to sigma*oo.

    For k >= R, d(k, +oo) = 2^(-k) <= 2^(-R) < eps exactly when
    R > log2(1/eps); the symmetric statement holds at -oo.
    """
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    return max(1, math.ceil(math.log2(1.0 / eps)) + 1)


@dataclass(frozen=True)
class TransitionProfile:
    """Up-step probabilities p(k) for a spatially inhomogeneous walk on Z.

    ``table`` covers the window [window_lo, window_hi] (which must contain 0);
    outside the window p(k) equals ``tail_minus`` (k < window_lo) or
    ``tail_plus`` (k > window_hi).  All probabilities must lie strictly
    inside (0, 1).
    """

    window_lo: int
    window_hi: int
    table: dict = field(repr=False)
    tail_minus: float = 0.5
    tail_plus: float = 0.5

    def __post_init__(self):
        if not (self.window_lo <= 0 <= self.window_hi):
            raise ValueError("window must contain 0")
        expected = set(range(self.window_lo, self.window_hi + 1))
        if set(self.table) != expected:
            raise ValueError("table keys must cover the window exactly")
        for v in list(self.table.values()) + [self.tail_minus, self.tail_plus]:
            if not (0.0 < float(v) < 1.0):
                raise ValueError("probabilities must lie in (0, 1)")

    @classmethod
    def homogeneous(cls, p: float) -> "TransitionProfile":
        return cls(0, 0, {0: p}, tail_minus=p, tail_plus=p)

    @classmethod
    def two_sided(cls, p_minus: float, p_plus: float) -> "TransitionProfile":
        """p(k) = p_plus for k >= 0 and p_minus for k < 0."""
        return cls(0, 0, {0: p_plus}, tail_minus=p_minus, tail_plus=p_plus)

    def p(self, k: int) -> float:
        k = int(k)
        if k < self.window_lo:
            return self.tail_minus
        if k > self.window_hi:
            return self.tail_plus
        return float(self.table[k])

    def limit(self, sigma: int) -> float:
        """One-sided limit p(sigma * oo)."""
        if sigma not in (-1, 1):
            raise ValueError("sigma must be -1 or +1")
        return self.tail_plus if sigma == 1 else self.tail_minus


def step_prob(profile: TransitionProfile, k, step: int) -> float:
    """Probability of the move k -> k + step; step must be +-1, k finite."""
    if not is_finite_point(k):
        raise ValueError("steps are only defined at finite points")
    if step == 1:
        return profile.p(k)
    if step == -1:
        return 1.0 - profile.p(k)
    raise ValueError("step must be -1 or +1")


def p_star(profile: TransitionProfile) -> float:
    """inf_k min{p(k), 1 - p(k)} > 0; the worst-case one-step probability."""
    vals = list(profile.table.values()) + [profile.tail_minus, profile.tail_plus]
    return min(min(p, 1.0 - p) for p in vals)


def _one_sided_gap(profile: TransitionProfile, sigma: int, R: int) -> float:
    """sup over sigma*k >= R of |p(k) - p(sigma*oo)|, scaled by 1/min{p_lim, 1-p_lim}."""
    lim = profile.limit(sigma)
    if sigma == 1:
        ks = range(max(R, profile.window_lo), profile.window_hi + 1)
    else:
        ks = range(profile.window_lo, min(-R, profile.window_hi) + 1)
    sup = 0.0
    for k in ks:
        sup = max(sup, abs(profile.p(k) - lim))
    return sup / min(lim, 1.0 - lim)


def tail_gap(profile: TransitionProfile, eps: float) -> float:
    """Relative deviation of p from its limits outside the eps-neighbourhoods of +-oo.

    G(eps) = max over sigma of (1/min{p_sigma, 1-p_sigma}) *
             sup_{sigma k >= r_zbar(eps)} |p(k) - p_sigma|.

    Constant tails beyond the window mean the sup runs over finitely many k.
    """
    R = r_zbar(eps)
    return max(_one_sided_gap(profile, 1, R), _one_sided_gap(profile, -1, R))


def _gap_at_radius(profile: TransitionProfile, R: int) -> float:
    return max(_one_sided_gap(profile, 1, R), _one_sided_gap(profile, -1, R))


def epsilon_star(profile: TransitionProfile) -> float:
    """Largest epsilon below which tail_gap stays < 1 (comparison arguments valid).

    Scanning radii upward, let R* be the smallest R with the gap at R below 1;
    the sup of {eps > 0 : tail_gap(profile, eps) < 1} is then 2^(2 - R*).
    Returns inf when even R = 1 works, i.e. no constraint on eps at all.
    """
    R = 1
    while _gap_at_radius(profile, R) >= 1.0:
        R += 1
        # beyond the window the deviation is 0, so this always terminates
        if R > max(profile.window_hi, -profile.window_lo) + 1:
            break
    if R == 1:
        return math.inf
    return 2.0 ** (2 - R)


def comparison_slack(profile: TransitionProfile, eps: float) -> float:
    """Per-step log cost g(eps) of swapping p(k) for its limit near +-oo.

    g(eps) = max{|log(1 - G)|, log(1 + G)} with G = tail_gap(profile, eps).
    Only defined while G < 1.
    """
    G = tail_gap(profile, eps)
    if G >= 1.0:
        raise ValueError(
            "tail gap is %.3g >= 1 at eps=%.3g; shrink eps below epsilon_star" % (G, eps)
        )
    return max(abs(math.log1p(-G)), math.log1p(G))
