"""Exact probabilities by dynamic programming and enumeration.

Height DPs for excursions/meanders confined to a half-line region, the exact
endpoint law, full-path enumeration of empirical-measure balls (small n), a
(time, position, count) DP for block-observable averages, and slope
extraction from log-probability series.

Positions never need truncation: after n letters the walk lies within n - 1
of its start, so every DP indexes exactly the reachable window.  Once the
probability vector drops below 1e-280 it is rescaled by a power of two and
the log offset carried separately; results are exact up to float rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import MeasureZbar, decompose, r_mu0
from .state_space import (
    MINUS_INF,
    PLUS_INF,
    TransitionProfile,
    p_star,
    r_zbar,
    varphi,
)
from .trajectories import region

BALL_ENUM_CAP = 24          # 2^(n-1) paths enumerated
OBSERVABLE_DP_CAP = 400     # O(n^3) states in the (time, position, count) DP

_RESCALE_FLOOR = 1e-280
_RESCALE_SHIFT = 2.0 ** 960
_RESCALE_LOG = 960.0 * math.log(2.0)


def _away_probs(profile: TransitionProfile, sigma: int, R: int, H: int) -> np.ndarray:
    """P(step deeper into A^sigma) as a function of height j (position sigma(R+j))."""
    if sigma == 1:
        return np.array([profile.p(R + j) for j in range(H)])
    return np.array([1.0 - profile.p(-R - j) for j in range(H)])


def _check_excursion_args(R: int, sigma: int, n: int) -> None:
    if R < 1:
        raise ValueError("R must be >= 1")
    if sigma not in (-1, 1):
        raise ValueError("sigma must be -1 or +1")
    if n < 1:
        raise ValueError("n must be >= 1")


def excursion_log_prob(profile: TransitionProfile, R: int, sigma: int, n: int) -> float:
    """log P_{sigma R}(w_1 = w_n = sigma R, all letters in A^sigma); -inf for even n."""
    _check_excursion_args(R, sigma, n)
    if n == 1:
        return 0.0
    if n % 2 == 0:
        return -math.inf
    H = (n - 1) // 2 + 1  # max height reachable with a return
    away = _away_probs(profile, sigma, R, H)
    toward = 1.0 - away
    f = np.zeros(H)
    f[0] = 1.0
    off = 0.0
    for _ in range(n - 1):
        new = np.zeros(H)
        new[1:] = f[:-1] * away[:-1]
        new[:-1] += f[1:] * toward[1:]
        f = new
        m = f.max()
        if 0.0 < m < _RESCALE_FLOOR:
            f *= _RESCALE_SHIFT
            off -= _RESCALE_LOG
    if f[0] == 0.0:
        return -math.inf
    return math.log(f[0]) + off


def excursion_prob(profile: TransitionProfile, R: int, sigma: int, n: int) -> float:
    lp = excursion_log_prob(profile, R, sigma, n)
    return 0.0 if lp == -math.inf else math.exp(lp)


def meander_log_prob(profile: TransitionProfile, R: int, sigma: int, n: int) -> float:
    """log P_{sigma R}(all letters in A^sigma), any final height."""
    _check_excursion_args(R, sigma, n)
    if n == 1:
        return 0.0
    H = n  # heights 0 .. n-1
    away = _away_probs(profile, sigma, R, H)
    toward = 1.0 - away
    f = np.zeros(H)
    f[0] = 1.0
    off = 0.0
    for _ in range(n - 1):
        new = np.zeros(H)
        new[1:] = f[:-1] * away[:-1]
        new[:-1] += f[1:] * toward[1:]
        f = new
        m = f.max()
        if 0.0 < m < _RESCALE_FLOOR:
            f *= _RESCALE_SHIFT
            off -= _RESCALE_LOG
    s = f.sum()
    if s == 0.0:
        return -math.inf
    return math.log(s) + off


def meander_prob(profile: TransitionProfile, R: int, sigma: int, n: int) -> float:
    lp = meander_log_prob(profile, R, sigma, n)
    return 0.0 if lp == -math.inf else math.exp(lp)


def endpoint_distribution(profile: TransitionProfile, start: int, n: int) -> dict:
    """Exact law of the n-th letter of the walk started at ``start``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return {int(start): 1.0}
    lo = start - (n - 1)
    size = 2 * (n - 1) + 1
    p_tab = np.array([profile.p(lo + i) for i in range(size)])
    g = np.zeros(size)
    g[n - 1] = 1.0  # index of `start`
    for _ in range(n - 1):
        new = np.zeros(size)
        new[1:] = g[:-1] * p_tab[:-1]
        new[:-1] += g[1:] * (1.0 - p_tab[1:])
        g = new
    out = {lo + i: float(g[i]) for i in range(size) if g[i] > 0.0}
    assert abs(math.fsum(out.values()) - 1.0) < 1e-12
    return out


# ------------------------------------------------------------ ball enumeration


def _grid_for(mu: MeasureZbar, start: int, n: int):
    """phi-ordered support grid covering every reachable site and every atom
    of mu; returns (finite site list, phi array, mu vector, index lookup)."""
    sites = set(range(start - (n - 1), start + n))
    has_minus = has_plus = False
    for k, v in mu.atoms.items():
        if k == MINUS_INF:
            has_minus = True
        elif k == PLUS_INF:
            has_plus = True
        else:
            sites.add(int(k))
    finite = sorted(sites)
    grid: list = ([MINUS_INF] if has_minus else []) + finite + \
        ([PLUS_INF] if has_plus else [])
    phi = np.array([varphi(k) for k in grid])
    mu_vec = np.zeros(len(grid))
    pos_of = {k: i for i, k in enumerate(grid)}
    for k, v in mu.atoms.items():
        mu_vec[pos_of[k if k in (MINUS_INF, PLUS_INF) else int(k)]] = v
    lo = finite[0]
    lookup = np.full(finite[-1] - lo + 1, -1, dtype=np.int64)
    for k in finite:
        lookup[k - lo] = pos_of[k]
    return grid, phi, mu_vec, lo, lookup


def _ball_prob(profile, mu, epsilon, n, start, class_filter, R):
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > BALL_ENUM_CAP:
        raise ValueError("n=%d beyond the enumeration cap %d" % (n, BALL_ENUM_CAP))
    if class_filter is not None and R is None:
        d = decompose(mu)
        R = max(r_mu0(dict(d.mu_zero), epsilon), r_zbar(epsilon)) + 1
    grid, phi, mu_vec, lo, lookup = _grid_for(mu, start, n)
    gaps = np.diff(phi)
    G = len(grid)
    p_lo = start - n
    p_tab = np.array([profile.p(k) for k in range(p_lo, start + n + 1)])

    n_steps = n - 1
    total_words = 1 << n_steps
    chunk = min(total_words, 1 << 16)
    total = 0.0
    jbits = np.arange(n_steps, dtype=np.int64)
    for base in range(0, total_words, chunk):
        idx = np.arange(base, min(base + chunk, total_words), dtype=np.int64)
        B = idx.size
        steps = ((idx[:, None] >> jbits) & 1) * 2 - 1
        pos = np.empty((B, n), dtype=np.int64)
        pos[:, 0] = start
        pos[:, 1:] = start + np.cumsum(steps, axis=1)
        # step probabilities use the site before each step
        pvals = p_tab[pos[:, :-1] - p_lo]
        factors = np.where(steps == 1, pvals, 1.0 - pvals)
        probs = factors.prod(axis=1) if n_steps else np.ones(B)
        # occupation counts on the grid
        gidx = lookup[pos - lo]
        counts = np.bincount(
            (np.arange(B, dtype=np.int64)[:, None] * G + gidx).ravel(),
            minlength=B * G,
        ).reshape(B, G)
        diff = counts / float(n) - mu_vec
        cums = np.cumsum(diff, axis=1)
        dist = np.abs(cums[:, :-1]) @ gaps
        mask = dist < epsilon
        if class_filter is not None:
            final = pos[:, -1].astype(np.int64)
            if class_filter == 1:
                mask &= final >= R
            elif class_filter == -1:
                mask &= final <= -R
            else:
                mask &= (final > -R) & (final < R)
        total += probs[mask].sum()
    return float(total)


def ball_prob_enum(profile, mu: MeasureZbar, epsilon: float, n: int,
                   class_filter=None, R=None) -> float:
    """Exact P_0(ell_n in B(mu, epsilon)) by enumerating all 2^(n-1) paths,
    optionally intersected with the class {w_n in A^sigma}.

    The class radius R defaults to max(R_mu0(eps), R_Zbar(eps)) + 1, the
    smallest admissible choice under the standing conventions.
    """
    if class_filter not in (None, -1, 0, 1):
        raise ValueError("class_filter must be one of None, -1, 0, +1")
    return _ball_prob(profile, mu, epsilon, n, 0, class_filter, R)


def starting_point_comparison(profile, mu: MeasureZbar, epsilon: float,
                              n: int, m: int):
    """(P_m(ell_n in ball eps), p_*^|m| P_0(ell_{n-|m|} in ball eps/2)).

    A straight run from m to 0 costs at least p_*^|m| and displaces at most
    |m| letters, which moves the empirical measure by less than eps/2 as soon
    as n > 4|m|/eps; under that condition the first quantity dominates the
    second, and this is asserted.
    """
    m = int(m)
    if m != 0 and not n > 4 * abs(m) / epsilon:
        raise ValueError("need n > 4|m|/eps for the displacement argument")
    lhs = _ball_prob(profile, mu, epsilon, n, m, None, None)
    rhs = p_star(profile) ** abs(m) * _ball_prob(
        profile, mu, epsilon / 2.0, n - abs(m), 0, None, None
    )
    assert lhs >= rhs - 1e-15, (lhs, rhs)
    return lhs, rhs


# -------------------------------------------------------- block observables


@dataclass(frozen=True)
class BlockObservable:
    """Indicator of a union of integer intervals [c, d] (inclusive)."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple((int(c), int(d)) for c, d in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        prev_d = None
        for c, d in blocks:
            if c > d:
                raise ValueError("block (%d, %d) is empty" % (c, d))
            if prev_d is not None and c <= prev_d:
                raise ValueError("blocks overlap or are out of order")
            prev_d = d

    def value(self, x: int) -> int:
        for c, d in self.blocks:
            if c <= x <= d:
                return 1
        return 0

    def values(self, xs: np.ndarray) -> np.ndarray:
        out = np.zeros(xs.shape, dtype=bool)
        for c, d in self.blocks:
            out |= (xs >= c) & (xs <= d)
        return out.astype(np.int64)


_INT64_MAX = 2 ** 63 - 1


def counterexample_blocks(m: int) -> list:
    """First m intervals of the oscillating observable: c_1 = 1,
    d_k = (k+1) c_k, c_{k+1} = d_k^2.  The squaring escapes 64-bit integers
    at the sixth block, which is reported rather than silently widened."""
    if m < 1:
        raise ValueError("m must be >= 1")
    out = []
    c = 1
    for k in range(1, m + 1):
        d = (k + 1) * c
        if c > _INT64_MAX or d > _INT64_MAX:
            raise OverflowError(
                "block %d exceeds 64-bit integers (c=%d)" % (k, c)
            )
        out.append((c, d))
        c = d * d
    return out


def observable_ball_log_prob(profile, f: BlockObservable, target: float,
                             epsilon: float, n: int) -> float:
    """log P_0(|ell_n(f) - target| < epsilon) by DP over
    (time, position, number of letters with f = 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > OBSERVABLE_DP_CAP:
        raise ValueError("n=%d beyond the DP cap %d" % (n, OBSERVABLE_DP_CAP))
    span = n - 1
    size = 2 * span + 1  # positions -(n-1) .. n-1, index = pos + span
    posv = np.arange(-span, span + 1)
    p_tab = np.array([profile.p(int(x)) for x in posv])
    fv = f.values(posv)  # 0/1 per position
    P = np.zeros((size, n + 1))
    P[span, f.value(0)] = 1.0
    off = 0.0
    up_rows = np.where(fv == 1)[0]
    dn_rows = up_rows  # same criterion: count increments on arrival at f=1 site
    for _ in range(n - 1):
        new = np.zeros_like(P)
        up = P * p_tab[:, None]
        dn = P * (1.0 - p_tab)[:, None]
        # arrive at row r from r-1 (up) or r+1 (down); shift count if f(r)=1
        new[1:, :] += np.where(fv[1:, None] == 0, up[:-1, :], 0.0)
        new[:-1, :] += np.where(fv[:-1, None] == 0, dn[1:, :], 0.0)
        rows = up_rows[up_rows >= 1]
        new[rows, 1:] += up[rows - 1, :-1]
        rows = dn_rows[dn_rows <= size - 2]
        new[rows, 1:] += dn[rows + 1, :-1]
        P = new
        m = P.max()
        if 0.0 < m < _RESCALE_FLOOR:
            P *= _RESCALE_SHIFT
            off -= _RESCALE_LOG
    counts = np.arange(n + 1)
    sel = np.abs(counts / float(n) - target) < epsilon
    s = P[:, sel].sum()
    if s == 0.0:
        return -math.inf
    return math.log(s) + off


def observable_ball_prob(profile, f: BlockObservable, target: float,
                         epsilon: float, n: int) -> float:
    lp = observable_ball_log_prob(profile, f, target, epsilon, n)
    return 0.0 if lp == -math.inf else math.exp(lp)


# ------------------------------------------------------------ slope extraction


@dataclass(frozen=True)
class DecayReport:
    """(n, log_prob) series with the extracted exponential slope."""

    points: tuple
    slope: float
    method: str
    residual: float
    slope_std_err: float | None = None
    unreliable: bool = False

    def __post_init__(self):
        pts = tuple((int(n), float(lp)) for n, lp in self.points)
        object.__setattr__(self, "points", pts)
        if self.method not in ("last_difference", "richardson"):
            raise ValueError("unknown method %r" % (self.method,))
        for (n1, lp1), (n2, lp2) in zip(pts, pts[1:]):
            if n2 <= n1:
                raise ValueError("n must be strictly increasing")
        for _, lp in pts:
            if lp > 1e-12:
                raise ValueError("log-probabilities must be <= 0")


def rate_slope(points, parity_step: int, method: str = "last_difference") -> DecayReport:
    """Exponential decay slope of a log-probability series.

    Consecutive differences cancel polynomial prefactors up to O(step/n^2);
    the ``richardson`` variant additionally removes the local-CLT correction
    by adding (3/2) * (log n_k - log n_{k-1}) / step to the last difference.
    The residual is the change between the last two consecutive-difference
    slopes (zero for an exactly geometric series).
    """
    pts = sorted((int(n), float(lp)) for n, lp in points)
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    if parity_step < 1:
        raise ValueError("parity_step must be >= 1")
    for (n1, _), (n2, _) in zip(pts, pts[1:]):
        if (n2 - n1) % parity_step != 0:
            raise ValueError("spacing %d breaks the parity step %d"
                             % (n2 - n1, parity_step))
    (na, la), (nb, lb), (nc, lc) = pts[-3], pts[-2], pts[-1]
    slope = (lc - lb) / (nc - nb)
    prev = (lb - la) / (nb - na)
    residual = abs(slope - prev)
    if method == "richardson":
        slope += 1.5 * (math.log(nc) - math.log(nb)) / (nc - nb)
        prev += 1.5 * (math.log(nb) - math.log(na)) / (nb - na)
        residual = abs(slope - prev)
    return DecayReport(points=tuple(pts), slope=slope, method=method,
                       residual=residual)
