"""Word-level constructions: typical trajectories and the cut-and-stitch map.

A word is a tuple of adjacent integers (|w_{j+1} - w_j| = 1) read as the
successive positions of the walk; the first letter is the starting point and
carries no probability factor.  At radius R the line splits into

    A^-  = (-oo, -R],    A^0 = [-R+1, R-1],    A^+ = [R, +oo),

and the constructions below operate on the letters of a word relative to
these regions:

* ``build_typical`` assembles a word of prescribed empirical behaviour out of
  a central piece, an excursion on the far side, a meander on the near side
  and deterministic connectors -- the lower-bound surgery.
* ``cut_sequence``/``stitch`` decompose an arbitrary word into its maximal
  single-region subwords and re-join, per region, those subwords into one
  self-contained word of pinned length -- the upper-bound surgery.  The cut
  record plus the three stitched words determine the original word exactly
  (``reconstruct``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .measures import MeasureZbar, decompose, empirical_measure, in_ball, r_mu0
from .state_space import TransitionProfile, r_zbar

Word = tuple


def validate_word(word) -> tuple:
    w = tuple(int(x) for x in word)
    if not w:
        raise ValueError("empty word")
    for a, b in zip(w, w[1:]):
        if abs(b - a) != 1:
            raise ValueError("letters %d -> %d are not adjacent" % (a, b))
    return w


def region(k: int, R: int) -> int:
    if k >= R:
        return 1
    if k <= -R:
        return -1
    return 0


def path_prob(profile: TransitionProfile, word) -> float:
    return math.exp(path_log_prob(profile, word))


def path_log_prob(profile: TransitionProfile, word) -> float:
    """log probability of the n-1 steps of the word (the start is free)."""
    w = validate_word(word)
    total = 0.0
    for a, b in zip(w, w[1:]):
        p = profile.p(a)
        total += math.log(p) if b > a else math.log1p(-p)
    return total


def up_down_counts(word) -> tuple:
    w = validate_word(word)
    ups = sum(1 for a, b in zip(w, w[1:]) if b > a)
    return ups, len(w) - 1 - ups


def _ceil_int(x: float) -> int:
    # ceil with protection against float grit just below an integer
    r = round(x)
    if abs(x - r) < 1e-9:
        return int(r)
    return int(math.ceil(x))


# ----------------------------------------------------------- connectors


def connector_xi(sigma: int, k: int, R: int) -> tuple:
    """Shortest monotone run from (but excluding) k to the letter adjacent
    to sigma*R on the central side or the far side, whichever k is on.

    Empty exactly when k is already adjacent to sigma*R; for k = sigma*R
    itself the connector is the single letter sigma*(R-1).
    """
    if sigma not in (-1, 1):
        raise ValueError("sigma must be -1 or +1")
    if R < 1:
        raise ValueError("R must be >= 1")
    m = sigma * k
    if m == R:
        return (sigma * (R - 1),)
    if m < R:
        return tuple(sigma * j for j in range(m + 1, R))
    return tuple(sigma * j for j in range(m - 1, R, -1))


def connector_chi(sigma: int, R: int) -> tuple:
    """Full crossing of the central region: -sigma(R-1), ..., 0, ..., sigma(R-1)."""
    return connector_xi(sigma, -sigma * R, R)


# ----------------------------------------------------- membership checks


def is_excursion_word(word, sigma: int, R: int) -> bool:
    w = validate_word(word)
    return (
        w[0] == sigma * R
        and w[-1] == sigma * R
        and all(region(x, R) == sigma for x in w)
    )


def is_meander_word(word, sigma: int, R: int) -> bool:
    w = validate_word(word)
    return w[0] == sigma * R and all(region(x, R) == sigma for x in w)


# ------------------------------------------------------ typical trajectories


def typical_times(mu: MeasureZbar, eps: float, n: int) -> dict:
    """Component lengths t^sigma = max(2 ceil((alpha_sigma - 3 eps) n / 2) + 1, 1).

    Odd by construction; collapses to 1 as soon as alpha_sigma <= 3 eps.
    """
    d = decompose(mu)
    alphas = {-1: d.alpha_minus, 0: d.alpha_zero, 1: d.alpha_plus}
    return {
        s: max(2 * _ceil_int((alphas[s] - 3.0 * eps) * n / 2.0) + 1, 1)
        for s in (-1, 0, 1)
    }


def check_typical_assumptions(mu: MeasureZbar, eps: float, R: int, n: int) -> None:
    if not 0 < eps < 1.0 / 9.0:
        raise ValueError("need 0 < eps < 1/9")
    d = decompose(mu)
    R_floor = max(r_mu0(d.mu_zero, eps), r_zbar(eps))
    if R <= R_floor:
        raise ValueError("R=%d too small: need R > %d" % (R, R_floor))
    if n <= (4 * R + 9) / eps:
        raise ValueError("n=%d too small: need n > %.1f" % (n, (4 * R + 9) / eps))


def build_typical(
    sigma: int,
    v_central,
    v_excursion,
    v_meander,
    mu: MeasureZbar,
    eps: float,
    R: int,
    n: int,
    mode: str = "strict",
) -> tuple:
    """Assemble the typical word

        v_c . xi^{-sigma}(last of v_c) . v_exc . chi^sigma . v_mea . staircase

    landing in the final-letter class of side sigma.  The staircase pads the
    word to length n walking outward inside A^sigma; its positivity is a
    consequence of n > (4R + 9)/eps.

    ``mode='strict'`` verifies the standing assumptions and that each
    component lies in its defining set; ``mode='permissive'`` checks only
    structural integrity (adjacency and lengths adding up), which the
    combinatorial tests use to probe the map on bare components.
    """
    if sigma not in (-1, 1):
        raise ValueError("sigma must be -1 or +1")
    if mode not in ("strict", "permissive"):
        raise ValueError("mode must be 'strict' or 'permissive'")
    v_c = validate_word(v_central)
    v_exc = validate_word(v_excursion)
    v_mea = validate_word(v_meander)
    d = decompose(mu)

    if mode == "strict":
        check_typical_assumptions(mu, eps, R, n)
        times = typical_times(mu, eps, n)
        if v_c[0] != 0:
            raise ValueError("central component must start at 0")
        if len(v_c) != times[0]:
            raise ValueError("central component has length %d, expected %d"
                             % (len(v_c), times[0]))
        if d.alpha_zero > 3.0 * eps:
            ball_radius = 2.0 ** (-R) * eps
            if not in_ball(empirical_measure(v_c), MeasureZbar(d.mu_zero), ball_radius):
                raise ValueError("central component leaves the prescribed ball")
        elif v_c != (0,):
            raise ValueError("alpha_0 <= 3 eps forces the trivial central component")
        if len(v_exc) != times[-sigma]:
            raise ValueError("excursion component has length %d, expected %d"
                             % (len(v_exc), times[-sigma]))
        if not is_excursion_word(v_exc, -sigma, R):
            raise ValueError("far-side component is not an excursion word")
        if len(v_mea) != times[sigma]:
            raise ValueError("meander component has length %d, expected %d"
                             % (len(v_mea), times[sigma]))
        if not is_meander_word(v_mea, sigma, R):
            raise ValueError("near-side component is not a meander word")

    xi = connector_xi(-sigma, v_c[-1], R)
    chi = connector_chi(sigma, R)
    used = len(v_c) + len(xi) + len(v_exc) + len(chi) + len(v_mea)
    h = n - used
    if h < 1:
        raise ValueError(
            "components occupy %d letters of %d; no room for the staircase" % (used, n)
        )
    stair = tuple(v_mea[-1] + sigma * j for j in range(1, h + 1))
    word = v_c + xi + v_exc + chi + v_mea + stair
    word = validate_word(word)  # adjacency across all junctions
    assert len(word) == n
    return word


def _apportion(mu_zero: dict, t: int) -> dict:
    """Integer visit targets summing to t, proportional to mu_zero (largest
    remainder rule)."""
    floors = {}
    rema = []
    for k, w in mu_zero.items():
        q = w * t
        floors[k] = int(q)
        rema.append((q - int(q), k))
    short = t - sum(floors.values())
    for _, k in sorted(rema, reverse=True)[:short]:
        floors[k] += 1
    return {k: c for k, c in floors.items() if c > 0}


def _quota_central_path(mu_zero: dict, t: int, rng) -> tuple:
    """Nearest-neighbour path from 0 steering toward prescribed visit counts."""
    targets = _apportion(mu_zero, t)
    visits = {0: 1}
    out = [0]
    x = 0
    for _ in range(t - 1):
        du = max(targets.get(x + 1, 0) - visits.get(x + 1, 0), 0)
        dd = max(targets.get(x - 1, 0) - visits.get(x - 1, 0), 0)
        wu = du + 0.05
        wd = dd + 0.05
        x = x + 1 if rng.random() < wu / (wu + wd) else x - 1
        visits[x] = visits.get(x, 0) + 1
        out.append(x)
    return tuple(out)


def _uniform_excursion_heights(m: int, rng) -> list:
    """Uniform nonnegative bridge of 2m steps (0 -> 0, heights >= 0), by the
    cycle construction: shuffle m up-steps and m+1 down-steps, rotate to just
    after the first prefix minimum, drop the final down-step."""
    if m == 0:
        return [0]
    steps = [1] * m + [-1] * (m + 1)
    rng.shuffle(steps)
    prefix = 0
    min_val = 1
    min_pos = -1
    for i, s in enumerate(steps):
        prefix += s
        if prefix < min_val:
            min_val = prefix
            min_pos = i
    rot = steps[min_pos + 1:] + steps[: min_pos + 1]
    heights = [0]
    for s in rot[:-1]:
        heights.append(heights[-1] + s)
    assert min(heights) >= 0 and heights[-1] == 0
    return heights


def sample_typical_components(
    sigma: int,
    mu: MeasureZbar,
    eps: float,
    R: int,
    n: int,
    rng,
    central=None,
    budget: int = 100000,
):
    """Draw (v_central, v_excursion, v_meander) from their defining sets.

    The central piece is rejection-sampled from quota-guided paths until its
    empirical measure lands in the 2^-R eps ball around mu_0 (pass ``central``
    to supply one directly); the far-side excursion is a uniform nonnegative
    bridge mirrored to level -sigma R; the near-side meander is a reflected
    walk at level sigma R.  Memberships are verified before returning.
    """
    if sigma not in (-1, 1):
        raise ValueError("sigma must be -1 or +1")
    d = decompose(mu)
    times = typical_times(mu, eps, n)

    if d.alpha_zero <= 3.0 * eps:
        v_c = (0,)
    elif central is not None:
        v_c = validate_word(central)
        if len(v_c) != times[0] or v_c[0] != 0:
            raise ValueError("supplied central path has the wrong frame")
        if not in_ball(empirical_measure(v_c), MeasureZbar(d.mu_zero),
                       2.0 ** (-R) * eps):
            raise ValueError("supplied central path misses the ball")
    else:
        mu0 = MeasureZbar(d.mu_zero)
        radius = 2.0 ** (-R) * eps
        v_c = None
        for _ in range(budget):
            cand = _quota_central_path(d.mu_zero, times[0], rng)
            if in_ball(empirical_measure(cand), mu0, radius):
                v_c = cand
                break
        if v_c is None:
            raise RuntimeError(
                "rejection budget (%d) exhausted sampling the central path" % budget
            )

    t_exc = times[-sigma]
    heights = _uniform_excursion_heights((t_exc - 1) // 2, rng)
    v_exc = tuple(-sigma * (R + h) for h in heights)
    assert is_excursion_word(v_exc, -sigma, R)

    t_mea = times[sigma]
    g = 0
    mea = [sigma * R]
    for _ in range(t_mea - 1):
        g = abs(g + (1 if rng.random() < 0.5 else -1))
        mea.append(sigma * (R + g))
    v_mea = tuple(mea)
    assert is_meander_word(v_mea, sigma, R)
    return v_c, v_exc, v_mea


# --------------------------------------------------------- cut and stitch


@dataclass(frozen=True)
class CutSequence:
    """Record of the region-exit times of a word: t_1 = 1 and t_{i+1} is the
    first time after t_i at which the walk leaves the region it occupied at
    t_i.  ``times`` are 1-based; ``sigmas`` the region labels per cut."""

    n: int
    R: int
    times: tuple
    sigmas: tuple

    def index_set(self, sigma: int) -> list:
        return [i + 1 for i, s in enumerate(self.sigmas) if s == sigma]

    def subword_length(self, i: int) -> int:
        """Length of the i-th (1-based) maximal single-region subword."""
        t_i = self.times[i - 1]
        t_next = self.times[i] if i < len(self.times) else self.n + 1
        return min(t_next - 1, self.n) - t_i + 1


def cut_sequence(word, R: int) -> CutSequence:
    w = validate_word(word)
    if R < 1:
        raise ValueError("R must be >= 1")
    n = len(w)
    times = [1]
    sigmas = [region(w[0], R)]
    k = 1
    while k < n:
        if region(w[k], R) != sigmas[-1]:
            times.append(k + 1)
            sigmas.append(region(w[k], R))
        k += 1
    return CutSequence(n, R, tuple(times), tuple(sigmas))


def region_subwords(word, cuts: CutSequence, sigma: int) -> list:
    w = validate_word(word)
    out = []
    L = len(cuts.times)
    for i in range(1, L + 1):
        if cuts.sigmas[i - 1] != sigma:
            continue
        start = cuts.times[i - 1] - 1
        out.append(w[start: start + cuts.subword_length(i)])
    return out


def alpha_bar(alpha_sigma: float, eps: float, n: int) -> int:
    """Pinned stitched length 2 ceil((alpha_sigma + 8 eps) n / 2) + 1 (odd)."""
    return 2 * _ceil_int((alpha_sigma + 8.0 * eps) * n / 2.0) + 1


def check_stitch_assumptions(mu: MeasureZbar, eps: float, R: int, n: int) -> None:
    if not 0 < eps < 1.0 / 40.0:
        raise ValueError("need 0 < eps < 1/40")
    d = decompose(mu)
    pos = [a for a in (d.alpha_minus, d.alpha_zero, d.alpha_plus) if a > 0]
    if eps >= 0.5 * min(pos):
        raise ValueError("need eps < half the smallest positive alpha")
    R_floor = max(r_mu0(d.mu_zero, eps), r_zbar(eps))
    if R <= R_floor:
        raise ValueError("R=%d too small: need R > %d" % (R, R_floor))
    if n <= 3.0 / eps:
        raise ValueError("n too small: need n > 3/eps")


def _filler(z: int, delta: int, m: int) -> tuple:
    # z+delta, z, z+delta, z, ... (m letters, starting away from z)
    return tuple(z + delta * (j % 2) for j in range(1, m + 1))


def stitch(
    word,
    sigma: int,
    mu: MeasureZbar,
    eps: float,
    R: int,
    mode: str = "strict",
    target_len: int | None = None,
) -> tuple:
    """Concatenate the sigma-region subwords of the word, joined by one-letter
    connectors and padded by an oscillating tail, into a single word of length
    alpha_bar(alpha_sigma, eps, n).

    Connectors: sigma*(R+1) between tail subwords (they end and resume at
    sigma*R); for the central region, the boundary letter epsilon_h * R the
    walk actually visited between consecutive central subwords.  When the
    region was never visited (possible for sigma != 0 only) the output is a
    pure oscillation started at sigma*R.  ``target_len`` overrides the pinned
    length for structural experiments.
    """
    if sigma not in (-1, 0, 1):
        raise ValueError("sigma must be -1, 0 or +1")
    if mode not in ("strict", "permissive"):
        raise ValueError("mode must be 'strict' or 'permissive'")
    w = validate_word(word)
    n = len(w)
    d = decompose(mu)
    alphas = {-1: d.alpha_minus, 0: d.alpha_zero, 1: d.alpha_plus}
    if mode == "strict":
        check_stitch_assumptions(mu, eps, R, n)
        if not in_ball(empirical_measure(w), mu, 2.0 ** (-R) * eps):
            raise ValueError("word is outside the prescribed ball around mu")
    target = alpha_bar(alphas[sigma], eps, n) if target_len is None else int(target_len)

    cuts = cut_sequence(w, R)
    subs = region_subwords(w, cuts, sigma)

    if not subs:
        if sigma == 0:
            raise ValueError("a word from 0 always has a central subword")
        out = (sigma * R,) + _filler(sigma * R, sigma, target - 1)
        assert len(out) == target
        return validate_word(out)

    pieces = [subs[0]]
    for prev, nxt in zip(subs, subs[1:]):
        if sigma == 0:
            z = prev[-1]
            if abs(z) != R - 1 or nxt[0] != z:
                raise ValueError("central subwords do not meet at the boundary")
            conn = (R if z > 0 else -R,)
        else:
            if prev[-1] != sigma * R or nxt[0] != sigma * R:
                raise ValueError("tail subwords do not meet at sigma*R")
            conn = (sigma * (R + 1),)
        pieces.append(conn)
        pieces.append(nxt)
    body = tuple(x for p in pieces for x in p)
    m = target - len(body)
    if m < 1:
        raise ValueError(
            "stitched body (%d letters) does not fit the pinned length %d"
            % (len(body), target)
        )
    z = body[-1]
    if sigma == 1:
        delta = 1
    elif sigma == -1:
        delta = -1
    else:
        delta = 1 if z + 1 <= R - 1 else -1
    out = body + _filler(z, delta, m)
    assert len(out) == target
    return validate_word(out)


def encode_cuts(word, R: int) -> dict:
    cuts = cut_sequence(word, R)
    return {
        "n": cuts.n,
        "R": cuts.R,
        "times": list(cuts.times),
        "sigmas": list(cuts.sigmas),
    }


def reconstruct(pieces: dict, cuts) -> tuple:
    """Rebuild the original word from its cut record and stitched words.

    ``pieces`` maps each region label occurring in the record to the stitched
    word of that region; subword lengths come from the record, and one
    connector letter is skipped between consecutive same-region subwords.
    """
    if isinstance(cuts, dict):
        cuts = CutSequence(cuts["n"], cuts["R"], tuple(cuts["times"]),
                           tuple(cuts["sigmas"]))
    out = [None] * cuts.n
    ptr = {-1: 0, 0: 0, 1: 0}
    L = len(cuts.times)
    for i in range(1, L + 1):
        s = cuts.sigmas[i - 1]
        lam = cuts.subword_length(i)
        src = pieces[s]
        seg = src[ptr[s]: ptr[s] + lam]
        if len(seg) != lam:
            raise ValueError("stitched word for region %d is too short" % s)
        start = cuts.times[i - 1] - 1
        out[start: start + lam] = seg
        ptr[s] += lam + 1  # hop over the connector letter
    if any(x is None for x in out):
        raise ValueError("cut record does not cover the word")
    return validate_word(out)
