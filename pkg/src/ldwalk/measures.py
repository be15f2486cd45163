"""Measures on the compactified line and the Kantorovich-Rubinstein norm.

Probability measures are finite atom dictionaries over Z u {-oo, +oo}.  The
dual Lipschitz norm used for balls of empirical measures is

    ||nu|| = sup { integral f d nu : |f| <= 1, |f(h)-f(k)| <= d(h,k) },

computed as a linear program over the values of f on supp(nu).  Because d is
additive along the phi-ordering of the support (d(h,k) = phi(k)-phi(h) for
h < k), the Lipschitz constraints between consecutive support points imply
all others, so the LP has O(support) rows.

For differences of probability measures the sup is attained by a transport
(CDF) formula, which we use as a fast path; the LP remains the definition and
the two are property-tested against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
from scipy.optimize import linprog

from .state_space import MINUS_INF, PLUS_INF, is_finite_point, varphi

#: construction-time tolerance on total mass; larger drift is an input error
#: and is reported rather than renormalized away.
MASS_TOL = 1e-12


def _clean_atoms(atoms: dict) -> dict:
    out = {}
    for k, w in atoms.items():
        w = float(w)
        if w == 0.0:
            continue
        if not is_finite_point(k):
            key = PLUS_INF if k == PLUS_INF else MINUS_INF
        else:
            key = int(k)
        out[key] = out.get(key, 0.0) + w
    return out


@dataclass(frozen=True)
class MeasureZbar:
    """Probability measure with finitely many atoms on Zbar."""

    atoms: dict

    def __post_init__(self):
        cleaned = _clean_atoms(self.atoms)
        for k, w in cleaned.items():
            if w < 0.0:
                raise ValueError("negative mass %g at %r" % (w, k))
        total = math.fsum(cleaned.values())
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(
                "total mass %.17g deviates from 1 beyond %g; refusing to renormalize"
                % (total, MASS_TOL)
            )
        object.__setattr__(self, "atoms", cleaned)

    def mass(self, k) -> float:
        return self.atoms.get(k, 0.0)

    def support(self) -> list:
        return sorted(self.atoms, key=varphi)


@dataclass(frozen=True)
class SignedMeasureZbar:
    """Finite signed combination of atoms on Zbar (no mass constraint)."""

    atoms: dict

    def __post_init__(self):
        object.__setattr__(self, "atoms", _clean_atoms(self.atoms))

    def support(self) -> list:
        return sorted(self.atoms, key=varphi)

    def total(self) -> float:
        return math.fsum(self.atoms.values())


class Decomposition(NamedTuple):
    alpha_minus: float
    alpha_zero: float
    alpha_plus: float
    mu_zero: dict  # probability on Z (normalized central part)


def decompose(mu: MeasureZbar) -> Decomposition:
    """Split mu = a_- delta_{-oo} + a_0 mu_0 + a_+ delta_{+oo}.

    When the central mass vanishes, mu_0 is delta_0 by convention (it is then
    multiplied by a_0 = 0 wherever it appears).
    """
    a_minus = mu.mass(MINUS_INF)
    a_plus = mu.mass(PLUS_INF)
    finite = {k: w for k, w in mu.atoms.items() if is_finite_point(k)}
    a_zero = math.fsum(finite.values())
    if a_zero == 0.0:
        return Decomposition(a_minus, 0.0, a_plus, {0: 1.0})
    mu_zero = {k: w / a_zero for k, w in finite.items()}
    return Decomposition(a_minus, a_zero, a_plus, mu_zero)


def compose(alpha_minus: float, mu_zero: dict, alpha_plus: float) -> MeasureZbar:
    """Inverse of decompose: assemble a measure from boundary masses and a central law."""
    if alpha_minus < 0 or alpha_plus < 0 or alpha_minus + alpha_plus > 1 + MASS_TOL:
        raise ValueError("boundary masses must be nonnegative with sum <= 1")
    a_zero = 1.0 - alpha_minus - alpha_plus
    atoms = {k: a_zero * w for k, w in mu_zero.items()}
    if alpha_minus:
        atoms[MINUS_INF] = atoms.get(MINUS_INF, 0.0) + alpha_minus
    if alpha_plus:
        atoms[PLUS_INF] = atoms.get(PLUS_INF, 0.0) + alpha_plus
    return MeasureZbar(atoms)


def kr_norm(nu: SignedMeasureZbar | dict) -> float:
    """Dual Lipschitz norm of a signed measure, by linear programming.

    Variables are the values f_i on the support sorted by phi; the box is
    |f_i| <= 1 and the Lipschitz rows couple consecutive points only.
    """
    atoms = nu.atoms if isinstance(nu, SignedMeasureZbar) else _clean_atoms(nu)
    if not atoms:
        return 0.0
    pts = sorted(atoms, key=varphi)
    w = np.array([atoms[k] for k in pts])
    n = len(pts)
    if n == 1:
        return abs(w[0])
    # the norm is 1-homogeneous and HiGHS mishandles objective coefficients
    # spanning hundreds of orders of magnitude (a ~1e-305 atom can drag the
    # reported optimum below the feasible f = 0), so solve at unit scale
    scale = float(np.max(np.abs(w)))
    w = w / scale
    phis = np.array([varphi(k) for k in pts])
    gaps = np.diff(phis)
    # rows: f_{i+1} - f_i <= gap_i  and  f_i - f_{i+1} <= gap_i
    rows = []
    rhs = []
    for i in range(n - 1):
        up = np.zeros(n)
        up[i], up[i + 1] = -1.0, 1.0
        rows.append(up)
        rhs.append(gaps[i])
        rows.append(-up)
        rhs.append(gaps[i])
    res = linprog(
        -w,
        A_ub=np.array(rows),
        b_ub=np.array(rhs),
        bounds=[(-1.0, 1.0)] * n,
        method="highs",
    )
    if not res.success:
        raise RuntimeError("KR norm LP failed: %s" % res.message)
    return max(0.0, float(-res.fun) * scale)


def _w1_balanced(atoms: dict) -> float:
    """Transport form of the norm for balanced signed measures (total mass 0).

    With support x_1 < ... < x_m in phi-order and partial sums
    C_i = sum_{j<=i} nu(x_j), the optimal f climbs/descends at full Lipschitz
    rate between consecutive points, giving sum_i |C_i| (phi_{i+1} - phi_i).
    The box constraint never binds: the optimal f has oscillation at most
    phi(x_m) - phi(x_1) <= 2 and can be recentred into [-1, 1].
    """
    pts = sorted(atoms, key=varphi)
    phis = [varphi(k) for k in pts]
    total = 0.0
    c = 0.0
    for i in range(len(pts) - 1):
        c += atoms[pts[i]]
        total += abs(c) * (phis[i + 1] - phis[i])
    return total


def kr_distance(mu: MeasureZbar, nu: MeasureZbar) -> float:
    """||mu - nu|| for two probability measures (balanced fast path)."""
    diff = dict(mu.atoms)
    for k, w in nu.atoms.items():
        diff[k] = diff.get(k, 0.0) - w
    diff = {k: w for k, w in diff.items() if w != 0.0}
    return _w1_balanced(diff)


def in_ball(mu: MeasureZbar, center: MeasureZbar, eps: float) -> bool:
    """Strict open ball; no tolerance is applied at the boundary."""
    return kr_distance(mu, center) < eps


def r_mu0(mu_zero: dict, eps: float) -> int:
    """Smallest R >= 1 with mu_0([-R+1, R-1]) > 1 - eps (central concentration radius)."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    total = math.fsum(mu_zero.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError("mu_zero must be a probability on Z")
    R = 1
    while True:
        inner = math.fsum(w for k, w in mu_zero.items() if -R + 1 <= k <= R - 1)
        if inner > 1.0 - eps:
            return R
        R += 1


def empirical_measure(word: Iterable[int]) -> MeasureZbar:
    """ell(w) = (1/n) sum_j delta_{w_j} over all n letters of the word."""
    w = list(word)
    if not w:
        raise ValueError("empty word")
    n = len(w)
    counts: dict = {}
    for x in w:
        counts[int(x)] = counts.get(int(x), 0) + 1
    return MeasureZbar({k: c / n for k, c in counts.items()})


def occupation_counts(word: Iterable[int], R: int):
    """Letters per region (A^-, A^0, A^+ at radius R) and per site.

    Returns (region_counts, site_counts) with region keys -1, 0, +1.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    region = {-1: 0, 0: 0, 1: 0}
    site: dict = {}
    for x in word:
        x = int(x)
        if x >= R:
            region[1] += 1
        elif x <= -R:
            region[-1] += 1
        else:
            region[0] += 1
        site[x] = site.get(x, 0) + 1
    return region, site


def restricted_empirical(word: Iterable[int], R: int) -> dict:
    """Empirical law of the letters lying in the central region A^0 = [-R+1, R-1].

    Raises when the word never visits the central region (nothing to normalize).
    """
    w = [int(x) for x in word]
    central = [x for x in w if -R + 1 <= x <= R - 1]
    if not central:
        raise ValueError("word has no letters in the central region at R=%d" % R)
    n0 = len(central)
    counts: dict = {}
    for x in central:
        counts[x] = counts.get(x, 0) + 1
    return {k: c / n0 for k, c in counts.items()}
