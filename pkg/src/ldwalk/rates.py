"""Rate functions: Cramer ingredients, central Donsker-Varadhan term, composites.

The rate of the empirical measure of a walk with up-probabilities p(k) and
limits p_- , p_+ splits along the decomposition
mu = a_- delta_{-oo} + a_0 mu_0 + a_+ delta_{+oo}:

    I(mu) = a_0 I_dv(mu_0)
            + min{ a_- Z_- + a_+ inf_{[0,1]} Icr_+ ,
                   a_+ Z_+ + a_- inf_{[-1,0]} Icr_- },

with Z_s = Icr_s(0) the Cramer rate of a zero-drift tail excursion, and
I_dv the Donsker-Varadhan rate for the central part:

    I_dv(mu_0) = sup_{u >= 1} sum_k mu_0(k) log( u_k / (p(k) u_{k+1} + (1-p(k)) u_{k-1}) ).

Three equivalent routes to I(mu) are provided (direct min, regime-resolved
closed form, and a one-dimensional variational search over admissible tail
drifts); they are meant to be compared against each other, not collapsed.

The central term itself has two independent routes: the u-supremum above
(concave in log u, solved by projected gradient ascent) and a kernel-form
minimum over nearest-neighbour transition kernels fixing mu_0, which reduces
to an explicit edge-flow recursion on each interval of the support.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .measures import MeasureZbar, decompose
from .state_space import TransitionProfile

RATE_FORMS = (
    "cramer",
    "dv_variational",
    "dv_kernel",
    "composite_min",
    "composite_variational",
    "composite_closed",
    "contraction",
)


@dataclass(frozen=True)
class RateValue:
    """A rate function evaluation: the number, which route produced it, and
    whatever certificate that route can attach (multiplier profile, kernel,
    minimizing decomposition ...)."""

    value: float
    form: str
    certificate: dict | None = None

    def __post_init__(self):
        if self.form not in RATE_FORMS:
            raise ValueError("unknown rate form %r" % (self.form,))
        if self.value < -1e-12:
            raise ValueError("rate values are nonnegative, got %g" % self.value)


@dataclass(frozen=True)
class ConstraintSet:
    """Admissible tail drift pairs (x_-, x_+) in [-1,0] x [0,1] with x_- = 0 or x_+ = 0.

    The two segments meet at the origin; the composite variational form
    minimizes over both and takes the smaller value.
    """

    def contains(self, x_minus: float, x_plus: float, tol: float = 0.0) -> bool:
        if not (-1.0 - tol <= x_minus <= tol and -tol <= x_plus <= 1.0 + tol):
            return False
        return abs(x_minus) <= tol or abs(x_plus) <= tol

    def segments(self):
        # (which coordinate varies, lo, hi); the other coordinate is 0
        return (("plus", 0.0, 1.0), ("minus", -1.0, 0.0))


# ----------------------------------------------------------------- Cramer


def cgf(p: float, lam: float) -> float:
    """log E[exp(lam * step)] for a +-1 step with up-probability p."""
    return float(np.logaddexp(math.log(p) + lam, math.log1p(-p) - lam))


def cramer(p: float, x: float) -> float:
    """Legendre transform of cgf: relative entropy of drift x against drift 2p-1.

    Finite exactly on [-1, 1], with the 0 log 0 = 0 convention at the ends.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0,1)")
    if x < -1.0 or x > 1.0:
        return math.inf
    a = (1.0 - x) / 2.0
    b = (1.0 + x) / 2.0
    val = 0.0
    if a > 0.0:
        val += a * math.log(a / (1.0 - p))
    if b > 0.0:
        val += b * math.log(b / p)
    return val


def cramer_at_zero(p: float) -> float:
    """Icr_p(0) = (1/2) log(1 / (4 p (1-p))): cost per step of zero drift."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0,1)")
    return -0.5 * math.log(4.0 * p * (1.0 - p))


def cramer_inf(p: float, side: str) -> float:
    """inf of Icr_p over [0,1] ("nonneg") or [-1,0] ("nonpos").

    The unconstrained minimizer is the natural drift 2p-1; when it falls
    outside the half-interval the infimum sits at 0 and equals cramer_at_zero.
    """
    if side == "nonneg":
        return 0.0 if p >= 0.5 else cramer_at_zero(p)
    if side == "nonpos":
        return 0.0 if p <= 0.5 else cramer_at_zero(p)
    raise ValueError("side must be 'nonneg' or 'nonpos'")


# -------------------------------------------- Donsker-Varadhan, u-supremum


def _check_central_law(mu_zero: dict) -> dict:
    out = {}
    for k, w in mu_zero.items():
        w = float(w)
        if w < 0:
            raise ValueError("negative mass in mu_zero")
        if w > 0:
            out[int(k)] = out.get(int(k), 0.0) + w
    if not out:
        raise ValueError("mu_zero has no mass")
    if abs(math.fsum(out.values()) - 1.0) > 1e-9:
        raise ValueError("mu_zero must be a probability on Z")
    return out


def _dv_arrays(mu_zero: dict, profile: TransitionProfile, pad: int):
    lo = min(mu_zero) - pad
    hi = max(mu_zero) + pad
    sites = np.arange(lo, hi + 1)
    mu = np.zeros(len(sites))
    for k, w in mu_zero.items():
        mu[k - lo] = w
    ps = np.array([profile.p(int(k)) for k in sites])
    return sites, mu, np.log(ps), np.log1p(-ps)


def _dv_objective_grad(v: np.ndarray, mu: np.ndarray, logp: np.ndarray, logq: np.ndarray):
    """Objective F(v) = sum_k mu_k (v_k - A_k) and its gradient, v = log u >= 0.

    A_k = logaddexp(logp_k + v_{k+1}, logq_k + v_{k-1}); sites outside the
    window carry v = 0 and mu = 0, so shifts are zero-padded.
    """
    vp = np.empty_like(v)  # v_{k+1} seen from k
    vp[:-1] = v[1:]
    vp[-1] = 0.0
    vm = np.empty_like(v)  # v_{k-1}
    vm[1:] = v[:-1]
    vm[0] = 0.0
    A = np.logaddexp(logp + vp, logq + vm)
    F = float(np.sum(mu * (v - A)))

    # d/dv_m: own term mu_m, minus the two neighbour terms routed through A
    up_w = mu * np.exp(logp + vp - A)  # weight of v_{k+1} inside A_k
    dn_w = mu * np.exp(logq + vm - A)  # weight of v_{k-1} inside A_k
    g = mu.copy()
    g[1:] -= up_w[:-1]
    g[:-1] -= dn_w[1:]
    return F, g


def dv_rate_variational(
    mu_zero: dict,
    profile: TransitionProfile,
    pad: int = 8,
    max_iters: int = 5000,
    cap: float = 50.0,
    gain_tol: float = 1e-11,
    step0: float = 1.0,
    step_max: float = 4.0,
) -> RateValue:
    """Central rate by projected gradient ascent on the multiplier exponents.

    The objective is concave in v = log u and climbed from v = 0 under the
    constraint v >= 0.  Divergent instances (no stationary kernel can fix
    mu_0, e.g. a single atom) travel along an unbounded ascent direction;
    once the objective passes ``cap`` the rate is reported as +oo.  Finite
    rates are bounded by log(1/p_*), far below any sensible cap.
    """
    mu_zero = _check_central_law(mu_zero)
    if pad < 1:
        raise ValueError("pad must be >= 1")
    sites, mu, logp, logq = _dv_arrays(mu_zero, profile, pad)
    v = np.zeros(len(sites))
    F, g = _dv_objective_grad(v, mu, logp, logq)
    eta = step0
    flat = 0
    for _ in range(max_iters):
        if F > cap:
            return RateValue(math.inf, "dv_variational", None)
        trial = np.maximum(v + eta * g, 0.0)
        F_new, g_new = _dv_objective_grad(trial, mu, logp, logq)
        if F_new >= F:
            gain = F_new - F
            v, F, g = trial, F_new, g_new
            eta = min(eta * 1.3, step_max)
            flat = flat + 1 if gain < gain_tol else 0
            if flat >= 8:
                break
        else:
            eta *= 0.5
            if eta < 1e-14:
                break
    if F > cap:
        return RateValue(math.inf, "dv_variational", None)
    cert = {"log_u": {int(k): float(val) for k, val in zip(sites, v) if val > 0.0},
            "objective": F}
    return RateValue(max(F, 0.0), "dv_variational", cert)


# ------------------------------------------- Donsker-Varadhan, kernel form


def _kl_bernoulli(c: float, p: float) -> float:
    val = 0.0
    if c > 0.0:
        val += c * math.log(c / p)
    if c < 1.0:
        val += (1.0 - c) * math.log((1.0 - c) / (1.0 - p))
    return val


def dv_rate_kernel_form(
    mu_zero: dict, profile: TransitionProfile, tol: float = 1e-3
) -> RateValue:
    """Central rate as min over nearest-neighbour kernels q with mu_0 q = mu_0.

    On Z, stationarity forces the two-way flow across each edge to balance,
    so on every interval of supp(mu_0) the edge flows satisfy the recursion
    rho(x) = mu(x) - rho(x-1) with rho = 0 at both ends: the candidate kernel
    is unique.  Feasibility is the linear check rho >= 0 with a slack ``tol``
    absorbing truncation-sized defects (measures cut off from an infinite
    stationary law miss exact flow balance by the truncated tail mass).
    Infeasible central laws -- an isolated atom first of all -- have no
    finite-rate kernel and get +oo.
    """
    mu_zero = _check_central_law(mu_zero)
    supp = sorted(mu_zero)
    islands = [[supp[0]]]
    for k in supp[1:]:
        if k == islands[-1][-1] + 1:
            islands[-1].append(k)
        else:
            islands.append([k])
    total = 0.0
    q_up: dict = {}
    for isl in islands:
        rho_prev = 0.0
        for x in isl:
            rho = mu_zero[x] - rho_prev
            if x == isl[-1]:
                if abs(rho) > tol:
                    return RateValue(math.inf, "dv_kernel", None)
                rho = 0.0
            elif rho < -tol:
                return RateValue(math.inf, "dv_kernel", None)
            rho = max(rho, 0.0)
            c = min(rho / mu_zero[x], 1.0)
            q_up[x] = c
            total += mu_zero[x] * _kl_bernoulli(c, profile.p(x))
            rho_prev = rho
    return RateValue(total, "dv_kernel", {"q_up": q_up})


# ------------------------------------------------------------- composites


def _tail_ingredients(profile: TransitionProfile):
    pm, pp = profile.limit(-1), profile.limit(1)
    return pm, pp, cramer_at_zero(pm), cramer_at_zero(pp)


def _central_term(mu: MeasureZbar, profile: TransitionProfile, dv: RateValue | None,
                  **dv_opts):
    d = decompose(mu)
    if d.alpha_zero == 0.0:
        return d, 0.0, None
    if dv is None:
        dv = dv_rate_variational(d.mu_zero, profile, **dv_opts)
    if not math.isfinite(dv.value):
        return d, math.inf, dv
    return d, d.alpha_zero * dv.value, dv


def composite_rate(mu: MeasureZbar, profile: TransitionProfile,
                   dv: RateValue | None = None, **dv_opts) -> RateValue:
    """I(mu) as written: central term plus the smaller of the two tail pairings."""
    d, central, dv_used = _central_term(mu, profile, dv, **dv_opts)
    pm, pp, zm, zp = _tail_ingredients(profile)
    branch_a = d.alpha_minus * zm + d.alpha_plus * cramer_inf(pp, "nonneg")
    branch_b = d.alpha_plus * zp + d.alpha_minus * cramer_inf(pm, "nonpos")
    tail = min(branch_a, branch_b)
    cert = {
        "alpha": (d.alpha_minus, d.alpha_zero, d.alpha_plus),
        "tail_branches": (branch_a, branch_b),
    }
    if dv_used is not None:
        cert["dv"] = dv_used.value
    return RateValue(central + tail, "composite_min", cert)


def composite_rate_closed(mu: MeasureZbar, profile: TransitionProfile,
                          dv: RateValue | None = None, **dv_opts) -> RateValue:
    """Same value, resolved by the sign of the two drifts at infinity.

    A tail with outward drift (p_+ >= 1/2 on the right, p_- <= 1/2 on the
    left) absorbs mass for free; a tail with inward drift charges Z per unit
    of boundary mass.  Four sign regimes exhaust the possibilities.
    """
    d, central, dv_used = _central_term(mu, profile, dv, **dv_opts)
    pm, pp, zm, zp = _tail_ingredients(profile)
    am, ap = d.alpha_minus, d.alpha_plus
    if pp < 0.5 and pm < 0.5:
        tail, regime = ap * zp, "drift_left"
    elif pp >= 0.5 and pm >= 0.5:
        tail, regime = am * zm, "drift_right"
    elif pp < 0.5 and pm >= 0.5:
        tail, regime = am * zm + ap * zp, "drift_inward"
    else:
        tail, regime = min(ap * zp, am * zm), "drift_outward"
    cert = {"regime": regime, "alpha": (am, d.alpha_zero, ap)}
    if dv_used is not None:
        cert["dv"] = dv_used.value
    return RateValue(central + tail, "composite_closed", cert)


def _golden_min(fun, lo: float, hi: float, xtol: float):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)


def _min_on_segment(fun, lo: float, hi: float, grid: int, xtol: float):
    xs = np.linspace(lo, hi, grid)
    vals = [fun(float(x)) for x in xs]
    i = int(np.argmin(vals))
    a = float(xs[max(i - 1, 0)])
    b = float(xs[min(i + 1, grid - 1)])
    x_ref, v_ref = _golden_min(fun, a, b, xtol)
    cands = [(v_ref, x_ref), (vals[i], float(xs[i])), (fun(lo), lo), (fun(hi), hi)]
    v_best, x_best = min(cands)
    return x_best, v_best


def composite_rate_variational(
    mu: MeasureZbar,
    profile: TransitionProfile,
    dv: RateValue | None = None,
    grid: int = 33,
    xtol: float = 1e-10,
    **dv_opts,
) -> RateValue:
    """I(mu) by minimizing over the admissible tail-drift pairs directly.

    On each segment of the constraint set one drift is pinned to 0 and the
    other varies; each segment objective is convex, so a coarse grid plus
    golden-section refinement around the best cell resolves the minimum to
    well below the comparison tolerances used in the tests.
    """
    d, central, dv_used = _central_term(mu, profile, dv, **dv_opts)
    pm, pp, _, _ = _tail_ingredients(profile)
    am, ap = d.alpha_minus, d.alpha_plus

    def on_plus(x):  # x_- = 0, x_+ = x
        return am * cramer(pm, 0.0) + ap * cramer(pp, x)

    def on_minus(x):  # x_+ = 0, x_- = x
        return ap * cramer(pp, 0.0) + am * cramer(pm, x)

    xp, vp = _min_on_segment(on_plus, 0.0, 1.0, grid, xtol)
    xm, vm = _min_on_segment(on_minus, -1.0, 0.0, grid, xtol)
    if vp <= vm:
        tail, arg = vp, (0.0, xp)
    else:
        tail, arg = vm, (xm, 0.0)
    cert = {"argmin": arg, "alpha": (am, d.alpha_zero, ap)}
    if dv_used is not None:
        cert["dv"] = dv_used.value
    return RateValue(central + tail, "composite_variational", cert)


def segment_profile(profile: TransitionProfile, alphas) -> list:
    """Rate along the boundary segment mu_a = (1-a) delta_{-oo} + a delta_{+oo}.

    Returns [(a, I(mu_a))] -- the restriction of the rate function to the
    segment joining the two Dirac masses at infinity (no central part).
    """
    out = []
    for a in alphas:
        a = float(a)
        if not 0.0 <= a <= 1.0:
            raise ValueError("alpha must lie in [0,1]")
        mu = MeasureZbar({-math.inf: 1.0 - a, math.inf: a})
        out.append((a, composite_rate_closed(mu, profile).value))
    return out


# ------------------------------------------------------------ contraction


def _constrained_central_min(profile, window: int, fvals: np.ndarray, c0: float,
                             flow_floor: float = 1e-9):
    """min of the kernel-form central rate over stationary mu_0 on [-W, W]
    subject to sum f(k) mu_0(k) = c0, as a convex program in the edge flows."""
    n_edges = 2 * window
    f_edge = 0.5 * (fvals[:-1] + fvals[1:])  # observable mean of each edge pair
    if c0 < f_edge.min() - 1e-9 or c0 > f_edge.max() + 1e-9:
        return math.inf, None
    logp = np.array([math.log(profile.p(k)) for k in range(-window, window)])
    logq = np.array([math.log1p(-profile.p(k)) for k in range(-window + 1, window + 1)])

    def mu_of(rho):
        mu = np.zeros(n_edges + 1)
        mu[:-1] += rho
        mu[1:] += rho
        return mu

    def objective(rho):
        rho = np.maximum(rho, flow_floor)
        mu = mu_of(rho)
        val = np.sum(rho * (2.0 * np.log(rho) - logp - logq
                            - np.log(mu[:-1]) - np.log(mu[1:])))
        return float(val)

    def gradient(rho):
        rho = np.maximum(rho, flow_floor)
        mu = mu_of(rho)
        return 2.0 * np.log(rho) - logp - logq - np.log(mu[:-1]) - np.log(mu[1:])

    cons = [
        {"type": "eq", "fun": lambda r: np.sum(r) - 0.5,
         "jac": lambda r: np.ones(n_edges)},
        {"type": "eq", "fun": lambda r: 2.0 * np.dot(f_edge, r) - c0,
         "jac": lambda r: 2.0 * f_edge},
    ]
    # feasible-ish start: blend uniform flows with a two-edge mix hitting c0
    i_lo, i_hi = int(np.argmin(f_edge)), int(np.argmax(f_edge))
    rho0 = np.full(n_edges, 0.5 / n_edges)
    if i_lo != i_hi:
        t = (f_edge[i_hi] - c0) / (f_edge[i_hi] - f_edge[i_lo])
        t = min(max(t, 0.0), 1.0)
        mix = np.full(n_edges, flow_floor)
        mix[i_lo] += 0.5 * t
        mix[i_hi] += 0.5 * (1.0 - t)
        rho0 = 0.5 * rho0 + 0.5 * mix
    with warnings.catch_warnings():
        # SLSQP's line search may momentarily step outside the bounds and
        # clip back; the objective already guards against that
        warnings.simplefilter("ignore", RuntimeWarning)
        res = minimize(
            objective, rho0, jac=gradient, method="SLSQP",
            bounds=[(flow_floor, 0.5)] * n_edges, constraints=cons,
            options={"maxiter": 200, "ftol": 1e-12},
        )
    if not res.success and res.fun is None:
        return math.inf, None
    rho = np.maximum(res.x, flow_floor)
    mu = mu_of(rho)
    mu_dict = {int(k): float(m) for k, m in zip(range(-window, window + 1), mu)
               if m > 1e-7}
    return float(res.fun), mu_dict


def contraction_rate(
    f_site,
    f_minus: float,
    f_plus: float,
    level: float,
    profile: TransitionProfile,
    window: int = 10,
    alpha_grid: int = 13,
    level_tol: float = 1e-9,
) -> RateValue:
    """Upper bound for the contracted rate inf{ I(mu) : integral f dmu = level }.

    Outer search over the boundary masses (a_-, a_+) on a simplex grid;
    inner convex program over central stationary laws meeting the leftover
    observable constraint.  This is an advisory bound (grid plus local
    solver), not a certified optimum, and is labelled accordingly.
    """
    fvals = np.array([float(f_site(k)) for k in range(-window, window + 1)])
    pm, pp, zm, zp = _tail_ingredients(profile)
    best = math.inf
    best_cert = None
    ticks = np.linspace(0.0, 1.0, alpha_grid)
    for am in ticks:
        for ap in ticks:
            if am + ap > 1.0 + 1e-12:
                continue
            a0 = max(1.0 - am - ap, 0.0)
            tail = min(am * zm + ap * cramer_inf(pp, "nonneg"),
                       ap * zp + am * cramer_inf(pm, "nonpos"))
            if tail >= best:
                continue
            if a0 < 1e-12:
                if abs(am * f_minus + ap * f_plus - level) > level_tol:
                    continue
                value, mu_dict = tail, None
            else:
                c0 = (level - am * f_minus - ap * f_plus) / a0
                inner, mu_dict = _constrained_central_min(profile, window, fvals, c0)
                if not math.isfinite(inner):
                    continue
                value = tail + a0 * max(inner, 0.0)
            if value < best:
                best = value
                best_cert = {"alpha_minus": float(am), "alpha_plus": float(ap),
                             "mu_zero": mu_dict}
    return RateValue(best if best >= 0 else 0.0, "contraction", best_cert)
