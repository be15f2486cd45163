"""Command-line front end.

Exit codes: 0 all requested checks pass, 1 a check failed (or an estimate
came back empty), 2 invalid input.  Every command is deterministic given its
flags (including --seed): re-running writes byte-identical CSV/JSON.
"""

from __future__ import annotations

import math
import os
import random
import sys

import click

from . import fileio, verify
from .exact import OBSERVABLE_DP_CAP  # noqa: F401  (cap mirrored in help text)
from .measures import MeasureZbar, decompose
from .monte_carlo import (
    BallEvent,
    ExcursionEvent,
    MeanderEvent,
    TiltSchedule,
    importance_estimate,
    mc_rate,
)
from .rates import (
    composite_rate,
    composite_rate_closed,
    composite_rate_variational,
    dv_rate_variational,
    segment_profile,
)
from .state_space import TransitionProfile
from .svg import polyline_svg
from .trajectories import build_typical, cut_sequence, region, stitch


def _die(msg: str) -> None:
    click.echo("error: %s" % msg, err=True)
    sys.exit(2)


def _load_profile(ctx) -> TransitionProfile | None:
    path = ctx.obj["profile"]
    if path is None:
        return None
    try:
        return fileio.load_profile(path)
    except FileNotFoundError:
        _die("profile file %s does not exist" % path)
    except fileio.FormatError as e:
        _die(str(e))


def _load_measure(ctx) -> MeasureZbar | None:
    path = ctx.obj["measure"]
    if path is None:
        return None
    try:
        return fileio.load_measure(path)
    except FileNotFoundError:
        _die("measure file %s does not exist" % path)
    except fileio.FormatError as e:
        _die(str(e))


def _out_path(ctx, name: str) -> str | None:
    out = ctx.obj["out"]
    if out is None:
        return None
    os.makedirs(out, exist_ok=True)
    return os.path.join(out, name)


def _write_out(ctx, name: str, text: str) -> None:
    path = _out_path(ctx, name)
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _finish(ctx, name: str, payload: dict, ok: bool, *, csv=None) -> None:
    """Print the one-line verdict, emit JSON (stdout + --out), exit 0/1."""
    text = fileio.json_text(payload)
    click.echo(text, nl=False)
    _write_out(ctx, name + ".json", text)
    if csv is not None:
        csv_name, header, rows = csv
        _write_out(ctx, csv_name, fileio.csv_text(header, rows))
    click.echo("%s: %s" % (name, "PASS" if ok else "FAIL"), err=True)
    sys.exit(0 if ok else 1)


@click.group()
@click.option("--profile", "profile_path", metavar="FILE", default=None,
              help="Transition-probability profile (TOML).")
@click.option("--measure", "measure_path", metavar="FILE", default=None,
              help="Target measure on the compactified line (TOML).")
@click.option("--out", "out_dir", metavar="DIR", default=None,
              help="Directory for CSV/JSON/SVG artifacts.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True,
              help="Accepted for compatibility; results never depend on it.")
@click.pass_context
def main(ctx, profile_path, measure_path, out_dir, seed, workers):
    """Rate functions, exact path-counting oracles, and tilted Monte Carlo
    for nearest-neighbour walks on the two-point compactified line."""
    if workers < 1:
        _die("--workers must be >= 1")
    ctx.obj = {"profile": profile_path, "measure": measure_path,
               "out": out_dir, "seed": seed, "workers": workers}


# --------------------------------------------------------------------- rate


@main.group()
def rate():
    """Evaluate the rate function."""


@rate.command("eval")
@click.pass_context
def rate_eval(ctx):
    """All three forms of I(mu) plus their agreement diagnostics."""
    prof = _load_profile(ctx)
    mu = _load_measure(ctx)
    if prof is None or mu is None:
        _die("rate eval requires --profile and --measure")
    d = decompose(mu)
    dv = dv_rate_variational(d.mu_zero, prof) if d.alpha_zero > 0 else None
    rv_min = composite_rate(mu, prof, dv=dv)
    rv_closed = composite_rate_closed(mu, prof, dv=dv)
    rv_var = composite_rate_variational(mu, prof, dv=dv)

    def gap(x, y):
        if math.isinf(x) and math.isinf(y):
            return 0.0
        return abs(x - y)

    g_closed = gap(rv_min.value, rv_closed.value)
    g_var = gap(rv_min.value, rv_var.value)
    ok = g_closed <= 1e-12 and g_var <= 1e-8
    dv_summary = None
    if dv is not None:
        dv_summary = {"value": dv.value, "form": dv.form}
        for k, v in (dv.certificate or {}).items():
            if isinstance(v, (int, float, str, bool)):
                dv_summary[k] = v
    payload = {
        "value": rv_min.value,
        "form": rv_min.form,
        "regime": rv_closed.certificate["regime"],
        "min_form": rv_min.value,
        "closed_form": rv_closed.value,
        "variational_form": rv_var.value,
        "agreement": {
            "min_vs_closed": g_closed, "tol_closed": 1e-12,
            "min_vs_variational": g_var, "tol_variational": 1e-8,
            "pass": ok,
        },
        "certificate_summary": {
            "alpha": list(rv_min.certificate["alpha"]),
            "regime": rv_closed.certificate["regime"],
        },
        "dv_certificate_summary": dv_summary,
    }
    _finish(ctx, "rate_eval", payload, ok)


@rate.command("segment")
@click.option("--grid", type=int, default=101, show_default=True)
@click.pass_context
def rate_segment(ctx, grid):
    """Rate along the segment between the two ideal Diracs."""
    prof = _load_profile(ctx)
    if prof is None:
        _die("rate segment requires --profile")
    if grid < 2:
        _die("--grid must be >= 2")
    alphas = [i / (grid - 1) for i in range(grid)]
    rows = segment_profile(prof, alphas)
    text = fileio.csv_text(["alpha", "rate"], rows)
    click.echo(text, nl=False)
    _write_out(ctx, "segment.csv", text)
    sys.exit(0)


# ------------------------------------------------------------------- verify


@main.group()
def verify_cmd():
    """Run verification campaigns against the exact engines."""


main.add_command(verify_cmd, name="verify")


@verify_cmd.command("excursion")
@click.option("--p", type=float, default=0.3, show_default=True)
@click.option("--radius", "-R", "R", type=int, default=5, show_default=True)
@click.option("--sigma", type=click.Choice(["1", "-1"]), default="1")
@click.option("--n-max", type=int, default=401, show_default=True)
@click.option("--tol", type=float, default=5e-3, show_default=True)
@click.pass_context
def verify_excursion(ctx, p, R, sigma, n_max, tol):
    """Excursion decay slope vs the confinement rate."""
    prof = _load_profile(ctx)
    if not 0 < p < 1:
        _die("--p must lie in (0,1)")
    if n_max < 7:
        _die("--n-max must be >= 7")
    rep = verify.excursion_decay_check(p=p, R=R, sigma=int(sigma),
                                      n_max=n_max, tol=tol, profile=prof)
    _finish(ctx, "verify_excursion", rep, rep["pass"],
            csv=("excursion_series.csv", ["n", "log_prob"], rep["points"]))


@verify_cmd.command("meander")
@click.option("--p", type=float, default=None,
              help="Single up-probability; default runs both 0.7 and 0.3.")
@click.option("--radius", "-R", "R", type=int, default=5, show_default=True)
@click.option("--sigma", type=click.Choice(["1", "-1"]), default="1")
@click.option("--n-max", type=int, default=401, show_default=True)
@click.option("--tol", type=float, default=1e-2, show_default=True)
@click.pass_context
def verify_meander(ctx, p, R, sigma, n_max, tol):
    """Meander decay slopes vs the one-sided Legendre values."""
    prof = _load_profile(ctx)
    if p is not None and not 0 < p < 1:
        _die("--p must lie in (0,1)")
    if prof is not None or p is not None:
        ps = [p if p is not None else prof.limit(int(sigma))]
    else:
        ps = [0.7, 0.3]
    reports = [
        verify.meander_decay_check(q, R=R, sigma=int(sigma), n_max=n_max,
                                   tol=tol, profile=prof)
        for q in ps
    ]
    ok = all(r["pass"] for r in reports)
    payload = {"check": "meander_decay", "reports": reports, "pass": ok}
    rows = [(r["p"], n, lp) for r in reports for n, lp in r["points"]]
    _finish(ctx, "verify_meander", payload, ok,
            csv=("meander_series.csv", ["p", "n", "log_prob"], rows))


@verify_cmd.command("ball")
@click.option("--n-max", type=int, default=12, show_default=True)
@click.option("--count", type=int, default=5, show_default=True)
@click.pass_context
def verify_ball(ctx, n_max, count):
    """Per-class ball probabilities sum to the unfiltered one exactly."""
    if n_max > 14:
        _die("--n-max is capped at 14 (path enumeration)")
    rng = random.Random(ctx.obj["seed"])
    rep = verify.ball_partition_check(rng, count=count, n=n_max)
    _finish(ctx, "verify_ball", rep, rep["pass"])


@verify_cmd.command("counterexample")
@click.option("--p", type=float, default=0.7, show_default=True)
@click.option("--eps", type=float, default=0.25, show_default=True)
@click.option("--threshold", type=float, default=0.05, show_default=True)
@click.pass_context
def verify_counterexample(ctx, p, eps, threshold):
    """Two-subsequence per-step decay gap of the oscillating observable."""
    if not 0 < p < 1:
        _die("--p must lie in (0,1)")
    rep = verify.counterexample_gap(pbar=p, eps=eps, threshold=threshold)
    _finish(ctx, "verify_counterexample", rep, rep["pass"])


@verify_cmd.command("lemmas")
@click.option("--suite", type=click.Choice(sorted(verify.SUITES) + ["all"]),
              default="all", show_default=True)
@click.option("--count", type=int, default=1000, show_default=True)
@click.pass_context
def verify_lemmas(ctx, suite, count):
    """Property suites over random instances (zero failures required)."""
    names = sorted(verify.SUITES) if suite == "all" else [suite]
    results = verify.run_suites(names, ctx.obj["seed"], count)
    ok = all(r.ok for r in results)
    payload = {
        "check": "lemma_suites", "suites": names, "count": count,
        "seed": ctx.obj["seed"],
        "results": [r.as_dict() for r in results],
        "pass": ok,
    }
    for r in results:
        click.echo("  %-40s %4d instances  %d failures" %
                   (r.name, r.instances, r.failures), err=True)
    _finish(ctx, "verify_lemmas", payload, ok)


# ----------------------------------------------------------------------- mc


@main.group()
def mc():
    """Tilted Monte Carlo estimation."""


def _mc_event(ctx, event, n, R, sigma, eps):
    sigma = int(sigma)
    if event == "excursion":
        ev = ExcursionEvent(R=R, sigma=sigma)
        return ev, ev.start
    if event == "meander":
        ev = MeanderEvent(R=R, sigma=sigma)
        return ev, ev.start
    mu = _load_measure(ctx)
    if mu is None:
        _die("--event ball requires --measure")
    if eps is None or eps <= 0:
        _die("--event ball requires --eps > 0")
    return BallEvent(mu, eps), 0


def _mc_profile(ctx, p):
    prof = _load_profile(ctx)
    if prof is None:
        if p is None:
            _die("give --profile or the homogeneous shortcut --p")
        if not 0 < p < 1:
            _die("--p must lie in (0,1)")
        prof = TransitionProfile.homogeneous(p)
    return prof


def _mc_schedule(schedule_path, drift, n):
    if schedule_path is not None and drift is not None:
        _die("--schedule and --drift are mutually exclusive")
    if schedule_path is not None:
        try:
            return fileio.load_schedule(schedule_path)
        except FileNotFoundError:
            _die("schedule file %s does not exist" % schedule_path)
        except fileio.FormatError as e:
            _die(str(e))
    if drift is not None:
        if not -1.0 <= drift <= 1.0:
            _die("--drift must lie in [-1, 1]")
        return TiltSchedule.constant(drift, n) if n > 1 else None
    return None


@mc.command("estimate")
@click.option("--event", type=click.Choice(["excursion", "meander", "ball"]),
              default="excursion", show_default=True)
@click.option("--n", type=int, required=True, help="Word length.")
@click.option("--p", type=float, default=None,
              help="Homogeneous profile shortcut.")
@click.option("--radius", "-R", "R", type=int, default=5, show_default=True)
@click.option("--sigma", type=click.Choice(["1", "-1"]), default="1")
@click.option("--eps", type=float, default=None, help="Ball radius.")
@click.option("--samples", type=int, default=100000, show_default=True)
@click.option("--schedule", "schedule_path", metavar="FILE", default=None,
              help="Tilt schedule CSV (from,to,x).")
@click.option("--drift", type=float, default=None,
              help="Constant tilt x on every transition.")
@click.pass_context
def mc_estimate(ctx, event, n, p, R, sigma, eps, samples, schedule_path,
                drift):
    """Importance-sampling estimate of one path-event probability."""
    if n < 1 or samples < 1:
        _die("--n and --samples must be >= 1")
    prof = _mc_profile(ctx, p)
    ev, start = _mc_event(ctx, event, n, R, sigma, eps)
    sched = _mc_schedule(schedule_path, drift, n)
    try:
        est = importance_estimate(prof, ev, n, samples, ctx.obj["seed"],
                                  start=start, schedule=sched)
    except ValueError as e:
        _die(str(e))
    payload = {
        "event": event, "n": n, "mean": est.mean,
        "log_mean": math.log(est.mean) if est.mean > 0 else -math.inf,
        "rel_std_err": est.rel_std_err, "n_samples": est.n_samples,
        "seed": est.seed, "ess": est.ess,
    }
    _finish(ctx, "mc_estimate", payload, est.mean > 0.0)


@mc.command("rate")
@click.option("--event", type=click.Choice(["excursion", "meander", "ball"]),
              default="excursion", show_default=True)
@click.option("--n-min", type=int, required=True)
@click.option("--n-max", type=int, required=True)
@click.option("--step", type=int, default=2, show_default=True)
@click.option("--p", type=float, default=None,
              help="Homogeneous profile shortcut.")
@click.option("--radius", "-R", "R", type=int, default=5, show_default=True)
@click.option("--sigma", type=click.Choice(["1", "-1"]), default="1")
@click.option("--eps", type=float, default=None, help="Ball radius.")
@click.option("--samples", type=int, default=100000, show_default=True,
              help="Samples per value of n.")
@click.option("--drift", type=float, default=None,
              help="Constant tilt x on every transition.")
@click.option("--method",
              type=click.Choice(["last_difference", "richardson"]),
              default="last_difference", show_default=True)
@click.pass_context
def mc_rate_cmd(ctx, event, n_min, n_max, step, p, R, sigma, eps, samples,
                drift, method):
    """Decay-slope extraction from a Monte Carlo series."""
    if n_min < 1 or n_max < n_min or step < 1:
        _die("need 1 <= n-min <= n-max and step >= 1")
    prof = _mc_profile(ctx, p)
    ev, start = _mc_event(ctx, event, n_max, R, sigma, eps)
    ns = list(range(n_min, n_max + 1, step))
    try:
        rep = mc_rate(prof, ev, ns, samples, ctx.obj["seed"], start=start,
                      schedule_for=drift, method=method)
    except (ValueError, RuntimeError) as e:
        _die(str(e))
    payload = {
        "event": event, "points": [list(pt) for pt in rep.points],
        "slope": rep.slope, "method": rep.method, "residual": rep.residual,
        "slope_std_err": rep.slope_std_err, "unreliable": rep.unreliable,
    }
    _finish(ctx, "mc_rate", payload, not rep.unreliable,
            csv=("mc_rate_series.csv", ["n", "log_prob"], rep.points))


# ----------------------------------------------------------------- figures


@main.command("figure1")
@click.option("--grid", type=int, default=2001, show_default=True)
@click.option("--svg", "want_svg", is_flag=True,
              help="Also render an SVG (requires --out).")
@click.pass_context
def figure1(ctx, grid, want_svg):
    """Rate along the ideal segment for the two standard parameter pairs."""
    if grid < 3:
        _die("--grid must be >= 3")
    if want_svg and ctx.obj["out"] is None:
        _die("--svg needs --out to know where to write")
    rows = verify.figure1_rows(grid)
    rep = verify.figure1_report(rows)
    text = fileio.csv_text(["alpha", "rate_blue", "rate_red"], rows)
    click.echo(text, nl=False)
    _write_out(ctx, "figure1.csv", text)
    _write_out(ctx, "figure1.json", fileio.json_text(rep))
    if want_svg:
        alphas = [r[0] for r in rows]
        svg_text = polyline_svg(
            [
                (alphas, [r[1] for r in rows], "blue", "p+=0.62, p-=0.31"),
                (alphas, [r[2] for r in rows], "red", "p+=0.8, p-=0.35"),
            ],
            title="Rate on the segment between the ideal Diracs",
            x_label="alpha (mass at +infinity)", y_label="rate",
        )
        _write_out(ctx, "figure1.svg", svg_text)
    click.echo("figure1: %s" % ("PASS" if rep["pass"] else "FAIL"), err=True)
    sys.exit(0 if rep["pass"] else 1)


# -------------------------------------------------------------- trajectory


@main.group()
def trajectory():
    """Constructed trajectories."""


@trajectory.command("demo")
@click.option("--n", type=int, default=1600, show_default=True)
@click.option("--eps", type=float, default=0.05, show_default=True)
@click.pass_context
def trajectory_demo(ctx, n, eps):
    """Build a typical trajectory and print it with its stitched pieces."""
    from .instances import typical_instance

    if n < 800:
        _die("--n must be >= 800 so the standing assumptions hold")
    rng = random.Random(ctx.obj["seed"])
    try:
        prof, mu, eps_i, R, n_i, sigma, comps = typical_instance(
            rng, n=n, eps=eps)
    except (AssertionError, ValueError) as e:
        _die("no admissible instance at these parameters (%s)" % e)
    psi = build_typical(sigma, *comps, mu, eps_i, R, n_i)
    rows = [(i + 1, x, region(x, R)) for i, x in enumerate(psi)]
    text = fileio.csv_text(["step", "position", "region"], rows)
    lines = [text]
    _write_out(ctx, "trajectory.csv", text)
    cuts = cut_sequence(psi, R)
    names = {-1: "minus", 0: "zero", 1: "plus"}
    for s in sorted(set(cuts.sigmas)):
        phi = stitch(psi, s, mu, eps_i, R, mode="permissive",
                     target_len=4 * len(psi) + 5)
        stitched_rows = [(i + 1, x, region(x, R)) for i, x in enumerate(phi)]
        stext = fileio.csv_text(["step", "position", "region"], stitched_rows)
        _write_out(ctx, "stitched_%s.csv" % names[s], stext)
        lines.append("# stitched region %+d\n%s" % (s, stext))
    click.echo("".join(lines), nl=False)
    click.echo("trajectory demo: sigma=%+d R=%d n=%d" % (sigma, R, len(psi)),
               err=True)
    sys.exit(0)


if __name__ == "__main__":
    main()
