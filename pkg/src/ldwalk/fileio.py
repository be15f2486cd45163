"""Structured-text input and report output.

Profiles and measures come in as TOML (integer map keys are written as
quoted strings, a TOML restriction); tilt schedules as ``from,to,x`` CSV.
All writers are deterministic -- sorted keys, repr floats, explicit "\n"
line endings -- so re-running a command reproduces its output byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

from .measures import MeasureZbar
from .monte_carlo import TiltSchedule
from .state_space import TransitionProfile

SCHEMA_VERSION = 1


class FormatError(ValueError):
    """Invalid input file; the message names the offending key."""


def _require(table: dict, key: str, kind, where: str):
    if key not in table:
        raise FormatError("%s: missing key %r" % (where, key))
    v = table[key]
    if kind is float and isinstance(v, int):
        v = float(v)
    if not isinstance(v, kind):
        raise FormatError("%s: key %r has type %s, expected %s"
                          % (where, key, type(v).__name__, kind.__name__))
    return v


def _int_keyed(table: dict, where: str) -> dict:
    out = {}
    for k, v in table.items():
        try:
            kk = int(k)
        except ValueError:
            raise FormatError("%s: non-integer key %r" % (where, k)) from None
        if not isinstance(v, (int, float)):
            raise FormatError("%s: value for %r is not a number" % (where, k))
        out[kk] = float(v)
    return out


def load_profile(path) -> TransitionProfile:
    """TOML with window_lo, window_hi, tail_minus, tail_plus and a [table]
    section mapping sites (as quoted integers) to up-probabilities."""
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as e:
            raise FormatError("%s: %s" % (path, e)) from None
    lo = _require(doc, "window_lo", int, str(path))
    hi = _require(doc, "window_hi", int, str(path))
    tm = _require(doc, "tail_minus", float, str(path))
    tp = _require(doc, "tail_plus", float, str(path))
    table = _int_keyed(_require(doc, "table", dict, str(path)),
                       "%s: table" % path)
    try:
        return TransitionProfile(lo, hi, table, tail_minus=tm, tail_plus=tp)
    except (ValueError, AssertionError) as e:
        raise FormatError("%s: %s" % (path, e)) from None


def load_measure(path) -> MeasureZbar:
    """TOML with alpha_minus, alpha_plus and a [central] section of
    site -> weight entries (normalized on load; must sum to 1-alphas)."""
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as e:
            raise FormatError("%s: %s" % (path, e)) from None
    am = _require(doc, "alpha_minus", float, str(path))
    ap = _require(doc, "alpha_plus", float, str(path))
    central = _int_keyed(doc.get("central", {}), "%s: central" % path)
    if am < 0 or ap < 0 or am + ap > 1.0 + 1e-12:
        raise FormatError("%s: alpha_minus/alpha_plus must be >= 0 and sum"
                          " to at most 1" % path)
    a0 = 1.0 - am - ap
    atoms: dict = {}
    if am > 0:
        atoms[-math.inf] = am
    if ap > 0:
        atoms[math.inf] = ap
    if a0 > 1e-12:
        tot = math.fsum(central.values())
        if tot <= 0:
            raise FormatError("%s: central must carry the remaining mass"
                              " %.6g" % (path, a0))
        if any(v < 0 for v in central.values()):
            raise FormatError("%s: central weights must be >= 0" % path)
        for k, v in central.items():
            atoms[k] = atoms.get(k, 0.0) + a0 * v / tot
    try:
        return MeasureZbar(atoms)
    except (ValueError, AssertionError) as e:
        raise FormatError("%s: %s" % (path, e)) from None


def load_schedule(path) -> TiltSchedule:
    """CSV with header from,to,x; one tilt segment per row."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [r for r in reader if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise FormatError("%s: empty schedule" % path)
    if [c.strip() for c in rows[0]] == ["from", "to", "x"]:
        rows = rows[1:]
    try:
        return TiltSchedule.from_rows(rows)
    except (ValueError, TypeError) as e:
        raise FormatError("%s: %s" % (path, e)) from None


# ------------------------------------------------------------------ writers


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(header, rows))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        if math.isinf(obj):
            return "unbounded" if obj > 0 else "-unbounded"
        if math.isnan(obj):
            return "nan"
    return obj


def json_text(payload: dict) -> str:
    doc = dict(payload)
    doc.setdefault("schema_version", SCHEMA_VERSION)
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        fh.write(json_text(payload))


def profile_text(profile: TransitionProfile) -> str:
    """Round-trippable TOML for a profile (handy for demos and tests)."""
    lines = [
        "window_lo = %d" % profile.window_lo,
        "window_hi = %d" % profile.window_hi,
        "tail_minus = %s" % repr(profile.tail_minus),
        "tail_plus = %s" % repr(profile.tail_plus),
        "",
        "[table]",
    ]
    for k in range(profile.window_lo, profile.window_hi + 1):
        lines.append('"%d" = %s' % (k, repr(profile.table[k])))
    return "\n".join(lines) + "\n"
