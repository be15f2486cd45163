"""Minimal polyline SVG writer (no plotting dependency).

Output is deterministic: coordinates are formatted to two decimals and
curves are drawn in the order given.
"""

from __future__ import annotations

import math

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 64, 20, 28, 44


def _fmt(v: float) -> str:
    return "%.2f" % v


def polyline_svg(curves, *, title: str = "", x_label: str = "",
                 y_label: str = "") -> str:
    """curves: iterable of (xs, ys, color, label); returns the SVG text."""
    curves = [(list(xs), list(ys), color, label)
              for xs, ys, color, label in curves]
    xs_all = [x for xs, _, _, _ in curves for x in xs]
    ys_all = [y for _, ys, _, _ in curves for y in ys if math.isfinite(y)]
    if not xs_all or not ys_all:
        raise ValueError("nothing to draw")
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def X(x):
        return _ML + (x - x0) / (x1 - x0) * pw

    def Y(y):
        return _MT + (y1 - y) / (y1 - y0) * ph

    out = []
    out.append('<svg xmlns="http://www.w3.org/2000/svg" width="%d"'
               ' height="%d" viewBox="0 0 %d %d">' % (_W, _H, _W, _H))
    out.append('<rect width="%d" height="%d" fill="white"/>' % (_W, _H))
    if title:
        out.append('<text x="%s" y="18" font-size="14" text-anchor="middle"'
                   ' font-family="sans-serif">%s</text>'
                   % (_fmt(_ML + pw / 2), title))
    # axes
    out.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="black"/>'
               % (_fmt(_ML), _fmt(_MT + ph), _fmt(_ML + pw), _fmt(_MT + ph)))
    out.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="black"/>'
               % (_fmt(_ML), _fmt(_MT), _fmt(_ML), _fmt(_MT + ph)))
    # extremal tick labels
    for x in (x0, x1):
        out.append('<text x="%s" y="%s" font-size="11" text-anchor="middle"'
                   ' font-family="sans-serif">%g</text>'
                   % (_fmt(X(x)), _fmt(_MT + ph + 16), x))
    for y in (y0, y1):
        out.append('<text x="%s" y="%s" font-size="11" text-anchor="end"'
                   ' font-family="sans-serif">%g</text>'
                   % (_fmt(_ML - 6), _fmt(Y(y) + 4), y))
    if x_label:
        out.append('<text x="%s" y="%s" font-size="12" text-anchor="middle"'
                   ' font-family="sans-serif">%s</text>'
                   % (_fmt(_ML + pw / 2), _fmt(_H - 8), x_label))
    if y_label:
        out.append('<text x="14" y="%s" font-size="12" text-anchor="middle"'
                   ' font-family="sans-serif" transform="rotate(-90 14 %s)">'
                   '%s</text>' % (_fmt(_MT + ph / 2), _fmt(_MT + ph / 2),
                                  y_label))
    for i, (xs, ys, color, label) in enumerate(curves):
        pts = " ".join(
            "%s,%s" % (_fmt(X(x)), _fmt(Y(y)))
            for x, y in zip(xs, ys) if math.isfinite(y)
        )
        out.append('<polyline points="%s" fill="none" stroke="%s"'
                   ' stroke-width="1.5"/>' % (pts, color))
        if label:
            ly = _MT + 14 + 16 * i
            out.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="%s"'
                       ' stroke-width="1.5"/>'
                       % (_fmt(_ML + pw - 150), _fmt(ly - 4),
                          _fmt(_ML + pw - 126), _fmt(ly - 4), color))
        if label:
            out.append('<text x="%s" y="%s" font-size="12"'
                       ' font-family="sans-serif">%s</text>'
                       % (_fmt(_ML + pw - 120), _fmt(ly), label))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_polyline_svg(path, curves, **kw) -> None:
    with open(path, "w") as fh:
        fh.write(polyline_svg(curves, **kw))
