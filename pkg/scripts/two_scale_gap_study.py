"""Per-step decay of the block-occupation observable along two subsequences.

f is the 0/1 indicator of the spatial blocks (1,2), (4,12), (144,576), ...
with c_1 = 1, d_k = (k+1) c_k, c_{k+1} = d_k^2, and the event asks the
walk to spend a fraction > 1 - eps of its time on f = 1 sites.  Because
the walk starts on an f = 0 site and can move at most one step per unit
time, the event is flat-out impossible for n <= 1/eps, and block k+1 is
unreachable before time c_{k+1}: at n = d_2 = 12 the walk must hug the
narrow low blocks, while at n = c_3 = 144 it can sit in the comfortable
block (4,12) for almost the whole word.  The per-step log-probabilities
at the two scales settle on visibly different levels, so no single
exponential rate fits both subsequences -- which is what the d/c pair
(12, 144) in the acceptance gate certifies.

Run from the repo root:  python3 scripts/two_scale_gap_study.py [pbar]
"""

import math
import sys

from ldwalk.exact import (
    OBSERVABLE_DP_CAP,
    BlockObservable,
    counterexample_blocks,
    observable_ball_log_prob,
)
from ldwalk.state_space import TransitionProfile


def scale_points(blocks):
    pts = []
    for k, (c, d) in enumerate(blocks, start=1):
        pts.append(("c_%d" % k, c))
        pts.append(("d_%d" % k, d))
    return pts


def per_step(prof, f, eps, n):
    return observable_ball_log_prob(prof, f, 1.0, eps, n) / n


def main():
    pbar = float(sys.argv[1]) if len(sys.argv) > 1 else 0.7
    prof = TransitionProfile.homogeneous(pbar)
    blocks = counterexample_blocks(4)
    f = BlockObservable(tuple(blocks))
    eps = 0.25

    print("pbar=%.2f eps=%.2f   blocks: %s ..." % (pbar, eps, blocks[:3]))
    print("  scale      n     (1/n) log P(occupation > %.2f)" % (1 - eps))
    for label, n in scale_points(blocks):
        if n > OBSERVABLE_DP_CAP:
            continue
        v = per_step(prof, f, eps, n)
        note = "   (impossible: first letter is off-block)" if math.isinf(v) else ""
        print("  %-6s %6d     %+.10f%s" % (label, n, v, note))

    print()
    print("  gap |v(d_2)| - |v(c_3)| across eps:")
    for eps in (0.15, 0.2, 0.25, 0.3, 0.35):
        v12 = per_step(prof, f, eps, 12)
        v144 = per_step(prof, f, eps, 144)
        print("    eps=%.2f   %+.6f vs %+.6f   gap %.6f" %
              (eps, v12, v144, abs(v12) - abs(v144)))


if __name__ == "__main__":
    main()
