"""See how the subwindow layout turns need into channel priority.

The 9207 us contention window is cut into M equal subwindows. A node with m
relevant packets draws inside subwindow M - m + 1, so whoever has the most
lost packets (or can supply the most) always fires first; a plain CSMA node
draws anywhere in the window.
"""

import numpy as np

from uavex import (
    draw_backoff,
    draw_baseline_backoff,
    stream,
    subwindow_bounds,
    subwindow_for_count,
)

M = 6
WINDOW = 9207

print(f"window {WINDOW} us over {M} subwindows:")
for m_lost in range(M, 0, -1):
    k = subwindow_for_count(M, m_lost)
    lo, hi = subwindow_bounds(M, k, WINDOW)
    print(f"  {m_lost} relevant packets -> subwindow {k}: ({lo:>5}, {hi:>5}] us")

rng = stream(0, 0, "demo")
print("\n2000 draws per class, observed ranges:")
for m_lost in (6, 3, 1):
    draws = [draw_backoff(M, m_lost, WINDOW, rng).duration_us for _ in range(2000)]
    print(f"  m={m_lost}: min {min(draws):>5}, mean {np.mean(draws):7.1f}, max {max(draws):>5}")
baseline = [draw_baseline_backoff(WINDOW, rng).duration_us for _ in range(2000)]
print(f"  plain: min {min(baseline):>5}, mean {np.mean(baseline):7.1f}, max {max(baseline):>5}")

print("\npriority is strict, not just statistical:")
needy = max(draw_backoff(M, 4, WINDOW, rng).duration_us for _ in range(1000))
casual = min(draw_backoff(M, 2, WINDOW, rng).duration_us for _ in range(1000))
print(f"  worst draw with 4 lost packets:  {needy} us")
print(f"  best draw with 2 lost packets:   {casual} us")
