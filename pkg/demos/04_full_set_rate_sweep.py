"""Sweep the cluster count and find how far a fleet can be split.

More clusters mean more parallel repair channels, but each cluster has fewer
members and a higher risk that some packet lands in none of them. The sweep
shows the rate of complete clusters falling as the split grows and rising
with the delivery rate; the knee of each curve is the useful operating point.
"""

import numpy as np

from uavex import ScenarioConfig, full_set_rate_samples

RUNS = 300

print("fraction of clusters holding a full packet set (10 UAVs, 6 packets):")
header = "  rho  " + "".join(f"  N={n}" for n in range(1, 9))
print(header)
for rho in (0.5, 0.6, 0.7, 0.8):
    cells = []
    for n in range(1, 9):
        config = ScenarioConfig(10, 6, rho, n, seed=2)
        rate = full_set_rate_samples(config, RUNS).mean()
        cells.append(f"{rate:5.2f}")
    print(f"  {rho:.1f}  " + " ".join(cells))

print("\nsame sweep for the larger fleet (20 UAVs, 10 packets, rho=0.6):")
for n in (2, 4, 6, 8, 10):
    config = ScenarioConfig(20, 10, 0.6, n, seed=2)
    samples = full_set_rate_samples(config, RUNS)
    se = samples.std(ddof=1) / np.sqrt(RUNS)
    print(f"  N={n:>2}: {samples.mean():.3f} +- {se:.3f}")
print("\nsix clusters is the largest split that still keeps the rate near 1.")
