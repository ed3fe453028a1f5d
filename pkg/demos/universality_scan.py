"""Scan vertical shifts t and measure how often zeta(s + it) approximates a target.

The target is g = 1 on a small disk centred at 0.75.  A shift is a hit when
the sup distance on the disk is below epsilon.  The fraction of hits on the
lattice t = 0, 0.05, ... is a desk-scale stand-in for the lower density in
the universality theorem.
"""
from zetameasure import RegionMask, ScanConfig, density_statistic, self_approximation_statistic, zeta_spec

zeta = zeta_spec()
K = RegionMask.disk(0.75, 0.03, 7)

for eps in (0.2, 0.5, 0.8):
    est = density_statistic(zeta, K, 1.0, ScanConfig(0.0, 500.0, 0.05, eps))
    print(f"epsilon {eps}: fraction {est.fraction:.4f}, best t {est.best_t:.2f} (sup {est.best_value:.3f})")

est = self_approximation_statistic(zeta, K, ScanConfig(0.0, 50.0, 0.01, 0.1))
print(f"self-approximation within 0.1: {est.hits} of {est.samples} shifts")
