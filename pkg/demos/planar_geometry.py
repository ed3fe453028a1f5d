"""Shells, boundary densities and harmonic approximation in measure.

A thin connected ring around a circle inside the unit disk has small density
at every boundary point.  The harmonic part fits a real step function with
fundamental solutions plus a harmonic polynomial and reports the area where
the fit misses by more than 3/n.
"""
import numpy as np

from zetameasure import (DomainSpec, RegionMask, SampledFunction, harmonic_measure_sequence, lens_area,
                         shell_construct, verify_density)

print(f"lens area h = d = 1: {lens_area(1, 1):.6f}")

U = DomainSpec.disk(0, 1, 7)
shell = shell_construct((0j, 0.3), U, 0.01, 0.1)
rows = verify_density(shell, U, 0.01, [1.0, 0.5], U.boundary_samples[::16])
print(f"shell at level {shell.grid.k}: area {shell.area:.2e}, largest density ratio {max(r for *_, r in rows):.2e}")

E = RegionMask.rect(0, 1, 0, 0.5, 6)
v = SampledFunction.from_callable(E, lambda z: np.where(z.real < 0.5, 0.0, 1.0))
for n, (fit, exceed) in zip((1, 2, 4), harmonic_measure_sequence(v, ns=[1, 2, 4])):
    print(f"n = {n}: exceedance area {exceed:.4f} (bound {3 / n:.2f}), fit error {fit.fit_error:.1e}")
