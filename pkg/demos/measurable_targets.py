"""Approximation in measure of a discontinuous target.

A step function f on a square is first reduced to a zero-free piecewise
constant target on a set with connected complement; the shift sequence then
looks for t_n with |zeta(s + i t_n) - f(s)| < 3/n off a set of measure 3/n.
"""
import numpy as np

from zetameasure import RegionMask, SampledFunction, find_shift_sequence, reduce_to_piecewise, zeta_spec

A = RegionMask.rect(0.7, 0.8, 0.0, 0.1, 6)
f = SampledFunction.from_callable(A, lambda z: np.where(z.real < 0.75, 0.5, 1.0))

g, report = reduce_to_piecewise(f, 2)
print(f"pieces {len(g.pieces)}, sup error {report.max_error_on_support:.3f}, area lost {report.area_lost:.4f}")

for e in find_shift_sequence(zeta_spec(), f, 2, 2000.0, 0.05).entries:
    if e.found:
        print(f"n = {e.n}: t_n = {e.t_n:.2f}, sup error on the support {e.sup_error:.3f}, composite bound ok: {e.composite_ok}")
    else:
        print(f"n = {e.n}: no shift found up to T_max")
