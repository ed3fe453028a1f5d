"""Evaluate zeta with certified error bounds, then count zeros in boxes.

The evaluator returns a value together with a bound on its absolute error.
The zero counter applies the argument principle to (s - 1) zeta(s) along a
rectangle and refuses to answer when the contour passes too close to a zero.
"""
import math

from zetameasure import zero_count_rectangle, zero_free_interval_fraction, zeta_eval, zeta_spec

res = zeta_eval(2, 1e-12)
print(f"zeta(2)            = {res.value.real:.16f}  (bound {res.error_bound:.1e})")
print(f"pi^2 / 6           = {math.pi ** 2 / 6:.16f}")
print(f"|zeta(1/2 + 14.1347i)| = {abs(zeta_eval(0.5 + 14.134725141734693j).value):.2e}")

zeta = zeta_spec()
print("zeros in [0, 0.99] x [5, 30]:", zero_count_rectangle(zeta, 0.0, 0.99, 5, 30))
print("zeros in [0.6, 1.2] x [0, 100]:", zero_count_rectangle(zeta, 0.6, 1.2, 0, 100))

# fraction of intervals ((j-1)m, jm] free of zeros right of sigma = 0.6
print("zero-free interval fraction:", zero_free_interval_fraction(zeta, 0.6, 10, 10))
