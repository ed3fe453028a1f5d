"""Zero counting by the argument principle, and Rouche comparison.

Counts refer to ``(s - 1)^k L(s)`` where ``k`` is the pole order at 1, so a
contour may pass through ``s = 1`` (the bottom edge of ``[0.6, 1.2] x [0, T]``
does).  The phase is tracked edge by edge; a segment is bisected until the
phase change across it is below pi/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContourError, DominanceError, PreconditionError
from .lfun import DirichletSeriesSpec, completed_values, strip_of

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class ContourTrace:
    points: np.ndarray
    values: np.ndarray
    winding: float


def _trace_edge(spec, a: complex, b: complex, resolution: float, target_error: float,
                min_modulus: float, max_depth: int):
    n = max(4, int(math.ceil(abs(b - a) / resolution)))
    u = np.linspace(0.0, 1.0, n + 1)
    vals, bnds = completed_values(spec, a + (b - a) * u, target_error)
    for depth in range(max_depth + 1):
        small = np.abs(vals) <= np.maximum(min_modulus, 10 * bnds)
        if np.any(small):
            i = int(np.argmax(small))
            z = a + (b - a) * u[i]
            raise ContourError(f"contour passes within evaluator resolution of a zero near {z:.6g}",
                               segment=(a, b))
        dphi = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(dphi) >= HALF_PI
        if not np.any(bad):
            return u, vals, float(dphi.sum())
        if depth == max_depth:
            i = int(np.argmax(bad))
            raise ContourError(
                f"phase still jumps by {dphi[i]:.3f} after {max_depth} bisections on "
                f"[{a + (b - a) * u[i]:.6g}, {a + (b - a) * u[i + 1]:.6g}]", segment=(a, b))
        mids = 0.5 * (u[:-1][bad] + u[1:][bad])
        mv, mb = completed_values(spec, a + (b - a) * mids, target_error)
        u = np.concatenate([u, mids])
        order = np.argsort(u, kind="stable")
        u = u[order]
        vals = np.concatenate([vals, mv])[order]
        bnds = np.concatenate([bnds, mb])[order]
    raise AssertionError("unreachable")


def contour_winding(spec: DirichletSeriesSpec, sigma_lo: float, sigma_hi: float, t_lo: float, t_hi: float,
                    resolution: float = 0.1, target_error: float = 1e-8, min_modulus: float = 1e-12,
                    max_depth: int = 30) -> ContourTrace:
    if not (sigma_hi > sigma_lo and t_hi > t_lo):
        raise PreconditionError("degenerate rectangle")
    if not resolution > 0:
        raise PreconditionError("resolution must be positive")
    corners = [complex(sigma_lo, t_lo), complex(sigma_hi, t_lo), complex(sigma_hi, t_hi), complex(sigma_lo, t_hi)]
    pts, vals, total = [], [], 0.0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        u, v, w = _trace_edge(spec, a, b, resolution, target_error, min_modulus, max_depth)
        pts.append(a + (b - a) * u[:-1])
        vals.append(v[:-1])
        total += w
    return ContourTrace(np.concatenate(pts), np.concatenate(vals), total / (2 * math.pi))


def zero_count_rectangle(spec: DirichletSeriesSpec, sigma_lo: float, sigma_hi: float, t_lo: float, t_hi: float,
                         resolution: float = 0.1, **kw) -> int:
    """Number of zeros of ``(s-1)^k L(s)`` inside the rectangle."""
    trace = contour_winding(spec, sigma_lo, sigma_hi, t_lo, t_hi, resolution, **kw)
    n = round(trace.winding)
    if abs(trace.winding - n) > 0.05:
        raise ContourError(f"winding {trace.winding:.4f} is not close to an integer")
    return int(n)


def winding_number(samples) -> int:
    """Winding number about 0 of the closed polygon through ``samples``."""
    z = np.asarray(samples, dtype=complex)
    if np.any(z == 0):
        raise ContourError("curve passes through 0")
    dphi = np.angle(np.roll(z, -1) / z)
    if np.any(np.abs(dphi) >= math.pi - 1e-9):
        raise ContourError("samples too sparse to track the argument")
    w = dphi.sum() / (2 * math.pi)
    return int(round(w))


@dataclass(frozen=True)
class RoucheResult:
    certified: bool
    winding_f: int
    winding_g: int

    def __bool__(self):
        return self.certified


def rouche_compare(f_samples, g_samples) -> RoucheResult:
    """Certify equal zero counts from ``|f - g| < |g|`` along a closed contour."""
    f = np.asarray(f_samples, dtype=complex)
    g = np.asarray(g_samples, dtype=complex)
    if f.shape != g.shape or f.ndim != 1 or f.size < 3:
        raise PreconditionError("need matching 1-d sample arrays of length >= 3")
    viol = np.abs(f - g) >= np.abs(g)
    if np.any(viol):
        i = int(np.argmax(viol))
        raise DominanceError(f"|f - g| >= |g| at sample {i}", index=i)
    wf, wg = winding_number(f), winding_number(g)
    if wf != wg:
        raise ContourError(f"dominance holds but windings differ ({wf} vs {wg}); contour undersampled")
    return RoucheResult(True, wf, wg)


@dataclass(frozen=True)
class IntervalCensus:
    sigma_star: float
    m: float
    counts: tuple[int, ...]

    @property
    def nu(self) -> int:
        return sum(1 for c in self.counts if c == 0)

    @property
    def fraction(self) -> float:
        return self.nu / len(self.counts)


def interval_census(spec: DirichletSeriesSpec, sigma_star: float, m: float, n: int,
                    resolution: float = 0.1, **kw) -> IntervalCensus:
    strip = strip_of(spec)
    if not (strip.sigma_m < sigma_star < 1):
        raise PreconditionError(f"sigma_star must lie in ({strip.sigma_m}, 1)")
    if not m > 0 or n < 1:
        raise PreconditionError("need m > 0 and n >= 1")
    counts = []
    for j in range(1, n + 1):
        try:
            counts.append(zero_count_rectangle(spec, sigma_star, 1.0, (j - 1) * m, j * m, resolution, **kw))
        except ContourError as exc:
            raise ContourError(f"interval I_{j} = ({(j - 1) * m:g}, {j * m:g}): {exc}", exc.segment) from exc
    return IntervalCensus(float(sigma_star), float(m), tuple(counts))


def zero_free_interval_fraction(spec: DirichletSeriesSpec, sigma_star: float, m: float, n: int,
                                resolution: float = 0.1, **kw) -> float:
    """nu(n)/n: share of the intervals I_j = ((j-1)m, jm), j <= n, over which
    L has no zero with real part >= sigma_star (up to the line sigma = 1)."""
    return interval_census(spec, sigma_star, m, n, resolution, **kw).fraction
