"""Polynomial approximation on grid compacts and zero-free approximation in measure.

Polynomials are held in the shifted, scaled variable ``w = (z - center) / scale``
where the disk ``|z - center| <= scale`` encloses the compact; that keeps
monomial coefficients of moderate size for sets that fill their disk.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .complexgrid import RegionMask, carve_connectors, count_holes, is_complement_connected
from .errors import (ApproximationFailure, DegreeLimitError, PreconditionError, ResolutionError)
from .reduction import SampledFunction, zero_split

CONDITION_LIMIT = 1e12
MAX_J = 1 << 40


@dataclass(frozen=True)
class Poly:
    """``sum_k c_k w^k`` with ``w = (z - center) / scale``."""

    coefficients: tuple[complex, ...]
    center: complex = 0j
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise PreconditionError("scale must be positive")
        c = list(self.coefficients) or [0j]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(complex(v) for v in c))

    @classmethod
    def constant(cls, c: complex) -> "Poly":
        return cls((complex(c),))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1 if any(self.coefficients) else -1

    def __call__(self, z):
        w = (np.asarray(z, dtype=complex) - self.center) / self.scale
        out = np.zeros(w.shape, dtype=complex)
        for c in reversed(self.coefficients):
            out = out * w + c
        return out

    def to_standard(self) -> np.ndarray:
        """Ascending coefficients in ``z`` itself (may be badly conditioned)."""
        out = np.zeros(1, dtype=complex)
        base = np.array([-self.center / self.scale, 1 / self.scale], dtype=complex)
        power = np.ones(1, dtype=complex)
        for c in self.coefficients:
            out = np.pad(out, (0, max(0, power.size - out.size)))
            out[:power.size] += c * power
            power = np.convolve(power, base)
        return out

    def to_json(self) -> str:
        return json.dumps({
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
            "center": [self.center.real, self.center.imag],
            "scale": self.scale,
        })

    @classmethod
    def from_json(cls, text: str) -> "Poly":
        doc = json.loads(text)
        if isinstance(doc, list):
            return cls(tuple(complex(a, b) for a, b in doc))
        cen = doc.get("center", [0.0, 0.0])
        return cls(tuple(complex(a, b) for a, b in doc["coefficients"]), complex(*cen), float(doc.get("scale", 1.0)))


def _mgs(V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Modified Gram--Schmidt with one re-orthogonalisation pass."""
    m, n = V.shape
    Q = V.astype(complex).copy()
    R = np.zeros((n, n), dtype=complex)
    for k in range(n):
        for _ in range(2):
            for i in range(k):
                r = np.vdot(Q[:, i], Q[:, k])
                R[i, k] += r
                Q[:, k] -= r * Q[:, i]
        R[k, k] = np.linalg.norm(Q[:, k])
        if R[k, k] == 0:
            raise DegreeLimitError(f"monomial column {k} is dependent on the previous ones")
        Q[:, k] /= R[k, k]
    return Q, R


def enclosing_disk(mask: RegionMask) -> tuple[complex, float]:
    x0, x1, y0, y1 = mask.bounds()
    c = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    return c, 0.5 * math.hypot(x1 - x0, y1 - y0)


def mergelyan_fit(g: SampledFunction, degree: int, check_complement: bool = True) -> tuple[Poly, float]:
    """Least-squares polynomial of the given degree through the cell-centre
    samples; returns the polynomial and its sup error over the centres."""
    K = g.domain
    if degree < 0:
        raise PreconditionError("degree must be >= 0")
    if not K:
        raise PreconditionError("empty compact set")
    if check_complement and not is_complement_connected(K):
        raise PreconditionError("the compact set must have connected complement")
    if degree + 1 > len(K):
        raise DegreeLimitError(f"degree {degree} needs more than {len(K)} sample points")
    center, scale = enclosing_disk(K)
    w = (K.centers - center) / scale
    V = w[:, None] ** np.arange(degree + 1)
    norms = np.linalg.norm(V, axis=0)
    Q, R = _mgs(V / norms)
    cond = np.linalg.cond(R)
    if not cond < CONDITION_LIMIT:
        raise DegreeLimitError(f"basis condition {cond:.3g} exceeds {CONDITION_LIMIT:g} at degree {degree}")
    y = np.linalg.solve(R, Q.conj().T @ g.values)
    poly = Poly(tuple(y / norms), center, scale)
    return poly, float(np.abs(poly(K.centers) - g.values).max())


@dataclass(frozen=True)
class ZeroFreeReport:
    K_eps: RegionMask
    sup_error_on_Keps: float
    min_modulus_on_Keps: float
    min_modulus_on_K: float
    area_removed: float
    j: int = 0
    degree: int = 0
    fit_target: float = 0.0


def _gap_area(g: SampledFunction, j: int) -> float:
    mod = np.abs(g.values)
    return float(np.count_nonzero((mod > 1.0 / j) & (mod < 2.0 / j))) * g.domain.grid.cell_area


def zero_free_approx_in_measure(g: SampledFunction, epsilon: float, degree: int = 4, max_degree: int = 60,
                                tolerance: float = 0.0) -> tuple[Poly, ZeroFreeReport]:
    """Polynomial close to ``g`` off a set of measure ``< 2 epsilon`` and
    certified zero-free on the kept set ``K_eps``.

    ``g`` is replaced by ``1/j`` where ``|g| <= 1/j``; the band
    ``1/j < |g| < 2/j`` and corridor cells are dropped.  The fit aims for
    ``min(epsilon/2, min|g_eps|/2)`` so that ``|p| > 0`` on ``K_eps``.
    """
    if not epsilon > 0:
        raise PreconditionError("epsilon must be positive")
    K = g.domain
    if not K:
        raise PreconditionError("empty compact set")
    cell = K.grid.cell_area
    j0 = math.ceil(1.0 / epsilon)
    mod = np.abs(g.values)

    if np.all(mod <= tolerance):
        p = Poly.constant(1.0 / j0)
        pv = np.abs(p(K.centers))
        return p, ZeroFreeReport(K, 0.0, float(pv.min()), float(pv.min()), 0.0, j0, 0, epsilon / 2)

    j = j0
    while _gap_area(g, j) >= epsilon:
        j += 1 if j < 4 * j0 else j // 4
        if j > MAX_J:
            raise ResolutionError("no plateau level j gives a gap area below epsilon on this grid")
    A, B = zero_split(g, j)
    K0 = A | B
    holes = count_holes(K0)
    K_eps = carve_connectors(K0, epsilon / holes) if holes else K0
    geps = np.where(A.contains_index(K_eps.index), 1.0 / j, g.at(K_eps))
    target = min(epsilon / 2, float(np.abs(geps).min()) / 2)
    sampled = SampledFunction(K_eps, geps)

    best = None
    for d in range(degree, max_degree + 1, 2):
        try:
            p, err = mergelyan_fit(sampled, d, check_complement=False)
        except DegreeLimitError:
            break
        if best is None or err < best[1]:
            best = (p, err, d)
        if err < target:
            break
    if best is None or best[1] >= target:
        raise ApproximationFailure(
            f"degree ladder up to {max_degree} did not reach fit error {target:.3g}",
            best_error=float("inf") if best is None else best[1])
    p, err, d = best
    return p, ZeroFreeReport(
        K_eps=K_eps,
        sup_error_on_Keps=err,
        min_modulus_on_Keps=float(np.abs(p(K_eps.centers)).min()),
        min_modulus_on_K=float(np.abs(p(K.centers)).min()),
        area_removed=(len(K) - len(K_eps)) * cell,
        j=j, degree=d, fit_target=target,
    )
