"""Shift searches and finite-T density statistics.

Every statistic here is a finite-``T`` estimate on a uniform lattice of
shifts ``t_i = t_min + i * step``.  The lattice is cut into fixed blocks of
:data:`BLOCK` shifts; each block is evaluated with its own Euler--Maclaurin
plan, so the outcome depends only on the lattice and never on how blocks are
distributed over threads.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .complexgrid import GridSpec, RegionMask
from .errors import DomainError, PreconditionError, ResolutionError
from .lfun import HEIGHT_LIMIT, DirichletSeriesSpec, shift_grid, strip_of
from .reduction import PiecewiseConstantTarget, SampledFunction, reduce_to_piecewise

BLOCK = 128
THREADS_ENV = "ZETAMEASURE_THREADS"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _check_in_strip(spec: DirichletSeriesSpec, mask: RegionMask):
    if not mask:
        raise DomainError("empty compact set")
    strip = strip_of(spec)
    x0, x1, _, _ = mask.bounds()
    if not (strip.sigma_m < x0 and x1 < strip.right_edge):
        raise DomainError(
            f"set spans Re s in [{x0:g}, {x1:g}], outside the strip ({strip.sigma_m:g}, {strip.right_edge:g})")


def target_values(g, K: RegionMask) -> np.ndarray:
    """Target values on the cells of ``K``: accepts a piecewise target, a
    sampled function, an array aligned with ``K``, a callable of the cell
    centres, or a constant."""
    if isinstance(g, PiecewiseConstantTarget):
        return g.as_sampled().at(K)
    if isinstance(g, SampledFunction):
        return g.at(K)
    if isinstance(g, np.ndarray) and g.shape == (len(K),):
        return g.astype(complex)
    if callable(g):
        return np.broadcast_to(np.asarray(g(K.centers), dtype=complex), (len(K),)).copy()
    return np.full(len(K), complex(g))


def _check_t(ts):
    if np.any(np.abs(ts) > HEIGHT_LIMIT):
        raise DomainError(f"shift beyond height limit {HEIGHT_LIMIT:g}")


def sup_discrepancy(spec: DirichletSeriesSpec, K: RegionMask, g, t: float, target_error: float = 1e-8) -> float:
    """max over cell centres of ``|L(s + it) - g(s)|``."""
    _check_in_strip(spec, K)
    _check_t(np.array([t]))
    vals, _ = shift_grid(spec, K.centers, [t], target_error)
    return float(np.abs(vals[0] - target_values(g, K)).max())


def measure_discrepancy(spec: DirichletSeriesSpec, A: RegionMask, phi, t: float, epsilon: float,
                        target_error: float | None = None) -> float:
    """Area of the cells where ``|L(s + it) - phi(s)| > epsilon``."""
    _check_in_strip(spec, A)
    _check_t(np.array([t]))
    vals, _ = shift_grid(spec, A.centers, [t], target_error or epsilon / 10)
    return float(np.count_nonzero(np.abs(vals[0] - target_values(phi, A)) > epsilon) * A.grid.cell_area)


# --------------------------------------------------------------------------
# scans


@dataclass(frozen=True)
class ScanConfig:
    t_min: float
    t_max: float
    step: float
    epsilon: float
    refine_depth: int = 0
    mode: str = "faithful"
    target_error: float | None = None

    def __post_init__(self):
        if not self.t_max > self.t_min:
            raise PreconditionError("need t_min < t_max")
        if not self.step > 0 or not self.epsilon > 0:
            raise PreconditionError("step and epsilon must be positive")
        if self.refine_depth < 0:
            raise PreconditionError("refine_depth must be >= 0")
        if self.mode not in ("faithful", "exploratory"):
            raise PreconditionError("mode is 'faithful' or 'exploratory'")
        if max(abs(self.t_min), abs(self.t_max)) > HEIGHT_LIMIT:
            raise DomainError(f"scan range beyond height limit {HEIGHT_LIMIT:g}")

    @property
    def lattice(self) -> np.ndarray:
        count = int(math.floor((self.t_max - self.t_min) / self.step + 1e-9)) + 1
        return self.t_min + self.step * np.arange(count)

    @property
    def evaluator_error(self) -> float:
        return self.target_error if self.target_error is not None else self.epsilon / 10


@dataclass(frozen=True)
class DensityEstimate:
    epsilon: float
    T: float
    fraction: float
    hits: int
    samples: int
    step: float
    t_min: float = 0.0
    refine_depth: int = 0
    refined_fraction: float = 0.0
    best_t: float = 0.0
    best_value: float = 0.0


@dataclass(frozen=True)
class ScanProfile:
    """Per-shift discrepancy along the lattice (the CSV payload)."""

    t: np.ndarray
    value: np.ndarray
    hit: np.ndarray
    kind: str = "sup_discrepancy"


def _scan_values(spec, K: RegionMask, gvals: np.ndarray, ts: np.ndarray, target_error: float,
                 reducer, threads: int | None = None) -> np.ndarray:
    z = K.centers
    blocks = [ts[i:i + BLOCK] for i in range(0, ts.size, BLOCK)]

    def run(tb):
        vals, _ = shift_grid(spec, z, tb, target_error)
        return reducer(np.abs(vals - gvals[None, :]))

    threads = threads or default_threads()
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    return np.concatenate(parts) if parts else np.empty(0)


def _sup_reducer(d):
    return d.max(axis=1)


def _refined_measure(hit: np.ndarray, ts: np.ndarray, step: float, depth: int, is_hit) -> float:
    """Length of the hit set, linear between lattice points, with each
    hit/miss boundary located by ``depth`` bisections."""
    if hit.size < 2:
        return float(hit.sum()) * step
    both = hit[:-1] & hit[1:]
    total = float(both.sum()) * step
    edges = np.flatnonzero(hit[:-1] != hit[1:])
    for i in edges:
        lo, hi = ts[i], ts[i + 1]
        hit_lo = hit[i]
        for _ in range(depth):
            mid = 0.5 * (lo + hi)
            if is_hit(mid) == hit_lo:
                lo = mid
            else:
                hi = mid
        cross = 0.5 * (lo + hi)
        total += (cross - ts[i]) if hit_lo else (ts[i + 1] - cross)
    return total


def _estimate(config: ScanConfig, ts, values, hit, refined) -> DensityEstimate:
    T = float(ts[-1] - ts[0]) if ts.size > 1 else config.step
    ib = int(np.argmin(values))
    return DensityEstimate(
        epsilon=config.epsilon, T=config.t_max - config.t_min, fraction=int(hit.sum()) / hit.size,
        hits=int(hit.sum()), samples=int(hit.size), step=config.step, t_min=config.t_min,
        refine_depth=config.refine_depth, refined_fraction=float(min(1.0, refined / T)),
        best_t=float(ts[ib]), best_value=float(values[ib]),
    )


def _require_zero_free(g, gvals: np.ndarray, mode: str):
    if mode != "faithful":
        return
    if isinstance(g, PiecewiseConstantTarget) and not g.zero_free:
        raise PreconditionError("theorem-faithful scan needs a zero-free target")
    if np.any(gvals == 0):
        raise PreconditionError("theorem-faithful scan needs a zero-free target; use mode='exploratory'")


def density_statistic(spec: DirichletSeriesSpec, K: RegionMask, g, config: ScanConfig,
                      threads: int | None = None, return_profile: bool = False):
    """Share of lattice shifts with ``sup_K |L(s + it) - g(s)| < epsilon``."""
    _check_in_strip(spec, K)
    gvals = target_values(g, K)
    _require_zero_free(g, gvals, config.mode)
    ts = config.lattice
    values = _scan_values(spec, K, gvals, ts, config.evaluator_error, _sup_reducer, threads)
    hit = values < config.epsilon
    refined = _refined_measure(
        hit, ts, config.step, config.refine_depth,
        lambda t: sup_discrepancy(spec, K, gvals, t, config.evaluator_error) < config.epsilon)
    est = _estimate(config, ts, values, hit, refined)
    if return_profile:
        return est, ScanProfile(ts, values, hit, "sup_discrepancy")
    return est


def self_approximation_statistic(spec: DirichletSeriesSpec, K: RegionMask, config: ScanConfig,
                                 threads: int | None = None, return_profile: bool = False):
    """Density of shifts with ``sup_K |L(s + it) - L(s)| < epsilon``."""
    _check_in_strip(spec, K)
    own, _ = shift_grid(spec, K.centers, [0.0], config.evaluator_error / 10)
    g = SampledFunction(K, own[0])
    return density_statistic(spec, K, g, config, threads, return_profile)


def measure_density_statistic(spec: DirichletSeriesSpec, A: RegionMask, phi, epsilon: float, config: ScanConfig,
                              measure_epsilon: float | None = None, threads: int | None = None,
                              return_profile: bool = False):
    """Share of lattice shifts with ``meas{s in A: |L(s+it) - phi(s)| > epsilon} < measure_epsilon``.

    ``measure_epsilon`` defaults to ``epsilon`` (the single-epsilon form).
    """
    _check_in_strip(spec, A)
    meps = epsilon if measure_epsilon is None else measure_epsilon
    if not epsilon > 0 or not meps > 0:
        raise PreconditionError("thresholds must be positive")
    pvals = target_values(phi, A)
    cell = A.grid.cell_area
    ts = config.lattice
    err = config.target_error if config.target_error is not None else epsilon / 10
    values = _scan_values(spec, A, pvals, ts, err,
                          lambda d: np.count_nonzero(d > epsilon, axis=1) * cell, threads)
    hit = values < meps
    refined = _refined_measure(
        hit, ts, config.step, config.refine_depth,
        lambda t: measure_discrepancy(spec, A, pvals, t, epsilon, err) < meps)
    est = _estimate(config, ts, values, hit, refined)
    est = DensityEstimate(**{**asdict(est), "epsilon": epsilon})
    if return_profile:
        return est, ScanProfile(ts, values, hit, "measure_discrepancy")
    return est


# --------------------------------------------------------------------------
# shift sequences


@dataclass(frozen=True)
class ShiftEntry:
    n: int
    t_n: float | None
    sup_error: float
    measure_error: float
    found: bool
    composite_ok: bool = False
    support_area: float = 0.0


@dataclass(frozen=True)
class ShiftSequenceResult:
    entries: tuple[ShiftEntry, ...]
    T_max: float
    step: float


def find_shift_sequence(spec: DirichletSeriesSpec, f: SampledFunction, n_max: int, T_max: float, step: float,
                        threads: int | None = None) -> ShiftSequenceResult:
    """For ``n = 1..n_max`` reduce ``f`` to ``g_n`` on ``K_n`` and look for a
    shift with ``sup_{K_n} |g_n - L(. + it)| < 1/n``.

    The best lattice shift is kept.  A success is checked against the
    composite bound ``meas{|f - L(. + it_n)| > 3/n} < 3/n`` on the whole
    domain, with one boundary cell layer of slack.
    """
    A = f.domain
    _check_in_strip(spec, A)
    if n_max < 1:
        raise PreconditionError("n_max must be >= 1")
    slack = A.boundary_layer().area
    entries = []
    for n in range(1, n_max + 1):
        try:
            g, _ = reduce_to_piecewise(f, n)
        except ResolutionError as exc:
            raise ResolutionError(f"n={n}: {exc}", required_k=exc.required_k) from exc
        cfg = ScanConfig(0.0, T_max, step, 1.0 / n)
        est = density_statistic(spec, g.support, g, cfg, threads)
        found = est.best_value < 1.0 / n
        if found:
            t_n = est.best_t
            sup = sup_discrepancy(spec, g.support, g, t_n, cfg.evaluator_error)
            meas = measure_discrepancy(spec, A, f, t_n, 3.0 / n, cfg.evaluator_error)
            entries.append(ShiftEntry(n, t_n, sup, meas, sup < 1.0 / n, meas < 3.0 / n + slack, g.support.area))
        else:
            entries.append(ShiftEntry(n, None, est.best_value, float("nan"), False, False, g.support.area))
    return ShiftSequenceResult(tuple(entries), float(T_max), float(step))


# --------------------------------------------------------------------------
# affine placement


@dataclass(frozen=True)
class AffineMap:
    """``z -> a z + b`` with ``a > 0``."""

    a: float
    b: complex

    def __call__(self, z):
        return self.a * np.asarray(z) + self.b

    def inverse(self, w):
        return (np.asarray(w) - self.b) / self.a

    def pullback(self, g):
        """``g o l^-1``: a target on the placed set from one on the original."""
        return lambda w: g(self.inverse(w))


def place_compact(K: RegionMask, sigma_star: float, m: float) -> tuple[AffineMap, RegionMask]:
    """Map ``K`` into the open box ``(sigma_star, 1) x (0, m)``.

    A set already inside the box is left alone; otherwise it is scaled to half
    the box (so the image keeps a margin) and centred.  The image is
    resampled on a dyadic grid at least as fine as ``a`` times the original.
    """
    if not K:
        raise DomainError("cannot place an empty set")
    if not m > 0:
        raise DomainError("box height m must be positive")
    if not sigma_star < 1:
        raise DomainError("sigma_star must be < 1")
    x0, x1, y0, y1 = K.bounds()
    if sigma_star < x0 and x1 < 1 and 0 < y0 and y1 < m:
        return AffineMap(1.0, 0j), K
    bw, bh = 1 - sigma_star, m
    w, h = x1 - x0, y1 - y0
    a = 0.5 * min(bw / w, bh / h)
    centre = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    b = complex(sigma_star + 0.5 * bw, 0.5 * bh) - a * centre
    amap = AffineMap(a, b)
    k = K.grid.k + max(0, math.ceil(-math.log2(a)))
    lo = amap(complex(x0, y0))
    hi = amap(complex(x1, y1))
    grid = GridSpec.covering(lo.real, hi.real, lo.imag, hi.imag, k)
    pre = amap.inverse(grid.all_centers())
    # map the preimage of every fine centre back to a cell of K
    col = np.floor((pre.real - K.grid.origin.real) / K.grid.cell_side).astype(np.int64)
    row = np.floor((pre.imag - K.grid.origin.imag) / K.grid.cell_side).astype(np.int64)
    inside = (col >= 0) & (col < K.grid.width) & (row >= 0) & (row < K.grid.height)
    idx = np.where(inside, row * K.grid.width + col, -1)
    hit = inside.copy()
    hit[inside] = K.contains_index(idx[inside])
    return amap, RegionMask(grid, np.flatnonzero(hit))


# --------------------------------------------------------------------------
# output


def profile_to_csv(profile: ScanProfile) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["t", profile.kind, "hit"])
    for t, v, h in zip(profile.t, profile.value, profile.hit):
        wr.writerow([repr(float(t)), repr(float(v)), int(h)])
    return buf.getvalue()


def profile_from_csv(text: str) -> ScanProfile:
    rows = list(csv.reader(io.StringIO(text)))
    kind = rows[0][1]
    data = rows[1:]
    return ScanProfile(np.array([float(r[0]) for r in data]), np.array([float(r[1]) for r in data]),
                       np.array([bool(int(r[2])) for r in data]), kind)


def estimate_to_json(est: DensityEstimate, config: ScanConfig | None = None, **extra) -> str:
    doc = {"estimate": asdict(est)}
    if config is not None:
        doc["config"] = asdict(config)
    doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True)
