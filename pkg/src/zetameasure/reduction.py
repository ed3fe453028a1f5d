"""Reduce a sampled measurable target to a zero-free piecewise constant one.

The pipeline follows the approximation-in-measure argument:

1. discard cells where the sampled function oscillates too much (a finite
   stand-in for Luzin's theorem),
2. tile by dyadic squares, keep the interior of each square and the cells
   whose value is within ``1/n`` of the square's anchor value,
3. assign each square a non-zero constant ``b_Q`` close to the anchor value,
4. cut corridors so that the support has connected complement.

All area losses are tracked and the total is kept below ``3/n``.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .complexgrid import (GridSpec, RegionMask, _neighbour_table, carve_connectors, count_holes,
                          is_complement_connected, square_ids)
from .errors import InfeasibleBudgetError, PreconditionError, ResolutionError


class SampledFunction:
    """One complex value per marked cell of ``domain`` (cell-centre samples)."""

    __slots__ = ("domain", "values")

    def __init__(self, domain: RegionMask, values):
        vals = np.asarray(values, dtype=complex).ravel()
        if vals.shape != (len(domain),):
            raise PreconditionError(f"need {len(domain)} values, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("sampled values must be finite")
        vals.setflags(write=False)
        self.domain = domain
        self.values = vals

    @classmethod
    def from_callable(cls, domain: RegionMask, fn) -> "SampledFunction":
        z = domain.centers
        vals = np.broadcast_to(np.asarray(fn(z), dtype=complex), z.shape)
        return cls(domain, vals)

    @classmethod
    def constant(cls, domain: RegionMask, c: complex) -> "SampledFunction":
        return cls(domain, np.full(len(domain), complex(c)))

    def __len__(self):
        return len(self.domain)

    def restrict(self, mask: RegionMask) -> "SampledFunction":
        return SampledFunction(mask, self.values[self.domain.locate(mask.index)])

    def at(self, mask: RegionMask) -> np.ndarray:
        """Values on the cells of ``mask`` (which must lie in the domain)."""
        return self.values[self.domain.locate(mask.index)]


# --------------------------------------------------------------------------
# piecewise constant targets


@dataclass(frozen=True)
class PiecewiseConstantTarget:
    support: RegionMask
    pieces: tuple[tuple[RegionMask, complex], ...]
    zero_free: bool

    def __post_init__(self):
        total = sum(len(m) for m, _ in self.pieces)
        if total != len(self.support):
            raise PreconditionError("pieces do not cover the support exactly")
        if self.pieces:
            allidx = np.concatenate([m.index for m, _ in self.pieces])
            if np.unique(allidx).size != allidx.size or not np.array_equal(np.sort(allidx), self.support.index):
                raise PreconditionError("pieces must be disjoint and cover the support")
        if self.zero_free and any(v == 0 for _, v in self.pieces):
            raise PreconditionError("zero_free target has a zero-valued piece")

    @classmethod
    def build(cls, grid: GridSpec, pieces, zero_free: bool | None = None) -> "PiecewiseConstantTarget":
        pieces = tuple((m, complex(v)) for m, v in pieces if len(m))
        idx = np.concatenate([m.index for m, _ in pieces]) if pieces else np.empty(0, np.int64)
        if zero_free is None:
            zero_free = all(v != 0 for _, v in pieces)
        return cls(RegionMask(grid, idx), pieces, zero_free)

    @property
    def values(self) -> np.ndarray:
        """Piece values expanded onto ``support.index`` order."""
        out = np.empty(len(self.support), dtype=complex)
        for m, v in self.pieces:
            out[self.support.locate(m.index)] = v
        return out

    def as_sampled(self) -> SampledFunction:
        return SampledFunction(self.support, self.values)

    def to_text(self) -> str:
        g = self.support.grid
        lines = [f"grid {float(g.origin.real)!r} {float(g.origin.imag)!r} {float(g.cell_side)!r} {g.width} {g.height}",
                 f"zero_free {int(self.zero_free)}"]
        for m, v in self.pieces:
            idx = m.index
            brk = np.flatnonzero(np.diff(idx) != 1)
            starts = np.concatenate([idx[:1], idx[brk + 1]])
            ends = np.concatenate([idx[brk], idx[-1:]]) + 1
            runs = " ".join(f"{s}:{e - s}" for s, e in zip(starts, ends))
            lines.append(f"piece {float(v.real)!r} {float(v.imag)!r} {runs}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PiecewiseConstantTarget":
        lines = [ln.split() for ln in text.splitlines() if ln.strip()]
        head = lines[0]
        if head[0] != "grid" or len(head) != 6 or lines[1][0] != "zero_free":
            raise PreconditionError("malformed piecewise target text")
        grid = GridSpec(complex(float(head[1]), float(head[2])), float(head[3]), int(head[4]), int(head[5]))
        pieces = []
        for ln in lines[2:]:
            if ln[0] != "piece":
                raise PreconditionError(f"unexpected line {' '.join(ln)!r}")
            idx = []
            for run in ln[3:]:
                s, n = map(int, run.split(":"))
                idx.append(np.arange(s, s + n))
            pieces.append((RegionMask(grid, np.concatenate(idx) if idx else []), complex(float(ln[1]), float(ln[2]))))
        return cls.build(grid, pieces, bool(int(lines[1][1])))


@dataclass(frozen=True)
class ReductionReport:
    n: int
    area_lost: float
    max_error_on_support: float
    complement_connected: bool
    level: int = 0
    cell_side: float = 0.0
    losses: dict = field(default_factory=dict)
    luzin_within_budget: bool = True


# --------------------------------------------------------------------------
# Luzin-type selection


@dataclass(frozen=True)
class LuzinSelection:
    mask: RegionMask
    within_budget: bool
    area_removed: float

    def __iter__(self):
        return iter((self.mask, self.within_budget))


def local_oscillation(f: SampledFunction, mask: RegionMask | None = None) -> np.ndarray:
    """max |f(c) - f(c')| over 4-neighbours c' retained in ``mask``."""
    sub = f if mask is None else f.restrict(mask)
    nb = _neighbour_table(sub.domain)
    v = sub.values
    diff = np.where(nb >= 0, np.abs(v[:, None] - v[np.maximum(nb, 0)]), 0.0)
    return diff.max(axis=1) if len(v) else np.zeros(0)


def luzin_select(f: SampledFunction, oscillation_bound: float, loss_budget: float) -> LuzinSelection:
    """Greedily drop cells until every retained cell's local oscillation is
    at most ``oscillation_bound``.

    The cell touching the most offending neighbour pairs goes first (ties:
    larger oscillation, then lower index), which removes one side of a jump
    rather than both.  The bound always holds on the result; ``within_budget``
    says whether the removed area stayed within ``loss_budget``.
    """
    if not oscillation_bound > 0:
        raise PreconditionError("oscillation bound must be positive")
    nb = _neighbour_table(f.domain)
    v = f.values
    n = len(v)
    safe = np.maximum(nb, 0)
    bad = (nb >= 0) & (np.abs(v[:, None] - v[safe]) > oscillation_bound)
    count = bad.sum(axis=1)
    alive = np.ones(n, dtype=bool)

    def worst(i):
        m = bad[i] & alive[safe[i]]
        return float(np.abs(v[i] - v[safe[i][m]]).max()) if m.any() else 0.0

    heap = [(-int(count[i]), -worst(i), i) for i in np.flatnonzero(count)]
    heapq.heapify(heap)
    while heap:
        c, w, i = heapq.heappop(heap)
        if not alive[i] or -c != count[i] or count[i] == 0:
            continue
        if -w != worst(i):
            heapq.heappush(heap, (c, -worst(i), i))
            continue
        alive[i] = False
        for d in range(4):
            j = nb[i, d]
            if j >= 0 and bad[i, d] and alive[j]:
                count[j] -= 1
                if count[j]:
                    heapq.heappush(heap, (-int(count[j]), -worst(j), j))
    kept = RegionMask(f.domain.grid, f.domain.index[alive])
    removed = (n - int(alive.sum())) * f.domain.grid.cell_area
    return LuzinSelection(kept, removed <= loss_budget, removed)


# --------------------------------------------------------------------------
# the reduction


def _level_candidate(f: SampledFunction, mask: RegionMask, level: int, n: int):
    """Cells kept at a partition level plus the per-square anchor data."""
    grid = mask.grid
    ids, pc, pr = square_ids(mask, level)
    m = 1 << (grid.k - level)
    inner = (pc > 0) & (pc < m - 1) & (pr > 0) & (pr < m - 1)
    idx = mask.index[inner]
    if not idx.size:
        return None
    vals = f.at(RegionMask(grid, idx))
    sq = ids[inner]
    # squares in row-major order: by j then i
    _, inv = np.unique(sq[:, 1] * (sq[:, 0].max() - sq[:, 0].min() + 1) + (sq[:, 0] - sq[:, 0].min()),
                       return_inverse=True)
    order = np.lexsort((idx, inv))
    first = order[np.r_[True, inv[order][1:] != inv[order][:-1]]]
    anchor_val = vals[first][inv]
    keep = np.abs(vals - anchor_val) < 1.0 / n
    return idx[keep], inv[keep], idx[first], vals[first]


def _b_value(fa: complex, n: int) -> complex:
    return fa if fa != 0 else complex(1.0 / (2 * n))


def reduce_to_piecewise(f: SampledFunction, n: int, oscillation_bound: float | None = None):
    """Zero-free piecewise constant ``g_n`` on a compact ``K_n`` with connected
    complement, ``|f - g_n| < 2/n`` on ``K_n`` and ``m(A \\ K_n) < 3/n``.

    Returns ``(PiecewiseConstantTarget, ReductionReport)``.
    """
    if n < 1 or int(n) != n:
        raise PreconditionError("n must be a positive integer")
    n = int(n)
    dom = f.domain
    if not dom:
        raise PreconditionError("domain has zero area")
    grid = dom.grid
    cell_area = grid.cell_area
    total_budget = 3.0 / n
    if grid.k < 2:
        raise ResolutionError("squares need at least 4x4 cells", required_k=2)

    sel = luzin_select(f, oscillation_bound or 1.0 / n, 1.0 / n)
    base = sel.mask

    # rank partition levels by the area they throw away
    cands = []
    for level in range(0, grid.k - 1):
        c = _level_candidate(f, base, level, n)
        if c is None:
            continue
        lost = (len(dom) - c[0].size) * cell_area
        cands.append((lost, -level, level, c))
    cands.sort(key=lambda t: (t[0], t[1]))

    last_err = None
    for lost, _, level, (idx, inv, anchors, anchor_vals) in cands:
        if lost >= total_budget:
            break
        support = RegionMask(grid, idx)
        remaining = total_budget - lost
        holes = count_holes(support)
        carved_area = 0.0
        if holes:
            try:
                carved = carve_connectors(support, remaining / holes)
            except InfeasibleBudgetError as exc:
                last_err = exc
                continue
            carved_area = (len(support) - len(carved)) * cell_area
            if lost + carved_area >= total_budget:
                continue
            keep = carved.contains_index(idx)
            idx, inv = idx[keep], inv[keep]
            support = carved
        pieces = []
        for q in range(anchors.size):
            cells = idx[inv == q]
            if cells.size:
                pieces.append((RegionMask(grid, cells), _b_value(anchor_vals[q], n)))
        target = PiecewiseConstantTarget.build(grid, pieces, zero_free=True)
        err = np.abs(f.at(target.support) - target.values)
        report = ReductionReport(
            n=n,
            area_lost=dom.area - target.support.area,
            max_error_on_support=float(err.max()) if err.size else 0.0,
            complement_connected=is_complement_connected(target.support),
            level=level,
            cell_side=grid.cell_side,
            losses={"luzin": sel.area_removed, "shrink_and_trim": lost - sel.area_removed,
                    "corridors": carved_area},
            luzin_within_budget=sel.within_budget,
        )
        return target, report

    need = grid.k + 1
    msg = f"cannot keep area loss below 3/{n} on a grid with cell side 2^-{grid.k}; try k >= {need}"
    if last_err is not None:
        msg += f" ({last_err})"
    raise ResolutionError(msg, required_k=need)


def zero_split(g: SampledFunction, j: int) -> tuple[RegionMask, RegionMask]:
    """``A = {|g| <= 1/j}`` and ``B = {|g| >= 2/j}``; the band between is in neither."""
    if j < 1:
        raise PreconditionError("j must be a positive integer")
    mod = np.abs(g.values)
    idx = g.domain.index
    return RegionMask(g.domain.grid, idx[mod <= 1.0 / j]), RegionMask(g.domain.grid, idx[mod >= 2.0 / j])


def recompute_report(f: SampledFunction, target: PiecewiseConstantTarget) -> tuple[float, float, bool]:
    """(max error on support, area lost, complement connected) from scratch."""
    err = np.abs(f.at(target.support) - target.values)
    return (float(err.max()) if err.size else 0.0, f.domain.area - target.support.area,
            is_complement_connected(target.support))

