"""Dyadic grids and region masks in the complex plane.

A :class:`RegionMask` is a finite set of closed grid cells.  Cells are kept
as sorted linear indices ``row * width + col`` with row 0 at the bottom, so
row-major order is simply ascending index order.  A dense boolean view is
available for moderately sized grids; very fine grids (thin shells, say)
can still be handled through the index form.

Connectivity is 4-connectivity for both a region and its complement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage, sparse
from scipy.sparse import csgraph

from .errors import InfeasibleBudgetError, PreconditionError, ResourceLimitError

MAX_DENSE_CELLS = 1 << 24
MAX_PARTITION_SQUARES = 1 << 22

_FOUR = ndimage.generate_binary_structure(2, 1)


def _dyadic_level(cell_side: float) -> int:
    if not cell_side > 0:
        raise PreconditionError(f"cell_side must be positive, got {cell_side!r}")
    k = -math.log2(cell_side)
    kr = round(k)
    if kr < 0 or abs(k - kr) > 1e-12 or 2.0 ** -kr != cell_side:
        raise PreconditionError(f"cell_side {cell_side!r} is not 2^-k with k >= 0")
    return kr


@dataclass(frozen=True)
class GridSpec:
    """Rectangular block of ``width x height`` square cells of side ``2^-k``."""

    origin: complex
    cell_side: float
    width: int
    height: int

    def __post_init__(self):
        object.__setattr__(self, "origin", complex(self.origin))
        object.__setattr__(self, "cell_side", float(self.cell_side))
        _dyadic_level(self.cell_side)
        if int(self.width) < 1 or int(self.height) < 1:
            raise PreconditionError("grid needs at least one cell")
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))

    @classmethod
    def covering(cls, x0: float, x1: float, y0: float, y1: float, k: int) -> "GridSpec":
        """Smallest lattice-aligned grid at level ``k`` containing the box."""
        if k < 0:
            raise PreconditionError("k must be >= 0")
        if not (x1 >= x0 and y1 >= y0):
            raise PreconditionError("degenerate bounding box")
        scale = 2.0 ** k
        i0, i1 = math.floor(x0 * scale), math.ceil(x1 * scale)
        j0, j1 = math.floor(y0 * scale), math.ceil(y1 * scale)
        i1 = max(i1, i0 + 1)
        j1 = max(j1, j0 + 1)
        h = 2.0 ** -k
        return cls(complex(i0 * h, j0 * h), h, i1 - i0, j1 - j0)

    @property
    def k(self) -> int:
        return _dyadic_level(self.cell_side)

    @property
    def cell_area(self) -> float:
        return self.cell_side * self.cell_side

    @property
    def size(self) -> int:
        return self.width * self.height

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        x0, y0 = self.origin.real, self.origin.imag
        return (x0, x0 + self.width * self.cell_side, y0, y0 + self.height * self.cell_side)

    def lattice_offset(self) -> tuple[int, int]:
        """Origin in units of ``cell_side``; raises if the grid is off-lattice."""
        ox = self.origin.real / self.cell_side
        oy = self.origin.imag / self.cell_side
        if not (float(ox).is_integer() and float(oy).is_integer()):
            raise PreconditionError("grid origin is not on the dyadic lattice")
        return int(ox), int(oy)

    def centers(self, index: np.ndarray) -> np.ndarray:
        index = np.asarray(index, dtype=np.int64)
        rows, cols = np.divmod(index, self.width)
        h = self.cell_side
        return (self.origin.real + (cols + 0.5) * h) + 1j * (self.origin.imag + (rows + 0.5) * h)

    def all_centers(self) -> np.ndarray:
        _check_dense(self)
        h = self.cell_side
        xs = self.origin.real + (np.arange(self.width) + 0.5) * h
        ys = self.origin.imag + (np.arange(self.height) + 0.5) * h
        return xs[None, :] + 1j * ys[:, None]


def _check_dense(grid: GridSpec):
    if grid.size > MAX_DENSE_CELLS:
        raise ResourceLimitError(
            f"grid of {grid.width}x{grid.height} cells exceeds dense limit {MAX_DENSE_CELLS}"
        )


class RegionMask:
    """Immutable set of marked cells on a :class:`GridSpec`."""

    __slots__ = ("grid", "index", "_dense")

    def __init__(self, grid: GridSpec, index: Iterable[int] | np.ndarray = ()):
        idx = np.unique(np.asarray(index, dtype=np.int64).ravel())
        if idx.size and (idx[0] < 0 or idx[-1] >= grid.size):
            raise PreconditionError("cell index outside grid bounds")
        idx.setflags(write=False)
        self.grid = grid
        self.index = idx
        self._dense = None

    # construction -------------------------------------------------------
    @classmethod
    def from_array(cls, grid: GridSpec, array: np.ndarray) -> "RegionMask":
        array = np.asarray(array, dtype=bool)
        if array.shape != (grid.height, grid.width):
            raise PreconditionError(f"array shape {array.shape} does not match grid")
        return cls(grid, np.flatnonzero(array.ravel()))

    @classmethod
    def from_cells(cls, grid: GridSpec, cells: Iterable[tuple[int, int]]) -> "RegionMask":
        cells = np.asarray(list(cells), dtype=np.int64).reshape(-1, 2)
        r, c = cells[:, 0], cells[:, 1]
        if np.any((r < 0) | (r >= grid.height) | (c < 0) | (c >= grid.width)):
            raise PreconditionError("cell outside grid bounds")
        return cls(grid, r * grid.width + c)

    @classmethod
    def from_predicate(cls, grid: GridSpec, predicate) -> "RegionMask":
        """Cells whose centre ``z`` satisfies ``predicate(z)`` (vectorised)."""
        z = grid.all_centers()
        return cls.from_array(grid, np.asarray(predicate(z), dtype=bool))

    @classmethod
    def full(cls, grid: GridSpec) -> "RegionMask":
        return cls(grid, np.arange(grid.size))

    @classmethod
    def rect(cls, x0: float, x1: float, y0: float, y1: float, k: int) -> "RegionMask":
        """Cells whose centres lie in the closed rectangle."""
        grid = GridSpec.covering(x0, x1, y0, y1, k)
        return cls.from_predicate(
            grid, lambda z: (z.real >= x0) & (z.real <= x1) & (z.imag >= y0) & (z.imag <= y1)
        )

    @classmethod
    def disk(cls, center: complex, radius: float, k: int, grid: GridSpec | None = None) -> "RegionMask":
        center = complex(center)
        if grid is None:
            grid = GridSpec.covering(
                center.real - radius, center.real + radius, center.imag - radius, center.imag + radius, k
            )
        return cls.from_predicate(grid, lambda z: np.abs(z - center) <= radius)

    @classmethod
    def annulus(cls, center: complex, r_in: float, r_out: float, k: int,
                grid: GridSpec | None = None) -> "RegionMask":
        center = complex(center)
        if grid is None:
            grid = GridSpec.covering(
                center.real - r_out, center.real + r_out, center.imag - r_out, center.imag + r_out, k
            )
        return cls.from_predicate(grid, lambda z: (np.abs(z - center) >= r_in) & (np.abs(z - center) <= r_out))

    # views --------------------------------------------------------------
    def __len__(self) -> int:
        return int(self.index.size)

    def __bool__(self) -> bool:
        return self.index.size > 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, RegionMask):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.index, other.index)

    __hash__ = None

    def __repr__(self) -> str:
        return f"RegionMask({len(self)} cells, k={self.grid.k}, area={self.area:.6g})"

    @property
    def area(self) -> float:
        return len(self) * self.grid.cell_area

    @property
    def cell_side(self) -> float:
        return self.grid.cell_side

    @property
    def rows(self) -> np.ndarray:
        return self.index // self.grid.width

    @property
    def cols(self) -> np.ndarray:
        return self.index % self.grid.width

    @property
    def centers(self) -> np.ndarray:
        return self.grid.centers(self.index)

    @property
    def array(self) -> np.ndarray:
        if self._dense is None:
            _check_dense(self.grid)
            a = np.zeros(self.grid.size, dtype=bool)
            a[self.index] = True
            a = a.reshape(self.grid.height, self.grid.width)
            a.setflags(write=False)
            self._dense = a
        return self._dense

    def cell_bbox(self) -> tuple[int, int, int, int]:
        """(row0, row1, col0, col1), half-open, of the marked cells."""
        if not self:
            raise PreconditionError("empty mask has no bounding box")
        r, c = self.rows, self.cols
        return int(r.min()), int(r.max()) + 1, int(c.min()), int(c.max()) + 1

    def bounds(self) -> tuple[float, float, float, float]:
        r0, r1, c0, c1 = self.cell_bbox()
        h = self.grid.cell_side
        o = self.grid.origin
        return (o.real + c0 * h, o.real + c1 * h, o.imag + r0 * h, o.imag + r1 * h)

    # set algebra --------------------------------------------------------
    def _same_grid(self, other: "RegionMask"):
        if self.grid != other.grid:
            raise PreconditionError("masks live on different grids; embed them first")

    def union(self, other: "RegionMask") -> "RegionMask":
        self._same_grid(other)
        return RegionMask(self.grid, np.union1d(self.index, other.index))

    def intersection(self, other: "RegionMask") -> "RegionMask":
        self._same_grid(other)
        return RegionMask(self.grid, np.intersect1d(self.index, other.index, assume_unique=True))

    def difference(self, other: "RegionMask") -> "RegionMask":
        self._same_grid(other)
        return RegionMask(self.grid, np.setdiff1d(self.index, other.index, assume_unique=True))

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def issubset(self, other: "RegionMask") -> bool:
        self._same_grid(other)
        return bool(np.isin(self.index, other.index, assume_unique=True).all())

    def contains_index(self, index: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self.index, index)
        pos = np.minimum(pos, max(len(self) - 1, 0))
        if not self:
            return np.zeros(np.shape(index), dtype=bool)
        return self.index[pos] == index

    def locate(self, index: np.ndarray) -> np.ndarray:
        """Positions of ``index`` entries within ``self.index`` (must be present)."""
        pos = np.searchsorted(self.index, index)
        if pos.size and (np.any(pos >= len(self)) or np.any(self.index[np.minimum(pos, len(self) - 1)] != index)):
            raise PreconditionError("cells not contained in mask")
        return pos

    def embed(self, grid: GridSpec) -> "RegionMask":
        """Same cells expressed on another grid of the same level."""
        if grid.cell_side != self.grid.cell_side:
            raise PreconditionError("embedding requires equal cell sizes")
        dx = (self.grid.origin.real - grid.origin.real) / grid.cell_side
        dy = (self.grid.origin.imag - grid.origin.imag) / grid.cell_side
        if not (float(dx).is_integer() and float(dy).is_integer()):
            raise PreconditionError("grids are not aligned")
        r = self.rows + int(dy)
        c = self.cols + int(dx)
        if np.any((r < 0) | (r >= grid.height) | (c < 0) | (c >= grid.width)):
            raise PreconditionError("mask does not fit in target grid")
        return RegionMask(grid, r * grid.width + c)

    def refine(self, k: int) -> "RegionMask":
        """The same set on the level-``k`` grid (each cell split into 4^dk children)."""
        g = self.grid
        dk = k - g.k
        if dk < 0:
            raise PreconditionError("refine needs a finer level")
        if dk == 0:
            return self
        m = 1 << dk
        grid = GridSpec(g.origin, g.cell_side / m, g.width * m, g.height * m)
        sub = np.arange(m)
        rows = (self.rows[:, None, None] * m + sub[None, :, None])
        cols = (self.cols[:, None, None] * m + sub[None, None, :])
        return RegionMask(grid, (rows * grid.width + cols).ravel())

    def boundary_layer(self) -> "RegionMask":
        """Marked cells with at least one 4-neighbour outside the mask."""
        n = _neighbour_table(self)
        return RegionMask(self.grid, self.index[(n < 0).any(axis=1)])


def common_grid(*masks: RegionMask) -> GridSpec:
    side = masks[0].grid.cell_side
    boxes = [m.grid.bounds for m in masks]
    if any(m.grid.cell_side != side for m in masks):
        raise PreconditionError("masks have different cell sizes")
    return GridSpec.covering(
        min(b[0] for b in boxes), max(b[1] for b in boxes),
        min(b[2] for b in boxes), max(b[3] for b in boxes), _dyadic_level(side),
    )


def _neighbour_table(mask: RegionMask) -> np.ndarray:
    """(n, 4) positions of left/right/down/up neighbours inside the mask, -1 if absent."""
    w = mask.grid.width
    idx = mask.index
    cols = idx % w
    rows = idx // w
    out = np.full((idx.size, 4), -1, dtype=np.int64)
    cand = [(idx - 1, cols > 0), (idx + 1, cols < w - 1),
            (idx - w, rows > 0), (idx + w, rows < mask.grid.height - 1)]
    for j, (nb, ok) in enumerate(cand):
        if not idx.size:
            break
        pos = np.searchsorted(idx, nb)
        posc = np.minimum(pos, idx.size - 1)
        hit = ok & (idx[posc] == nb)
        out[hit, j] = posc[hit]
    return out


# --------------------------------------------------------------------------
# dyadic partition


@dataclass(frozen=True)
class DyadicSquare:
    """Closed square ``[i, i+1] x [j, j+1] * 2^-k``."""

    i: int
    j: int
    k: int

    @property
    def side(self) -> float:
        return 2.0 ** -self.k

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        s = self.side
        return (self.i * s, (self.i + 1) * s, self.j * s, (self.j + 1) * s)

    def parent(self, level: int) -> "DyadicSquare":
        if level > self.k:
            raise PreconditionError("parent level must be coarser")
        shift = self.k - level
        return DyadicSquare(self.i >> shift, self.j >> shift, level)

    def cell_ranges(self, grid: GridSpec) -> tuple[int, int, int, int]:
        """Half-open (row0, row1, col0, col1) of this square on a finer grid, clipped."""
        if grid.k < self.k:
            raise PreconditionError("grid is coarser than the square")
        ox, oy = grid.lattice_offset()
        m = 1 << (grid.k - self.k)
        c0, r0 = self.i * m - ox, self.j * m - oy
        return (max(r0, 0), min(r0 + m, grid.height), max(c0, 0), min(c0 + m, grid.width))


def dyadic_partition(bbox: Sequence[float], k: int, limit: int = MAX_PARTITION_SQUARES) -> list[DyadicSquare]:
    """Squares of side ``2^-k`` tiling ``bbox`` snapped outward to the lattice.

    Squares are listed row-major (bottom row first).
    """
    x0, x1, y0, y1 = map(float, bbox)
    if k < 0:
        raise PreconditionError("k must be >= 0")
    if not (x1 > x0 and y1 > y0):
        raise PreconditionError("degenerate bounding box")
    scale = 2.0 ** k
    i0, i1 = math.floor(x0 * scale), math.ceil(x1 * scale)
    j0, j1 = math.floor(y0 * scale), math.ceil(y1 * scale)
    count = (i1 - i0) * (j1 - j0)
    if count > limit:
        raise ResourceLimitError(f"partition at k={k} needs {count} squares (limit {limit})")
    return [DyadicSquare(i, j, k) for j in range(j0, j1) for i in range(i0, i1)]


def square_ids(mask: RegionMask, level: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For each marked cell: lattice square (i, j) at ``level`` and the cell's
    (col, row) position inside that square."""
    grid = mask.grid
    if level > grid.k:
        raise PreconditionError("partition level finer than the grid")
    ox, oy = grid.lattice_offset()
    m = 1 << (grid.k - level)
    gc = mask.cols + ox
    gr = mask.rows + oy
    return np.stack([gc // m, gr // m], axis=1), gc % m, gr % m


# --------------------------------------------------------------------------
# complement connectivity


@dataclass(frozen=True)
class ComponentLabeling:
    """Labels of complement components on the padded crop of a mask.

    ``labels[r, c]`` refers to grid cell ``(r + row0, c + col0)``; region
    cells carry label 0.
    """

    labels: np.ndarray
    unbounded_id: int
    row0: int
    col0: int

    @property
    def count(self) -> int:
        return int(self.labels.max())

    @property
    def hole_ids(self) -> list[int]:
        return [i for i in range(1, self.count + 1) if i != self.unbounded_id]


def _padded_crop(mask: RegionMask) -> tuple[np.ndarray, int, int]:
    r0, r1, c0, c1 = mask.cell_bbox()
    h, w = r1 - r0 + 2, c1 - c0 + 2
    if h * w > MAX_DENSE_CELLS:
        raise ResourceLimitError("mask bounding box too large for labelling")
    a = np.zeros((h, w), dtype=bool)
    a[mask.rows - r0 + 1, mask.cols - c0 + 1] = True
    return a, r0 - 1, c0 - 1


def complement_labeling(mask: RegionMask) -> ComponentLabeling:
    if not mask:
        return ComponentLabeling(np.ones((1, 1), dtype=np.int32), 1, 0, 0)
    region, row0, col0 = _padded_crop(mask)
    labels, _ = ndimage.label(~region, structure=_FOUR)
    return ComponentLabeling(labels, int(labels[0, 0]), row0, col0)


def _check_frame(mask: RegionMask, frame):
    if frame is None or not mask:
        return
    fx0, fx1, fy0, fy1 = frame
    x0, x1, y0, y1 = mask.bounds()
    if not (fx0 < x0 and x1 < fx1 and fy0 < y0 and y1 < fy1):
        raise PreconditionError("mask touches or crosses the frame boundary")


def is_complement_connected(mask: RegionMask, frame: Sequence[float] | None = None) -> bool:
    """True iff the complement of the mask (inside the frame, together with
    everything outside it) is a single 4-connected component."""
    _check_frame(mask, frame)
    return complement_labeling(mask).count == 1


def region_components(mask: RegionMask) -> int:
    """Number of 4-connected components of the marked cells (sparse, any grid size)."""
    if not mask:
        return 0
    nb = _neighbour_table(mask)
    src = np.repeat(np.arange(len(mask)), 4)
    dst = nb.ravel()
    keep = dst >= 0
    graph = sparse.coo_matrix((np.ones(int(keep.sum()), dtype=np.int8), (src[keep], dst[keep])),
                              shape=(len(mask), len(mask)))
    return int(csgraph.connected_components(graph, directed=False)[0])


def count_holes(mask: RegionMask) -> int:
    return len(complement_labeling(mask).hole_ids)


def _corridor(labels: np.ndarray, hole: int) -> list[tuple[int, int]]:
    """Shortest straight run of region cells from ``hole`` to any other
    complement component.  Directions are tried left, right, down, up."""
    hh, ww = labels.shape
    rr, cc = np.nonzero(labels == hole)
    best = None
    for d, (dr, dc) in enumerate(((0, -1), (0, 1), (-1, 0), (1, 0))):
        nr, nc = rr + dr, cc + dc
        ok = (nr >= 0) & (nr < hh) & (nc >= 0) & (nc < ww)
        ok[ok] &= labels[nr[ok], nc[ok]] == 0
        for r, c in zip(nr[ok], nc[ok]):
            path = []
            while 0 <= r < hh and 0 <= c < ww and labels[r, c] == 0:
                path.append((int(r), int(c)))
                if best is not None and len(path) >= len(best):
                    break
                r += dr
                c += dc
            else:
                if 0 <= r < hh and 0 <= c < ww and labels[r, c] == hole:
                    continue
                if best is None or len(path) < len(best):
                    best = path
    if best is None:
        raise InfeasibleBudgetError("no straight corridor leaves the enclosed component")
    return best


def carve_connectors(mask: RegionMask, per_hole_budget: float, return_corridors: bool = False):
    """Remove straight one-cell-wide corridors until the complement is connected.

    Each enclosed complement component is joined to another complement
    component (ultimately the unbounded one) through a corridor of area
    strictly below ``per_hole_budget``.
    """
    cell_area = mask.grid.cell_area
    if per_hole_budget <= cell_area:
        raise InfeasibleBudgetError(
            f"per-hole budget {per_hole_budget:g} does not exceed one cell area {cell_area:g}"
        )
    corridors = []
    removed: list[int] = []
    current = mask
    while True:
        lab = complement_labeling(current)
        holes = lab.hole_ids
        if not holes:
            break
        path = _corridor(lab.labels, holes[0])
        if len(path) * cell_area >= per_hole_budget:
            raise InfeasibleBudgetError(
                f"corridor of {len(path)} cells exceeds per-hole budget {per_hole_budget:g}"
            )
        w = current.grid.width
        cells = [(r + lab.row0) * w + (c + lab.col0) for r, c in path]
        corridors.append(cells)
        removed.extend(cells)
        current = RegionMask(current.grid, np.setdiff1d(current.index, np.asarray(cells, dtype=np.int64)))
    if return_corridors:
        return current, corridors
    return current


# --------------------------------------------------------------------------
# text serialisation


def mask_to_text(mask: RegionMask) -> str:
    """Header ``grid x0 y0 cell_side width height`` then one run-length line
    per row (bottom row first), alternating unmarked/marked run lengths."""
    g = mask.grid
    lines = [f"grid {float(g.origin.real)!r} {float(g.origin.imag)!r} {float(g.cell_side)!r} {g.width} {g.height}"]
    rows = mask.rows
    cols = mask.cols
    bounds = np.searchsorted(rows, np.arange(g.height + 1))
    for r in range(g.height):
        c = cols[bounds[r]:bounds[r + 1]]
        if not c.size:
            lines.append(str(g.width))
            continue
        # starts/ends of consecutive runs
        brk = np.flatnonzero(np.diff(c) != 1)
        starts = np.concatenate([[c[0]], c[brk + 1]])
        ends = np.concatenate([c[brk], [c[-1]]]) + 1
        runs = []
        pos = 0
        for s, e in zip(starts, ends):
            runs.append(int(s - pos))
            runs.append(int(e - s))
            pos = e
        if pos < g.width:
            runs.append(int(g.width - pos))
        lines.append(" ".join(map(str, runs)))
    return "\n".join(lines) + "\n"


def mask_from_text(text: str) -> RegionMask:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "grid" or len(head) != 6:
        raise PreconditionError("mask text must start with a grid header")
    grid = GridSpec(complex(float(head[1]), float(head[2])), float(head[3]), int(head[4]), int(head[5]))
    if len(lines) - 1 != grid.height:
        raise PreconditionError("row count does not match grid height")
    idx = []
    for r, ln in enumerate(lines[1:]):
        runs = [int(v) for v in ln.split()]
        if sum(runs) != grid.width:
            raise PreconditionError(f"row {r} runs do not sum to width")
        pos = 0
        for n, length in enumerate(runs):
            if n % 2:
                idx.append(np.arange(pos, pos + length) + r * grid.width)
            pos += length
    return RegionMask(grid, np.concatenate(idx) if idx else ())
