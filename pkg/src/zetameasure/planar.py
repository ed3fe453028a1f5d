"""Planar geometry behind approximation in measure on open sets.

Lens areas, thin shells around circles with a density budget, boundary
density ratios, the truncated Dirichlet skeleton (disks, shells, pieces and a
piecewise constant boundary-value target), and a fundamental-solution fitter
that produces functions harmonic off a finite set of sources.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree
from skimage.measure import find_contours

from .complexgrid import GridSpec, RegionMask, common_grid, mask_from_text, mask_to_text
from .errors import (GeometryError, InfeasibleBudgetError, PreconditionError, ResourceLimitError,
                     SourceLimitError)
from .reduction import PiecewiseConstantTarget, SampledFunction, reduce_to_piecewise

SHELL_K_MAX = 26
SKELETON_K_MAX = 12


def lens_area(h: float, d: float) -> float:
    """Area of the intersection of two disks of radius ``h`` whose centres are ``d`` apart."""
    if not h > 0:
        raise PreconditionError("h must be positive")
    if d < 0:
        raise PreconditionError("d must be non-negative")
    if d >= 2 * h:
        return 0.0
    return 2 * h * h * math.acos(d / (2 * h)) - 0.5 * d * math.sqrt(4 * h * h - d * d)


# --------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class DomainSpec:
    """Open set ``U`` (its marked cells) with sample points on its boundary."""

    U: RegionMask
    boundary_samples: np.ndarray

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.boundary_samples, dtype=complex))
        object.__setattr__(self, "boundary_samples", pts)
        if not self.U:
            raise PreconditionError("domain mask is empty")
        if pts.size:
            b = self.U.boundary_layer().centers
            tree = cKDTree(np.c_[b.real, b.imag])
            dist, _ = tree.query(np.c_[pts.real, pts.imag])
            # the boundary of a cell lies within half a diagonal of its centre
            if np.any(dist > (1 + 0.5 * math.sqrt(2)) * self.resolution):
                raise PreconditionError("boundary samples must lie within one cell of the mask boundary")

    @property
    def resolution(self) -> float:
        return self.U.grid.cell_side

    @classmethod
    def disk(cls, center: complex, radius: float, k: int, n_samples: int = 64) -> "DomainSpec":
        theta = 2 * math.pi * np.arange(n_samples) / n_samples
        U = RegionMask.disk(center, radius, k)
        return cls(U, complex(center) + radius * np.exp(1j * theta))

    @classmethod
    def from_mask(cls, U: RegionMask, n_samples: int = 64) -> "DomainSpec":
        """Boundary samples taken as evenly spread boundary-layer cells."""
        b = U.boundary_layer().centers
        c = U.centers.mean()
        order = np.argsort(np.angle(b - c), kind="stable")
        pick = order[np.linspace(0, b.size - 1, min(n_samples, b.size)).astype(int)]
        return cls(U, b[pick])

    def has_sample(self, p: complex, tol: float = 1e-12) -> bool:
        return bool(np.any(np.abs(self.boundary_samples - complex(p)) <= tol))


def domain_to_text(dom: DomainSpec) -> str:
    lines = [mask_to_text(dom.U).rstrip("\n"), f"boundary {dom.boundary_samples.size}"]
    lines += [f"{float(p.real)!r} {float(p.imag)!r}" for p in dom.boundary_samples]
    return "\n".join(lines) + "\n"


def domain_from_text(text: str) -> DomainSpec:
    lines = text.splitlines()
    at = next(i for i, ln in enumerate(lines) if ln.startswith("boundary"))
    U = mask_from_text("\n".join(lines[:at]))
    n = int(lines[at].split()[1])
    pts = [complex(*map(float, ln.split())) for ln in lines[at + 1:at + 1 + n]]
    return DomainSpec(U, np.array(pts, dtype=complex))


def _as_mask(U) -> RegionMask:
    return U.U if isinstance(U, DomainSpec) else U


# --------------------------------------------------------------------------
# shells


def circle_cells(center: complex, radius: float, k: int) -> RegionMask:
    """4-connected ring of level-``k`` cells crossed by the circle."""
    center = complex(center)
    s = 2.0 ** -k
    grid = GridSpec.covering(center.real - radius - s, center.real + radius + s,
                             center.imag - radius - s, center.imag + radius + s, k)
    n = max(64, int(math.ceil(2 * math.pi * radius / (s / 8))))
    z = center + radius * np.exp(2j * math.pi * np.arange(n + 1) / n)
    col = np.floor((z.real - grid.origin.real) / s).astype(np.int64)
    row = np.floor((z.imag - grid.origin.imag) / s).astype(np.int64)
    w = grid.width
    idx = [row * w + col]
    # a diagonal step crosses a corner; add both side cells to stay 4-connected
    diag = (row[1:] != row[:-1]) & (col[1:] != col[:-1])
    idx.append(row[1:][diag] * w + col[:-1][diag])
    idx.append(row[:-1][diag] * w + col[1:][diag])
    return RegionMask(grid, np.concatenate(idx))


def _inside(U: RegionMask, z: np.ndarray) -> np.ndarray:
    g = U.grid
    col = np.floor((z.real - g.origin.real) / g.cell_side).astype(np.int64)
    row = np.floor((z.imag - g.origin.imag) / g.cell_side).astype(np.int64)
    ok = (col >= 0) & (col < g.width) & (row >= 0) & (row < g.height)
    out = np.zeros(z.shape, dtype=bool)
    out[ok] = U.contains_index(row[ok] * g.width + col[ok])
    return out


def circle_boundary_distance(U, center: complex, radius: float) -> float:
    """Grid estimate of dist(circle, boundary of U); 0 if the circle leaves U."""
    U = _as_mask(U)
    center = complex(center)
    z = center + radius * np.exp(2j * math.pi * np.arange(256) / 256)
    if not np.all(_inside(U, z)):
        return 0.0
    b = U.boundary_layer().centers
    d = np.abs(np.abs(b - center) - radius).min()
    return max(0.0, float(d) - U.grid.cell_side)


def _shell_level(radius: float, limit: float, k_min: int, k_max: int, center: complex = 0j) -> tuple[int, RegionMask]:
    # a ring is roughly 1.3 cells thick along its length
    guess = math.ceil(-math.log2(max(limit / (1.3 * 2 * math.pi * radius), 1e-300)))
    for k in range(max(k_min, guess - 1), k_max + 1):
        ring = circle_cells(center, radius, k)
        if ring.area < limit:
            return k, ring
    raise InfeasibleBudgetError(
        f"a ring of radius {radius:g} cannot get below area {limit:.3g} at level <= {k_max}")


def shell_construct(s_curve: tuple[complex, float], U, budget: float, h: float, k: int | None = None,
                    k_max: int = SHELL_K_MAX) -> RegionMask:
    """Thin connected ring of cells around the circle ``s_curve = (center, radius)``
    with ``area < budget * lens_area(h, h)``.

    With ``k`` given the ring is built at that level (infeasible-budget error
    if it is too coarse); otherwise the coarsest sufficient level at or
    below ``k_max`` is used, starting from the level of ``U``.
    """
    center, radius = complex(s_curve[0]), float(s_curve[1])
    if not budget > 0 or not h > 0 or not radius > 0:
        raise PreconditionError("budget, h and radius must be positive")
    mask = _as_mask(U)
    d = circle_boundary_distance(mask, center, radius)
    if not d > 2 * h:
        raise GeometryError(f"distance {d:.4g} from the circle to the boundary is not above 2h = {2 * h:.4g}")
    limit = budget * lens_area(h, h)
    if k is not None:
        ring = circle_cells(center, radius, k)
        if ring.area >= limit:
            raise InfeasibleBudgetError(
                f"ring area {ring.area:.3g} at level {k} is not below budget * V(h) = {limit:.3g}")
        return ring
    return _shell_level(radius, limit, mask.grid.k, k_max, center)[1]


# --------------------------------------------------------------------------
# densities


def _ball_area(mask: RegionMask, p: complex, r: float, level: int | None = None) -> float:
    """Area of the cells (at ``level``, refining virtually) whose centres lie in the closed ball."""
    g = mask.grid
    s = g.cell_side
    level = g.k if level is None else max(level, g.k)
    r0 = max(0, int(math.floor((p.imag - r - g.origin.imag) / s)))
    r1 = min(g.height - 1, int(math.floor((p.imag + r - g.origin.imag) / s)))
    if r1 < r0:
        return 0.0
    lo, hi = np.searchsorted(mask.index, [r0 * g.width, (r1 + 1) * g.width])
    idx = mask.index[lo:hi]
    if not idx.size:
        return 0.0
    z = g.centers(idx)
    mult = 1 << (2 * (level - g.k))
    fine_area = s * s / mult
    count = 0
    side = s
    # classify whole cells, subdividing only those the circle cuts
    while mult > 1 and z.size:
        dist = np.abs(z - p)
        half = side / math.sqrt(2)
        full = dist + half <= r
        part = (dist - half <= r) & ~full
        count += int(full.sum()) * mult
        q = side / 4
        z = (z[part][:, None] + q * np.array([-1 - 1j, 1 - 1j, -1 + 1j, 1 + 1j])).ravel()
        side /= 2
        mult //= 4
    count += int(np.count_nonzero(np.abs(z - p) <= r))
    return count * fine_area


def boundary_density(A: RegionMask, U, p: complex, radii) -> list[tuple[float, float | None]]:
    """``(r, area(A cap B(p,r)) / area(U cap B(p,r)))`` for each radius.

    Both areas are counted on the finer of the two grids.  A ratio is None
    when the ball misses ``U`` at grid resolution.
    """
    p = complex(p)
    if isinstance(U, DomainSpec) and not U.has_sample(p):
        raise PreconditionError("p is not one of the domain's boundary samples")
    Um = _as_mask(U)
    level = max(A.grid.k, Um.grid.k)
    out = []
    for r in radii:
        if not r > 0:
            raise PreconditionError("radii must be positive")
        den = _ball_area(Um, p, r, level)
        out.append((float(r), None if den == 0 else _ball_area(A, p, r, level) / den))
    return out


def verify_density(shell: RegionMask, U: DomainSpec, budget: float, radii, points=None) -> list[tuple[complex, float, float]]:
    """Shell density ratios ``(p, r, ratio)`` at boundary samples; the shell
    construction promises ``ratio < budget`` up to grid slack."""
    pts = U.boundary_samples if points is None else np.asarray(points, dtype=complex)
    rows = []
    for p in pts:
        for r, ratio in boundary_density(shell, U.U, p, radii):
            rows.append((complex(p), r, 0.0 if ratio is None else ratio))
    return rows


# --------------------------------------------------------------------------
# the Dirichlet skeleton


@dataclass(frozen=True)
class ShellFamily:
    disks: tuple[tuple[complex, float], ...]
    shells: tuple[RegionMask, ...]
    budgets: tuple[float, ...]
    hs: tuple[float, ...] = ()
    level: int = 0


def _distance_to_boundary(U: RegionMask) -> np.ndarray:
    """Per marked cell: distance from its centre to the complement's cells, minus half a cell."""
    r0, r1, c0, c1 = U.cell_bbox()
    a = np.zeros((r1 - r0 + 2, c1 - c0 + 2), dtype=bool)
    a[U.rows - r0 + 1, U.cols - c0 + 1] = True
    edt = ndimage.distance_transform_edt(a)
    return (edt[U.rows - r0 + 1, U.cols - c0 + 1] - 0.5) * U.grid.cell_side


def _phi_values(phi, samples: np.ndarray) -> np.ndarray:
    if callable(phi):
        return np.asarray(phi(samples), dtype=complex) * np.ones(samples.shape)
    vals = np.asarray(phi, dtype=complex)
    if vals.ndim == 0:
        return np.full(samples.shape, complex(vals))
    if vals.shape != samples.shape:
        raise PreconditionError("phi needs one value per boundary sample")
    return vals


def build_dirichlet_skeleton(U: DomainSpec, phi, J: int, k_max: int = SKELETON_K_MAX):
    """Disks ``S_j`` with ``diam S_j < dist(S_j, boundary)``, shells ``R_j``
    with budgets ``2^-j`` (j = 0..J-1), ``F = U minus the shells`` and a
    piecewise constant ``g`` on ``F``.

    Pieces are ``F_j = F cap S_j`` minus earlier disks, valued by ``phi`` at
    the boundary sample nearest to the piece's first cell.  The part of ``F``
    beyond the ``J`` disks (the truncated tail near the boundary) is split by
    nearest boundary sample and takes that sample's value.
    Returns ``(ShellFamily, F, g)``.
    """
    if J < 1:
        raise PreconditionError("J must be >= 1")
    mask = U.U
    if ndimage.label(mask.array, structure=ndimage.generate_binary_structure(2, 1))[1] != 1:
        raise PreconditionError("U must be connected at grid level")
    samples = U.boundary_samples
    if not samples.size:
        raise PreconditionError("domain has no boundary samples")
    phis = _phi_values(phi, samples)
    s = mask.grid.cell_side
    z = mask.centers
    d = _distance_to_boundary(mask)
    covered = np.zeros(len(mask), dtype=bool)
    disks, hs, budgets, levels = [], [], [], []
    for j in range(J):
        free = np.flatnonzero(~covered)
        if not free.size:
            raise GeometryError(f"U is fully covered after {j} disks")
        i = free[np.argmax(d[free])]
        rho = 0.95 * d[i] / 3
        if rho < 2 * s:
            raise GeometryError(f"disk {j} would have radius {rho:.3g}, below two cells")
        c = complex(z[i])
        dist = circle_boundary_distance(mask, c, rho)
        h = 0.45 * dist
        budget = 2.0 ** -j
        k, _ = _shell_level(rho, budget * lens_area(h, h), mask.grid.k, k_max, c)
        covered |= np.abs(z - c) <= rho
        disks.append((c, float(rho)))
        hs.append(h)
        budgets.append(budget)
        levels.append(k)
    kf = max(levels)
    if kf > k_max:
        raise ResourceLimitError(f"shells need level {kf} > {k_max}")
    U_fine = mask.refine(kf)
    shells = tuple(circle_cells(c, rho, kf).embed(U_fine.grid) for c, rho in disks)
    for sh, b, h in zip(shells, budgets, hs):
        if not sh.area < b * lens_area(h, h):
            raise InfeasibleBudgetError("shell exceeds its budget after alignment")
    ring_idx = np.unique(np.concatenate([sh.index for sh in shells]))
    F = U_fine - RegionMask(U_fine.grid, ring_idx)

    zf = F.centers
    owner = np.full(len(F), -1, dtype=np.int64)
    for j, (c, rho) in enumerate(disks):
        owner[(owner < 0) & (np.abs(zf - c) <= rho)] = j
    tree = cKDTree(np.c_[samples.real, samples.imag])
    pieces = []
    for j in range(J):
        idx = F.index[owner == j]
        if idx.size:
            x = F.grid.centers(idx[:1])[0]
            pieces.append((RegionMask(F.grid, idx), phis[tree.query([x.real, x.imag])[1]]))
    tail = owner < 0
    if tail.any():
        _, near = tree.query(np.c_[zf[tail].real, zf[tail].imag])
        tidx = F.index[tail]
        for q in np.unique(near):
            pieces.append((RegionMask(F.grid, tidx[near == q]), phis[q]))
    g = PiecewiseConstantTarget.build(F.grid, pieces)
    family = ShellFamily(tuple(disks), shells, tuple(budgets), tuple(hs), kf)
    return family, F, g


def skeleton_density_check(family: ShellFamily, F: RegionMask, U: DomainSpec, radii, slack: float = 1e-9):
    """Rows ``(p, r, ratio, bound)`` with ``bound = 1 - sum of budgets of the
    shells meeting B(p, r) - slack``; the chain promises ``ratio >= bound``."""
    out = []
    for p in U.boundary_samples:
        for r, ratio in boundary_density(F, U, p, radii):
            active = 0.0
            for (c, rho), b in zip(family.disks, family.budgets):
                # the ring lies within one cell diagonal of its circle
                gap = abs(abs(p - c) - rho) - math.sqrt(2) * 2.0 ** -family.level
                if gap <= r:
                    active += b
            out.append((complex(p), r, ratio, 1 - active - slack))
    return out


# --------------------------------------------------------------------------
# harmonic fitting


@dataclass(frozen=True)
class HarmonicFit:
    """``u(z) = Re sum_k a_k w^k + sum_i c_i log|z - q_i|`` with ``w = (z - center) / scale``."""

    sources: tuple[complex, ...]
    weights: tuple[float, ...]
    poly_coeffs: tuple[complex, ...]
    fit_error: float
    center: complex = 0j
    scale: float = 1.0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        w = (z - self.center) / self.scale
        acc = np.zeros(z.shape, dtype=complex)
        for a in reversed(self.poly_coeffs):
            acc = acc * w + a
        u = acc.real
        for q, c in zip(self.sources, self.weights):
            u = u + c * np.log(np.abs(z - q))
        return u

    def to_json(self) -> str:
        return json.dumps({
            "sources": [[q.real, q.imag] for q in self.sources],
            "weights": list(self.weights),
            "poly_coeffs": [[a.real, a.imag] for a in self.poly_coeffs],
            "center": [self.center.real, self.center.imag],
            "scale": self.scale,
            "fit_error": self.fit_error,
        })

    @classmethod
    def from_json(cls, text: str) -> "HarmonicFit":
        d = json.loads(text)
        return cls(tuple(complex(a, b) for a, b in d["sources"]), tuple(float(v) for v in d["weights"]),
                   tuple(complex(a, b) for a, b in d["poly_coeffs"]), float(d["fit_error"]),
                   complex(*d.get("center", [0.0, 0.0])), float(d.get("scale", 1.0)))


def mean_value_defect(u, center: complex, radius: float, nodes: int = 512) -> float:
    """|mean of u over the circle - u(center)| by the trapezoid rule."""
    z = complex(center) + radius * np.exp(2j * math.pi * np.arange(nodes) / nodes)
    return float(abs(np.mean(u(z)) - u(np.array([complex(center)]))[0]))


def _check_gaps(pieces, grid: GridSpec):
    idx = np.concatenate([m.index for m, _ in pieces])
    lab = np.concatenate([np.full(len(m), n) for n, (m, _) in enumerate(pieces)])
    order = np.argsort(idx, kind="stable")
    idx, lab = idx[order], lab[order]
    if np.any(idx[1:] == idx[:-1]):
        raise PreconditionError("pieces overlap")
    w = grid.width
    cols = idx % w
    for nb, ok in ((idx - 1, cols > 0), (idx + 1, cols < w - 1), (idx - w, idx >= w), (idx + w, idx < w * (grid.height - 1))):
        pos = np.clip(np.searchsorted(idx, nb), 0, idx.size - 1)
        hit = ok & (idx[pos] == nb)
        if np.any(lab[pos][hit] != lab[hit]):
            raise PreconditionError("pieces must be separated by a positive gap")


def _arc_samples(path: np.ndarray, count: int) -> np.ndarray:
    seg = np.hypot(*np.diff(path, axis=0).T)
    cum = np.r_[0.0, np.cumsum(seg)]
    closed = np.allclose(path[0], path[-1])
    total = cum[-1]
    at = (np.arange(count) + 0.5) * total / count if not closed else np.arange(count) * total / count
    return np.c_[np.interp(at, cum, path[:, 0]), np.interp(at, cum, path[:, 1])]


def _largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    if total <= 0 or weights.sum() <= 0:
        return np.zeros(weights.size, dtype=int)
    raw = weights / weights.sum() * total
    out = np.floor(raw).astype(int)
    rest = total - out.sum()
    out[np.argsort(-(raw - out), kind="stable")[:rest]] += 1
    return out


def place_sources(pieces, count: int, offsets=(0.35, 0.65)) -> np.ndarray:
    """Points on two level curves of the distance to each piece, inside the
    gaps between pieces (or at half the piece size for isolated pieces)."""
    if count <= 0:
        return np.empty(0, dtype=complex)
    grid = pieces[0][0].grid
    s = grid.cell_side
    allidx = np.concatenate([m.index for m, _ in pieces])
    rows, cols = np.divmod(allidx, grid.width)
    caps, arrays = [], []
    for m, _ in pieces:
        ext = max(m.rows.max() - m.rows.min(), m.cols.max() - m.cols.min()) + 1
        caps.append(max(2.0, 0.5 * ext))
    pad = int(math.ceil(1.5 * max(caps))) + 3
    r0, c0 = rows.min() - pad, cols.min() - pad
    shape = (rows.max() - r0 + pad + 1, cols.max() - c0 + pad + 1)
    curves, lengths = [], []
    for n, (m, _) in enumerate(pieces):
        a = np.zeros(shape, dtype=bool)
        a[m.rows - r0, m.cols - c0] = True
        edt = ndimage.distance_transform_edt(~a)
        others = np.concatenate([pm.index for k, (pm, _) in enumerate(pieces) if k != n]) if len(pieces) > 1 else None
        gap = np.inf
        if others is not None and others.size:
            orr, occ = np.divmod(others, grid.width)
            gap = float(edt[orr - r0, occ - c0].min())
        D = min(gap, 2 * caps[n])
        piece_curves = []
        for f in offsets:
            level = min(max(f * D, 0.75), gap - 0.75)
            if level <= 0.5:
                raise SourceLimitError("gap between pieces is too narrow for sources")
            piece_curves += [c for c in find_contours(edt, level) if len(c) > 2]
        curves.append(piece_curves)
        lengths.append(sum(float(np.hypot(*np.diff(c, axis=0).T).sum()) for c in piece_curves))
    per_piece = _largest_remainder(np.array(lengths), count)
    pts = []
    for piece_curves, k in zip(curves, per_piece):
        if k == 0 or not piece_curves:
            continue
        lens = np.array([float(np.hypot(*np.diff(c, axis=0).T).sum()) for c in piece_curves])
        for c, kk in zip(piece_curves, _largest_remainder(lens, int(k))):
            if kk:
                rc = _arc_samples(c, int(kk))
                pts.append((grid.origin.real + (rc[:, 1] + c0 + 0.5) * s)
                           + 1j * (grid.origin.imag + (rc[:, 0] + r0 + 0.5) * s))
    return np.concatenate(pts) if pts else np.empty(0, dtype=complex)


def harmonic_fit(F_pieces, source_count: int, degree: int = 8, check_gaps: bool = True) -> HarmonicFit:
    """Least-squares fit of ``sum c_i log|x - q_i|`` plus a harmonic polynomial
    to real piecewise constant data at the piece cell centres."""
    pieces = [(m, float(np.real(v))) for m, v in F_pieces if len(m)]
    if not pieces:
        raise PreconditionError("no non-empty pieces")
    if any(np.imag(v) != 0 for _, v in F_pieces):
        raise PreconditionError("harmonic fitting takes real values")
    grid = common_grid(*(m for m, _ in pieces))
    pieces = [(m.embed(grid), v) for m, v in pieces]
    if check_gaps:
        _check_gaps(pieces, grid)
    z = np.concatenate([m.centers for m, _ in pieces])
    y = np.concatenate([np.full(len(m), v) for m, v in pieces])
    x0, x1 = z.real.min(), z.real.max()
    y0, y1 = z.imag.min(), z.imag.max()
    center = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    scale = max(0.5 * math.hypot(x1 - x0, y1 - y0), grid.cell_side)
    q = place_sources(pieces, source_count)
    w = (z - center) / scale
    wk = w[:, None] ** np.arange(degree + 1)
    cols = [wk.real, wk[:, 1:].imag]
    if q.size:
        cols.append(np.log(np.abs(z[:, None] - q[None, :])))
    A = np.hstack(cols)
    if A.shape[1] > A.shape[0]:
        raise SourceLimitError(f"{A.shape[1]} unknowns for {A.shape[0]} sample cells")
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    sol, *_ = np.linalg.lstsq(A / norms, y, rcond=1e-13)
    sol = sol / norms
    nd = degree + 1
    a = sol[:nd] - 1j * np.r_[0.0, sol[nd:2 * nd - 1]]
    fit = HarmonicFit(tuple(q), tuple(float(c) for c in sol[2 * nd - 1:]), tuple(complex(v) for v in a),
                      0.0, center, scale)
    err = float(np.abs(fit(z) - y).max())
    if not np.isfinite(err):
        raise SourceLimitError("fit produced non-finite values")
    return HarmonicFit(fit.sources, fit.weights, fit.poly_coeffs, err, center, scale)


def harmonic_measure_sequence(v: SampledFunction, n_max: int | None = None, ns=None,
                              sources_per_piece: int = 128, degree: int = 8) -> list[tuple[HarmonicFit, float]]:
    """For each ``n``: reduce the real target, fit the pieces harmonically, and
    record ``area{x in E: |u_n(x) - v(x)| > 1/n}``."""
    if ns is None:
        if not n_max or n_max < 1:
            raise PreconditionError("give n_max >= 1 or an explicit list ns")
        ns = range(1, n_max + 1)
    E = v.domain
    vr = SampledFunction(E, v.values.real)
    out = []
    for n in ns:
        target, _ = reduce_to_piecewise(vr, n)
        pieces = [(m, val.real) for m, val in target.pieces]
        cells = sum(len(m) for m, _ in pieces)
        count = min(sources_per_piece * len(pieces), max(0, cells // 2 - 2 * degree))
        fit = harmonic_fit(pieces, count, degree, check_gaps=False)
        u = fit(E.centers)
        exceed = float(np.count_nonzero(~(np.abs(u - vr.values.real) <= 1.0 / n))) * E.grid.cell_area
        out.append((fit, exceed))
    return out
