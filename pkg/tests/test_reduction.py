import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetameasure.complexgrid import RegionMask, is_complement_connected
from zetameasure.errors import PreconditionError, ResolutionError
from zetameasure.reduction import (PiecewiseConstantTarget, SampledFunction, local_oscillation, luzin_select,
                                   recompute_report, reduce_to_piecewise, zero_split)

UNIT6 = RegionMask.rect(0, 1, 0, 1, 6)


def brute_bounds(f, target):
    """Error and lost area by a direct loop over cells."""
    err = 0.0
    lookup = dict(zip(f.domain.index.tolist(), f.values.tolist()))
    for m, v in target.pieces:
        for i in m.index.tolist():
            err = max(err, abs(lookup[i] - v))
    lost = (len(f.domain) - sum(len(m) for m, _ in target.pieces)) * f.domain.grid.cell_area
    return err, lost


# --------------------------------------------------------------------------
# Luzin selection


def test_luzin_lipschitz_keeps_everything():
    f = SampledFunction.from_callable(UNIT6, lambda z: z)
    sel = luzin_select(f, UNIT6.cell_side * np.sqrt(2), 0.0)
    assert sel.mask == UNIT6 and sel.within_budget and sel.area_removed == 0


def test_luzin_constant_keeps_everything():
    f = SampledFunction.constant(UNIT6, 3 - 1j)
    sel = luzin_select(f, 1e-3, 0.0)
    assert sel.mask == UNIT6 and sel.area_removed == 0


def test_luzin_half_plane_indicator_drops_interface():
    f = SampledFunction.from_callable(UNIT6, lambda z: (z.real > 0.5).astype(float))
    strip = 2 * 64 * UNIT6.grid.cell_area
    sel = luzin_select(f, 0.5, strip)
    assert sel.within_budget
    # direct scan: interface columns are the cells with a neighbour across x = 0.5
    x = UNIT6.centers.real
    interface = np.abs(x - 0.5) < UNIT6.cell_side
    removed = ~sel.mask.contains_index(UNIT6.index)
    assert np.all(interface[removed])
    assert removed.sum() == 64  # one side of the jump only
    assert local_oscillation(f, sel.mask).max() <= 0.5


def test_luzin_flags_budget():
    f = SampledFunction.from_callable(UNIT6, lambda z: (z.real > 0.5).astype(float))
    sel = luzin_select(f, 0.5, 0.0)
    assert not sel.within_budget
    assert local_oscillation(f, sel.mask).max() <= 0.5


def test_luzin_rejects_bad_bound():
    with pytest.raises(PreconditionError):
        luzin_select(SampledFunction.constant(UNIT6, 1), 0.0, 1.0)


# --------------------------------------------------------------------------
# reduction


def test_reduce_constant_five():
    f = SampledFunction.constant(UNIT6, 5)
    g, rep = reduce_to_piecewise(f, 10)
    assert len(g.pieces) == 1 and g.pieces[0][1] == 5
    assert rep.max_error_on_support == 0 and rep.area_lost < 0.3
    assert g.zero_free and rep.complement_connected


def test_reduce_zero_uses_half_n():
    f = SampledFunction.constant(UNIT6, 0)
    g, rep = reduce_to_piecewise(f, 10)
    assert all(v == 1 / 20 for _, v in g.pieces)
    assert rep.max_error_on_support == pytest.approx(0.05)
    assert rep.max_error_on_support < 2 / 10
    assert g.zero_free


def test_reduce_real_part_brute_scan():
    f = SampledFunction.from_callable(UNIT6, lambda z: z.real)
    g, rep = reduce_to_piecewise(f, 4)
    err, lost = brute_bounds(f, g)
    assert err < 1 / 4
    assert err == pytest.approx(rep.max_error_on_support)
    assert lost == pytest.approx(rep.area_lost) and lost < 3 / 4
    assert is_complement_connected(g.support)


def test_reduce_too_coarse_reports_level():
    K = RegionMask.rect(0, 1, 0, 1, 3)
    f = SampledFunction.from_callable(K, lambda z: np.exp(5j * z))
    with pytest.raises(ResolutionError) as info:
        reduce_to_piecewise(f, 8)
    assert info.value.required_k == 4


def test_reduce_rejects_bad_n():
    with pytest.raises(PreconditionError):
        reduce_to_piecewise(SampledFunction.constant(UNIT6, 1), 0)


def _random_function(seed, K):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    z = K.centers
    x, y = (z.real - 0.6) / 0.3, (z.imag - 0.6) / 0.3
    smooth = sum(c[a, b] * np.cos(np.pi * a * x) * np.cos(np.pi * b * y) for a in range(3) for b in range(3)) / 3
    jump = rng.normal() * (x + rng.uniform(-0.5, 0.5) * y > rng.uniform(0.2, 0.8))
    return SampledFunction(K, smooth + jump)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([1, 2, 4, 8]))
def test_reduction_contract_random(seed, n):
    K = RegionMask.rect(0.6, 0.9, 0.6, 0.9, 7)
    f = _random_function(seed, K)
    g, rep = reduce_to_piecewise(f, n)
    err, lost, conn = recompute_report(f, g)
    assert err < 2 / n
    assert lost < 3 / n + K.boundary_layer().area
    assert conn
    assert all(v != 0 for _, v in g.pieces)


# --------------------------------------------------------------------------
# zero split and text format


def test_zero_split_zero_function():
    g = SampledFunction.constant(UNIT6, 0)
    A, B = zero_split(g, 3)
    assert A == UNIT6 and not B


def test_zero_split_threshold_inclusive():
    g = SampledFunction.constant(UNIT6, 1)
    A, B = zero_split(g, 1)
    assert A == UNIT6 and not B


def test_zero_split_shifted_identity():
    g = SampledFunction.from_callable(UNIT6, lambda z: z - (0.5 + 0.5j))
    A, B = zero_split(g, 4)
    r = np.abs(UNIT6.centers - (0.5 + 0.5j))
    assert np.array_equal(A.contains_index(UNIT6.index), r <= 0.25)
    assert np.array_equal(B.contains_index(UNIT6.index), r >= 0.5)


def test_piecewise_text_roundtrip():
    f = SampledFunction.from_callable(UNIT6, lambda z: np.exp(1j * z))
    g, _ = reduce_to_piecewise(f, 4)
    h = PiecewiseConstantTarget.from_text(g.to_text())
    assert h.support == g.support and h.zero_free == g.zero_free
    assert np.array_equal(h.values, g.values)


def test_piecewise_rejects_overlap():
    a = RegionMask(UNIT6.grid, [0, 1, 2])
    b = RegionMask(UNIT6.grid, [2, 3])
    with pytest.raises(PreconditionError):
        PiecewiseConstantTarget.build(UNIT6.grid, [(a, 1), (b, 2)])
