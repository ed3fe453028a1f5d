import json

import mpmath
import numpy as np
import pytest

from zetameasure.complexgrid import RegionMask
from zetameasure.errors import DomainError, PreconditionError
from zetameasure.lfun import shift_grid, zeta_spec
from zetameasure.reduction import SampledFunction, reduce_to_piecewise
from zetameasure.universality import (AffineMap, ScanConfig, density_statistic, estimate_to_json,
                                      find_shift_sequence, measure_density_statistic, measure_discrepancy,
                                      place_compact, profile_from_csv, profile_to_csv, self_approximation_statistic,
                                      sup_discrepancy)

ZETA = zeta_spec()
DISK = RegionMask.disk(0.75, 0.03, 7)
SQUARE = RegionMask.rect(0.7, 0.8, 0.1, 0.2, 6)


def own_values(K, t=0.0):
    vals, _ = shift_grid(ZETA, K.centers, [t], 1e-12)
    return SampledFunction(K, vals[0])


def test_self_discrepancy_at_zero_shift():
    assert sup_discrepancy(ZETA, DISK, own_values(DISK), 0.0, 1e-10) < 1e-9


def test_outside_strip_is_domain_error():
    K = RegionMask.rect(2.0, 2.0, 0.0, 0.0, 6)
    with pytest.raises(DomainError):
        sup_discrepancy(ZETA, K, 1.0, 0.0)
    with pytest.raises(DomainError):
        sup_discrepancy(ZETA, RegionMask.disk(0.5, 0.03, 7), 1.0, 0.0)


def test_best_shift_reproducible_and_locally_minimal():
    cfg = ScanConfig(0.0, 500.0, 0.01, 0.8)
    a = density_statistic(ZETA, DISK, 1.0, cfg)
    b = density_statistic(ZETA, DISK, 1.0, cfg)
    assert a == b
    # re-scan one coarse step either side at a ten times finer step
    fine = ScanConfig(a.best_t - 0.01, a.best_t + 0.01, 0.001, 0.8)
    c = density_statistic(ZETA, DISK, 1.0, fine)
    assert c.best_value <= a.best_value + 1e-6
    assert abs(c.best_t - a.best_t) <= 0.01 + 1e-9
    # an accurate recomputation agrees within the scan's evaluator error
    assert abs(sup_discrepancy(ZETA, DISK, 1.0, a.best_t, 1e-8) - a.best_value) < cfg.evaluator_error


def test_measure_discrepancy_self_and_huge_epsilon():
    phi = own_values(SQUARE, 3.0)
    assert measure_discrepancy(ZETA, SQUARE, phi, 3.0, 1e-6) == 0.0
    assert measure_discrepancy(ZETA, SQUARE, 1.0, 0.0, 1e6) == 0.0


def test_measure_discrepancy_brute_cells():
    mpmath.mp.dps = 20
    expect = sum(abs(complex(mpmath.zeta(complex(z))) - 1) > 0.1 for z in SQUARE.centers) * SQUARE.grid.cell_area
    assert measure_discrepancy(ZETA, SQUARE, 1.0, 0.0, 0.1) == pytest.approx(expect)


def test_self_approximation_hits_at_zero():
    cfg = ScanConfig(0.0, 50.0, 0.01, 0.1)
    est = self_approximation_statistic(ZETA, DISK, cfg)
    assert est.fraction > 0 and est.hits >= 1


def test_fraction_monotone_in_epsilon():
    _, prof = density_statistic(ZETA, DISK, 1.0, ScanConfig(0.0, 300.0, 0.05, 0.5, target_error=1e-3),
                                return_profile=True)
    fracs = [np.mean(prof.value < e) for e in (0.2, 0.5, 0.8, 1.6)]
    assert fracs == sorted(fracs)
    ests = [density_statistic(ZETA, DISK, 1.0, ScanConfig(0.0, 300.0, 0.05, e, target_error=1e-3))
            for e in (0.2, 0.5, 0.8, 1.6)]
    assert [e.fraction for e in ests] == pytest.approx(fracs)


def test_constant_target_has_positive_density():
    est = density_statistic(ZETA, DISK, 1.0, ScanConfig(0.0, 400.0, 0.05, 0.8))
    assert est.fraction > 0


def test_serial_and_threaded_scans_identical():
    cfg = ScanConfig(0.0, 100.0, 0.01, 0.2)
    e1, p1 = self_approximation_statistic(ZETA, DISK, cfg, threads=1, return_profile=True)
    e4, p4 = self_approximation_statistic(ZETA, DISK, cfg, threads=4, return_profile=True)
    assert profile_to_csv(p1) == profile_to_csv(p4)
    assert estimate_to_json(e1, cfg) == estimate_to_json(e4, cfg)


def test_profile_and_estimate_roundtrip():
    cfg = ScanConfig(0.0, 5.0, 0.5, 0.8)
    est, prof = density_statistic(ZETA, DISK, 1.0, cfg, return_profile=True)
    back = profile_from_csv(profile_to_csv(prof))
    assert np.array_equal(back.t, prof.t) and np.array_equal(back.value, prof.value)
    assert np.array_equal(back.hit, prof.hit)
    doc = json.loads(estimate_to_json(est, cfg))
    assert doc["estimate"]["fraction"] == est.fraction and doc["config"]["step"] == 0.5


def test_faithful_mode_needs_zero_free_target():
    cfg = ScanConfig(0.0, 1.0, 0.5, 0.8)
    with pytest.raises(PreconditionError):
        density_statistic(ZETA, DISK, 0.0, cfg)
    est = density_statistic(ZETA, DISK, 0.0, ScanConfig(0.0, 1.0, 0.5, 0.8, mode="exploratory"))
    assert est.samples == 3


def test_refinement_measures_hit_set():
    cfg = ScanConfig(0.0, 50.0, 0.05, 0.8, refine_depth=4)
    est = density_statistic(ZETA, DISK, 1.0, cfg)
    assert abs(est.refined_fraction - est.fraction) < 0.05


# --------------------------------------------------------------------------
# measure statistic


def test_measure_statistic_planted_shift():
    t0 = 12.5
    phi = own_values(SQUARE, t0)
    est = measure_density_statistic(ZETA, SQUARE, phi, 0.01, ScanConfig(0.0, 20.0, 0.5, 0.01),
                                    measure_epsilon=1e-6)
    assert est.fraction > 0 and est.best_t == t0


def test_measure_statistic_vacuous_thresholds():
    est = measure_density_statistic(ZETA, SQUARE, 1.0, 1e3, ScanConfig(0.0, 20.0, 0.5, 1e3))
    assert est.fraction == 1.0


def test_measure_statistic_demo_set():
    est = measure_density_statistic(ZETA, SQUARE, 1.0, 0.5, ScanConfig(0.0, 200.0, 0.05, 0.5))
    assert est.fraction > 0


# --------------------------------------------------------------------------
# shift sequences


def test_sequence_planted_target():
    A = RegionMask.rect(0.7, 0.75, 0.0, 0.05, 7)
    t0 = 7.0
    f = own_values(A, t0)
    res = find_shift_sequence(ZETA, f, 1, 10.0, 0.5)
    e = res.entries[0]
    assert e.found and e.composite_ok
    assert e.sup_error <= sup_discrepancy(ZETA, A, f, t0) + 1.0


def test_sequence_constant_one_small_range():
    A = RegionMask.rect(0.7, 0.8, 0.0, 0.1, 6)
    res = find_shift_sequence(ZETA, SampledFunction.constant(A, 1.0), 1, 300.0, 0.05)
    e = res.entries[0]
    assert e.found and e.sup_error < 1 and e.composite_ok


def test_sequence_zero_region_target():
    A = RegionMask.rect(0.7, 0.8, 0.0, 0.1, 6)
    f = SampledFunction.from_callable(A, lambda z: np.where(z.real < 0.75, 0.0, 1.0))
    g, _ = reduce_to_piecewise(f, 1)
    assert g.zero_free and all(v != 0 for _, v in g.pieces)
    res = find_shift_sequence(ZETA, f, 1, 300.0, 0.05)
    e = res.entries[0]
    if e.found:
        # recompute the composite bound from the outputs
        meas = measure_discrepancy(ZETA, A, f, e.t_n, 3.0, 1e-3)
        assert meas < 3.0 + A.boundary_layer().area
    else:
        assert e.t_n is None


# --------------------------------------------------------------------------
# placement


def test_place_identity_inside_box():
    inside = RegionMask.disk(0.75 + 0.5j, 0.03, 7)
    amap, K = place_compact(inside, 0.6, 1.0)
    assert amap == AffineMap(1.0, 0j) and K == inside


def test_place_unit_square():
    unit = RegionMask.rect(0, 1, 0, 1, 4)
    amap, K = place_compact(unit, 0.6, 1.0)
    assert amap.a == pytest.approx(0.2)
    x0, x1, y0, y1 = K.bounds()
    assert 0.6 < x0 and x1 < 1 and 0 < y0 and y1 < 1
    assert K.area == pytest.approx(0.04, rel=0.05)
    assert amap.inverse(amap(0.3 + 0.7j)) == pytest.approx(0.3 + 0.7j)


def test_place_rejects_bad_height():
    with pytest.raises(DomainError):
        place_compact(DISK, 0.6, 0.0)
