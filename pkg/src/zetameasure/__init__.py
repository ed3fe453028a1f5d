"""Numerical laboratory for universality of the Riemann zeta function in measure.

Modules
-------
complexgrid   dyadic grids, region masks, complement connectivity and carving
lfun          zeta / Dirichlet L-function evaluation and axiom checks
zeros         argument-principle zero counts, Rouche certificates, interval census
reduction     Luzin selection and reduction to zero-free piecewise constant targets
universality  shift discrepancies, density statistics, shift sequences
polyfree      polynomial fits and zero-free approximation in measure
planar        lens areas, shells, boundary densities, Dirichlet skeleton, harmonic fits
"""
from .complexgrid import (ComponentLabeling, DyadicSquare, GridSpec, RegionMask, carve_connectors,
                          complement_labeling, count_holes, dyadic_partition, is_complement_connected,
                          mask_from_text, mask_to_text, region_components)
from .errors import (ApproximationFailure, CapabilityError, ContourError, DegreeLimitError, DominanceError,
                     DomainError, GeometryError, HeightRangeError, InfeasibleBudgetError, LabError, PoleError,
                     PreconditionError, ResolutionError, ResourceLimitError, SourceLimitError)
from .lfun import (DirichletSeriesSpec, EvalResult, FunctionalData, StripSpec, chi4_spec, dirichlet_spec,
                   euler_product, euler_product_gap, functional_equation_residual, lfun_eval, lfun_values,
                   prime_mean_square, shift_grid, sigma_m_upper, spec_from_rule, strip_of, synthetic_spec,
                   zeta_eval, zeta_spec)
from .planar import (DomainSpec, HarmonicFit, ShellFamily, boundary_density, build_dirichlet_skeleton,
                     domain_from_text, domain_to_text, harmonic_fit, harmonic_measure_sequence, lens_area,
                     mean_value_defect, shell_construct, skeleton_density_check, verify_density)
from .polyfree import Poly, ZeroFreeReport, mergelyan_fit, zero_free_approx_in_measure
from .reduction import (LuzinSelection, PiecewiseConstantTarget, ReductionReport, SampledFunction,
                        luzin_select, recompute_report, reduce_to_piecewise, zero_split)
from .universality import (AffineMap, DensityEstimate, ScanConfig, ScanProfile, ShiftEntry, ShiftSequenceResult,
                           density_statistic, estimate_to_json, find_shift_sequence, measure_density_statistic,
                           measure_discrepancy, place_compact, profile_from_csv, profile_to_csv,
                           self_approximation_statistic, sup_discrepancy)
from .zeros import (IntervalCensus, RoucheResult, contour_winding, interval_census, rouche_compare,
                    winding_number, zero_count_rectangle, zero_free_interval_fraction)

__version__ = "0.1.0"
