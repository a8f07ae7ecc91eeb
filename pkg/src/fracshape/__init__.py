"""Numerical laboratory for fractional torsion profiles, moving-planes
geometry, and the stability experiments built on them."""

from .specfun import (FracParams, GammaPoleError, ParameterDomainError,
                      gamma, gamma_ns, gamma_nse, gauss_2f1,
                      normalization_constant)
from .domains import (Chart, DiskDeviation, DomainParameterError,
                      ImplicitDomain, ProjectionError, Regularity,
                      ShapeMetrics, ball, boundary_distance, boundary_samples,
                      bump_domain, ellipsoid, erode, from_recipe,
                      radial_extremes, shape_metrics, signed_distance,
                      to_recipe)
from .frlap import (EvaluationPointError, FrlapResult, QuadratureConfig,
                    ScalarField, UnsupportedDimensionError, barrier,
                    frlap_eval, power_field, torsion_ball, torsion_ellipsoid,
                    zero_field)
from .movingplanes import (TAG_ORTHOGONAL, TAG_TANGENCY, TAG_UNRESOLVED,
                           CriticalPlaneResult, critical_lambda, reflect,
                           reflected_domain, support_value, to_record)
from .measures import (MeasureEstimate, MeasureParameterError,
                       boundary_weighted_integral, halton_points, mc_volume,
                       one_sided_diff_measure, slab_measure, sym_diff_measure,
                       write_estimates_csv)
from .seminorm import (EllipsoidChart, OptimBudget, SeminormResult,
                       ellipsoid_chart, ellipsoid_ratio_limit,
                       ellipsoid_seminorm, ellipsoid_seminorm_ratio,
                       lipschitz_seminorm, phi0_quotient, phi0_quotient_sup,
                       psi_profile, psi_profile_check, psi_profile_derivative,
                       richardson_limit)
from .experiments import (FitResult, LemmaResult, ProbeResult, ScanResult,
                          config_hash, counterexample_scan, exponent_fit,
                          geometric_lemma_check, stability_probe, write_table)

__all__ = [name for name in dir() if not name.startswith("_")]
