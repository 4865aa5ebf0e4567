"""Singular loci of generalized distance-squared mappings of the plane into R^ell."""
from .classify import CrossCapWitness, MapClass, classify_map, crosscap_from_jets, crosscap_test
from .conics import (Conic, UnivariatePoly, classify_conic, common_zeros, eliminate_variable,
                     level_conic, minor_conics, real_roots, tangent_at_point)
from .errors import (DegenerateGradient, DimensionMismatch, InvalidInput, InvalidParams, NotRankOne,
                     SolverInconsistency, UmbrellaError, ZeroEntry, ZeroPolynomial)
from .experiment import ExperimentConfig, ExperimentReport, run_genericity_experiment
from .figure import render_figure
from .foliation import (Box, DegeneracyReport, FoliationLevel, TangencyReport, detect_degeneracy,
                        levels_through_point, tangency_search)
from .locus import SingularPointRecord, singular_curve, solve_singular_points
from .mapping import (GDSMapping, Point2, evaluate, jacobian, make_mapping, make_special,
                      mapping_from_dict, rank_at)

__version__ = "0.1.0"
