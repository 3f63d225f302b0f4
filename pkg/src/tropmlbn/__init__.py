"""Tropical estimation of max-linear Bayesian networks."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .tropical import (INF, identity, kleene_star, matrix_from_json, matrix_to_json,
                       min_plus_mat_vec, min_plus_matmul, normalize, restrict_to_dag,
                       wdp_contains, wdp_violation)
from .polytrope import (Subdivision, bounding_contains, cell_of_point, dual_subdivision,
                        facet_reduce, min_bounding_matrix, pseudovertices, spurious_facets)
from .model import (Dag, InnovationSpec, MlbnModel, atom_sample, generate_sample,
                    model_from_json, model_to_json, random_model, sample_from_innovations)
from .learning import (EstimationResult, ScoreConfig, calibrate_threshold, estimate_with_ordering,
                       known_dag_estimate, score_differences)
from .setcover import census, exact_cover, exact_cover_cells, greedy_cover, refine_check
from .metrics import MetricReport, evaluate
