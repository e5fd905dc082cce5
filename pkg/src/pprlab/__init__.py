"""Adaptive bidirectional PageRank estimation with exact reference tools."""

from .api import AdaptivePageRank, BidirectionalPageRank, ExactPageRank, InstanceSmartPageRank
from .complexity import ComplexityProfile, compute_profile
from .estimators import (EstimateReport, EstimatorKind, RoundRecord, adaptive_pagerank,
                         bidirectional_ppr, instance_smart)
from .exact import (PprVector, RestrictedPprVector, exact_pagerank, exact_ppr, exact_ppr_matrix,
                    exact_restricted_ppr, exact_through_set_ppr)
from .graph import (Graph, GraphFormatError, Oracle, OracleIndexError, QueryLog, dumps, load_graph,
                    loads, save_graph, transcripts_equal)
from .lab import (complete_minus_block, GraphKind, SurgeryKind, SurgeryRecord, build_G_minus, build_G_plus, generate,
                  mostly_degree_n_test, mu_of_U, remove_in_edges, subdivide_edge)
from .push import PushState, increase_push_budget, push_init, push_to_threshold, pushback
from .walks import McEstimate, Mode, WalkRandomness, WalkStream, monte_carlo, sample_walk

__version__ = "0.1.0"
