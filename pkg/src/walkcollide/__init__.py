"""Collision statistics of two independent simple random walks on Z^d.

Exact Poissonized collision probabilities through the scaled modified
Bessel kernel, reproducible Monte Carlo estimators, the d <= 2 / d >= 3
finiteness threshold, and extraction of the leading asymptotic constant.
"""

from .analysis import (AsymptoticFit, CosineMoment, FitQualityError,
                       ThresholdVerdict, classify_dimension, cosine_moment,
                       default_fit_grid, discrete_count_tail, dp_distribution,
                       dp_return_prob, dp_return_probs,
                       expected_count_discrete, expected_occupation,
                       fit_leading_constant, kernel_constant, naive_constant)
from .bessel import (CollisionProbDetail, ScaledBesselValue, Z_SWITCH,
                     collision_prob, collision_prob_detail,
                     coordinate_return_prob, i0_quadrature, i0_scaled,
                     series_prob_oracle, series_prob_tail_bound)
from .montecarlo import (Estimate, ThinningReport, mc_collision_prob,
                         mc_embedded_visits, mc_expected_count, mc_occupation,
                         sample_difference_endpoints, thinning_test)
from .quadrature import (QuadratureBudgetError, QuadratureResult,
                         adaptive_quadrature)
from .walks import (DIM_MAX, CollisionRecord, ContinuousEventLog,
                    ContinuousPairState, DiscretePairState, SeedSpec,
                    coordinate_jump_counts, embedded_difference_walk,
                    simulate_continuous_pair, simulate_discrete_pair,
                    uniform_step)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticFit", "CollisionProbDetail", "CollisionRecord",
    "ContinuousEventLog", "ContinuousPairState", "CosineMoment", "DIM_MAX",
    "DiscretePairState", "Estimate", "FitQualityError",
    "QuadratureBudgetError", "QuadratureResult", "ScaledBesselValue",
    "SeedSpec", "ThinningReport", "ThresholdVerdict", "Z_SWITCH",
    "adaptive_quadrature", "classify_dimension", "collision_prob",
    "collision_prob_detail", "coordinate_jump_counts",
    "coordinate_return_prob", "cosine_moment", "default_fit_grid",
    "discrete_count_tail", "dp_distribution", "dp_return_prob",
    "dp_return_probs", "embedded_difference_walk", "expected_count_discrete",
    "expected_occupation", "fit_leading_constant", "i0_quadrature",
    "i0_scaled", "kernel_constant", "mc_collision_prob", "mc_embedded_visits",
    "mc_expected_count", "mc_occupation", "naive_constant",
    "sample_difference_endpoints", "series_prob_oracle",
    "series_prob_tail_bound", "simulate_continuous_pair",
    "simulate_discrete_pair", "thinning_test", "uniform_step",
]
