"""Shapley value estimation for black-box set functions.

The estimators subsample the classical weighted-regression formulation of
attribution values; the default sampler draws complement pairs without
replacement with probabilities proportional to the closed-form row
leverage scores, which concentrates the evaluation budget where the
regression is most sensitive.
"""

from .combinatorics import (
    SetSizeProfile,
    combo_rank,
    combo_unrank,
    leverage_score,
    log_binomial,
    log_leverage_score,
    log_shapley_weight,
    shapley_weight,
)
from .errors import GammaUndefinedError, OracleProtocolError, SolverError
from .estimators import (
    EstimateResult,
    EstimatorConfig,
    ablation_grid,
    estimate,
    kernel_shap,
    leverage_shap,
    optimized_kernel_shap,
)
from .exact import (
    FullSystem,
    ShapleyVector,
    build_full_system,
    exact_constrained_regression,
    exact_shapley,
    gamma_of,
    make_gamma_game,
)
from .games import (
    ExternalOracle,
    NoiseConfig,
    ValueOracle,
    additive_game,
    external_oracle,
    glove_game,
    interaction_game,
    memoized,
    voting_game,
    with_noise,
)
from .gamespec import GameSpec, parse_game_spec
from .regression import SampledSystem, solve_lagrange, solve_projected
from .sampling import (
    PairedSamplePlan,
    bernoulli_sample,
    sample_with_replacement,
    solve_c,
)

__version__ = "0.1.0"

__all__ = [
    "SetSizeProfile", "combo_rank", "combo_unrank", "leverage_score",
    "log_binomial", "log_leverage_score", "log_shapley_weight", "shapley_weight",
    "GammaUndefinedError", "OracleProtocolError", "SolverError",
    "EstimateResult", "EstimatorConfig", "ablation_grid", "estimate",
    "kernel_shap", "leverage_shap", "optimized_kernel_shap",
    "FullSystem", "ShapleyVector", "build_full_system",
    "exact_constrained_regression", "exact_shapley", "gamma_of", "make_gamma_game",
    "ExternalOracle", "NoiseConfig", "ValueOracle", "additive_game",
    "external_oracle", "glove_game", "interaction_game", "memoized",
    "voting_game", "with_noise",
    "GameSpec", "parse_game_spec",
    "SampledSystem", "solve_lagrange", "solve_projected",
    "PairedSamplePlan", "bernoulli_sample", "sample_with_replacement", "solve_c",
    "__version__",
]
