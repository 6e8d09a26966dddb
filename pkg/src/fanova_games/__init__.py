"""Feature attributions as summaries of imputation-induced fANOVA games."""

from .coalitions import (
    MAX_FEATURES,
    Coalition,
    GameTensor,
    InteractionValues,
    PreconditionError,
    co_moebius_transform,
    discrete_derivative,
    inverse_moebius,
    moebius_transform,
    subsets_of,
)
from .model import ModelExpr, ModelSyntaxError, expand_monomials, evaluate, parse_model
from .gaussian import Dataset, GaussianSpec, conditional, gaussian_moment, load_dataset, sample
from .value_functions import ImputerConfig, ImputerConfigError, ValueFunction, make_value_function
from .games import (
    Game,
    GameConfig,
    build_game,
    fanova_decomposition,
    local_game,
    risk_game,
    sensitivity_game,
)
from .influence import (
    EffectRequest,
    full_effect,
    generalized_value,
    h_statistic,
    k_sii,
    partial_effect,
    pure_effect,
    shapley_interaction_index,
    shapley_value,
    shapley_value_sampled,
    sobol_indices,
    superset_measure,
)
from .aliases import method_alias

__version__ = "0.1.0"
