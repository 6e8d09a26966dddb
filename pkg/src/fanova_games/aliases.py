"""Registry mapping named attribution methods onto game/imputer/effect cells."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .influence import EffectRequest


class UnknownAliasError(KeyError):
    """Requested method name is not in the registry."""

    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True)
class GameTemplate:
    """Game and imputer a method is defined on.

    ``imputer_alternatives`` lists other imputers the method is also run with
    in practice; ``post`` names an extra transformation applied to the score.
    """

    game: str
    imputer: str
    imputer_alternatives: tuple[str, ...] = ()
    post: Optional[str] = None


@dataclass(frozen=True)
class MethodAlias:
    name: str
    template: GameTemplate
    effect: str
    influence_type: str
    summary: str
    order: Optional[int] = None

    def request(self) -> EffectRequest:
        return EffectRequest(self.effect, self.influence_type, self.order)


def _alias(name, game, imputer, effect, influence_type, summary, alternatives=(), post=None, order=None):
    return MethodAlias(name, GameTemplate(game, imputer, tuple(alternatives), post),
                       effect, influence_type, summary, order)


_REGISTRY: dict[str, MethodAlias] = {
    a.name: a
    for a in [
        _alias("occlusion_1", "local", "baseline", "full", "individual",
               "prediction change when one feature is replaced by its baseline value"),
        _alias("occlusion_patch", "local", "baseline", "full", "joint",
               "prediction change when a group is replaced by baseline values"),
        _alias("preddiff", "local", "conditional", "full", "individual",
               "prediction minus the conditional expectation given all other features"),
        _alias("preddiff_patch", "local", "conditional", "full", "joint",
               "group version of preddiff"),
        _alias("bshap", "local", "baseline", "partial", "individual",
               "Shapley value of the baseline-imputed local game"),
        _alias("interventional_shap", "local", "marginal", "partial", "individual",
               "Shapley value of the marginally imputed local game"),
        _alias("observational_shap", "local", "conditional", "partial", "individual",
               "Shapley value of the conditionally imputed local game"),
        _alias("arch_attribute", "local", "baseline", "pure", "individual",
               "F(x_S, b_-S) - F(b); use type=joint for groups"),
        _alias("centered_pdp", "local", "marginal", "pure", "individual",
               "partial dependence at the point minus the mean prediction"),
        _alias("centered_mplot", "local", "conditional", "pure", "individual",
               "conditional expectation at the point minus the mean prediction"),
        _alias("centered_ice", "local", "baseline", "full", "individual",
               "ICE curve centred on the actual prediction"),
        _alias("pfi", "risk", "marginal", "full", "individual",
               "loss increase after marginally perturbing one feature"),
        _alias("grouped_pfi", "risk", "marginal", "full", "joint",
               "loss increase after marginally perturbing a group"),
        _alias("cfi", "risk", "conditional", "full", "individual",
               "loss increase after conditionally resampling one feature"),
        _alias("sage", "risk", "conditional", "partial", "individual",
               "Shapley value of the normalised risk game", alternatives=("marginal",)),
        _alias("closed_sobol", "sensitivity", "marginal", "pure", "individual",
               "variance of the marginalised prediction; use type=joint for groups"),
        _alias("total_sobol", "sensitivity", "marginal", "full", "individual",
               "variance lost when the feature is marginalised out; type=joint for groups"),
        _alias("upsilon", "sensitivity", "marginal", "full", "interaction",
               "superset measure: variance of all effects containing S"),
        _alias("h_statistic", "sensitivity", "marginal", "pure", "interaction",
               "pure pairwise interaction variance over the joint variance",
               post="h_statistic", order=2),
        _alias("sobol_sv", "sensitivity", "marginal", "partial", "individual",
               "Shapley value of the sensitivity game", alternatives=("conditional",)),
        _alias("shapley_gam", "local", "marginal", "pure", "interaction",
               "Moebius transform of the local game (k-SV with k=d)",
               alternatives=("conditional",)),
        _alias("k_sv", "local", "marginal", "partial", "interaction",
               "k-Shapley values up to the requested order", alternatives=("conditional",),
               order=2),
    ]
}


def available_aliases() -> list[str]:
    return sorted(_REGISTRY)


def get_alias(name: str) -> MethodAlias:
    key = name.strip().lower().replace("-", "_")
    if key not in _REGISTRY:
        raise UnknownAliasError(
            f"unknown method alias {name!r}; available: {', '.join(available_aliases())}"
        )
    return _REGISTRY[key]


def method_alias(name: str) -> tuple[EffectRequest, GameTemplate]:
    """Effect request and game template for a named method.

    Raises:
        UnknownAliasError: listing every registered name.
    """
    entry = get_alias(name)
    return entry.request(), entry.template


def alias_table() -> list[dict]:
    """One row per alias, sorted by name."""
    rows = []
    for name in available_aliases():
        a = _REGISTRY[name]
        rows.append({
            "name": name,
            "game": a.template.game,
            "imputer": "/".join((a.template.imputer,) + a.template.imputer_alternatives),
            "effect": a.effect,
            "type": a.influence_type,
            "summary": a.summary,
        })
    return rows
