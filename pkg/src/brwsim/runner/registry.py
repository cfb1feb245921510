"""The ten benchmark models: five pairs of non-random and random media."""

from dataclasses import dataclass

from brwsim.medium import Constant, MediumSpec, SourceConfiguration, Weibull

SPLIT_RANDOM = Weibull(2.0, 2.26)  # mean ~= 2.003
DEATH_RANDOM = Weibull(2.0, 1.13)  # mean ~= 1.001


@dataclass(frozen=True)
class ModelSpec:
    model_id: int
    description: str
    dimension: int
    medium: MediumSpec

    @property
    def is_random(self) -> bool:
        return self.medium.is_random


def _spec(sources, split, death):
    return MediumSpec(sources, split, death)


_ORIGIN1 = SourceConfiguration.single_point((0,))
_EVERY = SourceConfiguration.every_point()
_SIMPLEX_NEAR = SourceConfiguration.point_set([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
_SIMPLEX_FAR = SourceConfiguration.point_set([(2, 0, 0), (0, 2, 0), (0, 0, 2)])

_MODELS = {
    1: ModelSpec(1, "non-random, supercritical, one source at the origin", 1, _spec(_ORIGIN1, Constant(2), Constant(1))),
    2: ModelSpec(2, "random, supercritical, one source at the origin", 1, _spec(_ORIGIN1, SPLIT_RANDOM, DEATH_RANDOM)),
    3: ModelSpec(3, "non-random, supercritical, homogeneous", 1, _spec(_EVERY, Constant(2), Constant(1))),
    4: ModelSpec(4, "random, supercritical, homogeneous", 1, _spec(_EVERY, SPLIT_RANDOM, DEATH_RANDOM)),
    5: ModelSpec(5, "non-random, critical, homogeneous", 1, _spec(_EVERY, Constant(1), Constant(1))),
    6: ModelSpec(6, "random, critical, homogeneous", 1, _spec(_EVERY, DEATH_RANDOM, DEATH_RANDOM)),
    7: ModelSpec(7, "non-random, supercritical, simplex with side sqrt(2)", 3, _spec(_SIMPLEX_NEAR, Constant(2), Constant(1))),
    8: ModelSpec(8, "non-random, supercritical, simplex with side 2 sqrt(2)", 3, _spec(_SIMPLEX_FAR, Constant(2), Constant(1))),
    9: ModelSpec(9, "random, supercritical, simplex with side sqrt(2)", 3, _spec(_SIMPLEX_NEAR, SPLIT_RANDOM, DEATH_RANDOM)),
    10: ModelSpec(10, "random, supercritical, simplex with side 2 sqrt(2)", 3, _spec(_SIMPLEX_FAR, SPLIT_RANDOM, DEATH_RANDOM)),
}

MODEL_IDS = tuple(_MODELS)


class UnknownModel(KeyError):
    pass


def registry(model_id: int) -> ModelSpec:
    try:
        return _MODELS[int(model_id)]
    except (KeyError, ValueError, TypeError):
        raise UnknownModel(f"unknown model id {model_id!r}; expected 1..10") from None
