"""Placing the RL actor into the ES population, and drift telemetry."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gdr.errors import InvalidInputError
from gdr.es import EsState, RankedPopulation
from gdr.genome import l2_distance

_KINDS = ("none", "standard", "clipped")
_CLIP_SLACK = 1e-12


@dataclass(frozen=True)
class InjectionMode:
    kind: str = "standard"
    clip_factor: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInputError(f"unknown injection mode {self.kind!r}")
        if self.kind == "clipped" and not self.clip_factor > 0:
            raise InvalidInputError("clip_factor must be positive")

    @property
    def injects(self) -> bool:
        return self.kind != "none"


@dataclass(frozen=True)
class DriftSample:
    generation: int
    distance: float
    actor_weight: float


def clip_deviation(actor: np.ndarray, center: np.ndarray, max_norm: float) -> np.ndarray:
    """Shrink ``actor - center`` to length ``max_norm`` if it is longer; direction is kept."""
    if actor.shape != center.shape:
        raise InvalidInputError("actor and center lengths differ")
    if not max_norm > 0:
        raise InvalidInputError("max_norm must be positive")
    dev = actor - center
    norm = float(np.sqrt(np.dot(dev, dev)))
    # the slack absorbs the rounding of a previous clip, so clipping is idempotent
    if norm <= max_norm * (1.0 + _CLIP_SLACK):
        return actor
    return center + dev * (max_norm / norm)


def clip_radius(es: EsState, clip_factor: float) -> float:
    # sigma * sqrt(n) is the expected length of a sampled deviation
    return clip_factor * es.sigma * np.sqrt(es.center.shape[0])


def inject(samples: list, actor: np.ndarray, mode: InjectionMode, es: EsState) -> list:
    if not mode.injects:
        return list(samples)
    if actor.shape != es.center.shape:
        raise InvalidInputError(f"actor length {actor.shape[0]} does not match genome length {es.center.shape[0]}")
    if mode.kind == "clipped":
        actor = clip_deviation(actor, es.center, clip_radius(es, mode.clip_factor))
    return [*samples, actor]


def measure_drift(
    actor: np.ndarray,
    es: EsState,
    pop: RankedPopulation,
    weights: np.ndarray,
    actor_index: int | None = None,
) -> DriftSample:
    """Genetic distance of the actor to ``es.center`` and the weight its rank earns.

    ``actor_index`` is the actor's position in ``pop``; ``None`` means the actor
    was not part of the population, so its weight is 0.
    """
    weight = 0.0
    if actor_index is not None:
        weight = float(weights[pop.rank_of(actor_index)])
    # the population belongs to the generation being produced from ``es``
    return DriftSample(generation=es.generation + 1, distance=l2_distance(actor, es.center), actor_weight=weight)
