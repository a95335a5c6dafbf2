"""Canonical evolution strategy: fixed-sigma Gaussian sampling and a rank-weighted mean update."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from gdr.errors import InvalidInputError


@dataclass(frozen=True)
class EsState:
    center: np.ndarray
    sigma: float
    lam: int
    mu: int
    generation: int = 0

    def __post_init__(self):
        if not 1 <= self.mu <= self.lam:
            raise InvalidInputError(f"need 1 <= mu <= lambda, got mu={self.mu}, lambda={self.lam}")
        if self.sigma < 0:
            raise InvalidInputError("sigma must be nonnegative")


def recombination_weights(lam: int, mu: int) -> np.ndarray:
    """Log-rank weights ``ln(mu + 1/2) - ln(i)`` for ranks 1..mu, zero below, summing to 1."""
    if mu < 1 or mu > lam:
        raise InvalidInputError(f"need 1 <= mu <= lambda, got mu={mu}, lambda={lam}")
    raw = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1, dtype=np.float64))
    w = np.zeros(lam, dtype=np.float64)
    w[:mu] = raw / raw.sum()
    return w


def sample_population(es: EsState, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    if count < 0:
        raise InvalidInputError("count must be nonnegative")
    z = rng.standard_normal((count, es.center.shape[0]))
    return [es.center + es.sigma * row for row in z]


def rank(fitnesses) -> np.ndarray:
    """Indices by descending fitness; ties keep ascending original index."""
    f = np.asarray(fitnesses, dtype=np.float64)
    if not np.all(np.isfinite(f)):
        raise InvalidInputError("fitness values must be finite")
    # stable sort on the negation keeps earlier indices first among equals
    return np.argsort(-f, kind="stable")


@dataclass(frozen=True)
class RankedPopulation:
    genomes: list
    fitnesses: np.ndarray
    order: np.ndarray = field(default=None)

    def __post_init__(self):
        f = np.asarray(self.fitnesses, dtype=np.float64)
        object.__setattr__(self, "fitnesses", f)
        if len(self.genomes) != f.shape[0]:
            raise InvalidInputError("one fitness value per genome is required")
        if self.order is None:
            object.__setattr__(self, "order", rank(f))

    def __len__(self):
        return len(self.genomes)

    def rank_of(self, index: int) -> int:
        """0-based rank of the individual at population position ``index``."""
        return int(np.flatnonzero(self.order == index)[0])


def es_update(es: EsState, pop: RankedPopulation, weights: np.ndarray) -> EsState:
    """Move the center by the rank-weighted sum of deviations of the population.

    The sum runs over ranks in order and skips zero weights, so individuals
    ranked below ``mu`` cannot influence the result at all, not even through
    floating-point summation order.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if len(pop) != weights.shape[0]:
        raise InvalidInputError(f"population of {len(pop)} does not match {weights.shape[0]} weights")
    center = es.center
    step = np.zeros_like(center)
    for r, idx in enumerate(pop.order):
        w = weights[r]
        if w == 0.0:
            continue
        g = pop.genomes[idx]
        if g.shape != center.shape:
            raise InvalidInputError("genome length does not match the ES center")
        step += w * (g - center)
    return replace(es, center=center + step, generation=es.generation + 1)
