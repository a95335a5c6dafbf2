"""Experiment loops: ES with actor injection / drift regularization, and parallel TD3.

Both loops are generators yielding one :class:`GenerationLog` per generation,
so callers can stop early; ``run_*`` collect the whole run.

Determinism: every random draw comes from a named stream of
:class:`gdr.rng.RngTree` keyed by generation (and population index for action
noise). Rollouts may run on a thread pool, but their transitions are appended
to the replay buffer in population-index order once all of them finish, so the
result does not depend on ``workers``.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import astuple, dataclass, fields
from typing import Iterator

import numpy as np

from gdr.config import ES_ALGOS, RunConfig
from gdr.envs import Environment, RolloutResult, make_env, rollout
from gdr.errors import InvalidInputError, NumericError
from gdr.es import EsState, RankedPopulation, es_update, recombination_weights, sample_population
from gdr.genome import PolicyArchitecture, init_genome
from gdr.injection import inject, measure_drift
from gdr.replay import ReplayBuffer
from gdr.rng import RngTree
from gdr.td3 import RegularizationMode, Td3State, td3_train

log = logging.getLogger(__name__)

NAN = float("nan")


@dataclass
class GenerationLog:
    generation: int
    total_evals: int
    center_fitness_mean: float
    center_fitness_std: float
    actor_fitness: float
    genetic_distance: float
    actor_update_weight: float
    best_pop_fitness: float


COLUMNS = tuple(f.name for f in fields(GenerationLog))


def is_eval_generation(cfg: RunConfig, generation: int) -> bool:
    """Every ``eval_every`` generations, plus the final one."""
    return generation % cfg.eval_every == 0 or generation == cfg.generations


@contextmanager
def _pool(workers: int):
    if workers <= 1:
        yield None
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield pool


def evaluate_population(
    env: Environment,
    arch: PolicyArchitecture,
    genomes: list,
    pool: ThreadPoolExecutor | None = None,
    exploration_std: float = 0.0,
    rngs: list | None = None,
) -> list[RolloutResult]:
    """Roll out every genome; results come back in population order whatever the scheduling."""
    rngs = rngs if rngs is not None else [None] * len(genomes)

    def one(i):
        return rollout(env, arch, genomes[i], exploration_std, rngs[i])

    if pool is None:
        return [one(i) for i in range(len(genomes))]
    return list(pool.map(one, range(len(genomes))))


def evaluate_center(cfg: RunConfig, genome: np.ndarray, env: Environment | None = None) -> tuple[float, float]:
    """Mean and population std of ``eval_reps`` noiseless rollouts."""
    env = env or make_env(cfg.env)
    arch = cfg.architecture(env.spec.obs_dim, env.spec.act_dim)
    scores = np.array([rollout(env, arch, genome).fitness for _ in range(cfg.eval_reps)])
    return float(scores.mean()), float(scores.std())


def _check_finite(vec: np.ndarray, what: str, generation: int):
    if not np.all(np.isfinite(vec)):
        raise NumericError(f"generation {generation}: {what} contains non-finite values")


def _setup(cfg: RunConfig, regularization: RegularizationMode):
    streams = RngTree(cfg.seed)
    env = make_env(cfg.env)
    arch = cfg.architecture(env.spec.obs_dim, env.spec.act_dim)
    init_rng = streams.generator("init")
    # ES center and actor start from one shared genome
    start = init_genome(arch, init_rng)
    td3 = Td3State.create(arch, start.copy(), init_rng, cfg.td3, regularization)
    buffer = ReplayBuffer(cfg.buffer_size, env.spec.obs_dim, env.spec.act_dim)
    return streams, env, arch, start, td3, buffer


def _train(td3, buffer, cfg, center, streams, generation):
    try:
        td3_train(
            td3,
            buffer,
            cfg.n_steps,
            center,
            streams.generator("buffer_sampling", generation),
            streams.generator("target_noise", generation),
        )
    except NumericError as exc:
        raise NumericError(f"generation {generation}: {exc}") from None
    _check_finite(td3.actor, "actor", generation)


def iter_es_rl(cfg: RunConfig) -> Iterator[GenerationLog]:
    if cfg.algo not in ES_ALGOS:
        raise InvalidInputError(f"run_es_rl does not handle algo {cfg.algo!r}")
    streams, env, arch, start, td3, buffer = _setup(cfg, cfg.regularization)
    es = EsState(start, cfg.sigma, cfg.lam, cfg.mu)
    weights = recombination_weights(cfg.lam, cfg.mu)
    mode = cfg.injection
    total_evals = 0
    with _pool(cfg.workers) as pool:
        for g in range(1, cfg.generations + 1):
            actor = td3.actor.copy()
            n_samples = cfg.lam - 1 if mode.injects else cfg.lam
            samples = sample_population(es, n_samples, streams.generator("es_sampling", g))
            genomes = inject(samples, actor, mode, es)
            results = evaluate_population(env, arch, genomes, pool)
            fitnesses = [r.fitness for r in results]
            _check_finite(np.array(fitnesses), "population fitness", g)
            for r in results:
                buffer.extend(r.transitions)
            total_evals += len(genomes)

            pop = RankedPopulation(genomes, fitnesses)
            actor_index = cfg.lam - 1 if mode.injects else None
            drift = measure_drift(actor, es, pop, weights, actor_index)
            es = es_update(es, pop, weights)
            _check_finite(es.center, "ES center", g)

            _train(td3, buffer, cfg, es.center, streams, g)

            center_mean = center_std = actor_fit = NAN
            if is_eval_generation(cfg, g):
                center_mean, center_std = evaluate_center(cfg, es.center, env)
                total_evals += cfg.eval_reps
                if mode.injects and genomes[-1] is actor:
                    actor_fit = float(pop.fitnesses[-1])
                else:
                    actor_fit = rollout(env, arch, actor).fitness
                    total_evals += 1
                log.info("gen %d center %.4g actor %.4g distance %.4g", g, center_mean, actor_fit, drift.distance)

            yield GenerationLog(
                generation=g,
                total_evals=total_evals,
                center_fitness_mean=center_mean,
                center_fitness_std=center_std,
                actor_fitness=actor_fit,
                genetic_distance=drift.distance,
                actor_update_weight=drift.actor_weight,
                best_pop_fitness=float(pop.fitnesses.max()),
            )


def iter_parallel_td3(cfg: RunConfig) -> Iterator[GenerationLog]:
    if cfg.algo != "parallel_td3":
        raise InvalidInputError(f"run_parallel_td3 does not handle algo {cfg.algo!r}")
    streams, env, arch, _, td3, buffer = _setup(cfg, RegularizationMode("none"))
    total_evals = 0
    with _pool(cfg.workers) as pool:
        for g in range(1, cfg.generations + 1):
            actor = td3.actor.copy()
            rngs = [streams.generator("exploration", g, i) for i in range(cfg.lam)]
            results = evaluate_population(env, arch, [actor] * cfg.lam, pool, cfg.exploration_std, rngs)
            _check_finite(np.array([r.fitness for r in results]), "rollout fitness", g)
            for r in results:
                buffer.extend(r.transitions)
            total_evals += cfg.lam

            _train(td3, buffer, cfg, None, streams, g)

            actor_fit = NAN
            if is_eval_generation(cfg, g):
                actor_fit = rollout(env, arch, td3.actor).fitness
                total_evals += 1
                log.info("gen %d actor %.4g", g, actor_fit)

            yield GenerationLog(
                generation=g,
                total_evals=total_evals,
                center_fitness_mean=NAN,
                center_fitness_std=NAN,
                actor_fitness=actor_fit,
                genetic_distance=0.0,
                actor_update_weight=0.0,
                best_pop_fitness=max(r.fitness for r in results),
            )


def run_es_rl(cfg: RunConfig) -> list[GenerationLog]:
    return list(iter_es_rl(cfg))


def run_parallel_td3(cfg: RunConfig) -> list[GenerationLog]:
    return list(iter_parallel_td3(cfg))


def run(cfg: RunConfig) -> list[GenerationLog]:
    return run_parallel_td3(cfg) if cfg.algo == "parallel_td3" else run_es_rl(cfg)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    return "nan" if math.isnan(value) else f"{value:.9g}"


def write_csv(logs: list[GenerationLog], path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS)
            for entry in logs:
                writer.writerow([_fmt(v) for v in astuple(entry)])
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV to {path}: {exc.strerror}") from exc
