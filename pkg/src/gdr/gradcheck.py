"""Finite-difference verification of the hand-written TD3 gradients.

The oracle recomputes each loss sample by sample with the plain forward
functions and differentiates it by central differences; it shares no code with
the batched backward pass it checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gdr.genome import PolicyArchitecture, init_genome, policy_forward
from gdr.replay import Batch
from gdr.td3 import (
    RegularizationMode,
    actor_loss_and_grad,
    critic_architecture,
    critic_forward,
    critic_loss_and_grads,
)

STEP = 1e-6
TOLERANCE = 1e-4
# absolute scale below which a gradient component counts as zero
FLOOR = 1e-8

CHECKS = ("critic", "actor_none", "actor_l2", "actor_squared_l2")


@dataclass
class Instance:
    arch: PolicyArchitecture
    actor: np.ndarray
    critic1: np.ndarray
    critic2: np.ndarray
    center: np.ndarray
    batch: Batch
    y: np.ndarray
    epsilon: float


def random_instance(rng: np.random.Generator, obs_dim=3, hidden=(4, 4), act_dim=2, batch_size=5) -> Instance:
    arch = PolicyArchitecture(obs_dim, act_dim, hidden)
    carch = critic_architecture(arch)
    # nonzero biases keep pre-activations away from the ReLU kink at 0
    actor = init_genome(arch, rng) + 0.1 * rng.standard_normal(arch.param_count)
    c1 = init_genome(carch, rng) + 0.1 * rng.standard_normal(carch.param_count)
    c2 = init_genome(carch, rng) + 0.1 * rng.standard_normal(carch.param_count)
    batch = Batch(
        states=rng.standard_normal((batch_size, obs_dim)),
        actions=rng.uniform(-1, 1, (batch_size, act_dim)),
        rewards=rng.standard_normal(batch_size),
        next_states=rng.standard_normal((batch_size, obs_dim)),
        dones=(rng.random(batch_size) < 0.2).astype(float),
    )
    return Instance(
        arch=arch,
        actor=actor,
        critic1=c1,
        critic2=c2,
        center=actor + 0.3 * rng.standard_normal(arch.param_count),
        batch=batch,
        y=rng.standard_normal(batch_size),
        epsilon=float(rng.choice([0.1, 0.01, 1.0])),
    )


def _oracle_critic_loss(inst: Instance, c1: np.ndarray, c2: np.ndarray) -> float:
    carch = critic_architecture(inst.arch)
    b = inst.batch
    total = 0.0
    for s, a, y in zip(b.states, b.actions, inst.y):
        total += (critic_forward(carch, c1, s, a) - y) ** 2 + (critic_forward(carch, c2, s, a) - y) ** 2
    return total / len(b)


def _oracle_actor_loss(inst: Instance, actor: np.ndarray, reg: RegularizationMode) -> float:
    carch = critic_architecture(inst.arch)
    states = inst.batch.states
    q = [critic_forward(carch, inst.critic1, s, policy_forward(inst.arch, actor, s)) for s in states]
    loss = -sum(q) / len(states)
    dist = np.sqrt(np.sum((actor - inst.center) ** 2))
    if reg.kind == "l2":
        loss += reg.epsilon * dist
    elif reg.kind == "squared_l2":
        loss += reg.epsilon * dist**2
    return loss


def central_difference(f, x: np.ndarray, h: float = STEP) -> np.ndarray:
    grad = np.empty_like(x)
    for i in range(x.shape[0]):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (f(xp) - f(xm)) / (2.0 * h)
    return grad


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), FLOOR)
    return float(np.max(np.abs(analytic - numeric) / denom))


def check_instance(inst: Instance) -> dict[str, float]:
    carch = critic_architecture(inst.arch)
    errors = {}

    _, g1, g2 = critic_loss_and_grads(carch, inst.critic1, inst.critic2, inst.batch, inst.y)
    n1 = central_difference(lambda p: _oracle_critic_loss(inst, p, inst.critic2), inst.critic1)
    n2 = central_difference(lambda p: _oracle_critic_loss(inst, inst.critic1, p), inst.critic2)
    errors["critic"] = max_relative_error(np.concatenate([g1, g2]), np.concatenate([n1, n2]))

    for name, kind in (("actor_none", "none"), ("actor_l2", "l2"), ("actor_squared_l2", "squared_l2")):
        reg = RegularizationMode(kind, inst.epsilon if kind != "none" else 0.0)
        _, grad = actor_loss_and_grad(inst.arch, inst.actor, inst.critic1, inst.batch.states, inst.center, reg)
        numeric = central_difference(lambda p: _oracle_actor_loss(inst, p, reg), inst.actor)
        errors[name] = max_relative_error(grad, numeric)
    return errors


def run_gradcheck(n_instances: int = 20, seed: int = 0) -> dict[str, float]:
    """Max relative error per check over ``n_instances`` random tiny problems."""
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(CHECKS, 0.0)
    for _ in range(n_instances):
        for name, err in check_instance(random_instance(rng)).items():
            worst[name] = max(worst[name], err)
    return worst
