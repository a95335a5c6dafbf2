"""TD3 with hand-written reverse-mode gradients and genetic drift regularization.

The actor objective is the usual ``-mean Q1(s, pi(s))`` plus an optional
penalty on the actor's distance to the ES center: ``eps * ||theta - c||``
(GDR) or ``eps * ||theta - c||^2`` (GDR squared).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gdr.adam import AdamState, optimizer_step
from gdr.errors import InvalidInputError, NumericError
from gdr.genome import PolicyArchitecture, backward, forward_cached, init_genome, mlp_forward
from gdr.replay import Batch, ReplayBuffer

_REG_KINDS = ("none", "l2", "squared_l2")


@dataclass(frozen=True)
class Td3Config:
    actor_lr: float = 1e-3
    critic_lr: float = 3e-4
    gamma: float = 0.99
    tau: float = 0.005
    policy_noise: float = 0.2
    noise_clip: float = 0.5
    policy_delay: int = 2
    batch_size: int = 256


@dataclass(frozen=True)
class RegularizationMode:
    kind: str = "none"
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in _REG_KINDS:
            raise InvalidInputError(f"unknown regularization {self.kind!r}")
        if not self.epsilon >= 0:
            raise InvalidInputError("epsilon must be nonnegative")

    @property
    def active(self) -> bool:
        return self.kind != "none" and self.epsilon != 0.0


def critic_architecture(arch: PolicyArchitecture) -> PolicyArchitecture:
    return PolicyArchitecture(arch.obs_dim + arch.act_dim, 1, arch.hidden, output_activation="linear")


@dataclass
class Td3State:
    arch: PolicyArchitecture
    actor: np.ndarray
    critic1: np.ndarray
    critic2: np.ndarray
    target_actor: np.ndarray
    target_critic1: np.ndarray
    target_critic2: np.ndarray
    actor_opt: AdamState
    critic1_opt: AdamState
    critic2_opt: AdamState
    config: Td3Config = field(default_factory=Td3Config)
    regularization: RegularizationMode = field(default_factory=RegularizationMode)
    step: int = 0  # critic updates performed

    @property
    def critic_arch(self) -> PolicyArchitecture:
        return critic_architecture(self.arch)

    @classmethod
    def create(
        cls,
        arch: PolicyArchitecture,
        actor: np.ndarray,
        rng: np.random.Generator,
        config: Td3Config | None = None,
        regularization: RegularizationMode | None = None,
    ) -> "Td3State":
        carch = critic_architecture(arch)
        actor = np.array(actor, dtype=np.float64)
        c1 = init_genome(carch, rng)
        c2 = init_genome(carch, rng)
        return cls(
            arch=arch,
            actor=actor,
            critic1=c1,
            critic2=c2,
            target_actor=actor.copy(),
            target_critic1=c1.copy(),
            target_critic2=c2.copy(),
            actor_opt=AdamState.zeros(actor.shape[0]),
            critic1_opt=AdamState.zeros(c1.shape[0]),
            critic2_opt=AdamState.zeros(c2.shape[0]),
            config=config or Td3Config(),
            regularization=regularization or RegularizationMode(),
        )


def critic_forward(critic_arch: PolicyArchitecture, params: np.ndarray, obs, action):
    """Q-value of (obs, action); a scalar for single inputs, a (B,) array for batches."""
    obs = np.asarray(obs, dtype=np.float64)
    action = np.asarray(action, dtype=np.float64)
    if obs.ndim != action.ndim or obs.shape[-1] + action.shape[-1] != critic_arch.obs_dim:
        raise InvalidInputError(
            f"obs {obs.shape} and action {action.shape} do not fit critic input {critic_arch.obs_dim}"
        )
    q = mlp_forward(critic_arch, params, np.concatenate([obs, action], axis=-1))
    return float(q[0]) if q.ndim == 1 else q[:, 0]


def td3_target(batch: Batch, state: Td3State, rng: np.random.Generator) -> np.ndarray:
    """Clipped double-Q targets with target policy smoothing."""
    if len(batch) == 0:
        raise InvalidInputError("empty batch")
    cfg = state.config
    carch = state.critic_arch
    a_next = mlp_forward(state.arch, state.target_actor, batch.next_states)
    noise = np.clip(rng.normal(0.0, cfg.policy_noise, size=a_next.shape), -cfg.noise_clip, cfg.noise_clip)
    a_next = np.clip(a_next + noise, -1.0, 1.0)
    q1 = critic_forward(carch, state.target_critic1, batch.next_states, a_next)
    q2 = critic_forward(carch, state.target_critic2, batch.next_states, a_next)
    return batch.rewards + (1.0 - batch.dones) * cfg.gamma * np.minimum(q1, q2)


def critic_loss_and_grads(
    critic_arch: PolicyArchitecture, critic1: np.ndarray, critic2: np.ndarray, batch: Batch, y: np.ndarray
):
    """``mean((Q1 - y)^2 + (Q2 - y)^2)`` and its gradients w.r.t. both critics; ``y`` is constant."""
    x = np.concatenate([batch.states, batch.actions], axis=1)
    n = x.shape[0]
    loss = 0.0
    grads = []
    for params in (critic1, critic2):
        q, cache = forward_cached(critic_arch, params, x)
        err = q[:, 0] - y
        loss += float(np.dot(err, err)) / n
        g = np.zeros_like(params)
        backward(critic_arch, params, cache, q, (2.0 / n) * err[:, None], grad=g)
        grads.append(g)
    return loss, grads[0], grads[1]


def critic_step(state: Td3State, batch: Batch, rng: np.random.Generator) -> float:
    """One Adam step on both critics; returns the loss before the step."""
    y = td3_target(batch, state, rng)
    loss, g1, g2 = critic_loss_and_grads(state.critic_arch, state.critic1, state.critic2, batch, y)
    if not np.isfinite(loss):
        raise NumericError(f"critic loss became non-finite at step {state.step}")
    lr = state.config.critic_lr
    optimizer_step(state.critic1, g1, state.critic1_opt, lr)
    optimizer_step(state.critic2, g2, state.critic2_opt, lr)
    return loss


def regularization_term(reg: RegularizationMode, actor: np.ndarray, center: np.ndarray | None):
    """Value and gradient of the drift penalty. At zero distance the L2 penalty uses the zero subgradient."""
    if not reg.active:
        return 0.0, None
    if center is None or center.shape != actor.shape:
        raise InvalidInputError("drift regularization needs an ES center of the actor's length")
    diff = actor - center
    sq = float(np.dot(diff, diff))
    if reg.kind == "squared_l2":
        return reg.epsilon * sq, (2.0 * reg.epsilon) * diff
    dist = np.sqrt(sq)
    if dist == 0.0:
        return 0.0, np.zeros_like(actor)
    return reg.epsilon * dist, (reg.epsilon / dist) * diff


def actor_loss_and_grad(
    arch: PolicyArchitecture,
    actor: np.ndarray,
    critic1: np.ndarray,
    states: np.ndarray,
    es_center: np.ndarray | None,
    reg: RegularizationMode,
):
    carch = critic_architecture(arch)
    n = states.shape[0]
    a, actor_cache = forward_cached(arch, actor, states)
    q, critic_cache = forward_cached(carch, critic1, np.concatenate([states, a], axis=1))
    loss = -float(q[:, 0].sum()) / n
    # chain through the critic's action input; critic parameters stay frozen
    d_x = backward(carch, critic1, critic_cache, q, np.full((n, 1), -1.0 / n), need_input_grad=True)
    grad = np.zeros_like(actor)
    backward(arch, actor, actor_cache, a, d_x[:, arch.obs_dim :], grad=grad)
    reg_value, reg_grad = regularization_term(reg, actor, es_center)
    if reg_grad is not None:
        loss += reg_value
        grad += reg_grad
    return loss, grad


def actor_loss(state: Td3State, batch: Batch, es_center: np.ndarray | None) -> float:
    if len(batch) == 0:
        raise InvalidInputError("empty batch")
    carch = state.critic_arch
    a = mlp_forward(state.arch, state.actor, batch.states)
    base = -float(np.mean(critic_forward(carch, state.critic1, batch.states, a)))
    value, _ = regularization_term(state.regularization, state.actor, es_center)
    return base + value if state.regularization.active else base


def soft_update(target: np.ndarray, source: np.ndarray, tau: float) -> np.ndarray:
    """``target <- (1 - tau) * target + tau * source`` in place."""
    if target.shape != source.shape:
        raise InvalidInputError(f"shape mismatch {target.shape} vs {source.shape}")
    target *= 1.0 - tau
    target += tau * source
    return target


def actor_step(state: Td3State, batch: Batch, es_center: np.ndarray | None) -> float:
    """One Adam step on the (regularized) actor loss, then soft updates of all targets."""
    loss, grad = actor_loss_and_grad(state.arch, state.actor, state.critic1, batch.states, es_center,
                                     state.regularization)
    if not np.all(np.isfinite(grad)):
        raise NumericError(f"actor gradient became non-finite at step {state.step}")
    optimizer_step(state.actor, grad, state.actor_opt, state.config.actor_lr)
    tau = state.config.tau
    soft_update(state.target_actor, state.actor, tau)
    soft_update(state.target_critic1, state.critic1, tau)
    soft_update(state.target_critic2, state.critic2, tau)
    return loss


def td3_train(
    state: Td3State,
    buffer: ReplayBuffer,
    n_steps: int,
    es_center: np.ndarray | None,
    rng: np.random.Generator,
    noise_rng: np.random.Generator | None = None,
) -> Td3State:
    """Run ``n_steps`` critic updates, with a delayed actor update every ``policy_delay`` steps.

    ``rng`` draws minibatches; ``noise_rng`` (defaults to ``rng``) draws the
    target smoothing noise.
    """
    if n_steps < 0:
        raise InvalidInputError("n_steps must be nonnegative")
    noise_rng = rng if noise_rng is None else noise_rng
    cfg = state.config
    for _ in range(n_steps):
        batch = buffer.sample(cfg.batch_size, rng)
        critic_step(state, batch, noise_rng)
        state.step += 1
        if state.step % cfg.policy_delay == 0:
            actor_step(state, batch, es_center)
    return state
