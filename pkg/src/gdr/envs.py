"""Deterministic continuous-control environments and policy rollouts.

Three analytic tasks stand in for physics simulators:

* ``static_target`` - one step, constant observation, reward ``-||a - t||^2``.
* ``point_mass`` - 2-D double integrator pulled to the origin, horizon 100.
* ``pendulum`` - torque-limited pendulum started at angle pi, horizon 200.

Every episode starts from the same state and ``done`` is raised only when the
horizon is reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gdr.errors import ConfigError, InvalidInputError
from gdr.genome import Layers, PolicyArchitecture
from gdr.replay import ReplayBuffer, Transition


@dataclass(frozen=True)
class EnvSpec:
    name: str
    obs_dim: int
    act_dim: int
    horizon: int


@dataclass(frozen=True)
class EnvState:
    x: np.ndarray  # physical state
    t: int = 0  # steps taken so far


def wrap_angle(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    w = math.pi - (math.pi - theta) % (2.0 * math.pi)
    # the modulo can round up to exactly 2*pi for tiny negative arguments
    return math.pi if w <= -math.pi else w


class Environment:
    spec: EnvSpec

    def reset(self) -> EnvState:
        raise NotImplementedError

    def observe(self, state: EnvState) -> np.ndarray:
        raise NotImplementedError

    def _dynamics(self, x: np.ndarray, a: np.ndarray) -> tuple[np.ndarray, float]:
        raise NotImplementedError

    def step(self, state: EnvState, action) -> tuple[EnvState, float, bool]:
        a = np.asarray(action, dtype=np.float64)
        if a.shape != (self.spec.act_dim,):
            raise InvalidInputError(f"{self.spec.name}: action shape {a.shape}, expected ({self.spec.act_dim},)")
        a = np.clip(a, -1.0, 1.0)
        x, reward = self._dynamics(state.x, a)
        t = state.t + 1
        return EnvState(x, t), reward, t >= self.spec.horizon


class StaticTarget(Environment):
    def __init__(self, k: int = 2):
        self.spec = EnvSpec("static_target", k, k, 1)
        # alternating +0.5 / -0.5, strictly inside the action box
        self.target = 0.5 * (-1.0) ** np.arange(k)
        self._obs = np.ones(k)

    def reset(self) -> EnvState:
        return EnvState(self._obs.copy())

    def observe(self, state: EnvState) -> np.ndarray:
        return state.x

    def _dynamics(self, x, a):
        d = a - self.target
        return x, -float(np.dot(d, d))


class PointMass(Environment):
    dt = 0.1

    def __init__(self):
        self.spec = EnvSpec("point_mass", 4, 2, 100)

    def reset(self) -> EnvState:
        return EnvState(np.array([1.0, 1.0, 0.0, 0.0]))

    def observe(self, state: EnvState) -> np.ndarray:
        return state.x

    def _dynamics(self, x, a):
        vel = x[2:] + self.dt * a
        pos = x[:2] + self.dt * vel
        return np.concatenate([pos, vel]), -math.hypot(pos[0], pos[1])


class Pendulum(Environment):
    dt = 0.05
    max_speed = 8.0
    max_torque = 2.0

    def __init__(self):
        self.spec = EnvSpec("pendulum", 3, 1, 200)

    def reset(self) -> EnvState:
        return EnvState(np.array([math.pi, 0.0]))

    def observe(self, state: EnvState) -> np.ndarray:
        theta, omega = state.x
        return np.array([math.cos(theta), math.sin(theta), omega])

    def _dynamics(self, x, a):
        theta, omega = float(x[0]), float(x[1])
        torque = self.max_torque * float(a[0])
        omega = omega + self.dt * (-10.0 * math.sin(theta) + torque)
        omega = min(max(omega, -self.max_speed), self.max_speed)
        theta = theta + self.dt * omega
        w = wrap_angle(theta)
        reward = -(w * w + 0.1 * omega * omega + 0.001 * torque * torque)
        return np.array([theta, omega]), reward


ENVIRONMENTS = {
    "static_target": StaticTarget,
    "point_mass": PointMass,
    "pendulum": Pendulum,
}


def make_env(name: str) -> Environment:
    try:
        return ENVIRONMENTS[name]()
    except KeyError:
        raise ConfigError(f"unknown environment {name!r}; choose one of {sorted(ENVIRONMENTS)}") from None


def env_reset(env: Environment) -> EnvState:
    return env.reset()


def env_step(env: Environment, state: EnvState, action) -> tuple[EnvState, float, bool]:
    return env.step(state, action)


@dataclass
class RolloutResult:
    fitness: float
    transitions: list[Transition]
    steps: int


def rollout(
    env: Environment,
    arch: PolicyArchitecture,
    genome: np.ndarray,
    exploration_std: float = 0.0,
    rng: np.random.Generator | None = None,
    buffer: ReplayBuffer | None = None,
) -> RolloutResult:
    """Run one episode of the deterministic policy encoded by ``genome``.

    With ``exploration_std > 0`` Gaussian noise drawn from ``rng`` is added to
    every action before clamping to [-1, 1]. The stored action is the one
    actually executed.
    """
    if arch.obs_dim != env.spec.obs_dim or arch.act_dim != env.spec.act_dim:
        raise InvalidInputError(f"architecture dims do not match environment {env.spec.name}")
    if exploration_std > 0 and rng is None:
        raise InvalidInputError("exploration noise needs an rng")
    policy = Layers(arch, genome)
    state = env.reset()
    obs = env.observe(state)
    transitions = []
    fitness = 0.0
    done = False
    while not done:
        action = policy(obs)
        if exploration_std > 0:
            action = np.clip(action + rng.normal(0.0, exploration_std, size=action.shape), -1.0, 1.0)
        state, reward, done = env.step(state, action)
        next_obs = env.observe(state)
        transitions.append(Transition(obs, action, reward, next_obs, done))
        fitness += reward
        obs = next_obs
    if buffer is not None:
        buffer.extend(transitions)
    return RolloutResult(fitness, transitions, len(transitions))
