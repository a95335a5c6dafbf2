"""Fixed-capacity ring replay buffer with uniform sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gdr.errors import EmptyBufferError, InvalidInputError


@dataclass(frozen=True)
class Transition:
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    done: bool


@dataclass
class Batch:
    states: np.ndarray  # (B, obs_dim)
    actions: np.ndarray  # (B, act_dim)
    rewards: np.ndarray  # (B,)
    next_states: np.ndarray  # (B, obs_dim)
    dones: np.ndarray  # (B,) as 0.0 / 1.0

    def __len__(self):
        return self.rewards.shape[0]

    def transitions(self) -> list[Transition]:
        return [
            Transition(self.states[i], self.actions[i], float(self.rewards[i]), self.next_states[i], bool(self.dones[i]))
            for i in range(len(self))
        ]


class ReplayBuffer:
    """Ring buffer; once full, the oldest transition is overwritten first."""

    def __init__(self, capacity: int, obs_dim: int, act_dim: int):
        if capacity < 1:
            raise InvalidInputError("capacity must be positive")
        self.capacity = capacity
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        # np.zeros maps lazily, so a large capacity costs nothing until filled
        self._states = np.zeros((capacity, obs_dim))
        self._actions = np.zeros((capacity, act_dim))
        self._rewards = np.zeros(capacity)
        self._next_states = np.zeros((capacity, obs_dim))
        self._dones = np.zeros(capacity)
        self.size = 0
        self.cursor = 0

    def __len__(self):
        return self.size

    def push(self, t: Transition) -> None:
        state = np.asarray(t.state, dtype=np.float64)
        action = np.asarray(t.action, dtype=np.float64)
        next_state = np.asarray(t.next_state, dtype=np.float64)
        if state.shape != (self.obs_dim,) or next_state.shape != (self.obs_dim,) or action.shape != (self.act_dim,):
            raise InvalidInputError(
                f"transition dims {state.shape}/{action.shape}/{next_state.shape} "
                f"do not match buffer ({self.obs_dim}, {self.act_dim})"
            )
        if not (np.all(np.isfinite(state)) and np.all(np.isfinite(action)) and np.all(np.isfinite(next_state))
                and np.isfinite(t.reward)):
            raise InvalidInputError("transition contains non-finite values")
        i = self.cursor
        self._states[i] = state
        self._actions[i] = action
        self._rewards[i] = t.reward
        self._next_states[i] = next_state
        self._dones[i] = 1.0 if t.done else 0.0
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def extend(self, transitions) -> None:
        """Append in order; same result as pushing one by one, validated up front as a block."""
        transitions = list(transitions)
        n = len(transitions)
        if n == 0:
            return
        try:
            states = np.array([t.state for t in transitions], dtype=np.float64)
            actions = np.array([t.action for t in transitions], dtype=np.float64)
            next_states = np.array([t.next_state for t in transitions], dtype=np.float64)
        except ValueError:
            raise InvalidInputError("transitions have inconsistent dimensions") from None
        rewards = np.array([t.reward for t in transitions], dtype=np.float64)
        dones = np.array([1.0 if t.done else 0.0 for t in transitions])
        if states.shape != (n, self.obs_dim) or next_states.shape != (n, self.obs_dim) or actions.shape != (
            n,
            self.act_dim,
        ):
            raise InvalidInputError(
                f"transition dims {states.shape[1:]}/{actions.shape[1:]}/{next_states.shape[1:]} "
                f"do not match buffer ({self.obs_dim}, {self.act_dim})"
            )
        if not all(np.all(np.isfinite(a)) for a in (states, actions, next_states, rewards)):
            raise InvalidInputError("transition contains non-finite values")
        if n > self.capacity:
            # only the newest ``capacity`` survive; keep the cursor where n pushes would leave it
            self.cursor = (self.cursor + n - self.capacity) % self.capacity
            states, actions, rewards, next_states, dones = (
                a[n - self.capacity :] for a in (states, actions, rewards, next_states, dones)
            )
            n = self.capacity
        idx = (self.cursor + np.arange(n)) % self.capacity
        self._states[idx] = states
        self._actions[idx] = actions
        self._rewards[idx] = rewards
        self._next_states[idx] = next_states
        self._dones[idx] = dones
        self.cursor = (self.cursor + n) % self.capacity
        self.size = min(self.size + n, self.capacity)

    def _gather(self, idx: np.ndarray) -> Batch:
        return Batch(
            self._states[idx], self._actions[idx], self._rewards[idx], self._next_states[idx], self._dones[idx]
        )

    def contents(self) -> list[Transition]:
        """Stored transitions, oldest first."""
        start = self.cursor if self.size == self.capacity else 0
        idx = (start + np.arange(self.size)) % self.capacity
        return self._gather(idx).transitions()

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        """Uniform sampling with replacement."""
        if self.size == 0:
            raise EmptyBufferError("cannot sample from an empty replay buffer")
        return self._gather(rng.integers(0, self.size, size=batch_size))
