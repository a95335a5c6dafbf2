"""Run configuration and its ``key = value`` file format.

One assignment per line, ``#`` starts a comment, keys are the RunConfig field
names. ``lambda`` is stored as ``RunConfig.lam`` because it is a Python
keyword. Only ``algo`` is mandatory.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from gdr.envs import ENVIRONMENTS
from gdr.errors import ConfigError
from gdr.genome import PolicyArchitecture
from gdr.injection import InjectionMode
from gdr.td3 import RegularizationMode, Td3Config

ALGOS = ("es", "es_inject", "es_clip", "es_gdr", "es_gdr2", "parallel_td3")
ES_ALGOS = ALGOS[:-1]

_KEY_TO_FIELD = {"lambda": "lam"}
_FIELD_TO_KEY = {v: k for k, v in _KEY_TO_FIELD.items()}


@dataclass(frozen=True)
class RunConfig:
    algo: str
    env: str = "point_mass"
    seed: int = 0
    generations: int = 100
    lam: int = 100
    mu: int = 50
    sigma: float = 10.0
    epsilon: float = 0.01
    clip_factor: float = 1.0
    actor_lr: float = 1e-3
    critic_lr: float = 3e-4
    gamma: float = 0.99
    tau: float = 0.005
    policy_noise: float = 0.2
    noise_clip: float = 0.5
    policy_delay: int = 2
    batch_size: int = 256
    buffer_size: int = 1_000_000
    n_steps: int = 1000
    exploration_std: float = 0.1
    eval_every: int = 10
    eval_reps: int = 1
    output: str = "results.csv"
    hidden: tuple[int, ...] = (128, 128)
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(self.hidden))
        if self.algo not in ALGOS:
            raise ConfigError(f"invalid value for key 'algo': {self.algo!r} (choose from {', '.join(ALGOS)})")
        if self.env not in ENVIRONMENTS:
            raise ConfigError(f"invalid value for key 'env': {self.env!r} (choose from {', '.join(ENVIRONMENTS)})")
        checks = [
            ("generations", self.generations >= 0),
            ("lambda", self.lam >= (2 if self.injects else 1)),
            ("mu", self.algo == "parallel_td3" or 1 <= self.mu <= self.lam),
            ("sigma", self.sigma > 0),
            ("epsilon", self.epsilon >= 0),
            ("clip_factor", self.clip_factor > 0),
            ("actor_lr", self.actor_lr > 0),
            ("critic_lr", self.critic_lr > 0),
            ("gamma", 0 <= self.gamma <= 1),
            ("tau", 0 <= self.tau <= 1),
            ("policy_noise", self.policy_noise >= 0),
            ("noise_clip", self.noise_clip >= 0),
            ("policy_delay", self.policy_delay >= 1),
            ("batch_size", self.batch_size >= 1),
            ("buffer_size", self.buffer_size >= 1),
            ("n_steps", self.n_steps >= 0),
            ("exploration_std", self.exploration_std >= 0),
            ("eval_every", self.eval_every >= 1),
            ("eval_reps", self.eval_reps >= 1),
            ("hidden", len(self.hidden) > 0 and all(h >= 1 for h in self.hidden)),
            ("workers", self.workers >= 1),
        ]
        for key, ok in checks:
            if not ok:
                value = getattr(self, _KEY_TO_FIELD.get(key, key))
                raise ConfigError(f"invalid value for key '{key}': {value!r}")

    @property
    def injects(self) -> bool:
        return self.algo in ("es_inject", "es_clip", "es_gdr", "es_gdr2")

    @property
    def injection(self) -> InjectionMode:
        if not self.injects:
            return InjectionMode("none")
        if self.algo == "es_clip":
            return InjectionMode("clipped", self.clip_factor)
        return InjectionMode("standard")

    @property
    def regularization(self) -> RegularizationMode:
        if self.algo == "es_gdr":
            return RegularizationMode("l2", self.epsilon)
        if self.algo == "es_gdr2":
            return RegularizationMode("squared_l2", self.epsilon)
        return RegularizationMode("none")

    @property
    def td3(self) -> Td3Config:
        return Td3Config(
            actor_lr=self.actor_lr,
            critic_lr=self.critic_lr,
            gamma=self.gamma,
            tau=self.tau,
            policy_noise=self.policy_noise,
            noise_clip=self.noise_clip,
            policy_delay=self.policy_delay,
            batch_size=self.batch_size,
        )

    def architecture(self, obs_dim: int, act_dim: int) -> PolicyArchitecture:
        return PolicyArchitecture(obs_dim, act_dim, self.hidden)

    def with_values(self, **overrides) -> "RunConfig":
        """Copy with overrides given by config key (``lambda`` allowed)."""
        fields = {_KEY_TO_FIELD.get(k, k): v for k, v in overrides.items()}
        return dataclasses.replace(self, **fields)


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
CONFIG_KEYS = tuple(_FIELD_TO_KEY.get(name, name) for name in _FIELDS)


def _coerce(key: str, raw: str):
    name = _KEY_TO_FIELD.get(key, key)
    default = _FIELDS[name].default
    try:
        if name == "hidden":
            return tuple(int(part) for part in raw.split(",") if part.strip())
        if isinstance(default, bool):
            raise ConfigError(f"unsupported boolean key {key}")
        if isinstance(default, int) or name == "seed":
            return int(raw)
        if isinstance(default, float):
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError("not finite")
            return value
        return raw
    except ValueError as exc:
        raise ConfigError(f"invalid value for key '{key}': {raw!r} ({exc})") from None


def parse_value(key: str, raw: str):
    if key not in CONFIG_KEYS:
        raise ConfigError(f"unknown key: {key}")
    return _coerce(key, raw.strip())


def parse_config(text: str) -> RunConfig:
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key: {key}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key: {key}")
        values[key] = _coerce(key, raw.strip())
    if "algo" not in values:
        raise ConfigError("missing key: algo")
    return RunConfig(**{_KEY_TO_FIELD.get(k, k): v for k, v in values.items()})


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for name in _FIELDS:
        value = getattr(cfg, name)
        if name == "hidden":
            value = ",".join(str(h) for h in value)
        lines.append(f"{_FIELD_TO_KEY.get(name, name)} = {value}")
    return "\n".join(lines) + "\n"
