"""Flat genome encoding of fixed-architecture ReLU MLPs.

A genome is a 1-D float64 numpy array. Parameters are laid out layer by layer:
``W_1`` (shape ``(fan_out, fan_in)``, row-major), then ``b_1``, then ``W_2``,
``b_2`` and so on. Every module in the package shares this layout, so the ES
center, the sampled individuals and the TD3 actor are interchangeable.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from gdr.errors import InvalidInputError

_ACTIVATIONS = ("tanh", "linear")


@dataclass(frozen=True)
class PolicyArchitecture:
    obs_dim: int
    act_dim: int
    hidden: tuple[int, ...] = (128, 128)
    # "tanh" for actors, "linear" for critics; hidden layers are always ReLU
    output_activation: str = "tanh"

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.obs_dim < 1 or self.act_dim < 1:
            raise InvalidInputError("obs_dim and act_dim must be positive")
        if not self.hidden or any(h < 1 for h in self.hidden):
            raise InvalidInputError(f"hidden widths must be a non-empty list of positive ints, got {self.hidden}")
        if self.output_activation not in _ACTIVATIONS:
            raise InvalidInputError(f"unknown output activation {self.output_activation!r}")

    @property
    def layer_dims(self) -> list[tuple[int, int]]:
        sizes = [self.obs_dim, *self.hidden, self.act_dim]
        return list(zip(sizes[:-1], sizes[1:]))

    @property
    def param_count(self) -> int:
        return sum(fan_in * fan_out + fan_out for fan_in, fan_out in self.layer_dims)

    def unpack(self, params: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
        """Return ``(W, b)`` views into ``params``; writing to them writes the genome."""
        if params.ndim != 1 or params.shape[0] != self.param_count:
            raise InvalidInputError(
                f"genome length {params.shape} does not match architecture ({self.param_count} params)"
            )
        layers = []
        offset = 0
        for fan_in, fan_out in self.layer_dims:
            w = params[offset : offset + fan_in * fan_out].reshape(fan_out, fan_in)
            offset += fan_in * fan_out
            b = params[offset : offset + fan_out]
            offset += fan_out
            layers.append((w, b))
        return layers


def param_count(arch: PolicyArchitecture) -> int:
    return arch.param_count


def as_genome(params, arch: PolicyArchitecture | None = None) -> np.ndarray:
    """Validate and convert ``params`` to a float64 genome."""
    g = np.asarray(params, dtype=np.float64)
    if g.ndim != 1:
        raise InvalidInputError(f"genome must be one-dimensional, got shape {g.shape}")
    if arch is not None and g.shape[0] != arch.param_count:
        raise InvalidInputError(f"genome has {g.shape[0]} entries, architecture needs {arch.param_count}")
    if not np.all(np.isfinite(g)):
        raise InvalidInputError("genome contains non-finite entries")
    return g


def init_genome(arch: PolicyArchitecture, rng: np.random.Generator) -> np.ndarray:
    """Uniform fan-in weights in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases."""
    params = np.zeros(arch.param_count, dtype=np.float64)
    for (fan_in, _), (w, _b) in zip(arch.layer_dims, arch.unpack(params)):
        bound = 1.0 / np.sqrt(fan_in)
        w[...] = rng.uniform(-bound, bound, size=w.shape)
    return params


def _forward_layers(layers, x, output_activation):
    h = x
    last = len(layers) - 1
    for i, (w, b) in enumerate(layers):
        z = h @ w.T
        z += b
        if i < last:
            np.maximum(z, 0.0, out=z)
        elif output_activation == "tanh":
            np.tanh(z, out=z)
        h = z
    return h


def mlp_forward(arch: PolicyArchitecture, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate the network on a single input (1-D) or a batch (2-D, one row per input)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != arch.obs_dim or x.ndim not in (1, 2):
        raise InvalidInputError(f"input has shape {x.shape}, expected last dim {arch.obs_dim}")
    return _forward_layers(arch.unpack(params), x, arch.output_activation)


def policy_forward(arch: PolicyArchitecture, genome: np.ndarray, obs) -> np.ndarray:
    return mlp_forward(arch, genome, obs)


class Layers:
    """Pre-unpacked network for repeated evaluation (rollouts)."""

    def __init__(self, arch: PolicyArchitecture, params: np.ndarray):
        self.arch = arch
        self.layers = arch.unpack(params)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return _forward_layers(self.layers, x, self.arch.output_activation)


def forward_cached(arch: PolicyArchitecture, params: np.ndarray, x: np.ndarray):
    """Batched forward pass keeping what the backward pass needs.

    Returns ``(output, cache)`` where ``cache`` lists each layer's input. A
    hidden unit's ReLU derivative is recovered from the next layer's input
    (``relu(z) > 0`` exactly when ``z > 0``).
    """
    layers = arch.unpack(params)
    cache = []
    h = x
    last = len(layers) - 1
    for i, (w, b) in enumerate(layers):
        cache.append(h)
        z = h @ w.T
        z += b
        if i < last:
            np.maximum(z, 0.0, out=z)
        elif arch.output_activation == "tanh":
            np.tanh(z, out=z)
        h = z
    return h, cache


def backward(
    arch: PolicyArchitecture,
    params: np.ndarray,
    cache,
    out,
    d_out: np.ndarray,
    grad: np.ndarray | None = None,
    need_input_grad: bool = False,
):
    """Reverse-mode pass through a network evaluated by :func:`forward_cached`.

    ``d_out`` is dLoss/dOutput with shape (batch, out_dim). Parameter
    gradients are written into ``grad`` (same layout as ``params``) when it is
    given. Returns dLoss/dInput when ``need_input_grad`` is set, else None.
    """
    layers = arch.unpack(params)
    grad_layers = arch.unpack(grad) if grad is not None else None
    if arch.output_activation == "tanh":
        dz = d_out * (1.0 - out * out)
    else:
        dz = d_out
    for i in range(len(layers) - 1, -1, -1):
        w, _ = layers[i]
        h_in = cache[i]
        if grad_layers is not None:
            gw, gb = grad_layers[i]
            np.matmul(dz.T, h_in, out=gw)
            np.sum(dz, axis=0, out=gb)
        if i == 0:
            return dz @ w if need_input_grad else None
        dz = dz @ w
        np.multiply(dz, h_in > 0.0, out=dz)


def l2_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"genome lengths differ: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sqrt(np.dot(d, d)))


def genome_to_bytes(genome: np.ndarray) -> bytes:
    """Little-endian int64 length followed by little-endian float64 entries."""
    g = np.ascontiguousarray(genome, dtype="<f8")
    return struct.pack("<q", g.shape[0]) + g.tobytes()


def genome_from_bytes(data: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    """Decode one genome starting at ``offset``; returns it and the offset past it."""
    if len(data) < offset + 8:
        raise InvalidInputError("truncated genome header")
    (n,) = struct.unpack_from("<q", data, offset)
    start = offset + 8
    end = start + 8 * n
    if n < 0 or len(data) < end:
        raise InvalidInputError("truncated genome payload")
    g = np.frombuffer(data[start:end], dtype="<f8").astype(np.float64)
    return g, end
