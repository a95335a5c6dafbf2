from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gdr.errors import InvalidInputError, NumericError

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n), 0)


def optimizer_step(params: np.ndarray, grads: np.ndarray, moments: AdamState, lr: float) -> np.ndarray:
    """Bias-corrected Adam step, applied to ``params`` in place (also returned)."""
    if params.shape != grads.shape or moments.m.shape != params.shape:
        raise InvalidInputError("params, grads and moments must share one shape")
    if not np.all(np.isfinite(grads)):
        raise NumericError("non-finite gradient passed to the optimizer")
    moments.t += 1
    moments.m *= BETA1
    moments.m += (1.0 - BETA1) * grads
    moments.v *= BETA2
    moments.v += (1.0 - BETA2) * (grads * grads)
    m_hat = moments.m / (1.0 - BETA1**moments.t)
    v_hat = moments.v / (1.0 - BETA2**moments.t)
    params -= lr * m_hat / (np.sqrt(v_hat) + EPS)
    return params
