"""Adam optimizer with bias correction."""

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass
class AdamState:
    step_count: int
    first_moment: np.ndarray
    second_moment: np.ndarray
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def fresh(cls, n_params, learning_rate, beta1=0.9, beta2=0.999, epsilon=1e-8):
        return cls(
            step_count=0,
            first_moment=np.zeros(n_params),
            second_moment=np.zeros(n_params),
            learning_rate=learning_rate,
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
        )


def adam_step(state, params, grads):
    """One Adam update; returns (new_params, new_state).

    Deterministic, allocation-per-call; the moment estimates are bias
    corrected with the updated step count.
    """
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if params.shape != grads.shape or params.shape != state.first_moment.shape:
        raise InputError("parameter, gradient and moment lengths must agree")
    t = state.step_count + 1
    m = state.beta1 * state.first_moment + (1.0 - state.beta1) * grads
    v = state.beta2 * state.second_moment + (1.0 - state.beta2) * grads * grads
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    new_params = params - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
    new_state = AdamState(
        step_count=t,
        first_moment=m,
        second_moment=v,
        learning_rate=state.learning_rate,
        beta1=state.beta1,
        beta2=state.beta2,
        epsilon=state.epsilon,
    )
    return new_params, new_state
