"""
Dormand-Prince 5(4) integrator for complex state vectors.

Embedded pair with FSAL, PI step-size control, a caller-supplied step
ceiling that may depend on t, and continuous (dense) output so samples are
placed independently of the internal steps.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from errors import StepSizeError

RHS = Callable[[float, np.ndarray], np.ndarray]
StepCeiling = Union[float, Callable[[float], float], None]

# Butcher tableau
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# 5th order weights are the last row of A (FSAL); error weights are b5 - b4
E = np.array([
    71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40
])
# continuous extension coefficients
D = np.array([
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
    -10690763975 / 1880347072, 701980252875 / 199316789632,
    -1453857185 / 822651844, 69997945 / 29380423,
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
BETA = 0.04
ALPHA = 0.2 - 0.75 * BETA


@dataclass
class IntegrationResult:
    """Samples of the solution plus step statistics."""
    t: np.ndarray
    y: np.ndarray
    n_accepted: int = 0
    n_rejected: int = 0
    n_evaluations: int = 0
    final_step: float = 0.0


def _ceiling(max_step: StepCeiling, t: float) -> float:
    if max_step is None:
        return np.inf
    if callable(max_step):
        return float(max_step(t))
    return float(max_step)


def _error_norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray, rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(fun: RHS, t0: float, y0: np.ndarray, f0: np.ndarray, rtol: float, atol: float) -> float:
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        return 1e-6
    return 0.01 * d0 / d1


def dopri5(
    fun: RHS,
    t0: float,
    y0: np.ndarray,
    t1: float,
    t_eval: Sequence[float],
    rtol: float = 1e-9,
    atol: float = 1e-12,
    max_step: StepCeiling = None,
    first_step: Optional[float] = None,
    max_steps: int = 1_000_000,
    on_step: Optional[Callable[[float, np.ndarray], None]] = None,
) -> IntegrationResult:
    """
    Integrate y' = fun(t, y) from t0 to t1 (t1 >= t0).

    Args:
        fun: Right-hand side returning an array shaped like y
        t0: Start time
        y0: Initial state (complex values allowed)
        t1: End time
        t_eval: Non-decreasing sample times within [t0, t1]
        rtol: Relative tolerance
        atol: Absolute tolerance
        max_step: Constant step ceiling or a function of t
        first_step: Initial step; estimated when omitted
        max_steps: Budget of attempted steps
        on_step: Callback receiving (t, y) after every accepted step

    Returns:
        IntegrationResult with y[i] the solution at t_eval[i]

    Raises:
        StepSizeError: on step underflow or budget exhaustion
    """
    t_eval = np.asarray(t_eval, dtype=float)
    if t1 < t0:
        raise ValueError("integration runs forward only (t1 >= t0)")
    if t_eval.size and (t_eval[0] < t0 or t_eval[-1] > t1 or np.any(np.diff(t_eval) < 0)):
        raise ValueError("t_eval must be sorted and lie within [t0, t1]")

    y = np.array(y0, dtype=complex)
    samples = np.empty((t_eval.size,) + y.shape, dtype=complex)
    index = 0
    while index < t_eval.size and t_eval[index] == t0:
        samples[index] = y
        index += 1

    t = float(t0)
    k = [None] * 7
    k[0] = fun(t, y)
    evaluations = 1
    h = first_step or _initial_step(fun, t, y, k[0], rtol, atol)
    err_prev = 1e-4
    accepted = rejected = 0
    last_rejected = False

    while t < t1:
        if accepted + rejected >= max_steps:
            raise StepSizeError(f"step budget of {max_steps} exhausted at t={t}")
        h = min(h, _ceiling(max_step, t), t1 - t)
        if h <= 1e-14 * max(1.0, abs(t)):
            raise StepSizeError(f"step size underflow (h={h:.3e}) at t={t}")

        for stage in range(1, 7):
            increment = sum(a * k[j] for j, a in enumerate(A[stage]) if a != 0.0)
            k[stage] = fun(t + C[stage] * h, y + h * increment)
        evaluations += 6
        y_new = y + h * sum(a * k[j] for j, a in enumerate(A[6]) if a != 0.0)
        k[6] = fun(t + h, y_new)
        evaluations += 1

        err_vec = h * sum(e * k[j] for j, e in enumerate(E) if e != 0.0)
        err = _error_norm(err_vec, y, y_new, rtol, atol)

        if err <= 1.0:
            t_new = t1 if t1 - (t + h) <= 1e-14 * max(1.0, abs(t1)) else t + h
            while index < t_eval.size and t_eval[index] <= t_new:
                theta = (t_eval[index] - t) / h
                samples[index] = _dense(y, y_new, k, h, theta)
                index += 1

            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * err ** -ALPHA * err_prev ** BETA
                factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            if last_rejected:
                factor = min(1.0, factor)
            err_prev = max(err, 1e-4)

            t, y = t_new, y_new
            k[0] = k[6]
            accepted += 1
            last_rejected = False
            if on_step is not None:
                on_step(t, y)
            h *= factor
        else:
            rejected += 1
            last_rejected = True
            h *= max(MIN_FACTOR, SAFETY * err ** -ALPHA)

    while index < t_eval.size:
        samples[index] = y
        index += 1

    return IntegrationResult(
        t=t_eval,
        y=samples,
        n_accepted=accepted,
        n_rejected=rejected,
        n_evaluations=evaluations,
        final_step=h,
    )


def _dense(y: np.ndarray, y_new: np.ndarray, k: list, h: float, theta: float) -> np.ndarray:
    """Fourth-order continuous extension inside an accepted step."""
    if theta >= 1.0:
        return y_new.copy()
    diff = y_new - y
    bspl = h * k[0] - diff
    r4 = diff - h * k[6] - bspl
    r5 = h * sum(d * k[j] for j, d in enumerate(D) if d != 0.0)
    theta1 = 1.0 - theta
    return y + theta * (diff + theta1 * (bspl + theta * (r4 + theta1 * r5)))
