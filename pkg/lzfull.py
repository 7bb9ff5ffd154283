"""
Strong-coupling (beyond-RWA) quantized Landau-Zener dynamics.

Lab Hamiltonian in scaled time tau = u^2 t:

    H = tau sigma_z + a^dag a + g (a + a^dag) sigma_x

The parity transform R (sigma_x on every odd photon sector) makes H diagonal
in the qubit basis. Removing the free-field phase e^{-i n tau} and the
detuning phase e^{-i tau^2 s_x (-1)^n / 2} leaves a tridiagonal system per
qubit branch that is integrated with the adaptive Dormand-Prince pair.

Frames of a ``TransformedState``:

    lab              psi
    parity           phi = R psi
    parity-rotating  xi_{x,n} = e^{i n tau} e^{i tau^2 s_x (-1)^n / 2} phi_{x,n}

with s_x = +1 for the excited branch (x = 1) and -1 for the ground branch.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from config import get_settings
from errors import TruncationError
from integrator import dopri5
from logger import log_solver_call, log_warning, logger
from models import Frame, FullParams, InitialState, JointState, TransformedState

# sigma_z eigenvalue per branch index
BRANCH_SIGN = np.array([-1.0, 1.0])
NORM_DRIFT_LIMIT = 1e-6


def _as_transformed(state: JointState, frame: Frame = Frame.LAB) -> TransformedState:
    if isinstance(state, TransformedState):
        return state
    return TransformedState(amplitudes=state.amplitudes, frame=frame)


def _frame_phase(n_max: int, tau: float) -> np.ndarray:
    """e^{i n tau} e^{i tau^2 s_x (-1)^n / 2} as a (2, n_max+1) table."""
    n = np.arange(n_max + 1)
    parity = np.where(n % 2 == 0, 1.0, -1.0)
    exponent = n[None, :] * tau + 0.5 * tau * tau * BRANCH_SIGN[:, None] * parity[None, :]
    return np.exp(1j * exponent)


def parity_transform(state: TransformedState, inverse: bool = False) -> TransformedState:
    """
    Apply R (lab -> parity) or R^dag (parity -> lab).

    On odd photon sectors exp(-i pi (sigma_x - 1) n / 2) equals sigma_x, so
    the two qubit amplitudes swap; even sectors are untouched. R is its own
    inverse, only the frame bookkeeping differs.

    Raises:
        ValueError: if the state is not in the frame the direction expects
    """
    state = _as_transformed(state)
    expected = Frame.PARITY if inverse else Frame.LAB
    if state.frame is not expected:
        raise ValueError(f"expected a {expected.value}-frame state, got {state.frame.value}")
    amplitudes = state.amplitudes.copy()
    amplitudes[:, 1::2] = amplitudes[::-1, 1::2]
    target = Frame.LAB if inverse else Frame.PARITY
    return TransformedState(amplitudes=amplitudes, frame=target)


def to_rotating_frame(state: TransformedState, tau: float) -> TransformedState:
    """Parity frame -> parity-rotating frame at time tau."""
    if state.frame is not Frame.PARITY:
        raise ValueError(f"expected a parity-frame state, got {state.frame.value}")
    amplitudes = state.amplitudes * _frame_phase(state.n_max, tau)
    return TransformedState(amplitudes=amplitudes, frame=Frame.PARITY_ROTATING)


def from_rotating_frame(state: TransformedState, tau: float) -> TransformedState:
    """Parity-rotating frame at time tau -> parity frame."""
    if state.frame is not Frame.PARITY_ROTATING:
        raise ValueError(f"expected a parity-rotating state, got {state.frame.value}")
    amplitudes = state.amplitudes * np.conj(_frame_phase(state.n_max, tau))
    return TransformedState(amplitudes=amplitudes, frame=Frame.PARITY)


def to_lab(state: TransformedState, tau: Optional[float] = None) -> TransformedState:
    """Exact back-transformation of a state in any frame to the lab frame."""
    state = _as_transformed(state)
    if state.frame is Frame.PARITY_ROTATING:
        if tau is None:
            raise ValueError("a parity-rotating state needs its time tau")
        state = from_rotating_frame(state, tau)
    if state.frame is Frame.PARITY:
        state = parity_transform(state, inverse=True)
    return state


def rhs(tau: float, amps: Union[np.ndarray, TransformedState], g: float) -> np.ndarray:
    """
    d xi / d tau in the parity-rotating frame.

        i xi_n' = g sqrt(n) e^{i tau} e^{i tau^2 s (-1)^n} xi_{n-1}
                + g sqrt(n+1) e^{-i tau} e^{i tau^2 s (-1)^n} xi_{n+1}

    The top row keeps only its downward coupling. Branches never mix.
    """
    if isinstance(amps, TransformedState):
        if amps.frame is not Frame.PARITY_ROTATING:
            raise ValueError("rhs is defined in the parity-rotating frame")
        amps = amps.amplitudes
    xi = np.asarray(amps, dtype=complex)
    size = xi.shape[1]
    if g == 0.0 or size < 2:
        return np.zeros_like(xi)

    root = np.sqrt(np.arange(1, size))
    parity = np.where(np.arange(size) % 2 == 0, 1.0, -1.0)
    detuning = np.exp(1j * tau * tau * BRANCH_SIGN[:, None] * parity[None, :])

    coupled = np.zeros_like(xi)
    coupled[:, 1:] += root * np.exp(1j * tau) * xi[:, :-1]
    coupled[:, :-1] += root * np.exp(-1j * tau) * xi[:, 1:]
    return -1j * g * detuning * coupled


def population_difference_full(state: TransformedState) -> float:
    """<sigma_z> = sum_n (-1)^n (|amp(1,n)|^2 - |amp(0,n)|^2) for parity-frame states."""
    if state.frame is Frame.LAB:
        raise ValueError("population_difference_full expects a parity-frame state")
    populations = state.populations()
    parity = np.where(np.arange(state.n_max + 1) % 2 == 0, 1.0, -1.0)
    return float(np.sum(parity * (populations[1] - populations[0])))


def parity_quantity(state: TransformedState) -> float:
    """Transformed-frame sum_n (|amp(1,n)|^2 - |amp(0,n)|^2); conserved by the dynamics."""
    populations = state.populations()
    return float(np.sum(populations[1]) - np.sum(populations[0]))


@dataclass
class FullTrajectory:
    """Sampled strong-coupling run; states are stored in the parity frame."""
    points: List[Tuple[float, TransformedState]]
    n_max: int
    max_top_population: float = 0.0
    max_norm_drift: float = 0.0
    n_accepted: int = 0
    n_rejected: int = 0
    doublings: int = 0
    warnings: List[str] = field(default_factory=list)

    @property
    def taus(self) -> np.ndarray:
        return np.array([tau for tau, _ in self.points])

    def sigma_z(self) -> np.ndarray:
        return np.array([population_difference_full(s) for _, s in self.points])

    def lab_states(self) -> List[Tuple[float, TransformedState]]:
        return [(tau, to_lab(s)) for tau, s in self.points]

    def parity_drift(self) -> float:
        """Largest departure of the conserved branch imbalance from its start value."""
        values = np.array([parity_quantity(s) for _, s in self.points])
        return float(np.max(np.abs(values - values[0]))) if values.size else 0.0


def integrate_full(
    state0: JointState,
    p: FullParams,
    samples: Optional[int] = None,
    strict: bool = False,
) -> FullTrajectory:
    """
    Integrate a lab-frame state from p.tau0 to p.tau1.

    Args:
        state0: Normalized lab-frame state; padded to p.n_max if smaller
        p: Coupling, window, truncation and tolerances
        samples: Number of uniform output times (defaults to the configured count)
        strict: Raise instead of warn when the top sector fills up

    Returns:
        FullTrajectory with parity-frame states at every sample time

    Raises:
        ValueError: if state0 is not normalized or not in the lab frame
        StepSizeError: if the step controller underflows
        TruncationError: in strict mode, when the top-sector population
            exceeds p.truncation_threshold
    """
    settings = get_settings()
    samples = settings.samples if samples is None else samples
    state0 = _as_transformed(state0)
    if state0.frame is not Frame.LAB:
        raise ValueError("integrate_full starts from a lab-frame state")
    if not state0.is_normalized(1e-9):
        raise ValueError(f"initial state is not normalized (norm={state0.norm():.12f})")
    if state0.n_max != p.n_max:
        state0 = _as_transformed(state0.resized(p.n_max))

    xi0 = to_rotating_frame(parity_transform(state0), p.tau0).amplitudes
    taus = np.linspace(p.tau0, p.tau1, samples) if p.tau1 > p.tau0 else np.array([p.tau0])
    log_solver_call("full", f"g={p.g} tau=[{p.tau0}, {p.tau1}] n_max={p.n_max}")

    monitor = {"top": float(np.sum(np.abs(xi0[:, -1]) ** 2)), "drift": 0.0}

    def on_step(tau: float, xi: np.ndarray) -> None:
        top = float(np.sum(np.abs(xi[:, -1]) ** 2))
        monitor["top"] = max(monitor["top"], top)
        monitor["drift"] = max(monitor["drift"], abs(float(np.sqrt(np.sum(np.abs(xi) ** 2))) - 1.0))
        if strict and top > p.truncation_threshold:
            raise TruncationError(
                f"top-sector population {top:.3e} exceeds {p.truncation_threshold:.1e} "
                f"at tau={tau:.6g} (n_max={p.n_max})"
            )

    result = dopri5(
        lambda tau, xi: rhs(tau, xi, p.g),
        p.tau0,
        xi0,
        p.tau1,
        taus,
        rtol=p.rel_tol,
        atol=p.abs_tol,
        max_step=lambda tau: 0.1 / max(1.0, abs(tau)),
        on_step=on_step,
    )

    points = []
    for tau, xi in zip(result.t, result.y):
        rotating = TransformedState(amplitudes=xi, frame=Frame.PARITY_ROTATING)
        points.append((float(tau), from_rotating_frame(rotating, float(tau))))

    trajectory = FullTrajectory(
        points=points,
        n_max=p.n_max,
        max_top_population=monitor["top"],
        max_norm_drift=monitor["drift"],
        n_accepted=result.n_accepted,
        n_rejected=result.n_rejected,
    )
    if trajectory.max_top_population > p.truncation_threshold:
        message = (
            f"top-sector population reached {trajectory.max_top_population:.3e} "
            f"(n_max={p.n_max}); results may be truncation-limited"
        )
        if strict:
            raise TruncationError(message)
        trajectory.warnings.append(message)
        log_warning(message)
    if trajectory.max_norm_drift > NORM_DRIFT_LIMIT:
        message = f"norm drift {trajectory.max_norm_drift:.3e} over the run"
        trajectory.warnings.append(message)
        log_warning(message)
    return trajectory


def scaled_rel_tol(rel_tol: float, n_max: int) -> float:
    """rel_tol shrunk in proportion to n_max beyond the reference truncation."""
    reference = get_settings().rel_tol_reference_n_max
    return rel_tol * min(1.0, reference / n_max)


def integrate_full_autosized(
    state0: Union[JointState, InitialState],
    p: FullParams,
    threshold: Optional[float] = None,
    max_doublings: Optional[int] = None,
    samples: Optional[int] = None,
) -> FullTrajectory:
    """
    integrate_full with n_max doubled until the top sector stays below threshold.

    Each attempt runs at scaled_rel_tol(p.rel_tol, n_max), so large truncations
    keep the parity and norm drift of small ones.

    Raises:
        TruncationError: if the threshold is still exceeded after max_doublings
    """
    settings = get_settings()
    threshold = settings.autosize_threshold if threshold is None else threshold
    max_doublings = settings.max_nmax_doublings if max_doublings is None else max_doublings

    for attempt in Retrying(
        retry=retry_if_exception_type(TruncationError),
        stop=stop_after_attempt(max_doublings + 1),
        reraise=True,
        before_sleep=lambda retry_state: logger.debug(
            f"Doubling n_max after attempt {retry_state.attempt_number}"
        ),
    ):
        with attempt:
            doublings = attempt.retry_state.attempt_number - 1
            n_max = p.n_max * 2 ** doublings
            if isinstance(state0, InitialState):
                start = JointState.from_initial(state0, n_max)
            else:
                start = state0.resized(n_max)
            params = p.model_copy(update={
                "n_max": n_max,
                "truncation_threshold": threshold,
                "rel_tol": scaled_rel_tol(p.rel_tol, n_max),
            })
            trajectory = integrate_full(start, params, samples=samples, strict=True)
            trajectory.doublings = doublings
            return trajectory
