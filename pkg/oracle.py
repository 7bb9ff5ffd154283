"""
Brute-force reference propagators.

Nothing here reuses the closed forms or the parity frame: the sector oracle
integrates the two-level equations directly and the dense oracle steps the
truncated lab-frame Hamiltonian with exact per-step unitaries.
"""

import math
from typing import Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

from config import get_settings
from errors import OracleConvergenceError
from logger import log_solver_call
from models import DenseHamiltonianSpec, JointState, Model

_BATCH_ELEMENTS = 2 ** 22


def _index(spec: DenseHamiltonianSpec, x: int, n: int) -> int:
    """Flat position of |n, x> (ground branch first)."""
    return x * (spec.n_max + 1) + n


def static_part(spec: DenseHamiltonianSpec) -> np.ndarray:
    """Time-independent part of H; H(tau) = static + tau * diag(drive)."""
    size = spec.dimension
    h = np.zeros((size, size))
    for n in range(spec.n_max):
        coupling = spec.g * math.sqrt(n + 1)
        if spec.model is Model.RWA:
            # a^dag sigma_- : |n, e> -> |n+1, g>
            i, j = _index(spec, 0, n + 1), _index(spec, 1, n)
            h[i, j] = h[j, i] = coupling
        else:
            # (a + a^dag) sigma_x links |n, x> and |n+1, 1-x>
            for x in (0, 1):
                i, j = _index(spec, x, n), _index(spec, 1 - x, n + 1)
                h[i, j] = h[j, i] = coupling
    if spec.model is Model.FULL:
        photons = np.tile(np.arange(spec.n_max + 1, dtype=float), 2)
        h[np.diag_indices(size)] += photons
    return h


def drive_diagonal(spec: DenseHamiltonianSpec) -> np.ndarray:
    """Coefficient of tau on the diagonal: -sigma_z (rwa) or +sigma_z (full)."""
    sigma_z = np.repeat([-1.0, 1.0], spec.n_max + 1)
    return -sigma_z if spec.model is Model.RWA else sigma_z


def dense_hamiltonian(spec: DenseHamiltonianSpec, tau: float) -> np.ndarray:
    """Real symmetric matrix of H(tau) in the flat (x, n) basis."""
    h = static_part(spec)
    h[np.diag_indices(spec.dimension)] += tau * drive_diagonal(spec)
    return h


def _magnus(
    spec: DenseHamiltonianSpec, psi: np.ndarray, tau0: float, tau1: float, n_steps: int
) -> np.ndarray:
    static = static_part(spec)
    drive = drive_diagonal(spec)
    size = spec.dimension
    step = (tau1 - tau0) / n_steps
    chunk = max(1, _BATCH_ELEMENTS // (size * size))
    psi = psi.copy()

    for start in range(0, n_steps, chunk):
        mids = tau0 + (np.arange(start, min(start + chunk, n_steps)) + 0.5) * step
        batch = np.broadcast_to(static, (mids.size, size, size)).copy()
        batch[:, np.arange(size), np.arange(size)] += mids[:, None] * drive[None, :]
        energies, vectors = np.linalg.eigh(batch)
        phases = np.exp(-1j * energies * step)
        for k in range(mids.size):
            v = vectors[k]
            psi = v @ (phases[k] * (v.T @ psi))
    return psi


def _sparse_magnus(
    spec: DenseHamiltonianSpec, psi: np.ndarray, tau0: float, tau1: float, n_steps: int
) -> np.ndarray:
    static = sparse.csr_matrix(static_part(spec))
    drive = drive_diagonal(spec)
    step = (tau1 - tau0) / n_steps
    psi = psi.copy()
    for k in range(n_steps):
        mid = tau0 + (k + 0.5) * step
        h = static + sparse.diags(mid * drive, format="csr")
        psi = expm_multiply(-1j * step * h, psi)
    return psi


def _midpoint_steps(
    spec: DenseHamiltonianSpec, psi: np.ndarray, tau0: float, tau1: float, n_steps: int
) -> np.ndarray:
    if spec.dimension > get_settings().oracle_eigh_max_dimension:
        return _sparse_magnus(spec, psi, tau0, tau1, n_steps)
    return _magnus(spec, psi, tau0, tau1, n_steps)


def dense_propagate(
    spec: DenseHamiltonianSpec,
    state0: JointState,
    tau0: float,
    tau1: float,
    n_steps: int,
    tol: Optional[float] = None,
    check: bool = True,
) -> JointState:
    """
    Midpoint-Magnus propagation of the dense truncated Hamiltonian.

    Each step applies exp(-i H(tau_mid) dtau) through an eigendecomposition, so
    the norm is preserved to rounding. Above oracle_eigh_max_dimension the same
    step is taken as a sparse exponential action on the state. When ``check`` is set the run is
    repeated with half the steps and the two results must agree to ``tol``.

    Raises:
        ValueError: if state0 does not match spec.n_max or is not normalized
        OracleConvergenceError: if the halving check fails
    """
    if state0.n_max != spec.n_max:
        raise ValueError(f"state n_max={state0.n_max} does not match spec n_max={spec.n_max}")
    if not state0.is_normalized(1e-9):
        raise ValueError("initial state is not normalized")
    if n_steps < 2:
        raise ValueError("n_steps must be at least 2")
    tol = get_settings().oracle_convergence_tol if tol is None else tol

    psi0 = state0.amplitudes.reshape(-1)
    if tau1 == tau0:
        return state0.model_copy(update={"amplitudes": state0.amplitudes.copy()})

    log_solver_call("dense", f"{spec.model.value} g={spec.g} n_max={spec.n_max} steps={n_steps}")
    psi = _midpoint_steps(spec, psi0, tau0, tau1, n_steps)
    if check:
        coarse = _midpoint_steps(spec, psi0, tau0, tau1, n_steps // 2)
        deviation = float(np.max(np.abs(psi - coarse)))
        if deviation > tol:
            raise OracleConvergenceError(
                f"halving {n_steps} steps changed the result by {deviation:.3e} (tol {tol:.1e})"
            )
    return state0.model_copy(update={"amplitudes": psi.reshape(2, spec.n_max + 1)})


def default_steps(tau0: float, tau1: float) -> int:
    return max(2, int(math.ceil(get_settings().oracle_steps_per_unit * abs(tau1 - tau0))))


def dense_rwa_oracle(
    g: float,
    state0: JointState,
    tau0: float,
    tau1: float,
    n_steps: Optional[int] = None,
    tol: Optional[float] = None,
) -> JointState:
    spec = DenseHamiltonianSpec(model=Model.RWA, g=g, n_max=state0.n_max)
    n_steps = default_steps(tau0, tau1) if n_steps is None else n_steps
    return dense_propagate(spec, state0, tau0, tau1, n_steps, tol=tol)


def dense_full_oracle(
    g: float,
    state0: JointState,
    tau0: float,
    tau1: float,
    n_steps: Optional[int] = None,
    tol: Optional[float] = None,
) -> JointState:
    spec = DenseHamiltonianSpec(model=Model.FULL, g=g, n_max=state0.n_max)
    n_steps = default_steps(tau0, tau1) if n_steps is None else n_steps
    return dense_propagate(spec, state0, tau0, tau1, n_steps, tol=tol)


def ode_sector_oracle(
    g: float,
    n: int,
    tau0: float,
    tau1: float,
    initial: Sequence[complex],
    rel_tol: Optional[float] = None,
    abs_tol: Optional[float] = None,
) -> np.ndarray:
    """
    Integrate one dressed pair in the basis (|n,1>, |n+1,0>) directly.

        i c1' = -tau c1 + g_n c0
        i c0' =  tau c0 + g_n c1

    Raises:
        OracleConvergenceError: if the integrator reports failure
    """
    settings = get_settings()
    rel_tol = settings.oracle_rel_tol if rel_tol is None else rel_tol
    abs_tol = settings.oracle_abs_tol if abs_tol is None else abs_tol
    y0 = np.asarray(initial, dtype=complex)
    if y0.shape != (2,):
        raise ValueError("initial must be a 2-vector")
    if tau1 == tau0:
        return y0.copy()
    g_n = g * math.sqrt(n + 1)

    def fun(tau: float, c: np.ndarray) -> np.ndarray:
        return -1j * np.array([-tau * c[0] + g_n * c[1], tau * c[1] + g_n * c[0]])

    solution = solve_ivp(
        fun, (tau0, tau1), y0, method="DOP853", rtol=rel_tol, atol=abs_tol
    )
    if not solution.success:
        raise OracleConvergenceError(f"sector oracle failed: {solution.message}")
    return solution.y[:, -1]
