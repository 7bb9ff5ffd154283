"""
Weak-coupling quantized Landau-Zener dynamics in closed form.

The Hamiltonian H = -tau sigma_z + g (a^dag sigma_- + a sigma_+) splits into
dressed pairs (|n,e>, |n+1,g>) plus the uncoupled vacuum |0,g>. The transform
T = P_e (x) 1 + P_g (x) V, with V the Susskind-Glogower lowering operator,
relabels pair n onto photon sector n, where it evolves as an ordinary
Landau-Zener system with coupling g_n = g sqrt(n+1).

Within a pair the ordered basis is (|n,1>, |n+1,0>) and the amplitudes obey

    i c1' = -tau c1 + g_n c0
    i c0' =  tau c0 + g_n c1
"""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Optional, Tuple

import numpy as np

from cfun import hyp1f1, hyp1f1_asymptotic
from config import get_settings
from errors import DegenerateNormalizationError, NormDriftError, TruncationError
from logger import log_solver_call
from models import Hyp1F1Params, JointState, RWAParams


@dataclass(frozen=True)
class SectorBasisSolutions:
    """Even and odd amplitude solutions of one sector at one time."""
    g_n: float
    tau: float
    c1e: complex
    c1o: complex
    c0e: complex
    c0o: complex

    @property
    def wronskian(self) -> complex:
        return self.c0e * self.c1e - self.c0o * self.c1o


@dataclass(frozen=True)
class SectorPropagator:
    """2x2 propagator of one dressed pair over [tau0, tau1]."""
    u: np.ndarray
    n: int
    tau0: float
    tau1: float

    def unitarity_defect(self) -> float:
        """max |u^dag u - 1| over the matrix entries."""
        return float(np.max(np.abs(self.u.conj().T @ self.u - np.eye(2))))

    def __matmul__(self, other: "SectorPropagator") -> "SectorPropagator":
        """Composition: ``later @ earlier`` spans earlier.tau0 .. later.tau1."""
        if self.n != other.n:
            raise ValueError("cannot compose propagators of different sectors")
        return SectorPropagator(self.u @ other.u, self.n, other.tau0, self.tau1)


def _evaluate(a: complex, b: float, z: complex, asymptotic_order: Optional[int]) -> complex:
    params = Hyp1F1Params(a=a, b=b, z=z)
    if asymptotic_order is not None and abs(z) > get_settings().hyp1f1_switch_radius:
        return hyp1f1_asymptotic(params, order=asymptotic_order)
    return hyp1f1(params)


def _hyp1f1_settings_key() -> Tuple:
    settings = get_settings().model_dump()
    return tuple(sorted((k, v) for k, v in settings.items() if k.startswith("hyp1f1_")))


def basis_solutions(
    g_n: float, tau: float, asymptotic_order: Optional[int] = None
) -> SectorBasisSolutions:
    """
    Closed-form even/odd sector amplitudes at time tau.

    Results are cached per value of the hyp1f1_* settings.

    Args:
        g_n: Effective coupling g sqrt(n+1)
        tau: Scaled time
        asymptotic_order: Fixed number of asymptotic terms beyond the switch
            radius; None lets the dispatcher truncate optimally

    Returns:
        SectorBasisSolutions with even solutions equal to 1 and odd ones 0 at tau = 0
    """
    return _basis_solutions(g_n, tau, asymptotic_order, _hyp1f1_settings_key())


@lru_cache(maxsize=8192)
def _basis_solutions(
    g_n: float, tau: float, asymptotic_order: Optional[int], settings_key: Tuple
) -> SectorBasisSolutions:
    if g_n < 0:
        raise ValueError("g_n must be non-negative")
    if not math.isfinite(tau):
        raise ValueError("tau must be finite")

    kappa = 1j * g_n * g_n / 4.0
    z = 1j * tau * tau
    phase = cmath.exp(-0.5j * tau * tau)
    odd_prefactor = -1j * g_n * tau * phase

    c1e = phase * _evaluate(0.5 + kappa, 0.5, z, asymptotic_order)
    c0e = phase * _evaluate(kappa, 0.5, z, asymptotic_order)
    if g_n == 0.0:
        c1o = c0o = 0j
    else:
        c1o = odd_prefactor * _evaluate(1.0 + kappa, 1.5, z, asymptotic_order)
        c0o = odd_prefactor * _evaluate(0.5 + kappa, 1.5, z, asymptotic_order)
    return SectorBasisSolutions(g_n, tau, c1e, c1o, c0e, c0o)


def effective_coupling(g: float, n: int) -> float:
    return g * math.sqrt(n + 1)


def _blue_propagator(
    g_n: float, tau0: float, tau1: float, asymptotic_order: Optional[int]
) -> np.ndarray:
    start = basis_solutions(g_n, tau0, asymptotic_order)
    end = basis_solutions(g_n, tau1, asymptotic_order)
    gamma_ = start.wronskian
    if abs(gamma_) < 1e-12:
        raise DegenerateNormalizationError(
            f"sector normalization {gamma_} vanished (g_n={g_n}, tau0={tau0})"
        )
    u = np.array(
        [
            [
                start.c0e * end.c1e - start.c0o * end.c1o,
                start.c1e * end.c1o - start.c1o * end.c1e,
            ],
            [
                start.c0e * end.c0o - start.c0o * end.c0e,
                start.c1e * end.c0e - start.c1o * end.c0o,
            ],
        ],
        dtype=complex,
    )
    return u / gamma_


def sector_propagator(
    g: float,
    n: int,
    tau0: float,
    tau1: float,
    asymptotic_order: Optional[int] = None,
    red_detuning: bool = False,
) -> SectorPropagator:
    """
    Propagator of dressed pair n from tau0 to tau1.

    Acts on (c_{n,1}, c_{n,0}), the amplitudes of (|n,1>, |n+1,0>). A red
    detuned sweep runs under H(-tau); since the sector Hamiltonian is real
    symmetric its propagator is the transpose of the blue one over [-tau1, -tau0].
    """
    if n < 0:
        raise ValueError("sector index must be non-negative")
    g_n = effective_coupling(g, n)
    if red_detuning:
        u = _blue_propagator(g_n, -tau1, -tau0, asymptotic_order).T
    else:
        u = _blue_propagator(g_n, tau0, tau1, asymptotic_order)
    return SectorPropagator(u=u, n=n, tau0=tau0, tau1=tau1)


def apply_T(state: JointState) -> JointState:
    """Shift the ground branch down one photon; |0,g> is annihilated."""
    amplitudes = np.zeros_like(state.amplitudes)
    amplitudes[1, :] = state.amplitudes[1, :]
    amplitudes[0, :-1] = state.amplitudes[0, 1:]
    return state.model_copy(update={"amplitudes": amplitudes})


def apply_T_dagger(state: JointState) -> JointState:
    """
    Shift the ground branch up one photon.

    Raises:
        TruncationError: if the ground amplitude at n_max is nonzero
    """
    if state.amplitudes[0, -1] != 0:
        raise TruncationError(
            f"ground-branch amplitude at n_max={state.n_max} would leave the "
            "retained Fock space"
        )
    amplitudes = np.zeros_like(state.amplitudes)
    amplitudes[1, :] = state.amplitudes[1, :]
    amplitudes[0, 1:] = state.amplitudes[0, :-1]
    return state.model_copy(update={"amplitudes": amplitudes})


def vacuum_phase(tau0: float, tau1: float, red_detuning: bool = False) -> complex:
    """Phase acquired by the uncoupled |0,g> component."""
    sign = 1.0 if red_detuning else -1.0
    return cmath.exp(sign * 0.5j * (tau1 * tau1 - tau0 * tau0))


def evolve_rwa(
    state0: JointState, p: RWAParams, asymptotic_order: Optional[int] = None
) -> JointState:
    """
    Evolve a normalized state from p.tau0 to p.tau1.

    Computes U0 (Pi_00 + T^dag U_LZ T) state0, where each dressed pair is mixed
    by its sector propagator and U0 only rephases the vacuum component.
    Unoccupied sectors are skipped.

    Raises:
        ValueError: if state0 is not normalized or does not fit p.n_max
        TruncationError: if an occupied pair reaches past n_max
        NormDriftError: if the output norm departs from 1
    """
    settings = get_settings()
    if state0.n_max != p.n_max:
        raise ValueError(f"state n_max={state0.n_max} does not match params n_max={p.n_max}")
    if not state0.is_normalized(1e-9):
        raise ValueError(f"initial state is not normalized (norm={state0.norm():.12f})")

    vacuum = state0.amplitudes[0, 0] * vacuum_phase(p.tau0, p.tau1, p.red_detuning)

    dressed = apply_T(state0).amplitudes.copy()
    for n in range(p.n_max + 1):
        pair = np.array([dressed[1, n], dressed[0, n]])
        if not np.any(pair):
            continue
        u = sector_propagator(
            p.g, n, p.tau0, p.tau1, asymptotic_order, p.red_detuning
        ).u
        dressed[1, n], dressed[0, n] = u @ pair

    evolved = apply_T_dagger(JointState(amplitudes=dressed)).amplitudes
    evolved[0, 0] += vacuum
    result = JointState(amplitudes=evolved)

    if not result.is_normalized(settings.norm_tolerance):
        raise NormDriftError(f"evolved norm {result.norm():.12f} departs from 1")
    return result


def rwa_trajectory(
    state0: JointState,
    g: float,
    tau0: float,
    taus: Iterable[float],
    red_detuning: bool = False,
    asymptotic_order: Optional[int] = None,
) -> List[Tuple[float, JointState]]:
    """Closed-form states at each requested time, all propagated from tau0."""
    taus = [float(t) for t in taus]
    log_solver_call("rwa", f"g={g} tau0={tau0} samples={len(taus)}")
    trajectory = []
    for tau in taus:
        p = RWAParams(
            g=g, tau0=tau0, tau1=tau, n_max=state0.n_max, red_detuning=red_detuning
        )
        trajectory.append((tau, evolve_rwa(state0, p, asymptotic_order)))
    return trajectory


def population_difference(state: JointState) -> float:
    """<sigma_z> = sum_n |amp(1,n)|^2 - |amp(0,n)|^2."""
    populations = state.populations()
    return float(np.sum(populations[1]) - np.sum(populations[0]))


def excited_probability(state: JointState) -> float:
    return float(np.sum(state.populations()[1]))


def pe_symmetric_asymptotic(g: float, n: int) -> float:
    """Excited probability after a full crossing from the ground state of pair n."""
    if g < 0 or n < 0:
        raise ValueError("g and n must be non-negative")
    return 1.0 - math.exp(-math.pi * g * g * (n + 1))


def pe_half_crossing(g: float, n: int, start_excited: bool) -> float:
    """Excited probability after sweeping from the crossing to +infinity."""
    if g < 0 or n < 0:
        raise ValueError("g and n must be non-negative")
    decay = math.exp(-math.pi * g * g * (n + 1) / 2.0)
    return (1.0 + decay) / 2.0 if start_excited else (1.0 - decay) / 2.0
