"""
Parameter sweeps behind the ``figure`` and ``asymptote`` commands.

Every sweep is split into independent cells (one trajectory or one dressed
pair each) that run on a thread pool; rows are assembled in submission order
so the output does not depend on scheduling.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import get_settings
from logger import log_sweep_cell
from lzfull import integrate_full, integrate_full_autosized
from lzrwa import (
    effective_coupling,
    evolve_rwa,
    excited_probability,
    pe_half_crossing,
    pe_symmetric_asymptotic,
    population_difference,
    rwa_trajectory,
)
from models import Crossing, FullParams, InitialState, JointState, QubitLevel, RWAParams, ResultTable

FIGURE1_PHOTONS = (1, 11, 31, 101)
FIGURE1_FINITE_START = -10.0
FIGURE1_WINDOW = (-10.0, 10.0)
FIGURE2_FINITE_START = -10.0
FIGURE3_PHOTONS = (0, 10, 30, 100)
FIGURE3_WINDOWS = {"short": 10.0, "long": 100.0}
FIGURE5_COUPLINGS = (0.1, 1.0, 3.0, 10.0)
FIGURE5_WINDOW = (1.0, 11.0)
FIGURE5_N_MAX = 100

Cell = Tuple[str, Callable[[], Any]]


def run_cells(cells: Sequence[Cell]) -> List[Any]:
    """Evaluate (label, job) cells concurrently; results keep cell order."""
    total = len(cells)
    with ThreadPoolExecutor(max_workers=get_settings().max_workers) as executor:
        futures = [executor.submit(job) for _, job in cells]
        results = []
        for index, ((label, _), future) in enumerate(zip(cells, futures), start=1):
            results.append(future.result())
            log_sweep_cell(label, index, total)
    return results


def describe(**values: Any) -> Dict[str, str]:
    """Metadata dict with floats rendered exactly."""
    return {
        key: repr(value) if isinstance(value, float) else str(value)
        for key, value in values.items()
    }


def rwa_rows(g: float, initial: InitialState, tau0: float, taus: Sequence[float]) -> List[list]:
    """(tau, sigma_z, pe, norm) for a closed-form run sampled at taus."""
    state0 = JointState.from_initial(initial, initial.photons + 1)
    return [
        [tau, population_difference(state), excited_probability(state), state.norm()]
        for tau, state in rwa_trajectory(state0, g, tau0, taus)
    ]


def final_excited_probability(
    g: float,
    initial: InitialState,
    tau0: float,
    tau1: float,
    asymptotic_order: Optional[int] = None,
) -> float:
    """P_e after a single closed-form sweep from tau0 to tau1."""
    n_max = initial.photons + 1
    state0 = JointState.from_initial(initial, n_max)
    p = RWAParams(g=g, tau0=tau0, tau1=tau1, n_max=n_max)
    return excited_probability(evolve_rwa(state0, p, asymptotic_order))


def pair_start(n: int, qubit: QubitLevel) -> InitialState:
    """Member of dressed pair n with the given qubit level."""
    photons = n + 1 if qubit is QubitLevel.GROUND else n
    return InitialState(photons=photons, qubit=qubit)


def figure_1(g: float = 0.1, samples: Optional[int] = None) -> ResultTable:
    """<sigma_z>(tau) for |n,g>, interaction switched on at -infinity or at tau = -10."""
    settings = get_settings()
    samples = settings.samples if samples is None else samples
    taus = np.linspace(*FIGURE1_WINDOW, samples)
    starts = (-settings.asymptotic_time, FIGURE1_FINITE_START)
    grid = [(tau0, photons) for tau0 in starts for photons in FIGURE1_PHOTONS]

    cells = []
    for tau0, photons in grid:
        initial = InitialState(photons=photons, qubit=QubitLevel.GROUND)
        cells.append((
            f"tau0={tau0:g} {initial}",
            lambda tau0=tau0, initial=initial: rwa_rows(g, initial, tau0, taus),
        ))

    rows = []
    for (tau0, photons), cell_rows in zip(grid, run_cells(cells)):
        for tau, sigma_z, pe, _ in cell_rows:
            rows.append([tau0, photons, tau, sigma_z, pe])

    return ResultTable(
        title="figure 1: population difference from |n,g>",
        metadata=describe(
            command="figure", figure=1, g=g, samples=samples,
            tau0=",".join(repr(t) for t in starts),
            photons=",".join(str(n) for n in FIGURE1_PHOTONS),
            tau_window=f"{FIGURE1_WINDOW[0]!r},{FIGURE1_WINDOW[1]!r}",
        ),
        columns=["tau0", "photons", "tau", "sigma_z", "pe"],
        rows=rows,
    )


def _full_crossing_row(
    g: float, n: int, order: int, horizon: float, finite_start: bool = True
) -> list:
    initial = pair_start(n, QubitLevel.GROUND)
    row = [
        n,
        initial.photons,
        effective_coupling(g, n),
        pe_symmetric_asymptotic(g, n),
        final_excited_probability(g, initial, -horizon, horizon, order),
    ]
    if finite_start:
        # the fixed-order sum is not unitary to the norm tolerance at tau = -10
        row.append(final_excited_probability(g, initial, FIGURE2_FINITE_START, horizon))
    return row


def figure_2(g: float = 0.1, n_sectors: int = 102) -> ResultTable:
    """
    Asymptotic P_e after a full crossing from the ground member of every pair.

    The symmetric window (-T, T) uses the fixed-order asymptotic expansion,
    T the configured asymptotic time. The finite start (-10, T) evaluates the
    start point through the regular 1F1 dispatch.
    """
    settings = get_settings()
    order = settings.hyp1f1_asymptotic_order
    horizon = settings.asymptotic_time
    cells = [
        (f"pair n={n}", lambda n=n: _full_crossing_row(g, n, order, horizon))
        for n in range(n_sectors)
    ]
    return ResultTable(
        title="figure 2: asymptotic excited probability, full crossing",
        metadata=describe(
            command="figure", figure=2, g=g, n_sectors=n_sectors,
            asymptotic_order=order, asymptotic_time=horizon,
            finite_start=FIGURE2_FINITE_START, start="fock:n+1,g",
        ),
        columns=["n", "photons", "g_n", "pe_formula", "pe_numeric", "pe_numeric_finite_start"],
        rows=run_cells(cells),
    )


def figure_3(g: float = 0.1, samples: Optional[int] = None) -> ResultTable:
    """<sigma_z>(tau) for |n,e> switched on at the crossing, short and long windows."""
    settings = get_settings()
    samples = settings.samples if samples is None else samples
    grid = [(window, photons) for window in FIGURE3_WINDOWS for photons in FIGURE3_PHOTONS]

    cells = []
    for window, photons in grid:
        initial = InitialState(photons=photons, qubit=QubitLevel.EXCITED)
        taus = np.linspace(0.0, FIGURE3_WINDOWS[window], samples)
        cells.append((
            f"{window} {initial}",
            lambda initial=initial, taus=taus: rwa_rows(g, initial, 0.0, taus),
        ))

    rows = []
    for (window, photons), cell_rows in zip(grid, run_cells(cells)):
        for tau, sigma_z, pe, _ in cell_rows:
            rows.append([window, photons, tau, sigma_z, pe])

    return ResultTable(
        title="figure 3: population difference from |n,e> at the crossing",
        metadata=describe(
            command="figure", figure=3, g=g, samples=samples, tau0=0.0,
            photons=",".join(str(n) for n in FIGURE3_PHOTONS),
            windows=",".join(f"{k}={v!r}" for k, v in FIGURE3_WINDOWS.items()),
        ),
        columns=["window", "photons", "tau", "sigma_z", "pe"],
        rows=rows,
    )


def _half_crossing_row(g: float, n: int, qubit: QubitLevel, order: int, horizon: float) -> list:
    initial = pair_start(n, qubit)
    return [
        n,
        qubit.value,
        initial.photons,
        pe_half_crossing(g, n, start_excited=qubit is QubitLevel.EXCITED),
        final_excited_probability(g, initial, 0.0, horizon, order),
    ]


def figure_4(g: float = 0.1, n_sectors: int = 102) -> ResultTable:
    """Asymptotic P_e after a half crossing (0 -> T) for both qubit start states."""
    settings = get_settings()
    order = settings.hyp1f1_asymptotic_order
    horizon = settings.asymptotic_time
    cells = [
        (
            f"pair n={n} start={qubit.value}",
            lambda n=n, qubit=qubit: _half_crossing_row(g, n, qubit, order, horizon),
        )
        for qubit in (QubitLevel.EXCITED, QubitLevel.GROUND)
        for n in range(n_sectors)
    ]
    return ResultTable(
        title="figure 4: asymptotic excited probability, half crossing",
        metadata=describe(
            command="figure", figure=4, g=g, n_sectors=n_sectors,
            asymptotic_order=order, asymptotic_time=horizon, tau0=0.0,
        ),
        columns=["n", "start", "photons", "pe_formula", "pe_numeric"],
        rows=run_cells(cells),
    )


def _full_model_rows(
    g: float, initial: InitialState, p: FullParams, samples: int, autosize: bool
) -> Tuple[int, List[list]]:
    if autosize:
        trajectory = integrate_full_autosized(initial, p, samples=samples)
    else:
        trajectory = integrate_full(JointState.from_initial(initial, p.n_max), p, samples=samples)
    rows = []
    for tau, sigma_z, (_, state) in zip(trajectory.taus, trajectory.sigma_z(), trajectory.points):
        pe = 0.5 * (1.0 + sigma_z)
        rows.append([g, trajectory.n_max, float(tau), float(sigma_z), pe, state.norm()])
    return trajectory.n_max, rows


def figure_5(
    samples: Optional[int] = None,
    autosize: bool = True,
    n_max: int = FIGURE5_N_MAX,
) -> ResultTable:
    """Strong-coupling <sigma_z>(tau) from |0,e> at resonance for several couplings."""
    settings = get_settings()
    samples = settings.samples if samples is None else samples
    initial = InitialState(photons=0, qubit=QubitLevel.EXCITED)
    tau0, tau1 = FIGURE5_WINDOW

    cells = []
    for g in FIGURE5_COUPLINGS:
        p = FullParams(
            g=g, tau0=tau0, tau1=tau1, n_max=n_max,
            rel_tol=settings.rel_tol, abs_tol=settings.abs_tol,
            truncation_threshold=settings.truncation_threshold,
        )
        cells.append((f"g={g:g}", lambda g=g, p=p: _full_model_rows(g, initial, p, samples, autosize)))

    results = run_cells(cells)
    rows = [row for _, cell_rows in results for row in cell_rows]
    return ResultTable(
        title="figure 5: strong-coupling population difference from |0,e>",
        metadata=describe(
            command="figure", figure=5, state=str(initial), samples=samples,
            tau0=tau0, tau1=tau1, n_max=n_max, autosize=autosize,
            couplings=",".join(repr(g) for g in FIGURE5_COUPLINGS),
            used_n_max=",".join(str(n) for n, _ in results),
            rel_tol=settings.rel_tol, abs_tol=settings.abs_tol,
        ),
        columns=["g", "n_max", "tau", "sigma_z", "pe", "norm"],
        rows=rows,
    )


def asymptote_table(g: float, n_sectors: int = 102, crossing: Crossing = Crossing.FULL) -> ResultTable:
    """Closed-form asymptotic probabilities against the numeric sweep for every pair."""
    settings = get_settings()
    order = settings.hyp1f1_asymptotic_order
    horizon = settings.asymptotic_time
    if crossing is Crossing.FULL:
        cells = [
            (f"pair n={n}", lambda n=n: _full_crossing_row(g, n, order, horizon, finite_start=False))
            for n in range(n_sectors)
        ]
        rows = [[r[0], r[2], r[3], r[4]] for r in run_cells(cells)]
        columns = ["n", "g_n", "pe_formula", "pe_numeric"]
        window = (-horizon, horizon)
    else:
        cells = [
            (
                f"pair n={n} start={qubit.value}",
                lambda n=n, qubit=qubit: _half_crossing_row(g, n, qubit, order, horizon),
            )
            for qubit in (QubitLevel.EXCITED, QubitLevel.GROUND)
            for n in range(n_sectors)
        ]
        rows = [[r[0], r[1], r[3], r[4]] for r in run_cells(cells)]
        columns = ["n", "start", "pe_formula", "pe_numeric"]
        window = (0.0, horizon)

    return ResultTable(
        title=f"asymptotic excited probability, {crossing.value} crossing",
        metadata=describe(
            command="asymptote", crossing=crossing.value, g=g, n_sectors=n_sectors,
            tau0=window[0], tau1=window[1], asymptotic_order=order,
        ),
        columns=columns,
        rows=rows,
    )


FIGURES: Dict[int, Callable[..., ResultTable]] = {
    1: figure_1,
    2: figure_2,
    3: figure_3,
    4: figure_4,
    5: figure_5,
}
