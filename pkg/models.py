"""Pydantic models for data validation."""

import re
from enum import Enum
from pathlib import Path
from typing import Any, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class QubitLevel(str, Enum):
    """Qubit basis states; ground carries sigma_z = -1, excited +1."""
    GROUND = "g"
    EXCITED = "e"

    @property
    def index(self) -> int:
        return 1 if self is QubitLevel.EXCITED else 0


class Frame(str, Enum):
    """Representation in which a full-model state is stored."""
    LAB = "lab"
    PARITY = "parity"
    PARITY_ROTATING = "parity-rotating"


class Model(str, Enum):
    """Hamiltonian family."""
    RWA = "rwa"
    FULL = "full"


class TimeScaling(str, Enum):
    """Scaled-time convention of a Hamiltonian (tau = v^2 t or tau~ = u^2 t)."""
    TAU = "tau"
    TAU_TILDE = "tau-tilde"


class Command(str, Enum):
    """CLI commands."""
    SOLVE_RWA = "solve-rwa"
    SOLVE_FULL = "solve-full"
    ASYMPTOTE = "asymptote"
    FIGURE = "figure"
    VALIDATE = "validate"


class OutputFormat(str, Enum):
    """Supported export formats."""
    CSV = "csv"
    JSON = "json"


class Crossing(str, Enum):
    """Asymptotic crossing geometry."""
    FULL = "full"
    HALF = "half"


def _is_nonpositive_integer(value: complex) -> bool:
    return value.imag == 0 and value.real <= 0 and float(value.real).is_integer()


class Hyp1F1Params(BaseModel):
    """Arguments of 1F1(a; b; z)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    a: complex
    b: complex
    z: complex

    @field_validator("a", "b", "z", mode="before")
    @classmethod
    def coerce_complex(cls, v: Any) -> complex:
        value = complex(v)
        if not (np.isfinite(value.real) and np.isfinite(value.imag)):
            raise ValueError("parameters must be finite")
        return value

    @field_validator("b")
    @classmethod
    def b_not_pole(cls, v: complex) -> complex:
        if _is_nonpositive_integer(v):
            raise ValueError(f"b = {v} is zero or a negative integer")
        return v


_STATE_PATTERN = re.compile(r"^fock:(\d+),([ge])$")


class InitialState(BaseModel):
    """Fock state times a qubit basis state, written ``fock:<n>,<g|e>``."""
    photons: int = Field(..., ge=0)
    qubit: QubitLevel

    @classmethod
    def parse(cls, text: str) -> "InitialState":
        match = _STATE_PATTERN.match(text.strip().replace(" ", ""))
        if not match:
            raise ValueError(
                f"Invalid state '{text}', expected 'fock:<n>,<g|e>'"
            )
        return cls(photons=int(match.group(1)), qubit=QubitLevel(match.group(2)))

    def __str__(self) -> str:
        return f"fock:{self.photons},{self.qubit.value}"


class JointState(BaseModel):
    """
    Truncated amplitude table over (qubit level x, photon number n).

    ``amplitudes[x, n]`` is the amplitude of |n, x>, with x = 0 ground and
    x = 1 excited. Normalization is checked by the evolution routines, not
    here, because the transform T legitimately produces unnormalized vectors.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    amplitudes: np.ndarray

    @field_validator("amplitudes", mode="before")
    @classmethod
    def validate_amplitudes(cls, v: Any) -> np.ndarray:
        array = np.array(v, dtype=complex)
        if array.ndim != 2 or array.shape[0] != 2 or array.shape[1] < 1:
            raise ValueError(f"amplitudes must have shape (2, n_max+1), got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("amplitudes must be finite")
        return array

    @property
    def n_max(self) -> int:
        return self.amplitudes.shape[1] - 1

    @classmethod
    def fock(cls, photons: int, qubit: QubitLevel, n_max: int, **kwargs):
        """Basis state |photons, qubit> stored up to n_max."""
        if photons > n_max:
            raise ValueError(f"photon number {photons} exceeds n_max={n_max}")
        amplitudes = np.zeros((2, n_max + 1), dtype=complex)
        amplitudes[QubitLevel(qubit).index, photons] = 1.0
        return cls(amplitudes=amplitudes, **kwargs)

    @classmethod
    def from_initial(cls, initial: InitialState, n_max: int, **kwargs):
        return cls.fock(initial.photons, initial.qubit, n_max, **kwargs)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return abs(self.norm() - 1.0) < tol

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def resized(self, n_max: int):
        """Copy padded with zeros (or cut, if the cut part is empty) to n_max."""
        if n_max < self.n_max and np.any(self.amplitudes[:, n_max + 1:]):
            raise ValueError(f"cannot shrink to n_max={n_max}: occupied amplitudes")
        amplitudes = np.zeros((2, n_max + 1), dtype=complex)
        keep = min(n_max, self.n_max) + 1
        amplitudes[:, :keep] = self.amplitudes[:, :keep]
        return self.model_copy(update={"amplitudes": amplitudes})


class TransformedState(JointState):
    """Full-model state with the frame it is expressed in."""
    frame: Frame = Frame.LAB


class RWAParams(BaseModel):
    """Weak-coupling sweep parameters in scaled time tau = v^2 t."""
    g: float = Field(..., ge=0)
    tau0: float
    tau1: float
    n_max: int = Field(..., ge=0)
    red_detuning: bool = False

    @field_validator("tau1")
    @classmethod
    def validate_time_range(cls, v: float, info) -> float:
        tau0 = info.data.get("tau0")
        if tau0 is not None and v < tau0:
            raise ValueError("tau1 must not precede tau0")
        return v


class FullParams(BaseModel):
    """Strong-coupling sweep parameters in scaled time tau~ = u^2 t."""
    g: float = Field(..., ge=0)
    tau0: float = 1.0
    tau1: float
    n_max: int = Field(100, ge=1)
    rel_tol: float = Field(1e-9, gt=0)
    abs_tol: float = Field(1e-12, gt=0)
    truncation_threshold: float = Field(1e-6, gt=0)

    @field_validator("tau1")
    @classmethod
    def validate_time_range(cls, v: float, info) -> float:
        tau0 = info.data.get("tau0")
        if tau0 is not None and v < tau0:
            raise ValueError("tau1 must not precede tau0")
        return v


class DenseHamiltonianSpec(BaseModel):
    """Dense truncated Hamiltonian of either model."""
    model: Model
    g: float = Field(..., ge=0)
    n_max: int = Field(..., ge=0)
    time_scaling: TimeScaling = TimeScaling.TAU

    @model_validator(mode="after")
    def default_scaling(self) -> "DenseHamiltonianSpec":
        if self.model is Model.FULL and "time_scaling" not in self.model_fields_set:
            self.time_scaling = TimeScaling.TAU_TILDE
        return self

    @property
    def dimension(self) -> int:
        return 2 * (self.n_max + 1)


class RunConfig(BaseModel):
    """Validated CLI run configuration."""
    command: Command
    g: float = Field(0.1, ge=0)
    tau0: float = -10.0
    tau1: float = 10.0
    state: InitialState = Field(
        default_factory=lambda: InitialState(photons=1, qubit=QubitLevel.GROUND)
    )
    n_max: Optional[int] = Field(None, ge=0)
    samples: int = Field(2001, ge=2)
    rel_tol: float = Field(1e-9, gt=0)
    abs_tol: float = Field(1e-12, gt=0)
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.CSV
    figure: Optional[int] = Field(None, ge=1, le=5)
    crossing: Crossing = Crossing.FULL
    n_sectors: int = Field(102, ge=1)
    autosize: bool = True
    extended: bool = False

    @field_validator("state", mode="before")
    @classmethod
    def parse_state(cls, v: Any) -> Any:
        if isinstance(v, str):
            return InitialState.parse(v)
        return v

    @model_validator(mode="after")
    def validate_command(self) -> "RunConfig":
        if self.tau1 < self.tau0:
            raise ValueError("tau1 must not precede tau0")
        if self.command is Command.FIGURE and self.figure is None:
            raise ValueError("the figure command needs a figure number 1-5")
        return self

    def resolved_n_max(self, default: int) -> int:
        """n_max from the config or, if absent, the given default."""
        return self.n_max if self.n_max is not None else default


class ResultTable(BaseModel):
    """Tabular result with self-describing metadata."""
    title: str
    metadata: dict[str, str] = Field(default_factory=dict)
    columns: List[str]
    rows: List[List[Union[int, float, str]]] = Field(default_factory=list)

    @field_validator("rows", mode="before")
    @classmethod
    def unwrap_numpy(cls, v: Any) -> Any:
        return [
            [x.item() if isinstance(x, np.generic) else x for x in row]
            for row in v
        ]

    @field_validator("rows")
    @classmethod
    def rows_match_columns(cls, v: List[List[Any]], info) -> List[List[Any]]:
        columns = info.data.get("columns") or []
        for row in v:
            if len(row) != len(columns):
                raise ValueError(
                    f"row has {len(row)} values but there are {len(columns)} columns"
                )
        return v

    def column(self, name: str) -> List[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]
