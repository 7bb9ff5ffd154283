"""Unit tests for data models."""

import numpy as np
import pytest
from pydantic import ValidationError

from models import (
    Command,
    DenseHamiltonianSpec,
    Frame,
    FullParams,
    Hyp1F1Params,
    InitialState,
    JointState,
    Model,
    QubitLevel,
    ResultTable,
    RunConfig,
    RWAParams,
    TimeScaling,
    TransformedState,
)


class TestHyp1F1Params:
    """Tests for Hyp1F1Params model."""

    def test_coerces_to_complex(self):
        """Test that real inputs are stored as complex numbers."""
        p = Hyp1F1Params(a=1, b=0.5, z=2.0)
        assert p.a == 1 + 0j
        assert isinstance(p.z, complex)

    def test_b_pole_fails(self):
        """Test that b = 0 or a negative integer is rejected."""
        for b in (0, -1, -7.0):
            with pytest.raises(ValidationError):
                Hyp1F1Params(a=0.5, b=b, z=1j)

    def test_b_negative_non_integer_allowed(self):
        """Test that a negative non-integer b is accepted."""
        assert Hyp1F1Params(a=0.5, b=-0.5, z=1j).b == -0.5

    def test_non_finite_fails(self):
        """Test that NaN and infinite parameters are rejected."""
        with pytest.raises(ValidationError):
            Hyp1F1Params(a=float("nan"), b=0.5, z=1j)
        with pytest.raises(ValidationError):
            Hyp1F1Params(a=0.5, b=0.5, z=complex(0, float("inf")))


class TestInitialState:
    """Tests for the fock:<n>,<g|e> grammar."""

    def test_parse_ground(self):
        """Test parsing a ground-state string."""
        state = InitialState.parse("fock:11,g")
        assert state.photons == 11
        assert state.qubit is QubitLevel.GROUND

    def test_parse_excited_with_spaces(self):
        """Test that surrounding and inner spaces are tolerated."""
        state = InitialState.parse(" fock:0, e ")
        assert state.photons == 0
        assert state.qubit is QubitLevel.EXCITED

    def test_str_round_trip(self):
        """Test that the string form parses back to the same state."""
        state = InitialState(photons=31, qubit=QubitLevel.EXCITED)
        assert InitialState.parse(str(state)) == state

    @pytest.mark.parametrize("text", ["fock:1", "fock:-1,g", "coherent:1,g", "fock:1,x", ""])
    def test_parse_invalid(self, text):
        """Test that malformed state strings are rejected."""
        with pytest.raises(ValueError):
            InitialState.parse(text)

    def test_qubit_index(self):
        """Test the amplitude-table row of each qubit level."""
        assert QubitLevel.GROUND.index == 0
        assert QubitLevel.EXCITED.index == 1


class TestJointState:
    """Tests for JointState model."""

    def test_fock_state(self):
        """Test building a basis state."""
        state = JointState.fock(2, QubitLevel.EXCITED, 4)
        assert state.n_max == 4
        assert state.amplitudes.shape == (2, 5)
        assert state.amplitudes[1, 2] == 1.0
        assert state.is_normalized()

    def test_fock_beyond_truncation_fails(self):
        """Test that a photon number above n_max is rejected."""
        with pytest.raises(ValueError):
            JointState.fock(5, QubitLevel.GROUND, 4)

    def test_wrong_shape_fails(self):
        """Test that amplitude tables must have two qubit rows."""
        with pytest.raises(ValidationError):
            JointState(amplitudes=np.zeros((3, 4)))

    def test_non_finite_fails(self):
        """Test that NaN amplitudes are rejected."""
        amplitudes = np.zeros((2, 3), dtype=complex)
        amplitudes[0, 0] = np.nan
        with pytest.raises(ValidationError):
            JointState(amplitudes=amplitudes)

    def test_populations_and_norm(self):
        """Test populations of an equal superposition."""
        amplitudes = np.zeros((2, 2), dtype=complex)
        amplitudes[0, 0] = amplitudes[1, 0] = 1 / np.sqrt(2)
        state = JointState(amplitudes=amplitudes)
        assert np.allclose(state.populations()[:, 0], [0.5, 0.5])
        assert state.norm() == pytest.approx(1.0)

    def test_resized_pads_and_cuts(self):
        """Test growing and shrinking the truncation."""
        state = JointState.fock(1, QubitLevel.GROUND, 2)
        grown = state.resized(6)
        assert grown.n_max == 6
        assert grown.amplitudes[0, 1] == 1.0
        assert grown.resized(1).n_max == 1

    def test_resized_refuses_to_drop_amplitude(self):
        """Test that shrinking past an occupied sector fails."""
        state = JointState.fock(3, QubitLevel.GROUND, 4)
        with pytest.raises(ValueError):
            state.resized(2)

    def test_transformed_state_keeps_frame_on_resize(self):
        """Test that resizing a transformed state preserves its frame."""
        state = TransformedState.fock(0, QubitLevel.EXCITED, 2, frame=Frame.PARITY)
        assert state.resized(5).frame is Frame.PARITY


class TestParams:
    """Tests for the solver parameter models."""

    def test_rwa_params_reversed_window_fails(self):
        """Test that tau1 < tau0 is rejected."""
        with pytest.raises(ValidationError):
            RWAParams(g=0.1, tau0=5.0, tau1=-5.0, n_max=3)

    def test_rwa_params_negative_coupling_fails(self):
        """Test that negative couplings are rejected."""
        with pytest.raises(ValidationError):
            RWAParams(g=-0.1, tau0=0.0, tau1=1.0, n_max=3)

    def test_full_params_defaults(self):
        """Test full-model defaults: start at resonance, n_max 100."""
        p = FullParams(g=1.0, tau1=11.0)
        assert p.tau0 == 1.0
        assert p.n_max == 100
        assert p.truncation_threshold == 1e-6

    def test_full_params_nmax_minimum(self):
        """Test that the full model needs at least one photon sector above vacuum."""
        with pytest.raises(ValidationError):
            FullParams(g=1.0, tau1=2.0, n_max=0)

    def test_dense_spec_time_scaling(self):
        """Test the default time-scaling marker of each model."""
        assert DenseHamiltonianSpec(model=Model.RWA, g=0.1, n_max=3).time_scaling is TimeScaling.TAU
        full = DenseHamiltonianSpec(model=Model.FULL, g=0.1, n_max=3)
        assert full.time_scaling is TimeScaling.TAU_TILDE
        assert full.dimension == 8


class TestRunConfig:
    """Tests for RunConfig model."""

    def test_defaults(self):
        """Test default run configuration."""
        config = RunConfig(command=Command.SOLVE_RWA)
        assert config.g == 0.1
        assert str(config.state) == "fock:1,g"
        assert config.resolved_n_max(7) == 7

    def test_state_from_string(self):
        """Test that the state field accepts the text grammar."""
        config = RunConfig(command="solve-full", state="fock:0,e", n_max=30)
        assert config.state.qubit is QubitLevel.EXCITED
        assert config.resolved_n_max(100) == 30

    def test_figure_requires_number(self):
        """Test that the figure command needs a figure number."""
        with pytest.raises(ValidationError):
            RunConfig(command=Command.FIGURE)

    def test_figure_number_range(self):
        """Test that only figures 1-5 exist."""
        with pytest.raises(ValidationError):
            RunConfig(command=Command.FIGURE, figure=6)

    def test_reversed_window_fails(self):
        """Test that tau1 < tau0 is rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command=Command.SOLVE_RWA, tau0=1.0, tau1=0.0)


class TestResultTable:
    """Tests for ResultTable model."""

    def test_row_length_checked(self):
        """Test that rows must match the column count."""
        with pytest.raises(ValidationError):
            ResultTable(title="t", columns=["a", "b"], rows=[[1.0]])

    def test_numpy_scalars_unwrapped(self):
        """Test that numpy scalars become plain Python numbers."""
        table = ResultTable(title="t", columns=["n", "x"], rows=[[np.int64(3), np.float64(0.25)]])
        assert type(table.rows[0][0]) is int
        assert type(table.rows[0][1]) is float

    def test_column_lookup(self):
        """Test extracting a column by name."""
        table = ResultTable(title="t", columns=["n", "x"], rows=[[0, 1.5], [1, 2.5]])
        assert table.column("x") == [1.5, 2.5]
