"""Unit tests for the brute-force reference propagators."""

import cmath
import os
from unittest.mock import patch

import numpy as np
import pytest

import config
from errors import OracleConvergenceError
from lzrwa import evolve_rwa
from models import DenseHamiltonianSpec, JointState, Model, QubitLevel, RWAParams
from oracle import (
    default_steps,
    dense_full_oracle,
    dense_hamiltonian,
    dense_propagate,
    dense_rwa_oracle,
    ode_sector_oracle,
)


class TestDenseHamiltonian:
    """Tests for the dense matrices."""

    @pytest.mark.parametrize("model", [Model.RWA, Model.FULL])
    def test_real_symmetric(self, model):
        """Test that H(tau) is real symmetric."""
        h = dense_hamiltonian(DenseHamiltonianSpec(model=model, g=0.7, n_max=5), 2.5)
        assert h.shape == (12, 12)
        assert np.array_equal(h, h.T)

    def test_rwa_block_structure(self):
        """Test that the RWA matrix couples only |n, e> and |n+1, g>."""
        n_max = 4
        h = dense_hamiltonian(DenseHamiltonianSpec(model=Model.RWA, g=0.3, n_max=n_max), 1.5)
        # flat index x * (n_max + 1) + n
        assert h[n_max + 1 + 2, 3] == pytest.approx(0.3 * np.sqrt(3))
        assert h[n_max + 1 + 2, 1] == 0
        # -tau sigma_z: ground at +tau, excited at -tau
        assert h[0, 0] == pytest.approx(1.5)
        assert h[n_max + 1, n_max + 1] == pytest.approx(-1.5)

    def test_full_diagonal(self):
        """Test n + tau sigma_z on the diagonal of the full model."""
        n_max = 3
        h = dense_hamiltonian(DenseHamiltonianSpec(model=Model.FULL, g=1.0, n_max=n_max), 2.0)
        diagonal = np.diag(h)
        assert np.allclose(diagonal[: n_max + 1], np.arange(n_max + 1) - 2.0)
        assert np.allclose(diagonal[n_max + 1:], np.arange(n_max + 1) + 2.0)

    def test_full_counter_rotating_terms(self):
        """Test that (a + a^dag) sigma_x also links |n, g> and |n+1, e>."""
        n_max = 3
        h = dense_hamiltonian(DenseHamiltonianSpec(model=Model.FULL, g=0.5, n_max=n_max), 0.0)
        assert h[0, n_max + 1 + 1] == pytest.approx(0.5)
        assert h[n_max + 1, 1] == pytest.approx(0.5)


class TestDensePropagate:
    """Tests for dense_propagate and its wrappers."""

    def test_zero_coupling_phases(self):
        """Test that g = 0 gives the exact dynamical phase of |n, e>."""
        start = JointState.fock(2, QubitLevel.EXCITED, 3)
        out = dense_rwa_oracle(0.0, start, -2.0, 3.0, n_steps=10)
        # RWA drive is -sigma_z tau, so |n, e> picks up e^{i (tau1^2 - tau0^2)/2}
        assert abs(out.amplitudes[1, 2] - cmath.exp(0.5j * (9.0 - 4.0))) < 1e-12

    def test_norm_preserved(self):
        """Test that every step is unitary."""
        start = JointState.fock(1, QubitLevel.GROUND, 6)
        out = dense_full_oracle(1.0, start, 1.0, 2.0, n_steps=400, tol=1.0)
        assert out.norm() == pytest.approx(1.0, abs=1e-12)

    def test_matches_closed_form(self):
        """Test dense RWA propagation of |11, g> against the closed form."""
        start = JointState.fock(11, QubitLevel.GROUND, 12)
        out = dense_rwa_oracle(0.1, start, -5.0, 5.0, n_steps=40_000, tol=1e-5)
        closed = evolve_rwa(start, RWAParams(g=0.1, tau0=-5.0, tau1=5.0, n_max=12))
        assert np.max(np.abs(out.amplitudes - closed.amplitudes)) < 1e-5

    def test_zero_interval(self):
        """Test that tau1 = tau0 returns a copy of the start state."""
        start = JointState.fock(0, QubitLevel.EXCITED, 2)
        out = dense_full_oracle(1.0, start, 1.0, 1.0)
        assert np.array_equal(out.amplitudes, start.amplitudes)
        assert out is not start

    def test_halving_check_fails(self):
        """Test that too few steps trip the convergence check."""
        start = JointState.fock(0, QubitLevel.EXCITED, 8)
        with pytest.raises(OracleConvergenceError):
            dense_full_oracle(2.0, start, 1.0, 6.0, n_steps=8, tol=1e-8)

    def test_invalid_inputs(self):
        """Test truncation mismatch, unnormalized input and too few steps."""
        spec = DenseHamiltonianSpec(model=Model.RWA, g=0.1, n_max=3)
        with pytest.raises(ValueError):
            dense_propagate(spec, JointState.fock(0, QubitLevel.GROUND, 4), 0.0, 1.0, 10)
        with pytest.raises(ValueError):
            dense_propagate(spec, JointState(amplitudes=np.ones((2, 4))), 0.0, 1.0, 10)
        with pytest.raises(ValueError):
            dense_propagate(spec, JointState.fock(0, QubitLevel.GROUND, 3), 0.0, 1.0, 1)

    def test_sparse_steps_match_eigendecomposition(self):
        """Test that the sparse exponential action reproduces the eigh steps."""
        start = JointState.fock(0, QubitLevel.EXCITED, 6)
        reference = dense_full_oracle(1.0, start, 1.0, 2.0, n_steps=200, tol=1.0)
        with patch.dict(os.environ, {"QLZ_ORACLE_EIGH_MAX_DIMENSION": "2"}):
            config._settings = None
            try:
                with patch("oracle._magnus") as mock_magnus:
                    out = dense_full_oracle(1.0, start, 1.0, 2.0, n_steps=200, tol=1.0)
            finally:
                config._settings = None
        mock_magnus.assert_not_called()
        assert np.max(np.abs(out.amplitudes - reference.amplitudes)) < 1e-10
        assert out.norm() == pytest.approx(1.0, abs=1e-10)

    def test_default_steps(self):
        """Test the step count derived from the configured density."""
        with patch.dict(os.environ, {"QLZ_ORACLE_STEPS_PER_UNIT": "100"}):
            config._settings = None
            try:
                assert default_steps(1.0, 3.5) == 250
                assert default_steps(0.0, 0.0) == 2
            finally:
                config._settings = None


class TestSectorOracle:
    """Tests for ode_sector_oracle."""

    def test_uncoupled_phases(self):
        """Test diag(e^{i tau^2/2}, e^{-i tau^2/2}) at g = 0."""
        out = ode_sector_oracle(0.0, 5, 0.0, 3.0, [1.0, 1.0])
        assert abs(out[0] - cmath.exp(4.5j)) < 1e-8
        assert abs(out[1] - cmath.exp(-4.5j)) < 1e-8

    def test_norm_preserved(self):
        """Test that the sector evolution is unitary."""
        out = ode_sector_oracle(0.1, 3, -10.0, 10.0, [0.6, 0.8j])
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-8)

    def test_zero_interval(self):
        """Test that tau1 = tau0 returns the initial vector."""
        out = ode_sector_oracle(0.1, 0, 1.0, 1.0, [1.0, 0.0])
        assert np.array_equal(out, [1.0, 0.0])

    def test_bad_initial_shape(self):
        """Test that the initial vector must have two components."""
        with pytest.raises(ValueError):
            ode_sector_oracle(0.1, 0, 0.0, 1.0, [1.0, 0.0, 0.0])
