"""Tests for the figure and asymptote sweeps."""

import math
from unittest.mock import patch

import pytest

from figures import (
    FIGURE5_COUPLINGS,
    asymptote_table,
    describe,
    figure_1,
    figure_2,
    figure_3,
    figure_4,
    figure_5,
    pair_start,
    run_cells,
)
from lzfull import FullTrajectory
from models import Crossing, Frame, QubitLevel, TransformedState


class TestHelpers:
    """Tests for the sweep helpers."""

    def test_run_cells_keeps_order(self):
        """Test that results come back in submission order."""
        cells = [(f"cell {i}", lambda i=i: i * i) for i in range(10)]
        assert run_cells(cells) == [i * i for i in range(10)]

    def test_describe_exact_floats(self):
        """Test that floats are rendered with repr and others with str."""
        assert describe(g=0.1, n=3, state="fock:1,g") == {"g": "0.1", "n": "3", "state": "fock:1,g"}

    def test_pair_start(self):
        """Test |n+1,g> and |n,e> as the members of pair n."""
        assert str(pair_start(4, QubitLevel.GROUND)) == "fock:5,g"
        assert str(pair_start(4, QubitLevel.EXCITED)) == "fock:4,e"


class TestFigures:
    """Tests for the figure tables with reduced sampling."""

    def test_figure_1(self):
        """Test the grid of starts and photon numbers."""
        table = figure_1(samples=3)
        assert table.columns == ["tau0", "photons", "tau", "sigma_z", "pe"]
        assert len(table.rows) == 2 * 4 * 3
        assert table.metadata["figure"] == "1"
        finite = [row for row in table.rows if row[0] == -10.0 and row[2] == -10.0]
        assert all(row[3] == pytest.approx(-1.0) for row in finite)

    def test_figure_2(self):
        """Test formula against numerics for the first pairs."""
        table = figure_2(n_sectors=3)
        assert [row[0] for row in table.rows] == [0, 1, 2]
        assert table.rows[0][3] == pytest.approx(1 - math.exp(-0.01 * math.pi), abs=1e-9)
        for row in table.rows:
            assert abs(row[3] - row[4]) < 1e-3

    def test_figure_2_every_pair(self):
        """Test that all 102 pairs evolve from both starts without norm drift."""
        table = figure_2(n_sectors=102)
        assert len(table.rows) == 102
        for row in table.rows:
            assert 0.0 <= row[4] <= 1.0
            assert 0.0 <= row[5] <= 1.0
            assert abs(row[3] - row[4]) < 1e-3

    def test_figure_3(self):
        """Test that every run starts excited at the crossing."""
        table = figure_3(samples=3)
        assert len(table.rows) == 2 * 4 * 3
        starts = [row for row in table.rows if row[2] == 0.0]
        assert len(starts) == 8
        assert all(row[3] == pytest.approx(1.0) for row in starts)

    def test_figure_4(self):
        """Test both qubit starts of the half crossing."""
        table = figure_4(n_sectors=2)
        assert [(row[0], row[1]) for row in table.rows] == [(0, "e"), (1, "e"), (0, "g"), (1, "g")]
        for row in table.rows:
            assert abs(row[3] - row[4]) < 1e-3

    def test_figure_5_rows(self):
        """Test the layout of the strong-coupling table."""
        state = TransformedState.fock(0, QubitLevel.EXCITED, 2, frame=Frame.PARITY)
        trajectory = FullTrajectory(points=[(1.0, state), (11.0, state)], n_max=2)
        with patch("figures.integrate_full_autosized", return_value=trajectory) as mock_integrate:
            table = figure_5(samples=2)
        assert mock_integrate.call_count == len(FIGURE5_COUPLINGS)
        assert table.columns == ["g", "n_max", "tau", "sigma_z", "pe", "norm"]
        assert len(table.rows) == 2 * len(FIGURE5_COUPLINGS)
        assert table.rows[0] == [0.1, 2, 1.0, 1.0, 1.0, 1.0]
        assert table.metadata["used_n_max"] == "2,2,2,2"


class TestAsymptoteTable:
    """Tests for asymptote_table."""

    def test_full_crossing(self):
        """Test the full-crossing columns."""
        table = asymptote_table(0.1, 2, Crossing.FULL)
        assert table.columns == ["n", "g_n", "pe_formula", "pe_numeric"]
        assert table.metadata["crossing"] == "full"
        assert table.rows[1][1] == pytest.approx(0.1 * 2 ** 0.5)

    def test_full_crossing_skips_finite_start(self):
        """Test that the asymptote sweep never evaluates the tau = -10 start."""
        with patch("figures.final_excited_probability", return_value=0.5) as mock_pe:
            asymptote_table(0.1, 3, Crossing.FULL)
        assert mock_pe.call_count == 3
        assert all(call.args[2] != -10.0 for call in mock_pe.call_args_list)

    def test_half_crossing(self):
        """Test the half-crossing columns and values."""
        table = asymptote_table(0.1, 2, Crossing.HALF)
        assert table.columns == ["n", "start", "pe_formula", "pe_numeric"]
        assert len(table.rows) == 4
        assert table.metadata["tau0"] == "0.0"
        for row in table.rows:
            assert abs(row[2] - row[3]) < 1e-3
