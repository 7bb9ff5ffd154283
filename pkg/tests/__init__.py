"""Test suite for qlz."""
