"""Tests for the ntypes kernel."""
