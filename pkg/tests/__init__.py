"""Tests for stiefel-tim."""
