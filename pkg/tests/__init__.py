"""Tests for swapsim."""
