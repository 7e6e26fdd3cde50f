"""Shared helpers for quidd-sim test scripts."""
