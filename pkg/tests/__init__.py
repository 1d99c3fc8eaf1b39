"""Test suite for voa-forge."""
