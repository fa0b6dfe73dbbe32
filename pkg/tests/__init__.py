"""Test suite for Photography Studio API."""
