"""Tests for sdvsr package."""
