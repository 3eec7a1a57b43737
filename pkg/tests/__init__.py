"""Tests for relucert package."""
