"""Bundled demonstration scenes (JSON files)."""
