"""Passage-time scaling laws near saddle-node bifurcations."""
