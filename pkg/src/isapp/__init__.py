"""Complexity certificates and exact probabilistic semantics for stack machines."""
