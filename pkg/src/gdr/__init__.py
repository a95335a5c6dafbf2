"""Canonical evolution strategy with TD3 actor injection and genetic drift regularization."""

from gdr._alloc import tune_allocator

__version__ = "0.1.0"

tune_allocator()
