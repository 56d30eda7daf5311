"""Benchmark harness for node embeddings under node classification."""

__version__ = "0.1.0"
