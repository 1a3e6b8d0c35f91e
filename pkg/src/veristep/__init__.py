"""Step-level formal verification and reward engine for structured reasoning traces."""

__version__ = "0.1.0"
