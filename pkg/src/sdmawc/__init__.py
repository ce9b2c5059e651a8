"""Rate regions and block-Markov simulation for state-dependent multiple-access wiretap channels."""

__version__ = "0.1.0"
