"""Prover, checker, transformer and decider for the hypersequent calculi HR and HMR."""
__version__ = "0.1.0"
