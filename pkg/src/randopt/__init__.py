"""Randomized optimization (RHC, SA, GA, MIMIC) over discrete benchmark landscapes."""

__version__ = "0.1.0"
