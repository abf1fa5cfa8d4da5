"""Exact Smith-normal-form evidence for moment, Gram and Young-diagram matrices."""
__version__ = "0.1.0"
