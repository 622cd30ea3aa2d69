"""Tensor Envelope - exact symbolic engine for tensor envelopes of regular categories"""

__version__ = "1.0.0"
