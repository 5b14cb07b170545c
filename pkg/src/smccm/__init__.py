"""Blind set-membership constant-modulus interference suppression for
synchronous DS-CDMA: receivers, time-varying error bounds, blind channel
and amplitude estimation, a multiuser fading simulator and closed-form
performance prediction."""

from ._kernels import BACKEND_NAME

__version__ = "0.1.0"
__all__ = ["BACKEND_NAME", "__version__"]
