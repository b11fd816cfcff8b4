"""Certified numerics for friendly bisections of dense random graphs.

The package evaluates the first and second moment functionals of the
friendly-bisection problem with rigorous interval enclosures and
cross-checks the Gaussian approximations behind them at finite size.
"""
from .rint import Interval, normal_tail

__all__ = ["Interval", "normal_tail"]
__version__ = "0.1.0"
