"""Physical constants used throughout the package.

Single source of truth: every module imports from here. Values are
CODATA 2018 (h is exact by SI definition, hbar = h / 2*pi).
"""

HBAR: float = 1.0545718176461565e-34  # J*s
SPEED_OF_LIGHT: float = 299792458.0  # m/s, exact

TWO_PI: float = 6.283185307179586

__all__ = ["HBAR", "SPEED_OF_LIGHT", "TWO_PI"]
