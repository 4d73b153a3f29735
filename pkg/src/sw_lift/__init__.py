"""Numerical checks for the Kaluza-Klein lift of the Seiberg-Witten equations.

Seiberg-Witten configurations on the flat four-torus are lifted to spinors on
the circle bundle ``T⁴ × S¹``, where they satisfy a cubic Dirac equation.
"""

from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__"]
