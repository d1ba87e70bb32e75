"""
🌀 ittdns
Pseudo-spectral DNS of the incompressible Toner-Tu equations,
norm-hierarchy diagnostics and analytic bounds
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
