"""Weighted L_p norms, Gauss-Jacobi quadrature and Marcinkiewicz-Zygmund experiments for Jacobi expansions."""

__version__ = "0.1.0"
