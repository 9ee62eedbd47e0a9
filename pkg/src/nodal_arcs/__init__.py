"""Complete arcs and caps from the cubic Y(X^2 - beta^2) = 1 over F_q, with
exact brute-force verifiers."""
from __future__ import annotations

__version__ = "0.1.0"
SCHEMA = "nodal-arcs/1"
