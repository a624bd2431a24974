"""Exact symbolic computation for the 3D left-covariant differential calculi on SU_q(2)."""

from .freealg import Element, L, parse_element
from .qfield import ONE, ZERO, QScalar, q_number, qpow, qs

__all__ = ["Element", "L", "parse_element", "QScalar", "ONE", "ZERO", "q_number", "qpow", "qs"]
