"""Exact and numerical tools for the deformed Bogoyavlenskij-Itoh Lotka-Volterra systems."""

from .exactalg import LAM, MU, NU, LaurentPoly, MissingVariable, Poly, Var, b, x
from .indexsets import DomainViolation, WrongArity, enumerate_S, is_in_S
from .integrals import ConstraintViolation, K, K_b_expansion, K_b_via_exp, deformed_casimir, solve_b_from_c
from .lax import build_lax, char_poly_lax, det_lax, lax_residual
from .poisson import (
    AdmissibilityError, BracketKind, ConstantStructure, DimensionMismatch, bracket,
    build_A, hamiltonian_vector_field, jacobi_violations,
)

__version__ = "0.1.0"
