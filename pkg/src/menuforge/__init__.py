"""Optimal two-item unit-demand mechanisms for uniform valuations on a rectangle."""

from .domain import DomainError, Menu, MenuItem, Polygon, SolverError, SupportRect, UnsupportedRegime
from .mechanism import Mechanism, build_mechanism, from_dict, menu_of, revenue
from .solver import MechanismParams, Regime, classify_regime, compute_alpha1, compute_alpha2, compute_beta, solve
from .verifier import certify_sweep, verify_exclusion_balance, verify_myerson

__all__ = [
    "DomainError", "Menu", "MenuItem", "Polygon", "SolverError", "SupportRect", "UnsupportedRegime",
    "Mechanism", "build_mechanism", "from_dict", "menu_of", "revenue",
    "MechanismParams", "Regime", "classify_regime", "compute_alpha1", "compute_alpha2", "compute_beta", "solve",
    "certify_sweep", "verify_exclusion_balance", "verify_myerson",
]
