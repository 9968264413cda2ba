"""Distributionally robust newsvendor with Wasserstein and moment constraints."""
from .dd_solver import DdResult, build_geometry, dd_minimize
from .errors import DrnvError, Infeasible, InvalidInstance
from .inner_eval import CaseId, classify_case, eval_F, newsvendor_loss, psi, sup_g
from .model import (
    CostParams,
    DualPoint,
    MomentSpec,
    ProblemInstance,
    ProfitParams,
    RegionOutcome,
    SolveReport,
    empirical_moments,
    make_instance,
    validate_instance,
)
from .oracle import GridSpec, SupportGrid, brute_sup_g, grid_minimize, primal_lp_value
from .outer_solver import OuterConfig, h_subgradient, minimize_xi, profit_params_to_costs, scarf_solution, solve

__all__ = [
    "CaseId", "CostParams", "DdResult", "DrnvError", "DualPoint", "GridSpec", "Infeasible", "InvalidInstance",
    "MomentSpec", "OuterConfig", "ProblemInstance", "ProfitParams", "RegionOutcome", "SolveReport", "SupportGrid",
    "brute_sup_g", "build_geometry", "classify_case", "dd_minimize", "empirical_moments", "eval_F", "grid_minimize",
    "h_subgradient", "make_instance", "minimize_xi", "newsvendor_loss", "primal_lp_value", "profit_params_to_costs",
    "psi", "scarf_solution", "solve", "sup_g", "validate_instance",
]
__version__ = "0.1.0"
