"""Facility location on a line with ordinal facility preferences."""

from .audit import AuditVerdict, DeviationSpace, WelfareMode, audit_gsp, audit_sp, revalidate
from .experiments import (
    GeneratorSpec,
    LocationLaw,
    CatalogEntry,
    PreferenceLaw,
    RatioReport,
    ReplayReport,
    build_entry,
    catalog,
    estimate_ratio,
    generate,
    replay,
    verify_upper_bound,
)
from .mechanisms import MechanismId, boundary_stats, place, run_mechanism
from .model import (
    Agent,
    Instance,
    ModelError,
    ModelKind,
    Objective,
    agent_cost,
    agent_utility,
    objective_value,
    performance_ratio,
)
from .oracles import OracleConfig, OracleResult, evaluate_candidate, exact_optimum_gamma1, grid_optimum, optimum_bracket

__all__ = [
    "Agent",
    "AuditVerdict",
    "CatalogEntry",
    "DeviationSpace",
    "GeneratorSpec",
    "Instance",
    "LocationLaw",
    "MechanismId",
    "ModelError",
    "ModelKind",
    "Objective",
    "OracleConfig",
    "OracleResult",
    "PreferenceLaw",
    "RatioReport",
    "ReplayReport",
    "WelfareMode",
    "agent_cost",
    "agent_utility",
    "audit_gsp",
    "audit_sp",
    "boundary_stats",
    "build_entry",
    "catalog",
    "estimate_ratio",
    "evaluate_candidate",
    "exact_optimum_gamma1",
    "generate",
    "grid_optimum",
    "objective_value",
    "optimum_bracket",
    "performance_ratio",
    "place",
    "replay",
    "revalidate",
    "run_mechanism",
    "verify_upper_bound",
]

__version__ = "0.1.0"
