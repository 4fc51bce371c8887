"""System definitions, parsing, critical manifolds and fold points."""

from canardkit.sysmodel.parser import parse_expression, tokenize
from canardkit.sysmodel.system import (
    CriticalManifold,
    FoldPoint,
    SPSystem,
    critical_manifold,
    fast_time_field,
    fold_points,
    load_system,
    parse_system,
    select_fold,
    system_from_dict,
    vdp,
)

__all__ = [
    "parse_expression", "tokenize", "CriticalManifold", "FoldPoint", "SPSystem",
    "critical_manifold", "fast_time_field", "fold_points", "load_system", "parse_system",
    "select_fold", "system_from_dict", "vdp",
]
