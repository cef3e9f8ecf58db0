"""Entropy geometry and periodic points for algebraic Z^d-actions of entropy rank one."""

__version__ = "0.1.0"

from .actions import ActionSpec, LyapunovList, catalog, load_action, lyapunov_list
from .entropy_geometry import (
    directional_entropy,
    entropy_bounds,
    fried_average_entropy,
    polytope_volume,
    relational_entropy,
    unit_ball,
)
from .errors import RankOneError
from .periodic import INFINITE, FixCount, fix_count, fix_grid, g_factor, hull_experiment, hull_points
from .sync import strong_sync_count_123, sync_family, sync_growth_rate, weak_sync_count
from .zeta import directional_zeta_x2x3, nonexpansive_directions, omega_set, zeta_series_check

__all__ = [
    "ActionSpec",
    "FixCount",
    "INFINITE",
    "LyapunovList",
    "RankOneError",
    "catalog",
    "directional_entropy",
    "directional_zeta_x2x3",
    "entropy_bounds",
    "fix_count",
    "fix_grid",
    "fried_average_entropy",
    "g_factor",
    "hull_experiment",
    "hull_points",
    "load_action",
    "lyapunov_list",
    "nonexpansive_directions",
    "omega_set",
    "polytope_volume",
    "relational_entropy",
    "strong_sync_count_123",
    "sync_family",
    "sync_growth_rate",
    "unit_ball",
    "weak_sync_count",
    "zeta_series_check",
]
