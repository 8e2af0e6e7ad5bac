"""Radial ground states, evolution and blow-up studies for a quadratic
two-component Schrodinger system in five dimensions."""

from ._core import (
    Grid,
    GroundState,
    PairState,
    QuadnlsError,
    __version__,
    certify_ground_state,
    default_config,
    emit_plot_script,
    evolve,
    nehari_project,
    normalize_config,
    report,
    run_instability,
    run_omega_study,
    scale,
    second_moment,
    solve_ground_state,
    standing_wave_error,
)

__all__ = [
    "Grid",
    "GroundState",
    "PairState",
    "QuadnlsError",
    "__version__",
    "certify_ground_state",
    "default_config",
    "emit_plot_script",
    "evolve",
    "nehari_project",
    "normalize_config",
    "report",
    "run_instability",
    "run_omega_study",
    "scale",
    "second_moment",
    "solve_ground_state",
    "standing_wave_error",
]
