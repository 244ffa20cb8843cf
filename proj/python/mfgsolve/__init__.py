"""Mean field game solver on a periodic grid.

Fields come back as numpy arrays with time on axis 0. Two-dimensional
fields use axis order (y, x); controls carry the component on axis 1.
"""

from ._mfgsolve import (
    Config,
    Domain,
    conjugate,
    fenchel_residual,
    load_config,
    parse_config,
    presets,
    simulate_particles,
    solve_fp,
    solve_hjb,
    solve_mfg,
    verify,
    yosida_grad,
    yosida_value,
)

__all__ = [
    "Config",
    "Domain",
    "conjugate",
    "fenchel_residual",
    "load_config",
    "parse_config",
    "presets",
    "simulate_particles",
    "solve_fp",
    "solve_hjb",
    "solve_mfg",
    "verify",
    "yosida_grad",
    "yosida_value",
]
