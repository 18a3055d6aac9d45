"""Local-sensing chemotaxis solver: grid operators, diagnostics and scenario runs."""

from ._locsense import (
    apply_K,
    apply_L_nu,
    apply_lambda_nu,
    critical_mass,
    dual_norm_sq,
    entropy,
    entropy_nu,
    jump_rate,
    laplacian,
    motility,
    preset_names,
    preset_text,
    run_config,
    run_preset,
)

__all__ = [
    "apply_K",
    "apply_L_nu",
    "apply_lambda_nu",
    "critical_mass",
    "dual_norm_sq",
    "entropy",
    "entropy_nu",
    "jump_rate",
    "laplacian",
    "motility",
    "preset_names",
    "preset_text",
    "run_config",
    "run_preset",
]
