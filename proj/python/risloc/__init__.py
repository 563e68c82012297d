"""RIS-aided indoor localization simulator."""

from ._core import (
    ConfigError,
    Error,
    default_config,
    direction_angles,
    ls_locate,
    nomp_extract,
    rayleigh_distance,
    recipe_names,
    run_recipe,
    run_trial,
    steering_vector,
)

__all__ = [
    "ConfigError",
    "Error",
    "default_config",
    "direction_angles",
    "ls_locate",
    "nomp_extract",
    "rayleigh_distance",
    "recipe_names",
    "run_recipe",
    "run_trial",
    "steering_vector",
]
