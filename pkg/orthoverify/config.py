"""
Verifier configuration loading and validation.

Budgets come from a dataclass with desk-scale defaults, optionally
overridden by the ``[orthoverify]`` section of an INI file and finally by
command-line flags.
"""

import configparser
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Optional

from orthoverify.errors import ConfigurationError
from orthoverify.utils import get_logger, resolve_config_path

SECTION = "orthoverify"


@dataclass(frozen=True)
class VerifierConfig:
    """Budgets and sampling parameters shared by every pipeline."""

    max_field_order: int = 2**20
    max_subspaces: int = 10**7
    max_cells: int = 10**7
    max_cosets: int = 5 * 10**6
    snf_dense_limit: int = 3000
    orbit_budget: int = 10**7
    sample_size: int = 1000
    seed: int = 0

    def override(self, **kwargs: Any) -> "VerifierConfig":
        """Return a copy with every non-None keyword applied."""
        changes = {key: value for key, value in kwargs.items() if value is not None}
        unknown = set(changes) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys: {sorted(unknown)}")
        return replace(self, **changes)

    def as_dict(self) -> Dict[str, int]:
        return asdict(self)


DEFAULT_CONFIG = VerifierConfig()


def load_config(config_path: Optional[str] = None) -> VerifierConfig:
    """Load verifier configuration from file.

    Args:
        config_path: Path to an INI file. If None, uses orthoverify.ini in
                    the current directory when it exists, defaults otherwise.

    Returns:
        VerifierConfig object.

    Raises:
        ConfigurationError: If configuration cannot be loaded.
    """
    logger = get_logger()

    try:
        path = resolve_config_path(config_path)
    except FileNotFoundError as e:
        raise ConfigurationError(str(e))

    if path is None:
        logger.debug("No configuration file, using defaults")
        return DEFAULT_CONFIG

    logger.debug(f"Loading configuration from: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as e:
        raise ConfigurationError(f"Failed to parse configuration {path}: {e}")

    if not parser.has_section(SECTION):
        raise ConfigurationError(f"[{SECTION}] section not found in {path}")

    values: Dict[str, int] = {}
    for key, raw in parser.items(SECTION):
        try:
            values[key] = int(raw.replace("_", ""))
        except ValueError:
            raise ConfigurationError(f"{key} must be an integer, got {raw!r}")

    config = DEFAULT_CONFIG.override(**values)
    for key, value in config.as_dict().items():
        if key != "seed" and value < 1:
            raise ConfigurationError(f"{key} must be positive, got {value}")
    return config
