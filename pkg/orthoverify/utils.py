"""
Utility functions for the orthoverify package.
"""

import logging
from pathlib import Path
from typing import Iterable, Optional, Tuple

LOGGER_NAME = "orthoverify"


def setup_logging(level: str = "WARNING", verbose: bool = False) -> logging.Logger:
    """Set up logging for the package.

    Args:
        level: Name of the log level (DEBUG, INFO, WARNING, ERROR).
        verbose: If True, force the DEBUG level regardless of ``level``.

    Returns:
        Configured logger instance.
    """
    logger = logging.getLogger(LOGGER_NAME)
    numeric = logging.DEBUG if verbose else getattr(logging, level.upper(), None)
    if not isinstance(numeric, int):
        numeric = logging.WARNING

    if logger.handlers:
        # Already configured
        logger.setLevel(numeric)
        return logger

    handler = logging.StreamHandler()
    formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    logger.setLevel(numeric)

    return logger


def get_logger() -> logging.Logger:
    """Get the package logger.

    Returns:
        Logger instance.
    """
    return logging.getLogger(LOGGER_NAME)


def resolve_config_path(config_path: Optional[str] = None) -> Optional[Path]:
    """Resolve the verifier configuration file path.

    Args:
        config_path: Path to an INI file. If None, looks for orthoverify.ini
                    in the current directory and returns None when absent.

    Returns:
        Resolved Path object, or None when no default file exists.

    Raises:
        FileNotFoundError: If an explicitly given file doesn't exist.
    """
    if config_path is None:
        default = Path("orthoverify.ini").resolve()
        return default if default.exists() else None

    path = Path(config_path).resolve()

    if not path.exists():
        raise FileNotFoundError(f"Configuration file not found: {path}")

    return path


def prime_power(q: int) -> Optional[Tuple[int, int]]:
    """Split q into (p, k) with q = p**k and p prime.

    Returns:
        The pair (p, k), or None if q is not a prime power.
    """
    if q < 2:
        return None
    p = 2
    while p * p <= q:
        if q % p == 0:
            break
        p += 1
    else:
        return q, 1
    k = 0
    while q % p == 0:
        q //= p
        k += 1
    return (p, k) if q == 1 else None


def is_prime(n: int) -> bool:
    """Trial-division primality test for desk-scale integers."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> Tuple[int, ...]:
    """Distinct prime factors of n in ascending order."""
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        factors.append(n)
    return tuple(factors)


def odd_prime_powers(q_min: int, q_max: int) -> Iterable[int]:
    """Yield every odd prime power in [q_min, q_max] in ascending order."""
    for q in range(max(q_min, 3), q_max + 1):
        if q % 2 and prime_power(q) is not None:
            yield q


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of an n-dimensional space over F_q."""
    if k < 0 or k > n:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den
