"""
Run configuration.

Values are resolved CLI flag → environment variable → default:

    PLANARCALC_SEED       — seed for every random choice (default: 0)
    PLANARCALC_DEGREE     — truncation degree D (default: 5)
    PLANARCALC_ALPHABET   — number of letters n (default: 2)
    PLANARCALC_SCALAR     — "rational" or "float64" (default: rational)
    PLANARCALC_TOLERANCE  — float comparison tolerance (default: 1e-9)
    PLANARCALC_WORKERS    — worker threads (default: 1)
"""

from __future__ import annotations

import argparse
import os
from dataclasses import dataclass

from planarcalc.exceptions import ConfigError
from planarcalc.series import RATIONAL, SCALAR_KINDS

DEFAULT_SEED = 0
DEFAULT_DEGREE = 5
DEFAULT_ALPHABET = 2
DEFAULT_TOLERANCE = 1e-9
DEFAULT_WORKERS = 1


@dataclass(frozen=True)
class RunConfig:
    command: str | None = None
    input_path: str | None = None
    output_path: str | None = None
    alphabet: int = DEFAULT_ALPHABET
    degree: int = DEFAULT_DEGREE
    scalar: str = RATIONAL
    seed: int = DEFAULT_SEED
    tolerance: float = DEFAULT_TOLERANCE
    workers: int = DEFAULT_WORKERS

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise ConfigError(f"degree must be >= 1, got {self.degree}")
        if self.alphabet < 1:
            raise ConfigError(f"alphabet must be >= 1, got {self.alphabet}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must lie in [0, 2**64), got {self.seed}")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.scalar not in SCALAR_KINDS:
            raise ConfigError(f"scalar must be one of {SCALAR_KINDS}, got {self.scalar!r}")

    @property
    def tolerance_for(self) -> float | None:
        """Comparison tolerance: None (exact) for rational runs."""
        return None if self.scalar == RATIONAL else self.tolerance


def resolve(args: argparse.Namespace, attr: str, env_var: str, default: str | None) -> str | None:
    """Resolve a value from CLI arg → env var → default."""
    val = getattr(args, attr, None)
    if val is not None:
        return str(val)
    return os.environ.get(env_var) or default


def _as_int(name: str, raw: str | None) -> int:
    try:
        return int(raw)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from exc


def _as_float(name: str, raw: str | None) -> float:
    try:
        return float(raw)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a number, got {raw!r}") from exc


def from_args(args: argparse.Namespace) -> RunConfig:
    """Build a RunConfig from parsed CLI arguments and the environment."""
    alphabet = resolve(args, "alphabet", "PLANARCALC_ALPHABET", str(DEFAULT_ALPHABET))
    degree = resolve(args, "degree", "PLANARCALC_DEGREE", str(DEFAULT_DEGREE))
    scalar = resolve(args, "scalar", "PLANARCALC_SCALAR", RATIONAL)
    seed = resolve(args, "seed", "PLANARCALC_SEED", str(DEFAULT_SEED))
    tolerance = resolve(args, "tolerance", "PLANARCALC_TOLERANCE", str(DEFAULT_TOLERANCE))
    workers = resolve(args, "workers", "PLANARCALC_WORKERS", str(DEFAULT_WORKERS))
    return RunConfig(
        command=getattr(args, "command", None),
        input_path=getattr(args, "input", None),
        output_path=getattr(args, "output", None),
        alphabet=_as_int("alphabet", alphabet),
        degree=_as_int("degree", degree),
        scalar=scalar or RATIONAL,
        seed=_as_int("seed", seed),
        tolerance=_as_float("tolerance", tolerance),
        workers=_as_int("workers", workers),
    )
