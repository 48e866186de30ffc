"""Temperature grids, schedules, and the strategy string grammar.

The sampling grid is equidistant: delta = (tau_max - tau_min) / (k - 1), with
the final element forced to exactly tau_max so no float drift accumulates at
the endpoint. A Monte Carlo schedule is a seeded permutation of that grid,
i.e. the k temperatures are drawn without replacement.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum

from .errors import ValidationError

__all__ = [
    "StrategyTag",
    "TemperatureSchedule",
    "ParsedStrategy",
    "mct_grid",
    "mct_schedule",
    "fixed_schedule",
    "random_fixed_draw",
    "parse_strategy",
    "fixed_strategy_id",
    "schedule_for_strategy",
]

MCT_STRATEGY = "mct"
RANDOM_FIXED_STRATEGY = "random-fixed"
_FIXED_PREFIX = "fixed:"


class StrategyTag(str, Enum):
    MCT = "mct"
    FIXED = "fixed"
    RANDOM_FIXED = "random-fixed"


@dataclass(frozen=True)
class TemperatureSchedule:
    """The per-sample temperatures for one question's generation pass."""

    values: tuple[float, ...]
    strategy_tag: StrategyTag

    def __post_init__(self) -> None:
        if not self.values:
            raise ValidationError("temperature schedule must be non-empty")
        for tau in self.values:
            if not math.isfinite(tau) or tau <= 0.0:
                raise ValidationError(
                    f"schedule temperatures must be positive reals, got {tau!r}"
                )

    @property
    def k(self) -> int:
        return len(self.values)


def _check_grid_args(tau_min: float, tau_max: float, k: int) -> None:
    if k < 2:
        raise ValidationError(
            f"temperature grid is undefined for k < 2 (got k={k}); "
            f"a single-draw schedule has no spacing"
        )
    if not math.isfinite(tau_min) or tau_min <= 0.0:
        raise ValidationError(f"tau_min must be a positive real, got {tau_min!r}")
    if not math.isfinite(tau_max) or tau_min >= tau_max:
        raise ValidationError(
            f"need tau_min < tau_max, got tau_min={tau_min!r}, tau_max={tau_max!r}"
        )


def mct_grid(tau_min: float, tau_max: float, k: int) -> tuple[float, ...]:
    """Ascending equidistant k-point grid spanning [tau_min, tau_max]."""
    _check_grid_args(tau_min, tau_max, k)
    delta = (tau_max - tau_min) / (k - 1)
    values = [tau_min + i * delta for i in range(k - 1)]
    values.append(tau_max)
    return tuple(values)


def mct_schedule(
    tau_min: float, tau_max: float, k: int, rng_seed: int
) -> TemperatureSchedule:
    """Seeded permutation of the grid: k distinct temperatures, no replacement."""
    values = list(mct_grid(tau_min, tau_max, k))
    random.Random(rng_seed).shuffle(values)
    return TemperatureSchedule(tuple(values), StrategyTag.MCT)


def fixed_schedule(
    tau: float, k: int, strategy_tag: StrategyTag = StrategyTag.FIXED
) -> TemperatureSchedule:
    """k samples, every one at temperature tau."""
    if k < 1:
        raise ValidationError(f"fixed schedule needs k >= 1, got {k}")
    if not math.isfinite(tau) or tau <= 0.0:
        raise ValidationError(f"fixed temperature must be a positive real, got {tau!r}")
    return TemperatureSchedule((tau,) * k, strategy_tag)


def random_fixed_draw(grid: tuple[float, ...], rng_seed: int) -> float:
    """One uniformly drawn grid value (the random-fixed baseline's choice)."""
    if not grid:
        raise ValidationError("cannot draw from an empty temperature grid")
    return random.Random(rng_seed).choice(list(grid))


@dataclass(frozen=True)
class ParsedStrategy:
    tag: StrategyTag
    tau: float | None = None


def parse_strategy(text: str) -> ParsedStrategy:
    """Parse a strategy string: "mct", "fixed:<tau>", or "random-fixed"."""
    if text == MCT_STRATEGY:
        return ParsedStrategy(StrategyTag.MCT)
    if text == RANDOM_FIXED_STRATEGY:
        return ParsedStrategy(StrategyTag.RANDOM_FIXED)
    if text.startswith(_FIXED_PREFIX):
        raw = text[len(_FIXED_PREFIX) :]
        try:
            tau = float(raw)
        except ValueError:
            raise ValidationError(f"unparseable fixed temperature in {text!r}") from None
        if not math.isfinite(tau) or tau <= 0.0:
            raise ValidationError(
                f"fixed strategy temperature must be a positive real, got {text!r}"
            )
        return ParsedStrategy(StrategyTag.FIXED, tau)
    raise ValidationError(
        f"unknown strategy {text!r}; expected 'mct', 'fixed:<tau>', or 'random-fixed'"
    )


def fixed_strategy_id(tau: float) -> str:
    """Canonical strategy string for a fixed temperature, e.g. 'fixed:0.325'."""
    return f"{_FIXED_PREFIX}{tau:g}"


def schedule_for_strategy(
    strategy: str,
    *,
    k: int,
    tau_min: float,
    tau_max: float,
    rng_seed: int,
) -> TemperatureSchedule:
    """Build the schedule a strategy string calls for.

    The seed matters only for the randomized strategies; mct permutes the grid
    with it, random-fixed uses it for the single temperature draw.
    """
    parsed = parse_strategy(strategy)
    if parsed.tag is StrategyTag.MCT:
        return mct_schedule(tau_min, tau_max, k, rng_seed)
    if parsed.tag is StrategyTag.RANDOM_FIXED:
        tau = random_fixed_draw(mct_grid(tau_min, tau_max, k), rng_seed)
        return fixed_schedule(tau, k, StrategyTag.RANDOM_FIXED)
    assert parsed.tau is not None
    return fixed_schedule(parsed.tau, k)
