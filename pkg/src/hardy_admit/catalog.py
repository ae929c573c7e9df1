"""A small catalog of radial weights used by tests, sweeps and the CLI."""

from __future__ import annotations

import math

from .profiles import (
    ConstProfile,
    ExpProfile,
    IndicatorProfile,
    PowerLogProfile,
    PowerProfile,
    RadialProfile,
    ShiftedPowerProfile,
)

__all__ = ["radial_decreasing_catalog", "incomparable_pair"]


def radial_decreasing_catalog() -> dict[str, RadialProfile]:
    """Eight radial non-increasing weights of different local and global behaviour."""
    return {
        "inverse_square": PowerProfile(2.0),
        "inverse_linear": PowerProfile(1.0),
        "inverse_power_2.5": PowerProfile(2.5),
        "constant": ConstProfile(1.0),
        "shifted_cubic": ShiftedPowerProfile(3.0, 1.0),
        "exponential": ExpProfile(1.0),
        "critical_log": PowerLogProfile(2.0, 2.0, 1.0),
        "step": IndicatorProfile(0.5),
    }


def incomparable_pair(N: int, alpha: float) -> tuple[RadialProfile, RadialProfile]:
    """``|x|^(-N/alpha)`` and ``(1 + |x|)^(-(N/alpha + 1))``."""
    d = 0.0 if math.isinf(alpha) else N / alpha
    return PowerProfile(d), ShiftedPowerProfile(d + 1.0, 1.0)
