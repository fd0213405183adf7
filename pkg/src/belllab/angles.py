"""Polarizer-angle arithmetic.

A polarizer orientation is only defined modulo a half turn, so every angle in
the package is stored reduced to the half-open interval [0, pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["Angle", "normalize_angle", "as_radians"]


def normalize_angle(radians: float) -> float:
    """Reduce a finite angle in radians to [0, pi).

    Total for every finite float; raises ValueError for NaN or infinity.
    """
    x = float(radians)
    if not math.isfinite(x):
        raise ValueError(f"angle must be finite, got {x!r}")
    r = math.fmod(x, math.pi)
    if r < 0.0:
        r += math.pi
    if r >= math.pi:  # rounding can land exactly on pi for tiny negatives
        r = 0.0
    return r


@dataclass(frozen=True)
class Angle:
    """A polarizer setting, held in radians reduced to [0, pi)."""

    radians: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "radians", normalize_angle(self.radians))

    @classmethod
    def from_degrees(cls, degrees: float) -> "Angle":
        return cls(math.radians(degrees))

    @property
    def degrees(self) -> float:
        return math.degrees(self.radians)

    def __float__(self) -> float:
        return self.radians


def as_radians(angle: "Angle | float") -> float:
    """Coerce an Angle or plain radian value to a normalized float."""
    if isinstance(angle, Angle):
        return angle.radians
    return normalize_angle(angle)
