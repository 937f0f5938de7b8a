"""Reference interferometer phase formulas for documentation and demos.

Textbook two-path phases: the optical-path-length difference phase
2*pi*(sum n*dx over path 1 - sum n*dx over path 2)/lambda, and the
gravitational two-height neutron phase m*g*h*t/hbar.  Phases are returned
unwrapped (not reduced mod 2*pi) since both are path-integral quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

# Physical constants, CODATA 2018.
HBAR_JS = 1.054571817e-34
NEUTRON_MASS_KG = 1.67492749804e-27
STANDARD_GRAVITY_MS2 = 9.80665


@dataclass(frozen=True)
class PathSegment:
    """One interferometer arm segment: length in meters, refractive index."""

    length_m: float
    refractive_index: float

    def __post_init__(self):
        if not (math.isfinite(self.length_m) and math.isfinite(self.refractive_index)):
            raise ValueError("segment values must be finite")
        if self.length_m < 0:
            raise ValueError("segment length must be nonnegative")


def _as_segments(profile: Iterable) -> list[PathSegment]:
    segments = []
    for item in profile:
        if isinstance(item, PathSegment):
            segments.append(item)
        else:
            length, index = item
            segments.append(PathSegment(float(length), float(index)))
    return segments


def optical_path_length(profile: Iterable) -> float:
    """Sum of n*dx over a path profile, in meters."""
    return sum(seg.refractive_index * seg.length_m for seg in _as_segments(profile))


def optical_path_phase(profile1: Iterable, profile2: Iterable, wavelength_m: float) -> float:
    """Two-path phase difference 2*pi*(OPL1 - OPL2)/lambda, unwrapped.

    A segment adding half a wavelength of optical path to one arm shifts
    the phase by exactly pi.
    """
    if not (math.isfinite(wavelength_m) and wavelength_m > 0):
        raise ValueError("wavelength must be positive and finite")
    ratio = (optical_path_length(profile1) - optical_path_length(profile2)) / wavelength_m
    return 2.0 * math.pi * ratio


@dataclass(frozen=True)
class COWParams:
    """Parameters of the gravitational two-height interference phase."""

    mass_kg: float = NEUTRON_MASS_KG
    gravity_ms2: float = STANDARD_GRAVITY_MS2
    height_m: float = 0.0
    time_s: float = 0.0

    def __post_init__(self):
        values = (self.mass_kg, self.gravity_ms2, self.height_m, self.time_s)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("parameters must be finite")
        if self.mass_kg < 0 or self.time_s < 0:
            raise ValueError("mass and time must be nonnegative")


def cow_phase(params: COWParams) -> float:
    """Gravitational phase m*g*h*t/hbar between two height-separated paths."""
    return params.mass_kg * params.gravity_ms2 * params.height_m * params.time_s / HBAR_JS
