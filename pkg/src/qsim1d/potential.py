"""Piecewise-constant 1-D potentials and the three builtin scenarios.

Builtin potentials are defined by site-index ranges on the 16-site lattice;
the index ranges (not the physical endpoints) are authoritative.  Site
ranges are inclusive on both ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, make_grid

__all__ = [
    "BUILTIN_TAGS",
    "PotentialSpec",
    "PotentialTable",
    "Scenario",
    "tabulate",
    "builtin_scenario",
]

BUILTIN_TAGS = ("free", "well", "barrier")

WELL_HEIGHT = 60.0
BARRIER_HEIGHT = 100.0

# (first site, last site, value); sites outside every segment get V = 0
_WELL_SEGMENTS = ((0, 5, WELL_HEIGHT), (9, 15, WELL_HEIGHT))
_BARRIER_SEGMENTS = ((9, 10, BARRIER_HEIGHT),)


@dataclass(frozen=True)
class PotentialSpec:
    """Symbolic potential: a builtin tag, explicit segments, or raw values."""

    kind: str
    segments: tuple[tuple[int, int, float], ...] = ()
    values: tuple[float, ...] | None = None

    @classmethod
    def free(cls) -> "PotentialSpec":
        return cls(kind="free")

    @classmethod
    def well(cls) -> "PotentialSpec":
        """V = 60 outside the three interior sites 6..8, zero inside."""
        return cls(kind="well", segments=_WELL_SEGMENTS)

    @classmethod
    def barrier(cls) -> "PotentialSpec":
        """V = 100 on the two sites 9..10, zero elsewhere."""
        return cls(kind="barrier", segments=_BARRIER_SEGMENTS)

    @classmethod
    def from_segments(cls, segments) -> "PotentialSpec":
        segs = tuple((int(lo), int(hi), float(v)) for lo, hi, v in segments)
        return cls(kind="segments", segments=segs)

    @classmethod
    def from_values(cls, values) -> "PotentialSpec":
        return cls(kind="tabulated", values=tuple(float(v) for v in values))


@dataclass
class PotentialTable:
    """Potential sampled on every site of a grid."""

    grid: GridSpec
    values: np.ndarray


def tabulate(spec: PotentialSpec, grid: GridSpec) -> PotentialTable:
    """Evaluate a PotentialSpec on a grid.

    Segment specs must have in-range, non-overlapping site ranges; tabulated
    specs must supply exactly one finite value per site.
    """
    n = grid.n_sites
    if spec.values is not None:
        if len(spec.values) != n:
            raise ValueError(
                f"tabulated potential has {len(spec.values)} values, grid has {n} sites"
            )
        table = np.array(spec.values, dtype=float)
        if not np.all(np.isfinite(table)):
            raise ValueError("tabulated potential contains non-finite values")
        return PotentialTable(grid, table)

    table = np.zeros(n, dtype=float)
    claimed = np.zeros(n, dtype=bool)
    for lo, hi, value in spec.segments:
        if not (0 <= lo <= hi < n):
            raise ValueError(f"segment sites [{lo}, {hi}] out of range for {n} sites")
        if not math.isfinite(value):
            raise ValueError(f"segment value {value} is not finite")
        if claimed[lo : hi + 1].any():
            raise ValueError(f"segment [{lo}, {hi}] overlaps an earlier segment")
        claimed[lo : hi + 1] = True
        table[lo : hi + 1] = value
    return PotentialTable(grid, table)


@dataclass(frozen=True)
class Scenario:
    """A ready-to-run configuration: lattice, potential, start site, step size."""

    tag: str
    grid: GridSpec
    potential: PotentialSpec
    start_index: int
    dt: float
    default_steps: int


def builtin_scenario(tag: str) -> Scenario:
    """The three reference scenarios.

    free:    n=4 on L=8, start at site 8, dt = pi/20, 3 steps
    well:    n=4 on L=4, start at site 7 (well center), dt = pi/100, 10 steps
    barrier: n=4 on L=4, start at site 7 (left of barrier), dt = pi/100, 10 steps
    """
    if tag == "free":
        return Scenario("free", make_grid(4, 8.0), PotentialSpec.free(), 8, math.pi / 20.0, 3)
    if tag == "well":
        return Scenario("well", make_grid(4, 4.0), PotentialSpec.well(), 7, math.pi / 100.0, 10)
    if tag == "barrier":
        return Scenario(
            "barrier", make_grid(4, 4.0), PotentialSpec.barrier(), 7, math.pi / 100.0, 10
        )
    raise ValueError(f"unknown scenario tag {tag!r}; expected one of {BUILTIN_TAGS}")
