"""Finite cubic window of Z^d for the simple symmetric random walk.

The window is centred on the origin: each axis ranges over
``[-(side // 2), side - 1 - side // 2]``. Points are indexed row-major with
the last axis varying fastest.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

LatticePoint = tuple[int, ...]


class BoundaryPolicy(str, Enum):
    ERROR = "error"
    KILL_WITH_FLAG = "kill_with_flag"


class OutsideWindowError(ValueError):
    """A lattice point lies outside the simulation window."""


@dataclass(frozen=True)
class LatticeWindow:
    dimension: int
    side: int = 100
    boundary_policy: BoundaryPolicy = BoundaryPolicy.ERROR
    origin_offset: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.side < 3:
            raise ValueError(f"side must be >= 3, got {self.side}")
        object.__setattr__(self, "boundary_policy", BoundaryPolicy(self.boundary_policy))
        object.__setattr__(self, "origin_offset", (self.side // 2,) * self.dimension)

    @property
    def size(self) -> int:
        return self.side ** self.dimension

    @property
    def lower(self) -> int:
        return -(self.side // 2)

    @property
    def upper(self) -> int:
        return self.side - 1 - self.side // 2

    @property
    def strides(self) -> np.ndarray:
        """Index increment for a unit step along each axis."""
        return np.array(
            [self.side ** (self.dimension - 1 - a) for a in range(self.dimension)],
            dtype=np.int64,
        )

    @property
    def origin(self) -> LatticePoint:
        return (0,) * self.dimension

    def contains(self, p: Sequence[int]) -> bool:
        if len(p) != self.dimension:
            return False
        return all(self.lower <= c <= self.upper for c in p)

    def check(self, p: Sequence[int]) -> LatticePoint:
        p = tuple(int(c) for c in p)
        if len(p) != self.dimension:
            raise ValueError(f"point {p} has length {len(p)}, window dimension is {self.dimension}")
        if not self.contains(p):
            raise OutsideWindowError(f"point {p} outside window [{self.lower}, {self.upper}]^{self.dimension}")
        return p

    def points(self) -> Iterator[LatticePoint]:
        for i in range(self.size):
            yield self.unindex(i)

    def unindex(self, i: int) -> LatticePoint:
        if not 0 <= i < self.size:
            raise OutsideWindowError(f"index {i} outside [0, {self.size})")
        coords = []
        for _ in range(self.dimension):
            i, r = divmod(i, self.side)
            coords.append(r + self.lower)
        return tuple(reversed(coords))

    def index(self, p: Sequence[int]) -> int:
        p = self.check(p)
        i = 0
        for c in p:
            i = i * self.side + (c - self.lower)
        return i

    def coords_array(self) -> np.ndarray:
        """All window points as an ``(size, d)`` integer array in index order."""
        axes = [np.arange(self.lower, self.upper + 1)] * self.dimension
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=1)


def neighbors(p: Sequence[int], w: LatticeWindow) -> list[LatticePoint]:
    """The 2d nearest neighbours of ``p``, in or out of the window.

    Ordered as ``-e_0, +e_0, -e_1, +e_1, ...``, the same order the engine
    uses to pick a jump target.
    """
    p = w.check(p)
    out = []
    for a in range(w.dimension):
        for step in (-1, 1):
            q = list(p)
            q[a] += step
            out.append(tuple(q))
    return out


def index(p: Sequence[int], w: LatticeWindow) -> int:
    return w.index(p)


def unindex(i: int, w: LatticeWindow) -> LatticePoint:
    return w.unindex(i)
