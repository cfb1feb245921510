"""Branching media: source layouts, intensity laws and sampled realizations.

Weibull laws use the (shape k, scale lam) convention with CDF
``1 - exp(-(x / lam) ** k)``, so ``Weibull(2, 2.26)`` has mean
``2.26 * Gamma(1.5) ~= 2.003``.

Every random intensity is a pure function of ``(medium_seed, point index)``:
the split intensity at index ``i`` uses counter ``2 * i`` and the death
intensity counter ``2 * i + 1``. Realizations of ``every_point`` media are
therefore filled lazily without any dependence on visit order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

import numpy as np

from brwsim.lattice import LatticePoint, LatticeWindow, OutsideWindowError
from brwsim.rng import counter_uniforms


@dataclass(frozen=True)
class Constant:
    value: float

    def __post_init__(self):
        if not (self.value >= 0 and math.isfinite(self.value)):
            raise ValueError(f"constant intensity must be finite and >= 0, got {self.value}")

    @property
    def mean(self) -> float:
        return self.value

    @property
    def is_random(self) -> bool:
        return False

    def quantile(self, u):
        return np.full(np.shape(u), float(self.value))

    def to_dict(self) -> dict:
        return {"kind": "constant", "value": self.value}


@dataclass(frozen=True)
class Weibull:
    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError(f"Weibull shape and scale must be > 0, got ({self.shape}, {self.scale})")

    @property
    def mean(self) -> float:
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)

    @property
    def is_random(self) -> bool:
        return True

    def cdf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return -np.expm1(-((x / self.scale) ** self.shape))

    def quantile(self, u):
        return weibull_inverse_cdf(u, self.shape, self.scale)

    def to_dict(self) -> dict:
        return {"kind": "weibull", "shape": self.shape, "scale": self.scale}


IntensityLaw = Union[Constant, Weibull]


def law_from_dict(d: dict) -> IntensityLaw:
    kind = d.get("kind")
    if kind == "constant":
        return Constant(float(d["value"]))
    if kind == "weibull":
        return Weibull(float(d["shape"]), float(d["scale"]))
    raise ValueError(f"unknown intensity law kind {kind!r}")


def weibull_inverse_cdf(u, k: float, lam: float):
    """Weibull quantile ``lam * (-ln(1 - u)) ** (1 / k)`` for ``u`` in (0, 1)."""
    arr = np.asarray(u, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise ValueError("u must lie in the open interval (0, 1)")
    if k <= 0 or lam <= 0:
        raise ValueError("shape and scale must be positive")
    out = lam * (-np.log1p(-arr)) ** (1.0 / k)
    return float(out) if out.ndim == 0 else out


class SourceKind(str, Enum):
    SINGLE_POINT = "single_point"
    EVERY_POINT = "every_point"
    POINT_SET = "point_set"


@dataclass(frozen=True)
class SourceConfiguration:
    kind: SourceKind
    points: tuple[LatticePoint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", SourceKind(self.kind))
        pts = tuple(tuple(int(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if self.kind is SourceKind.SINGLE_POINT and len(pts) != 1:
            raise ValueError("single_point configuration needs exactly one point")
        if self.kind is SourceKind.POINT_SET:
            if not pts:
                raise ValueError("point_set configuration must be nonempty")
            if len(set(pts)) != len(pts):
                raise ValueError("point_set configuration contains duplicates")

    @classmethod
    def single_point(cls, p: Sequence[int]) -> "SourceConfiguration":
        return cls(SourceKind.SINGLE_POINT, (tuple(p),))

    @classmethod
    def every_point(cls) -> "SourceConfiguration":
        return cls(SourceKind.EVERY_POINT)

    @classmethod
    def point_set(cls, points) -> "SourceConfiguration":
        return cls(SourceKind.POINT_SET, tuple(tuple(p) for p in points))

    def validate(self, w: LatticeWindow) -> None:
        for p in self.points:
            w.check(p)

    def to_config(self):
        if self.kind is SourceKind.EVERY_POINT:
            return "every_point"
        if self.kind is SourceKind.SINGLE_POINT and all(c == 0 for c in self.points[0]):
            return "origin"
        return [list(p) for p in self.points]


def sources_from_config(value, dimension: int) -> SourceConfiguration:
    if value == "origin":
        return SourceConfiguration.single_point((0,) * dimension)
    if value == "every_point":
        return SourceConfiguration.every_point()
    if isinstance(value, list) and value:
        pts = [tuple(int(c) for c in p) for p in value]
        if any(len(p) != dimension for p in pts):
            raise ValueError(f"source coordinates must have length {dimension}")
        if len(pts) == 1:
            return SourceConfiguration.single_point(pts[0])
        return SourceConfiguration.point_set(pts)
    raise ValueError(f"sources must be 'origin', 'every_point' or a coordinate list, got {value!r}")


@dataclass(frozen=True)
class MediumSpec:
    sources: SourceConfiguration
    split_law: IntensityLaw
    death_law: IntensityLaw
    iid_across_sources: bool = True

    def __post_init__(self):
        if not self.iid_across_sources:
            raise ValueError("only i.i.d. media are supported")

    @property
    def is_random(self) -> bool:
        return self.split_law.is_random or self.death_law.is_random

    def to_dict(self) -> dict:
        return {
            "sources": self.sources.to_config(),
            "split_law": self.split_law.to_dict(),
            "death_law": self.death_law.to_dict(),
        }


def _draw(spec: MediumSpec, medium_seed: int, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    idx = np.asarray(idx, dtype=np.uint64)
    two = np.uint64(2)
    xp = spec.split_law.quantile(counter_uniforms(medium_seed, two * idx))
    xm = spec.death_law.quantile(counter_uniforms(medium_seed, two * idx + np.uint64(1)))
    return np.asarray(xp, dtype=float), np.asarray(xm, dtype=float)


@dataclass(eq=False)
class MediumRealization:
    """Concrete (xi_plus, xi_minus) per source; zero elsewhere.

    For ``every_point`` media the table is populated on demand. Values are
    keyed by point index, so the lazy table equals the eager one bit for bit.
    """

    spec: MediumSpec
    window: LatticeWindow
    medium_seed: int
    _table: dict[int, tuple[float, float]] = field(default_factory=dict, repr=False)
    _dense: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    @property
    def lazy(self) -> bool:
        return self.spec.sources.kind is SourceKind.EVERY_POINT

    def is_source(self, p: Sequence[int]) -> bool:
        if self.lazy:
            return self.window.contains(tuple(p))
        return tuple(p) in self.spec.sources.points

    def get(self, p: Sequence[int]) -> tuple[float, float]:
        p = tuple(int(c) for c in p)
        if not self.is_source(p):
            return (0.0, 0.0)
        i = self.window.index(p)
        if i not in self._table:
            xp, xm = _draw(self.spec, self.medium_seed, np.array([i]))
            self._table[i] = (float(xp[0]), float(xm[0]))
        return self._table[i]

    def potential(self, p: Sequence[int]) -> float:
        xp, xm = self.get(p)
        return xp - xm

    @property
    def table(self) -> dict[LatticePoint, tuple[float, float]]:
        """Source point -> (xi_plus, xi_minus). Materializes lazy media."""
        if self.lazy:
            xp, xm = self.rate_arrays()
            return {self.window.unindex(i): (float(xp[i]), float(xm[i])) for i in range(self.window.size)}
        return {p: self.get(p) for p in self.spec.sources.points}

    def rate_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense ``(xi_plus, xi_minus)`` arrays over the window, in index order."""
        if self._dense is None:
            n = self.window.size
            if self.lazy:
                xp, xm = _draw(self.spec, self.medium_seed, np.arange(n, dtype=np.uint64))
            else:
                xp = np.zeros(n)
                xm = np.zeros(n)
                for p in self.spec.sources.points:
                    i = self.window.index(p)
                    xp[i], xm[i] = self.get(p)
            xp.setflags(write=False)
            xm.setflags(write=False)
            self._dense = (xp, xm)
        return self._dense

    def potential_array(self) -> np.ndarray:
        xp, xm = self.rate_arrays()
        return xp - xm

    def to_csv(self, path) -> None:
        d = self.window.dimension
        header = ["point_index"] + [f"x{a}" for a in range(d)] + ["xi_plus", "xi_minus"]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(header)
            for p, (xp, xm) in sorted(self.table.items(), key=lambda kv: self.window.index(kv[0])):
                wr.writerow([self.window.index(p), *p, "%.12g" % xp, "%.12g" % xm])


def sample_medium(spec: MediumSpec, medium_seed: int, w: LatticeWindow) -> MediumRealization:
    try:
        spec.sources.validate(w)
    except OutsideWindowError as exc:
        raise OutsideWindowError(f"source configuration does not fit the window: {exc}") from None
    m = MediumRealization(spec, w, int(medium_seed))
    if not m.lazy:
        for p in spec.sources.points:
            m.get(p)
    return m


def potential(m: MediumRealization, p: Sequence[int]) -> float:
    return m.potential(p)
