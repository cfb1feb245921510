"""First-moment equation ``d/dt m = A m + V m`` on a truncated lattice.

``A`` is the generator of the simple symmetric walk with jump rate kappa,
``(A f)(x) = kappa * (mean of f over the 2d neighbours - f(x))``, with zero
(Dirichlet) values outside the window. Integration is classical RK4 on the
dense field. The solution only agrees with the particle engine while the
mass reaching the window boundary is negligible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from brwsim.lattice import LatticeWindow
from brwsim.medium import MediumRealization


class StepSizeError(ValueError):
    def __init__(self, dt: float, max_dt: float):
        super().__init__(f"dt={dt} violates the stability guard; use dt < {max_dt:.6g}")
        self.dt = dt
        self.suggested_dt = 0.5 * max_dt


class Initial(str, Enum):
    TOTAL_COUNT = "total_count"
    LOCAL_DELTA = "local_delta"


@dataclass(frozen=True)
class OperatorSpec:
    window: LatticeWindow
    kappa: float
    potential: np.ndarray  # flat, window index order

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        v = np.asarray(self.potential, dtype=float)
        if v.shape != (self.window.size,):
            raise ValueError(f"potential must have {self.window.size} entries")
        if not np.all(np.isfinite(v)):
            raise ValueError("potential must be finite")
        object.__setattr__(self, "potential", v)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.window.side,) * self.window.dimension

    @property
    def max_dt(self) -> float:
        return 1.0 / (2.0 * (self.kappa + float(np.abs(self.potential).max())))

    @classmethod
    def from_medium(cls, medium: MediumRealization, kappa: float, window: LatticeWindow | None = None) -> "OperatorSpec":
        """Potential of ``medium`` restricted to ``window`` (default: its own)."""
        mw = medium.window
        window = mw if window is None else window
        if window.dimension != mw.dimension:
            raise ValueError("window dimension differs from the medium's")
        if window.side > mw.side:
            raise ValueError("oracle window must fit inside the medium window")
        coords = window.coords_array()
        flat = np.zeros(len(coords), dtype=np.int64)
        for a in range(mw.dimension):
            flat = flat * mw.side + (coords[:, a] - mw.lower)
        v = medium.potential_array()[flat]
        return cls(window, kappa, v)


def apply_generator(spec: OperatorSpec, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    flat = f.shape == (spec.window.size,)
    g = f.reshape(spec.shape)
    d = spec.window.dimension
    acc = np.zeros_like(g)
    for a in range(d):
        lo = [slice(None)] * d
        hi = [slice(None)] * d
        lo[a] = slice(0, -1)
        hi[a] = slice(1, None)
        acc[tuple(lo)] += g[tuple(hi)]
        acc[tuple(hi)] += g[tuple(lo)]
    out = spec.kappa * (acc / (2 * d) - g)
    return out.ravel() if flat else out


@dataclass(eq=False)
class M1Solution:
    times: np.ndarray
    fields: np.ndarray  # (len(times), window.size)
    start_index: int

    @property
    def m1_start(self) -> np.ndarray:
        return self.fields[:, self.start_index]

    def at(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9:
            raise ValueError(f"t={t} was not recorded")
        return self.fields[i]


def solve_m1(
    spec: OperatorSpec,
    initial: Initial = Initial.TOTAL_COUNT,
    t_end: float = 10.0,
    dt: float = 1e-3,
    start=None,
    target=None,
    record_every: float | None = None,
) -> M1Solution:
    """Integrate the first-moment equation from 0 to ``t_end``.

    ``TOTAL_COUNT`` starts from the constant field 1 and yields
    ``m1(t, x) = E_x mu_t``; ``LOCAL_DELTA`` starts from the indicator of
    ``target`` and yields ``m1(t, x, target)``. Fields are stored every
    ``record_every`` time units (default: every step). ``start`` selects the
    site reported by ``m1_start``.
    """
    w = spec.window
    if dt <= 0 or t_end <= 0:
        raise ValueError("dt and t_end must be positive")
    if dt >= spec.max_dt:
        raise StepSizeError(dt, spec.max_dt)
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError("t_end must be a multiple of dt")
    stride = 1 if record_every is None else int(round(record_every / dt))
    if stride < 1 or abs(stride * dt - (record_every or dt)) > 1e-9:
        raise ValueError("record_every must be a multiple of dt")

    initial = Initial(initial)
    if initial is Initial.TOTAL_COUNT:
        f = np.ones(w.size)
    else:
        if target is None:
            raise ValueError("LOCAL_DELTA needs a target point")
        f = np.zeros(w.size)
        f[w.index(target)] = 1.0
    v = spec.potential

    def rhs(g):
        return apply_generator(spec, g) + v * g

    times = [0.0]
    fields = [f.copy()]
    for step in range(1, n_steps + 1):
        k1 = rhs(f)
        k2 = rhs(f + 0.5 * dt * k1)
        k3 = rhs(f + 0.5 * dt * k2)
        k4 = rhs(f + dt * k3)
        f = f + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if step % stride == 0:
            times.append(step * dt)
            fields.append(f.copy())
    start = w.origin if start is None else start
    return M1Solution(np.array(times), np.vstack(fields), w.index(start))
