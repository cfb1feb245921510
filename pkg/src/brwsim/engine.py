"""Event-driven simulation of one branching random walk trajectory.

State is a set of particle records ``(k, t_birth, t_death, x)``. The record
with unknown death time and the smallest ``(t_birth, k)`` is processed next:
it receives a holding time, then jumps, splits or dies. A jump is the death of
the record and the birth of a new one at a neighbouring site.

Records are kept in a binary heap keyed by ``(t_birth, k)``. Death events
whose time lies ahead of the processing frontier sit in a second heap keyed
by ``(time, sequence)`` and are released in time order, which yields the
chronological event log and the exact live count used by the cap rule.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np
from numba import njit

from brwsim.lattice import BoundaryPolicy, LatticePoint, LatticeWindow
from brwsim.medium import MediumRealization
from brwsim.rng import MASK64, _next_uniform


class HoldingTimeMode(str, Enum):
    TOTAL_RATE = "total_rate"
    PAPER_LITERAL = "paper_literal"


class Status(IntEnum):
    EXTINCT = 0
    REACHED_HORIZON = 1
    CAPPED = 2
    BOUNDARY_EXIT = 3


class EventKind(IntEnum):
    JUMP = 0
    SPLIT = 1
    DIE = 2
    EXIT = 3  # walked out of the window under KillWithFlag; counts as a death


_DELTA = np.array([0, 1, -1, -1], dtype=np.int64)


@dataclass(frozen=True)
class EngineParams:
    kappa: float = 1.0
    t_max: float = 10.0
    particle_cap: int = 1000
    holding_time_mode: HoldingTimeMode = HoldingTimeMode.TOTAL_RATE

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if not self.t_max > 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if self.particle_cap < 1:
            raise ValueError(f"particle_cap must be >= 1, got {self.particle_cap}")
        object.__setattr__(self, "holding_time_mode", HoldingTimeMode(self.holding_time_mode))


class TrajectoryRangeError(ValueError):
    """Time outside the observed range of a trajectory."""


@dataclass(eq=False)
class Trajectory:
    times: np.ndarray
    kinds: np.ndarray
    positions: np.ndarray
    mu_after: np.ndarray
    status: Status
    t_stop: float | None
    t_100: float | None
    t_max: float
    replicate_seed: int
    window: LatticeWindow
    flagged: bool = False

    @property
    def n_events(self) -> int:
        return len(self.times)

    @property
    def end_time(self) -> float:
        """Right end of the range on which mu is observed."""
        return self.t_stop if self.t_stop is not None else self.t_max

    @property
    def extinction_time(self) -> float | None:
        if self.status is Status.EXTINCT:
            return float(self.times[-1])
        return None

    @property
    def mu_steps(self) -> tuple[np.ndarray, np.ndarray]:
        """Jump times and values of the right-continuous step function mu(t)."""
        return (np.concatenate([[0.0], self.times]), np.concatenate([[1], self.mu_after]))

    @property
    def events(self) -> list[tuple[float, EventKind, LatticePoint]]:
        w = self.window
        return [(float(t), EventKind(k), w.unindex(int(x))) for t, k, x in zip(self.times, self.kinds, self.positions)]

    def mu_on(self, t) -> np.ndarray:
        """mu at each time in ``t`` without range checks."""
        i = np.searchsorted(self.times, t, side="right")
        steps = np.concatenate([[1], self.mu_after]).astype(np.int64)
        return steps[i]

    def to_csv(self, path) -> None:
        d = self.window.dimension
        with open(path, "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["time", "event"] + [f"x{a}" for a in range(d)] + ["mu_after"])
            for (t, k, p), mu in zip(self.events, self.mu_after):
                wr.writerow(["%.12g" % t, k.name.lower(), *p, int(mu)])


def mu_at(traj: Trajectory, t: float) -> int:
    if not 0.0 <= t <= traj.end_time:
        raise TrajectoryRangeError(f"t={t} outside observed range [0, {traj.end_time}]")
    return int(traj.mu_on(np.array([t]))[0])


# -- kernel -----------------------------------------------------------------


@njit(cache=True)
def _grow_f(a, n):
    b = np.empty(max(2 * a.shape[0], n), a.dtype)
    b[: a.shape[0]] = a
    return b


@njit(cache=True)
def _grow_i(a, n):
    b = np.empty(max(2 * a.shape[0], n), a.dtype)
    b[: a.shape[0]] = a
    return b


@njit(cache=True, inline="always")
def _less(ta, ia, tb, ib):
    return ta < tb or (ta == tb and ia < ib)


@njit(cache=True)
def _heap_push(ht, hid, hx, n, t, k, x):
    i = n
    while i > 0:
        parent = (i - 1) >> 1
        if _less(t, k, ht[parent], hid[parent]):
            ht[i] = ht[parent]
            hid[i] = hid[parent]
            hx[i] = hx[parent]
            i = parent
        else:
            break
    ht[i] = t
    hid[i] = k
    hx[i] = x


@njit(cache=True)
def _heap_pop(ht, hid, hx, n):
    # Removes the root of a heap of size n; caller reads the root beforehand.
    n -= 1
    t = ht[n]
    k = hid[n]
    x = hx[n]
    i = 0
    while True:
        c = 2 * i + 1
        if c >= n:
            break
        if c + 1 < n and _less(ht[c + 1], hid[c + 1], ht[c], hid[c]):
            c += 1
        if _less(ht[c], hid[c], t, k):
            ht[i] = ht[c]
            hid[i] = hid[c]
            hx[i] = hx[c]
            i = c
        else:
            break
    if n > 0:
        ht[i] = t
        hid[i] = k
        hx[i] = x


@njit(cache=True)
def _simulate_kernel(xi_plus, xi_minus, side, strides, start, kappa, t_max, cap, literal, kill, seed):
    dim = strides.shape[0]
    two_d = 2 * dim
    state = np.empty(1, np.uint64)
    state[0] = seed

    cap0 = 64
    p_t = np.empty(cap0, np.float64)  # pending records, keyed (t_birth, id)
    p_id = np.empty(cap0, np.int64)
    p_x = np.empty(cap0, np.int64)
    n_p = 0
    e_t = np.empty(cap0, np.float64)  # realized future events, keyed (time, seq)
    e_seq = np.empty(cap0, np.int64)
    e_code = np.empty(cap0, np.int64)  # kind * size + position
    n_e = 0
    size = xi_plus.shape[0]

    out_t = np.empty(256, np.float64)
    out_k = np.empty(256, np.int8)
    out_x = np.empty(256, np.int64)
    out_mu = np.empty(256, np.int64)
    n_out = 0

    _heap_push(p_t, p_id, p_x, n_p, 0.0, 1, start)
    n_p = 1
    next_id = 2
    seq = 0
    live = 1
    status = 1
    t_stop = -1.0
    t_100 = -1.0
    flagged = False
    if live >= 100:
        t_100 = 0.0
    done = False

    while not done:
        frontier = p_t[0] if n_p > 0 else np.inf
        while n_e > 0 and e_t[0] <= frontier:
            t = e_t[0]
            code = e_code[0]
            _heap_pop(e_t, e_seq, e_code, n_e)
            n_e -= 1
            kind = code // size
            pos = code - kind * size
            if kind == 4:  # boundary exit under the Error policy
                status = 3
                t_stop = t
                done = True
                break
            if kind == 1:
                live += 1
            elif kind >= 2:
                live -= 1
            if n_out == out_t.shape[0]:
                out_t = _grow_f(out_t, n_out + 1)
                out_k = _grow_i(out_k, n_out + 1)
                out_x = _grow_i(out_x, n_out + 1)
                out_mu = _grow_i(out_mu, n_out + 1)
            out_t[n_out] = t
            out_k[n_out] = kind
            out_x[n_out] = pos
            out_mu[n_out] = live
            n_out += 1
            if kind == 3:
                flagged = True
            if t_100 < 0.0 and live >= 100:
                t_100 = t
            if live > cap:
                status = 2
                t_stop = t
                done = True
                break
        if done:
            break
        if n_p == 0:
            status = 0 if live == 0 else 1
            break

        tb = p_t[0]
        x = p_x[0]
        _heap_pop(p_t, p_id, p_x, n_p)
        n_p -= 1

        xp = xi_plus[x]
        xm = xi_minus[x]
        total = kappa + xp + xm
        rate = kappa if literal else total
        u = _next_uniform(state)
        td = tb - np.log1p(-u) / rate
        if td > t_max:
            continue  # alive through the horizon, nothing to record
        s = _next_uniform(state) * total
        if s < kappa:
            j = int(s / kappa * two_d)
            if j >= two_d:
                j = two_d - 1
            axis = j >> 1
            st = strides[axis]
            c = (x // st) % side
            if j & 1:
                inside = c < side - 1
                nx = x + st
            else:
                inside = c > 0
                nx = x - st
            if inside:
                kind = 0
                target = nx
            else:
                kind = 3 if kill else 4
                target = x
        elif s < kappa + xp:
            kind = 1
            target = x
        else:
            kind = 2
            target = x

        if n_e + 1 > e_t.shape[0]:
            e_t = _grow_f(e_t, n_e + 1)
            e_seq = _grow_i(e_seq, n_e + 1)
            e_code = _grow_i(e_code, n_e + 1)
        _heap_push(e_t, e_seq, e_code, n_e, td, seq, kind * size + target)
        n_e += 1
        seq += 1

        n_child = 1 if kind == 0 else (2 if kind == 1 else 0)
        if n_p + n_child > p_t.shape[0]:
            p_t = _grow_f(p_t, n_p + n_child)
            p_id = _grow_i(p_id, n_p + n_child)
            p_x = _grow_i(p_x, n_p + n_child)
        for _ in range(n_child):
            _heap_push(p_t, p_id, p_x, n_p, td, next_id, target)
            n_p += 1
            next_id += 1

    return out_t[:n_out], out_k[:n_out], out_x[:n_out], out_mu[:n_out], status, t_stop, t_100, flagged


def simulate(
    medium: MediumRealization,
    params: EngineParams,
    w: LatticeWindow,
    start=None,
    replicate_seed: int = 0,
) -> Trajectory:
    start = w.origin if start is None else w.check(start)
    xp, xm = medium.rate_arrays()
    if medium.window != w:
        raise ValueError("medium was sampled on a different window")
    t, k, x, mu, status, t_stop, t_100, flagged = _simulate_kernel(
        xp,
        xm,
        w.side,
        w.strides,
        w.index(start),
        float(params.kappa),
        float(params.t_max),
        int(params.particle_cap),
        params.holding_time_mode is HoldingTimeMode.PAPER_LITERAL,
        w.boundary_policy is BoundaryPolicy.KILL_WITH_FLAG,
        np.uint64(replicate_seed & MASK64),
    )
    return Trajectory(
        times=t,
        kinds=k,
        positions=x,
        mu_after=mu,
        status=Status(status),
        t_stop=float(t_stop) if t_stop >= 0 else None,
        t_100=float(t_100) if t_100 >= 0 else None,
        t_max=float(params.t_max),
        replicate_seed=int(replicate_seed),
        window=w,
        flagged=bool(flagged),
    )
