"""Sampled paths, discrete p-variation and Hoelder norms, control functions.

A path is stored as samples (t_i, x_i) and interpreted as its piecewise
linear interpolant.  All variation-type quantities are computed over
partitions drawn from the sample points; for p >= 1 interior points of a
linear segment never increase the supremum, so this is the exact
p-variation of the interpolant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DataError,
    DomainError,
    JoinError,
    ParameterError,
    SizeError,
)

_TIME_TOL = 1e-12


@dataclass(frozen=True)
class Interval:
    """Closed time interval [lo, hi] with lo <= hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ParameterError("interval endpoints must be finite")
        if self.lo > self.hi:
            raise ParameterError(f"interval has lo={self.lo} > hi={self.hi}")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, t: float, tol: float = _TIME_TOL) -> bool:
        return self.lo - tol <= t <= self.hi + tol


WindowLike = Union[Interval, Tuple[float, float], None]


def as_interval(window: WindowLike) -> Optional[Interval]:
    if window is None or isinstance(window, Interval):
        return window
    lo, hi = window
    return Interval(float(lo), float(hi))


@dataclass(frozen=True)
class SampledPath:
    """A path sampled at strictly increasing times.

    Parameters
    ----------
    times : array, shape (n,)
        Strictly increasing sample times, n >= 2.
    values : array, shape (n,), (n, d) or (n, d, m)
        Sample values.  A 1-d input is normalised to shape (n, 1).
        The (n, d, m) layout holds matrix-valued paths such as the
        composition g(t, x_t); norms are Frobenius norms in that case.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if times.ndim != 1 or len(times) < 2:
            raise ParameterError("a path needs at least two sample times")
        if len(times) != len(values):
            raise ParameterError("times and values must have equal length")
        if not np.all(np.diff(times) > 0):
            raise ParameterError("sample times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise DataError("path contains non-finite entries")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    @property
    def value_shape(self) -> Tuple[int, ...]:
        return self.values.shape[1:]

    @property
    def domain(self) -> Interval:
        return Interval(float(self.times[0]), float(self.times[-1]))

    def _flat_values(self) -> np.ndarray:
        return self.values.reshape(len(self.times), -1)

    def at(self, t) -> np.ndarray:
        """Linear interpolation at time(s) t; t must lie in the domain."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        lo, hi = self.times[0], self.times[-1]
        span = max(hi - lo, 1.0)
        if np.any(t_arr < lo - _TIME_TOL * span) or np.any(t_arr > hi + _TIME_TOL * span):
            raise DomainError(
                f"time(s) outside path domain [{lo}, {hi}]"
            )
        t_arr = np.clip(t_arr, lo, hi)
        flat = self._flat_values()
        out = np.empty((len(t_arr), flat.shape[1]))
        for k in range(flat.shape[1]):
            out[:, k] = np.interp(t_arr, self.times, flat[:, k])
        out = out.reshape((len(t_arr),) + self.value_shape)
        if np.isscalar(t) or np.asarray(t).ndim == 0:
            return out[0]
        return out

    def restrict(self, window: WindowLike) -> "SampledPath":
        """Restriction to a window, interpolating the endpoints if needed."""
        window = as_interval(window)
        if window is None:
            return self
        lo, hi = self.times[0], self.times[-1]
        tol = _TIME_TOL * max(hi - lo, 1.0)
        if window.lo <= lo + tol and window.hi >= hi - tol:
            if window.lo < lo - tol or window.hi > hi + tol:
                raise DomainError(
                    f"window [{window.lo}, {window.hi}] outside path domain [{lo}, {hi}]"
                )
            return self
        times, values = _window_samples(self, window)
        return SampledPath(times, values)

    def shift(self, dt: float) -> "SampledPath":
        return SampledPath(self.times + dt, self.values)

    def reversed_clock(self) -> "SampledPath":
        """The path u -> x(a + b - u) on the same window [a, b]."""
        a, b = self.times[0], self.times[-1]
        return SampledPath((a + b) - self.times[::-1], self.values[::-1])


def _window_samples(path: SampledPath, window: Interval):
    lo, hi = path.times[0], path.times[-1]
    span = max(hi - lo, 1.0)
    tol = _TIME_TOL * span
    if window.lo < lo - tol or window.hi > hi + tol:
        raise DomainError(
            f"window [{window.lo}, {window.hi}] outside path domain [{lo}, {hi}]"
        )
    a = min(max(window.lo, lo), hi)
    b = min(max(window.hi, lo), hi)
    if b - a <= tol:
        t_mid = 0.5 * (a + b)
        v = path.at(t_mid)
        return np.array([a, a + max(tol, 1e-300)]), np.stack([v, v])
    i0 = int(np.searchsorted(path.times, a + tol))
    i1 = int(np.searchsorted(path.times, b - tol, side="right"))
    inner_t = path.times[i0:i1]
    inner_v = path.values[i0:i1]
    ts = [np.array([a])] if (i0 >= len(path.times) or abs(path.times[i0] - a) > tol) else []
    pre_v = [path.at(a)[None]] if ts else []
    post_t, post_v = [], []
    if i1 == 0 or abs(path.times[i1 - 1] - b) > tol:
        post_t = [np.array([b])]
        post_v = [path.at(b)[None]]
    times = np.concatenate(ts + [inner_t] + post_t)
    values = np.concatenate(pre_v + [inner_v] + post_v)
    return times, values


def merge_times(*time_arrays, tol: float = _TIME_TOL) -> np.ndarray:
    """Sorted union of sample times, merging points closer than tol."""
    allt = np.sort(np.concatenate([np.asarray(t, float) for t in time_arrays]))
    scale = max(abs(allt[0]), abs(allt[-1]), 1.0)
    keep = np.concatenate([[True], np.diff(allt) > tol * scale])
    return allt[keep]


def _increment_norms(flat: np.ndarray, j: int) -> np.ndarray:
    diff = flat[:j] - flat[j]
    if diff.shape[1] == 1:
        return np.abs(diff[:, 0])
    return np.sqrt(np.einsum("ik,ik->i", diff, diff))


def p_variation(
    path: SampledPath,
    p: float,
    window: WindowLike = None,
    power: bool = False,
) -> float:
    """Exact discrete p-variation seminorm over a window.

    Dynamic programme over sample points: V[j] = max_{i<j} V[i] + |x_j - x_i|^p,
    which realises the supremum over all sub-partitions.  O(n^2).

    Parameters
    ----------
    path : SampledPath
    p : float, >= 1
    window : Interval or (lo, hi), optional
    power : bool
        If True return the p-th power (the control value) instead of the root.
    """
    if p < 1:
        raise ParameterError(f"p-variation needs p >= 1, got {p}")
    sub = path.restrict(window)
    flat = sub._flat_values()
    n = len(flat)
    if p == 1.0:
        # triangle inequality: the full partition is maximal
        return float(np.sum(np.linalg.norm(np.diff(flat, axis=0), axis=1)))
    V = np.zeros(n)
    for j in range(1, n):
        V[j] = np.max(V[:j] + _increment_norms(flat, j) ** p)
    return float(V[-1]) if power else float(V[-1] ** (1.0 / p))


def p_variation_norm(path: SampledPath, p: float, window: WindowLike = None) -> float:
    """Full p-variation norm |x_a| + |||x|||_{p-var} over the window."""
    sub = path.restrict(window)
    return float(np.linalg.norm(sub._flat_values()[0])) + p_variation(sub, p)


def p_variation_bruteforce(path: SampledPath, p: float, window: WindowLike = None) -> float:
    """Exhaustive reference p-variation over all sub-partitions (n <= 20)."""
    if p < 1:
        raise ParameterError(f"p-variation needs p >= 1, got {p}")
    sub = path.restrict(window)
    flat = sub._flat_values()
    n = len(flat)
    if n > 20:
        raise SizeError(f"brute force limited to 20 sample points, got {n}")
    diff = flat[:, None, :] - flat[None, :, :]
    dist_p = np.linalg.norm(diff, axis=2) ** p
    interior = list(range(1, n - 1))
    best = dist_p[0, n - 1]
    for r in range(1, len(interior) + 1):
        combos = np.array(list(itertools.combinations(interior, r)))
        idx = np.empty((len(combos), r + 2), dtype=int)
        idx[:, 0] = 0
        idx[:, 1:-1] = combos
        idx[:, -1] = n - 1
        sums = dist_p[idx[:, :-1], idx[:, 1:]].sum(axis=1)
        best = max(best, float(sums.max()))
    return float(best ** (1.0 / p))


def holder_norm(path: SampledPath, alpha: float, window: WindowLike = None) -> float:
    """Discrete alpha-Hoelder seminorm: max over sample pairs of |x_t-x_s|/(t-s)^alpha."""
    if not (0 < alpha <= 1):
        raise ParameterError(f"Hoelder exponent must lie in (0, 1], got {alpha}")
    sub = path.restrict(window)
    flat = sub._flat_values()
    times = sub.times
    best = 0.0
    for j in range(len(times) - 1):
        dt = times[j + 1 :] - times[j]
        dv = np.linalg.norm(flat[j + 1 :] - flat[j], axis=1)
        best = max(best, float(np.max(dv / dt ** alpha)))
    return best


def concatenate(first: SampledPath, second: SampledPath, tol: float = 1e-12) -> SampledPath:
    """Join two paths sharing their junction time and value."""
    t_gap = abs(first.times[-1] - second.times[0])
    if t_gap > tol * max(1.0, abs(first.times[-1])):
        raise JoinError(
            f"junction times differ: {first.times[-1]} vs {second.times[0]}"
        )
    if first.value_shape != second.value_shape:
        raise JoinError("paths have different value shapes")
    v_gap = np.max(np.abs(first.values[-1] - second.values[0]))
    if v_gap > tol * max(1.0, float(np.max(np.abs(first.values[-1])))):
        raise JoinError(f"junction values differ by {v_gap}")
    times = np.concatenate([first.times, second.times[1:]])
    values = np.concatenate([first.values, second.values[1:]])
    return SampledPath(times, values)


def metric_d(
    w1: SampledPath,
    w2: SampledPath,
    radius_cap: int,
    p: float,
) -> float:
    """Truncated whole-line metric sum_{n<=cap} 2^-n ||w1-w2|| / (1 + ||w1-w2||).

    ||.|| is the full p-variation norm on [-n, n] clamped to the common
    domain.  Truncation error of the infinite sum is at most 2^-radius_cap.
    """
    if radius_cap < 1 or int(radius_cap) != radius_cap:
        raise ParameterError("radius_cap must be a positive integer")
    lo = max(w1.times[0], w2.times[0])
    hi = min(w1.times[-1], w2.times[-1])
    if lo >= hi:
        raise DomainError("paths share no common time window")
    total = 0.0
    for n in range(1, int(radius_cap) + 1):
        win = Interval(max(-float(n), lo), min(float(n), hi))
        nrm = difference_pvar_norm(w1, w2, p, win)
        total += 2.0 ** (-n) * nrm / (1.0 + nrm)
    return total


def difference_pvar_norm(w1: SampledPath, w2: SampledPath, p: float, window: WindowLike) -> float:
    """Full p-variation norm of w1 - w2 on a window (union grid)."""
    window = as_interval(window)
    grid = merge_times(
        w1.restrict(window).times, w2.restrict(window).times
    )
    diff = w1.at(grid) - w2.at(grid)
    dpath = SampledPath(grid, diff)
    return p_variation_norm(dpath, p)


@dataclass(frozen=True)
class ControlFunction:
    """A superadditive, diagonal-vanishing function on the time simplex."""

    evaluator: Callable[[float, float], float]
    label: str = "control"

    def __call__(self, s: float, t: float) -> float:
        if t < s:
            raise ParameterError("control requires s <= t")
        return float(self.evaluator(s, t))

    @classmethod
    def zero(cls) -> "ControlFunction":
        return cls(lambda s, t: 0.0, "zero")

    @classmethod
    def linear(cls, rate: float = 1.0) -> "ControlFunction":
        if rate < 0:
            raise ParameterError("linear control needs a nonnegative rate")
        return cls(lambda s, t: rate * (t - s), f"{rate}*(t-s)")

    @classmethod
    def power(cls, theta: float, scale: float = 1.0) -> "ControlFunction":
        if theta < 1:
            raise ParameterError("(t-s)^theta is superadditive only for theta >= 1")
        return cls(lambda s, t: scale * (t - s) ** theta, f"{scale}*(t-s)^{theta}")

    @classmethod
    def from_p_variation(cls, path: SampledPath, p: float) -> "ControlFunction":
        """The control (s, t) -> |||path|||^p_{p-var,[s,t]}."""

        def ev(s, t):
            if t - s <= _TIME_TOL:
                return 0.0
            return p_variation(path, p, Interval(s, t), power=True)

        return cls(ev, f"pvar^{p}")

    def diagonal_defect(self, times: Sequence[float]) -> float:
        return max(abs(self(float(t), float(t))) for t in times)

    def superadditivity_defect(self, times: Sequence[float]) -> float:
        """max over sampled triples s<=t<=u of w(s,t)+w(t,u)-w(s,u)."""
        ts = np.asarray(sorted(times), dtype=float)
        if len(ts) > 25:
            idx = np.unique(np.linspace(0, len(ts) - 1, 25).astype(int))
            ts = ts[idx]
        worst = -np.inf
        for i in range(len(ts)):
            for j in range(i, len(ts)):
                for k in range(j, len(ts)):
                    gap = self(ts[i], ts[j]) + self(ts[j], ts[k]) - self(ts[i], ts[k])
                    worst = max(worst, gap)
        return float(worst)


def dominated_variation_bound(
    path: SampledPath,
    p: float,
    controls: Sequence[Tuple[float, ControlFunction]],
    window: WindowLike = None,
    tol: float = 1e-10,
    max_anchors: int = 32,
) -> bool:
    """Check |||x|||_{p-var,[s,t]} <= sum_j C_j w_j(s,t)^{1/p} on sampled windows.

    The pointwise version of the same bound on increments is the caller's
    hypothesis; given it, the conclusion holds for every window, and this
    routine verifies it on all anchor pairs drawn from the sample times.
    """
    sub = path.restrict(window)
    n = len(sub.times)
    if n <= max_anchors:
        anchor_idx = np.arange(n)
    else:
        anchor_idx = np.unique(np.linspace(0, n - 1, max_anchors).astype(int))
    ts = sub.times[anchor_idx]
    for a in range(len(ts)):
        for b in range(a + 1, len(ts)):
            s, t = float(ts[a]), float(ts[b])
            lhs = p_variation(sub, p, Interval(s, t))
            rhs = sum(c * w(s, t) ** (1.0 / p) for c, w in controls)
            if lhs > rhs + tol:
                return False
    return True
