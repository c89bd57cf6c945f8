"""Greedy-time sequences: tile a horizon into intervals of equal budget.

The next greedy time after tau solves

    (t - tau)^lambda + |||w|||_{p-var,[tau, t]}  =  mu.

The left side is continuous and strictly increasing in t, so bisection on
the interpolated path finds the root; the number of full intervals inside
[a, b] obeys the counting bound

    N(a,b,w) <= 2^{p'-1} / mu^{p'} * ( (b-a)^{p' lambda} + |||w|||^{p'}_{p-var,[a,b]} )

for any p' >= max(p, 1/lambda).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, GreedyExhausted, ParameterError
from .paths import SampledPath, WindowLike, as_interval, p_variation

_RESIDUAL_TOL = 1e-8


class _RunningVariation:
    """Incremental p-variation DP over committed vertices plus a moving endpoint."""

    def __init__(self, p: float, dim: int):
        self.p = p
        self._pts = np.empty((32, dim))
        self._V = np.empty(32)
        self.n = 0

    def _grow(self):
        if self.n == len(self._V):
            self._pts = np.resize(self._pts, (2 * self.n, self._pts.shape[1]))
            self._V = np.resize(self._V, 2 * self.n)

    def endpoint_power(self, value: np.ndarray) -> float:
        """sup-partition power ending at a fresh endpoint with this value."""
        if self.n == 0:
            return 0.0
        diff = self._pts[: self.n] - np.ravel(value)
        if diff.shape[1] == 1:
            d = np.abs(diff[:, 0])
        else:
            d = np.sqrt(np.einsum("ik,ik->i", diff, diff))
        return float(np.max(self._V[: self.n] + d ** self.p))

    def commit(self, value: np.ndarray):
        self._grow()
        v = np.ravel(value)
        self._V[self.n] = self.endpoint_power(v)
        self._pts[self.n] = v
        self.n += 1


@dataclass(frozen=True)
class GreedySequence:
    """Times tau_0 < ... <= end with per-step residuals of the defining equation."""

    times: np.ndarray
    lam: float
    mu: float
    p: float
    residuals: np.ndarray
    clamped: bool

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "residuals", np.asarray(self.residuals, dtype=float))

    @property
    def n_intervals(self) -> int:
        return len(self.times) - 1

    def n_full(self, tol: float = _RESIDUAL_TOL) -> int:
        """Number of intervals that satisfy the defining equation exactly."""
        return int(np.sum(np.abs(self.residuals) <= tol))

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "mu": self.mu,
            "p": self.p,
            "times": [float(t) for t in self.times],
            "residuals": [float(r) for r in self.residuals],
            "clamped": bool(self.clamped),
        }


def _next_greedy(
    driver: SampledPath,
    start: float,
    lam: float,
    mu: float,
    p: float,
    end: Optional[float] = None,
    time_tol: float = 1e-12,
    max_bisect: int = 200,
):
    """Root of the budget equation from `start`; returns (time, residual, clamped)."""
    if lam <= 0 or mu <= 0:
        raise ParameterError("greedy parameters lambda and mu must be positive")
    dom = driver.domain
    if end is None:
        end = dom.hi
    end = min(end, dom.hi)
    span_tol = time_tol * max(1.0, abs(dom.hi) + abs(dom.lo))
    if start < dom.lo - span_tol or start > dom.hi + span_tol:
        raise DomainError(f"start {start} outside driver domain")
    if start >= end - span_tol:
        raise GreedyExhausted(f"no room after t={start}")

    rv = _RunningVariation(p, int(np.prod(driver.value_shape)))
    rv.commit(driver.at(start))

    def kappa(t: float) -> float:
        return (t - start) ** lam + rv.endpoint_power(driver.at(t)) ** (1.0 / p)

    times = driver.times
    j = int(np.searchsorted(times, start, side="right"))
    prev = start
    while True:
        at_cap = not (j < len(times) and times[j] < end)
        tb = end if at_cap else float(times[j])
        kb = kappa(tb)
        if kb < mu:
            if at_cap:
                return end, kb - mu, True
            rv.commit(driver.at(tb))
            prev = tb
            j += 1
            continue
        lo, hi = prev, tb
        for _ in range(max_bisect):
            if hi - lo <= span_tol:
                break
            mid = 0.5 * (lo + hi)
            if kappa(mid) < mu:
                lo = mid
            else:
                hi = mid
        t_star = hi
        if j < len(times) and abs(t_star - times[j]) <= span_tol:
            t_star = float(min(times[j], end))
        return t_star, kappa(t_star) - mu, False


def next_greedy_time(
    driver: SampledPath,
    start: float,
    lam: float,
    mu: float,
    p: float,
    end: Optional[float] = None,
) -> float:
    """The unique t with (t-start)^lam + |||w|||_{p-var,[start,t]} = mu.

    Returns the (possibly capped) domain end when the budget is never
    exhausted there; raises GreedyExhausted when start is already at the end.
    """
    t, _, _ = _next_greedy(driver, start, lam, mu, p, end=end)
    return t


def greedy_sequence(
    driver: SampledPath,
    start: float,
    end: float,
    lam: float,
    mu: float,
    p: float,
) -> GreedySequence:
    """Iterate greedy times from start until end; the final time is clamped."""
    dom = driver.domain
    if not (dom.contains(start) and dom.contains(end)):
        raise DomainError("greedy window outside driver domain")
    if start >= end:
        raise ParameterError("greedy sequence needs start < end")
    span_tol = 1e-12 * max(1.0, abs(start) + abs(end))
    times = [float(start)]
    residuals = []
    clamped = False
    guard = 0
    t = float(start)
    while t < end - span_tol:
        nxt, res, was_clamped = _next_greedy(driver, t, lam, mu, p, end=end)
        times.append(float(nxt))
        residuals.append(float(res))
        clamped = was_clamped
        t = float(nxt)
        guard += 1
        if guard > 10_000_000:
            raise ParameterError("greedy sequence did not terminate")
    if abs(times[-1] - end) <= span_tol:
        times[-1] = float(end)
    return GreedySequence(
        times=np.array(times),
        lam=lam,
        mu=mu,
        p=p,
        residuals=np.array(residuals),
        clamped=clamped,
    )


@dataclass(frozen=True)
class CountBound:
    """Observed interval count against the closed-form counting bound."""

    actual: int
    bound: float
    p_prime: float

    @property
    def satisfied(self) -> bool:
        return self.actual <= int(np.ceil(self.bound))


def count_bound(
    driver: SampledPath,
    window: WindowLike,
    lam: float,
    mu: float,
    p: float,
    p_prime: float,
) -> CountBound:
    """Count full greedy intervals in the window and evaluate the bound."""
    if p_prime < max(p, 1.0 / lam) - 1e-12:
        raise ParameterError(
            f"p_prime must be >= max(p, 1/lambda) = {max(p, 1.0 / lam)}"
        )
    window = as_interval(window)
    a, b = window.lo, window.hi
    if b <= a:
        return CountBound(actual=0, bound=0.0, p_prime=p_prime)
    seq = greedy_sequence(driver, a, b, lam, mu, p)
    actual = seq.n_full()
    var = p_variation(driver, p, window)
    bound = (2.0 ** (p_prime - 1.0) / mu ** p_prime) * (
        (b - a) ** (p_prime * lam) + var ** p_prime
    )
    return CountBound(actual=int(actual), bound=float(bound), p_prime=p_prime)
