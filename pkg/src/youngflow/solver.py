"""Picard solving of dx = f(t,x) dt + g(t,x) dw on greedy intervals.

The solution map on an interval anchored at t0 is

    F(x)_t = x_{t0} + int_{t0}^t f(s, x_s) ds + int_{t0}^t g(s, x_s) dw_s

(trapezoid rule for the drift, left-rule Riemann-Stieltjes sum for the
noise term).  On any interval with (t1-t0)^alpha + |||w|||_{p-var} <= mu*
and mu* = 1/(2 M (K+2)) the map sends the ball ||x||_{q-var} <= 2|x_{t0}|+1
into itself, and Picard iteration from the constant path converges; if it
does not converge within the iteration budget the interval is shrunk and
re-solved.  The global solution is the chunk-by-chunk continuation, and
certificates (sewing estimate, Gronwall-type self-bound, growth bound)
are evaluated on the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .coefficients import (
    CoefficientField,
    DerivedConstants,
    ExponentSet,
    GronwallData,
    composed_path,
    derived_constants,
)
from .errors import DomainError, ParameterError, SolveError
from .greedy import GreedySequence, _RunningVariation, greedy_sequence
from .paths import (
    ControlFunction,
    Interval,
    SampledPath,
    WindowLike,
    as_interval,
    merge_times,
    p_variation,
    p_variation_norm,
)
from .young import Certificate, YoungConstants, young_loeve_check

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class SolveOptions:
    """Tolerances and grid policy for a solve.

    oversample subdivides every base grid segment into that many equal
    quadrature steps; grid adds output sample times to the base grid.
    """

    picard_tol: float = 1e-10
    picard_max_iters: int = 50
    shrink_factor: float = 0.5
    grid: Optional[np.ndarray] = None
    mu_override: Optional[float] = None
    oversample: int = 1

    def __post_init__(self):
        if not 0 < self.shrink_factor < 1:
            raise ParameterError("shrink_factor must lie in (0, 1)")
        if self.picard_tol <= 0 or self.picard_max_iters < 1:
            raise ParameterError("invalid Picard tolerances")
        if self.oversample < 1 or int(self.oversample) != self.oversample:
            raise ParameterError("oversample must be a positive integer")


@dataclass(frozen=True)
class FApplication:
    """F(x) together with its drift and noise components."""

    path: SampledPath
    drift_part: SampledPath
    young_part: SampledPath


@dataclass
class SolveReport:
    solution: SampledPath
    greedy: GreedySequence
    chunk_times: np.ndarray
    iters_per_interval: List[int]
    fixed_point_residuals: List[float]
    ball_ok: bool
    certificates: List[Certificate]
    exponents: ExponentSet
    mu: float
    constants: DerivedConstants
    t0: float
    T: float
    x0: np.ndarray
    direction: str = "forward"

    @property
    def max_residual(self) -> float:
        return max(self.fixed_point_residuals) if self.fixed_point_residuals else 0.0

    @property
    def max_iters(self) -> int:
        return max(self.iters_per_interval) if self.iters_per_interval else 0

    def certificate(self, name: str) -> Optional[Certificate]:
        for cert in self.certificates:
            if cert.name == name:
                return cert
        return None

    def to_json(self) -> dict:
        return {
            "direction": self.direction,
            "t0": float(self.t0),
            "T": float(self.T),
            "x0": [float(v) for v in np.atleast_1d(self.x0)],
            "mu": float(self.mu),
            "exponents": {
                "p": self.exponents.p,
                "q0": self.exponents.q0,
                "q": self.exponents.q,
                "alpha": self.exponents.alpha,
                "beta": self.exponents.beta,
                "delta": self.exponents.delta,
            },
            "greedy": self.greedy.to_json(),
            "n_chunks": len(self.iters_per_interval),
            "iters_per_interval": [int(i) for i in self.iters_per_interval],
            "max_fixed_point_residual": float(self.max_residual),
            "ball_ok": bool(self.ball_ok),
            "certificates": [c.to_json() for c in self.certificates],
        }


class _NoConvergence(Exception):
    pass


# ----------------------------------------------------------------------
# the solution map


def _apply_f_arrays(
    field: CoefficientField,
    ts: np.ndarray,
    dt: np.ndarray,
    dw: np.ndarray,
    x: np.ndarray,
    x0: np.ndarray,
) -> np.ndarray:
    f_vals = field.eval_f(ts, x)
    drift = np.empty_like(x)
    drift[0] = 0.0
    np.cumsum(0.5 * (f_vals[:-1] + f_vals[1:]) * dt[:, None], axis=0, out=drift[1:])
    g_vals = field.eval_g(ts[:-1], x[:-1])
    young = np.empty_like(x)
    young[0] = 0.0
    np.cumsum(np.einsum("idm,im->id", g_vals, dw), axis=0, out=young[1:])
    return x0[None, :] + drift + young


def apply_F(
    field: CoefficientField,
    driver: SampledPath,
    x: SampledPath,
    window: WindowLike = None,
) -> FApplication:
    """Evaluate the solution map on x's grid, anchored at the window start."""
    sub = x.restrict(window)
    ts = sub.times
    ws = driver.at(ts)
    dt = np.diff(ts)
    dw = np.diff(ws, axis=0)
    x0 = sub.values[0]
    f_vals = field.eval_f(ts, sub.values)
    drift = np.zeros_like(sub.values)
    np.cumsum(0.5 * (f_vals[:-1] + f_vals[1:]) * dt[:, None], axis=0, out=drift[1:])
    g_vals = field.eval_g(ts[:-1], sub.values[:-1])
    young = np.zeros_like(sub.values)
    np.cumsum(np.einsum("idm,im->id", g_vals, dw), axis=0, out=young[1:])
    return FApplication(
        path=SampledPath(ts, x0[None, :] + drift + young),
        drift_part=SampledPath(ts, drift),
        young_part=SampledPath(ts, young),
    )


def apply_F_certificate(
    field: CoefficientField,
    driver: SampledPath,
    x: SampledPath,
    exponents: ExponentSet,
    window: WindowLike = None,
    tol: float = 1e-10,
) -> Certificate:
    """Certify |||F(x)|||_q <= M(K+2)(1+||x||_q)((t1-t0)^alpha + |||w|||_p)."""
    sub = x.restrict(window)
    t0, t1 = float(sub.times[0]), float(sub.times[-1])
    cons = derived_constants(field, t0, t1, exponents.K0)
    fx = apply_F(field, driver, sub)
    lhs = p_variation(fx.path, exponents.q)
    theta = (t1 - t0) ** exponents.alpha + p_variation(driver, exponents.p, (t0, t1))
    rhs = cons.M * (exponents.K0 + 2.0) * (1.0 + p_variation_norm(sub, exponents.q)) * theta
    return Certificate(
        name="solution_map_bound",
        lhs=float(lhs),
        rhs=float(rhs),
        ok=bool(lhs <= rhs + tol),
        window=(t0, t1),
        extra={"M": cons.M, "K": exponents.K0, "theta": float(theta)},
    )


# ----------------------------------------------------------------------
# Picard iteration on one grid slice


def _ball_indices(n: int, cap: int = 32) -> np.ndarray:
    if n <= cap:
        return np.arange(n)
    return np.unique(np.linspace(0, n - 1, cap).astype(int))


def _picard_slice(
    field: CoefficientField,
    ts: np.ndarray,
    ws: np.ndarray,
    x0: np.ndarray,
    opts: SolveOptions,
    q: float,
    x_init: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, int, float, bool]:
    """Iterate F to the numerical fixed point on a fixed grid slice.

    Convergence first to picard_tol within picard_max_iters, then a polish
    phase well below picard_tol so that chunked and monolithic solves of
    the same grid agree far inside the reported residuals.
    """
    n = len(ts)
    dt = np.diff(ts)
    dw = np.diff(ws, axis=0)
    x = np.tile(x0, (n, 1)) if x_init is None else np.array(x_init, dtype=float)
    scale = max(1.0, float(np.linalg.norm(x0)))
    floor = max(64.0 * np.finfo(float).eps * scale, 1e-5 * opts.picard_tol)
    ball_idx = _ball_indices(n)
    ball_cap = 2.0 * float(np.linalg.norm(x0)) + 1.0
    ball_ok = True
    iters = 0
    reached_tol = False
    prev_change = math.inf
    max_total = opts.picard_max_iters + 40
    while iters < max_total:
        fx = _apply_f_arrays(field, ts, dt, dw, x, x0)
        change = float(np.max(np.abs(fx - x))) if n > 1 else 0.0
        x = fx
        iters += 1
        if len(ball_idx) >= 2:
            ball_norm = float(np.linalg.norm(x0)) + p_variation(
                SampledPath(ts[ball_idx], x[ball_idx]), q
            )
            if ball_norm > ball_cap + 1e-9:
                ball_ok = False
        if change > 1e8 * scale:
            raise _NoConvergence("iteration diverging")
        if change <= floor:
            reached_tol = True
            break
        if change < opts.picard_tol:
            reached_tol = True
            if change >= 0.9999 * prev_change:
                break  # stalled at rounding level
        elif iters >= opts.picard_max_iters:
            raise _NoConvergence("no contraction within iteration budget")
        prev_change = change
    if not reached_tol:
        raise _NoConvergence("polish phase exhausted")
    final = _apply_f_arrays(field, ts, dt, dw, x, x0)
    residual = float(np.max(np.abs(final - x)))
    return x, iters, residual, ball_ok


def _solve_span(
    field: CoefficientField,
    ts: np.ndarray,
    ws: np.ndarray,
    x0: np.ndarray,
    opts: SolveOptions,
    q: float,
    depth: int = 0,
) -> Tuple[np.ndarray, int, float, bool]:
    """Picard on the slice, shrinking recursively on non-convergence."""
    try:
        return _picard_slice(field, ts, ws, x0, opts, q)
    except _NoConvergence:
        if depth >= 20 or len(ts) < 3:
            raise SolveError(
                f"Picard failed on [{ts[0]}, {ts[-1]}] at depth {depth}",
                window=(float(ts[0]), float(ts[-1])),
            )
        k = int(round(opts.shrink_factor * (len(ts) - 1)))
        k = min(max(k, 1), len(ts) - 2)
        left, il, rl, bl = _solve_span(field, ts[: k + 1], ws[: k + 1], x0, opts, q, depth + 1)
        right, ir, rr, br = _solve_span(field, ts[k:], ws[k:], left[-1], opts, q, depth + 1)
        vals = np.concatenate([left, right[1:]])
        return vals, il + ir, max(rl, rr), bl and br


def solve_interval(
    field: CoefficientField,
    driver: SampledPath,
    t0: float,
    x0,
    t1: float,
    opts: Optional[SolveOptions] = None,
    exponents: Optional[ExponentSet] = None,
    warm_start: Optional[SampledPath] = None,
) -> Tuple[SampledPath, int, float]:
    """Solve one interval by Picard iteration.

    The initial iterate is the constant path at x0 (it lies in the
    invariant ball of the local theory); warm_start supplies a different
    first iterate, e.g. an explicit one-step path, for cross-checks.
    """
    opts = opts or SolveOptions()
    if exponents is None:
        raise ParameterError("solve_interval needs an ExponentSet")
    ts = _build_grid(driver, t0, t1, opts)
    ws = driver.at(ts)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if warm_start is not None:
        x_init = warm_start.at(ts)
        vals, iters, residual, _ = _picard_slice(
            field, ts, ws, x0, opts, exponents.q, x_init=x_init
        )
    else:
        vals, iters, residual, _ = _solve_span(field, ts, ws, x0, opts, exponents.q)
    return SampledPath(ts, vals), iters, residual


# ----------------------------------------------------------------------
# grids and chunking


def _build_grid(driver: SampledPath, t0: float, t1: float, opts: SolveOptions) -> np.ndarray:
    if t1 <= t0:
        raise ParameterError("solve window needs t0 < T")
    base = driver.restrict((t0, t1)).times
    if opts.grid is not None:
        extra = np.asarray(opts.grid, dtype=float)
        extra = extra[(extra > t0) & (extra < t1)]
        base = merge_times(base, extra)
    k = int(opts.oversample)
    if k == 1:
        return base
    n = len(base)
    refined = np.empty(n + (n - 1) * (k - 1))
    refined[:: k] = base
    seg = np.diff(base)
    for j in range(1, k):
        refined[j::k] = base[:-1] + (j / k) * seg
    return refined


def _chunk_boundaries(
    base_times: np.ndarray,
    base_w: np.ndarray,
    alpha: float,
    mu: float,
    p: float,
) -> List[int]:
    """Greedy chunking on the base grid: largest steps with budget <= mu."""
    n = len(base_times)
    bounds = [0]
    b = 0
    dim = base_w.shape[1]
    while b < n - 1:
        rv = _RunningVariation(p, dim)
        rv.commit(base_w[b])
        j = b + 1
        last_ok = b
        while j < n:
            kappa = (base_times[j] - base_times[b]) ** alpha + rv.endpoint_power(
                base_w[j]
            ) ** (1.0 / p)
            if kappa <= mu:
                last_ok = j
                rv.commit(base_w[j])
                j += 1
            else:
                break
        nxt = max(last_ok, b + 1)
        bounds.append(nxt)
        b = nxt
    return bounds


# ----------------------------------------------------------------------
# global forward and backward solves


def solve_forward(
    field: CoefficientField,
    driver: SampledPath,
    t0: float,
    x0,
    T: float,
    opts: Optional[SolveOptions] = None,
    exponents: Optional[ExponentSet] = None,
    certify: bool = True,
) -> SolveReport:
    """Global solve on [t0, T]: greedy partition, Picard per chunk, certificates."""
    opts = opts or SolveOptions()
    if exponents is None:
        raise ParameterError("solve_forward needs an ExponentSet")
    dom = driver.domain
    if not (dom.contains(t0) and dom.contains(T)) or not t0 < T:
        raise DomainError(f"solve window [{t0}, {T}] outside driver domain")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if len(x0) != field.dim_d:
        raise ParameterError(f"x0 has dimension {len(x0)}, field expects {field.dim_d}")

    cons = derived_constants(field, t0, T, exponents.K0)
    mu = opts.mu_override if opts.mu_override is not None else cons.mu_star
    greedy = greedy_sequence(driver, t0, T, lam=exponents.alpha, mu=mu, p=exponents.p)

    ts = _build_grid(driver, t0, T, opts)
    ws = driver.at(ts)
    k = int(opts.oversample)
    base_idx = np.arange(0, len(ts), k) if k > 1 else np.arange(len(ts))
    w_flat = ws.reshape(len(ts), -1)
    chunk_base = _chunk_boundaries(ts[base_idx], w_flat[base_idx], exponents.alpha, mu, exponents.p)
    chunk_idx = [int(base_idx[b]) for b in chunk_base]

    values = np.empty((len(ts), field.dim_d))
    iters_per = []
    residuals = []
    ball_ok = True
    current = x0
    for a, b in zip(chunk_idx[:-1], chunk_idx[1:]):
        sl = slice(a, b + 1)
        vals, iters, residual, b_ok = _solve_span(
            field, ts[sl], ws[sl], current, opts, exponents.q
        )
        values[sl] = vals
        iters_per.append(iters)
        residuals.append(residual)
        ball_ok = ball_ok and b_ok
        current = vals[-1]

    solution = SampledPath(ts, values)
    report = SolveReport(
        solution=solution,
        greedy=greedy,
        chunk_times=ts[np.asarray(chunk_idx)],
        iters_per_interval=iters_per,
        fixed_point_residuals=residuals,
        ball_ok=ball_ok,
        certificates=[],
        exponents=exponents,
        mu=float(mu),
        constants=cons,
        t0=float(t0),
        T=float(T),
        x0=x0,
    )
    if certify:
        report.certificates = standard_certificates(report, field, driver)
    return report


def solve_backward(
    field: CoefficientField,
    driver: SampledPath,
    T: float,
    xT,
    t0: float,
    opts: Optional[SolveOptions] = None,
    exponents: Optional[ExponentSet] = None,
    certify: bool = True,
) -> SolveReport:
    """Continue the dynamics backwards from (T, xT) down to t0.

    Change of variables u -> t0 + T - u turns the terminal-value problem
    into a forward one; reversing the clock flips the orientation of the
    noise integral once, so the transformed problem carries drift
    -f(t0+T-u, .) and unchanged diffusion g(t0+T-u, .) against the
    reversed driver.  The returned solution is mapped back to the
    original clock, and the forward-then-backward round trip inverts the
    flow up to quadrature resolution.
    """
    if not t0 < T:
        raise DomainError("solve_backward needs t0 < T")
    rev_field = field.time_reversed(t0, T, negate_drift=True)
    rev_driver = driver.restrict((t0, T)).reversed_clock()
    inner = solve_forward(
        rev_field, rev_driver, t0, xT, T, opts=opts, exponents=exponents, certify=certify
    )
    sol = inner.solution
    restored = SampledPath((t0 + T) - sol.times[::-1], sol.values[::-1])
    return SolveReport(
        solution=restored,
        greedy=inner.greedy,
        chunk_times=inner.chunk_times,
        iters_per_interval=inner.iters_per_interval,
        fixed_point_residuals=inner.fixed_point_residuals,
        ball_ok=inner.ball_ok,
        certificates=inner.certificates,
        exponents=inner.exponents,
        mu=inner.mu,
        constants=inner.constants,
        t0=float(t0),
        T=float(T),
        x0=np.atleast_1d(np.asarray(xT, dtype=float)),
        direction="backward",
    )


def euler_solve(
    field: CoefficientField,
    driver: SampledPath,
    t0: float,
    x0,
    T: float,
    grid,
) -> SampledPath:
    """First-order cross-check scheme: x_{i+1} = x_i + f dt + g dw."""
    ts = np.asarray(grid, dtype=float)
    if ts[0] != t0 or ts[-1] != T or not np.all(np.diff(ts) > 0):
        raise ParameterError("grid must increase from t0 to T")
    ws = driver.at(ts)
    x = np.empty((len(ts), field.dim_d))
    x[0] = np.atleast_1d(np.asarray(x0, dtype=float))
    for i in range(len(ts) - 1):
        ti = ts[i : i + 1]
        xi = x[i : i + 1]
        drift = field.eval_f(ti, xi)[0] * (ts[i + 1] - ts[i])
        noise = field.eval_g(ti, xi)[0] @ (ws[i + 1] - ws[i])
        x[i + 1] = x[i] + drift + noise
    return SampledPath(ts, x)


# ----------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class GronwallInput:
    """Data of the self-bound |y_t - y_s| <= A^{1/q} + a1 |int y du| + a2 |int y dw|."""

    y: SampledPath
    A: ControlFunction
    a1: float
    a2: float

    def c(self, K: float) -> float:
        return max(self.a1, self.a2 * (K + 1.0))


def _coarse_indices(n: int, cap: int, keep: Sequence[int] = ()) -> np.ndarray:
    idx = np.linspace(0, n - 1, min(n, cap)).astype(int)
    return np.unique(np.concatenate([idx, np.asarray(list(keep), dtype=int)]))


def _log_safe(x: float) -> float:
    return math.log(max(x, 1e-300))


def gronwall_certificate(
    gin: GronwallInput,
    driver: SampledPath,
    p: float,
    q: float,
    n_anchors: int = 10,
    coarse_cap: int = 512,
    tol: float = 1e-8,
    variant: str = "increment",
) -> Certificate:
    """Check the Gronwall-type conclusion with C = 4^p c^p ln 2.

    variant "increment" verifies the pointwise hypothesis
    |y_t - y_s| <= A^{1/q} + a1 |int y du| + a2 |int y dw| on sampled
    pairs (reporting the worst violating pair instead of certifying when
    it fails) and then checks

        |||y|||_{q-var,[s,t]} <= (2 A0 + |y_s|) exp(C (|t-s|^p + |||w|||^p)),

    c = max(a1, a2 (K+1)), together with the sup-norm consequence
    ||y||_inf <= (2 A0 + |y_0|) 2^(N+1) with N the number of full greedy
    intervals at budget 1/(2c) and unit time exponent, and the doubling
    recursion 2 A0 + |y_{t_{i+1}}| <= 2 (2 A0 + |y_{t_i}|) along them.

    variant "variation" takes the hypothesis in its q-variation form
    |||y|||_{q,[s,t]} <= A^{1/q} + a1 (|y_s| + |||y|||)(t-s+|||w|||) with
    c = a1 and certifies |||y|||_{q,[s,t]} <= (|y_s| + A^{1/q}_{s,t}) e^{C theta}.
    Exponentially large right-hand sides are compared in logarithms.
    """
    if variant not in ("increment", "variation"):
        raise ParameterError(f"unknown gronwall variant {variant!r}")
    K = YoungConstants(p, q).K
    c = gin.c(K) if variant == "increment" else gin.a1
    C = (4.0 ** p) * (c ** p) * _LN2
    y = gin.y
    window = y.domain
    A0 = gin.A(window.lo, window.hi) ** (1.0 / q)

    ts = y.times
    n = len(ts)
    anchor_idx = _coarse_indices(n, n_anchors)
    coarse_idx = _coarse_indices(n, coarse_cap, keep=anchor_idx)
    y_coarse = SampledPath(ts[coarse_idx], y.values[coarse_idx])
    w_sub = driver.restrict((window.lo, window.hi))
    w_on_y = SampledPath(ts[coarse_idx], w_sub.at(ts[coarse_idx]))

    if variant == "increment":
        # cumulative integrals of y on its own grid (same rules as the solver)
        dt = np.diff(ts)
        dwy = np.diff(w_sub.at(ts), axis=0)
        cum_du = np.zeros_like(y.values)
        np.cumsum(0.5 * (y.values[:-1] + y.values[1:]) * dt[:, None], axis=0, out=cum_du[1:])
        terms = y.values[:-1][:, :, None] * dwy[:, None, :]  # (n-1, d, m)
        cum_dw = np.zeros((n,) + terms.shape[1:])
        np.cumsum(terms, axis=0, out=cum_dw[1:])

    hyp_gap = -math.inf
    hyp_pair = None
    for ii, i in enumerate(anchor_idx):
        for j in anchor_idx[ii + 1 :]:
            s, t = float(ts[i]), float(ts[j])
            if variant == "increment":
                lhs = float(np.linalg.norm(y.values[j] - y.values[i]))
                rhs = (
                    gin.A(s, t) ** (1.0 / q)
                    + gin.a1 * float(np.linalg.norm(cum_du[j] - cum_du[i]))
                    + gin.a2 * float(np.linalg.norm(cum_dw[j] - cum_dw[i]))
                )
            else:
                var_y = p_variation(y_coarse, q, (s, t))
                lhs = var_y
                rhs = gin.A(s, t) ** (1.0 / q) + gin.a1 * (
                    float(np.linalg.norm(y.values[i])) + var_y
                ) * ((t - s) + p_variation(w_on_y, p, (s, t)))
            gap = lhs - rhs
            if gap > hyp_gap:
                hyp_gap = gap
                hyp_pair = (s, t)
    hypothesis_ok = hyp_gap <= tol

    conclusion_ok = True
    worst_margin = math.inf
    if hypothesis_ok:
        for ii, i in enumerate(anchor_idx):
            for j in anchor_idx[ii + 1 :]:
                s, t = float(ts[i]), float(ts[j])
                lhs = p_variation(y_coarse, q, (s, t))
                theta = (t - s) ** p + p_variation(w_on_y, p, (s, t)) ** p
                if variant == "increment":
                    base = 2.0 * A0 + float(np.linalg.norm(y.values[i]))
                else:
                    base = float(np.linalg.norm(y.values[i])) + gin.A(s, t) ** (1.0 / q)
                log_rhs = _log_safe(base) + C * theta
                margin = log_rhs - _log_safe(lhs)
                worst_margin = min(worst_margin, margin)
                if _log_safe(lhs) > log_rhs + 1e-12:
                    conclusion_ok = False

    # sup-norm consequence via the unit-exponent greedy count (increment form)
    sup_y = float(np.max(np.linalg.norm(y.values, axis=1)))
    if variant == "increment" and c > 0:
        seq = greedy_sequence(w_sub, window.lo, window.hi, lam=1.0, mu=1.0 / (2.0 * c), p=p)
        N = seq.n_full()
        induction_ok = True
        z_prev = 2.0 * A0 + float(np.linalg.norm(y.at(seq.times[0])))
        for t_next in seq.times[1:]:
            z_next = 2.0 * A0 + float(np.linalg.norm(y.at(float(t_next))))
            if z_next > 2.0 * z_prev + tol:
                induction_ok = False
            z_prev = z_next
    else:
        N = 0
        induction_ok = True
    if variant == "increment":
        log_sup_rhs = _log_safe(2.0 * A0 + float(np.linalg.norm(y.values[0]))) + (N + 1) * _LN2
        supnorm_ok = _log_safe(sup_y) <= log_sup_rhs + 1e-12
    else:
        log_sup_rhs = math.inf
        supnorm_ok = True

    ok = hypothesis_ok and conclusion_ok and supnorm_ok and induction_ok
    return Certificate(
        name="gronwall",
        lhs=float(sup_y),
        rhs=float(math.exp(min(log_sup_rhs, 700.0))),
        ok=bool(ok),
        window=(window.lo, window.hi),
        extra={
            "variant": variant,
            "c": float(c),
            "C": float(C),
            "A0": float(A0),
            "greedy_count": int(N),
            "hypothesis_ok": bool(hypothesis_ok),
            "hypothesis_gap": float(hyp_gap),
            "hypothesis_pair": list(hyp_pair) if hyp_pair else None,
            "conclusion_ok": bool(conclusion_ok),
            "log_margin": float(worst_margin if worst_margin < math.inf else 0.0),
            "supnorm_ok": bool(supnorm_ok),
            "induction_ok": bool(induction_ok),
        },
    )


def build_gronwall_input(
    field: CoefficientField,
    report: SolveReport,
    driver: SampledPath,
    coarse_cap: int = 512,
) -> GronwallInput:
    """Instantiate the self-bound data for a solved trajectory.

    Linear structure f = a1 x + phi(t), g = a2 x + psi(t) gives the exact
    hypothesis with the inhomogeneities absorbed into the control

        A(s,t) = 2^{q-1} ( Phi^q (t-s)^q + Psi_eff^q |||w|||^q_{p,[s,t]} ),

    Psi_eff = sup|psi| + K L_psi (T - t0) covering the sewing remainder of
    int psi dw.  Bounded fields use a1 = a2 = 0 and absorb everything:
    |int f du| <= Bf (t-s) and |int g dw| <= (Bg + K0 M (1+|||x|||_q)) |||w|||_p.
    """
    gd = field.gronwall
    if gd is None:
        raise ParameterError(f"field {field.name!r} declares no gronwall structure")
    exps = report.exponents
    p, q = exps.p, exps.q
    y = report.solution
    w_sub = driver.restrict((report.t0, report.T))
    idx = _coarse_indices(len(w_sub.times), coarse_cap)
    w_coarse = SampledPath(w_sub.times[idx], w_sub.values[idx])
    horizon = report.T - report.t0

    if gd.mode == "linear":
        Kq = YoungConstants(p, q).K
        phi = gd.drift_inhom
        psi_eff = gd.noise_inhom + Kq * gd.noise_inhom_lip * horizon
        a1, a2 = gd.a1, gd.a2
    elif gd.mode == "bounded":
        sol_idx = _coarse_indices(len(y.times), coarse_cap)
        var_x = p_variation(SampledPath(y.times[sol_idx], y.values[sol_idx]), q)
        phi = gd.f_bound
        psi_eff = gd.g_bound + exps.K0 * report.constants.M * (1.0 + var_x)
        a1 = a2 = 0.0
    else:
        raise ParameterError(f"unknown gronwall mode {gd.mode!r}")

    def A_eval(s, t, _phi=phi, _psi=psi_eff, _q=q, _p=p):
        if t - s <= 0:
            return 0.0
        var_w = p_variation(w_coarse, _p, (s, t))
        return 2.0 ** (_q - 1.0) * (
            (_phi * (t - s)) ** _q + (_psi * var_w) ** _q
        )

    return GronwallInput(y=y, A=ControlFunction(A_eval, "field-self-bound"), a1=a1, a2=a2)


def growth_certificate(
    report: SolveReport,
    field: CoefficientField,
    driver: SampledPath,
    n_anchors: int = 6,
    coarse_cap: int = 512,
) -> Certificate:
    """Certify the q-variation growth bound with explicit constants.

    Chain behind the constants, writing c* = M (K0+2), theta(u,v) =
    (v-u)^alpha + |||w|||_{p-var,[u,v]} and using x = F(x) anchored at u:

      |||x|||_{q,[u,v]} <= c* (1 + |x_u| + |||x|||_{q,[u,v]}) theta(u,v),

    so on any interval with theta <= mu* = 1/(2 c*) one has
    |||x|||_{q,[u,v]} <= 1 + |x_u| and 1+|x_v| <= 2 (1+|x_u|).  Greedy
    intervals at budget mu* and time exponent alpha tile [t0, t], their
    count N obeys N <= 2^{p'-1} (2 c* / 1)^{p'} ((t-t0)^{p' alpha} +
    |||w|||^{p'}) / ... (the counting bound with mu = mu*), and summing the
    per-interval doublings gives |||x|||_{q,[t0,t]} <= (1+|x0|) 2^{2N}.
    Hence with

        C2 = ln 2 * (4 M (K0+2))^{p'},    C1 = 2 exp(C2 (T-t0)^{p' alpha}),

    ||x||_{q-var} <= C1 (1+|x0|) e^{C2 |||w|||^{p'}}, which is dominated by
    the reported right-hand side C1 [1+(T-t0)^alpha] (1+|x0|) (1+|||w|||)
    e^{C2 |||w|||^{p'}}.  Compared in logarithms on nested windows.
    """
    exps = report.exponents
    p, q, alpha = exps.p, exps.q, exps.alpha
    p_prime = exps.p_prime
    M = report.constants.M
    c_star = M * (exps.K0 + 2.0)
    C2 = _LN2 * (4.0 * c_star) ** p_prime
    log_C1 = _LN2 + C2 * (report.T - report.t0) ** (p_prime * alpha)

    y = report.solution
    idx = _coarse_indices(len(y.times), coarse_cap)
    y_c = SampledPath(y.times[idx], y.values[idx])
    w_sub = driver.restrict((report.t0, report.T))
    widx = _coarse_indices(len(w_sub.times), coarse_cap)
    w_c = SampledPath(w_sub.times[widx], w_sub.values[widx])
    x0n = float(np.linalg.norm(report.x0))

    ends = np.linspace(report.t0, report.T, n_anchors + 1)[1:]
    ok = True
    rows = []
    worst_margin = math.inf
    prev_log_rhs = -math.inf
    monotone = True
    for t in ends:
        t = float(t)
        lhs = x0n + p_variation(y_c, q, (report.t0, t))
        var_w = p_variation(w_c, p, (report.t0, t))
        log_rhs = (
            log_C1
            + math.log(1.0 + (t - report.t0) ** alpha)
            + math.log1p(x0n)
            + math.log1p(var_w)
            + C2 * var_w ** p_prime
        )
        margin = log_rhs - _log_safe(lhs)
        worst_margin = min(worst_margin, margin)
        if _log_safe(lhs) > log_rhs + 1e-12:
            ok = False
        if log_rhs < prev_log_rhs - 1e-12:
            monotone = False
        prev_log_rhs = log_rhs
        rows.append({"t": t, "lhs": float(lhs), "log_rhs": float(log_rhs)})
    full = rows[-1]
    return Certificate(
        name="growth",
        lhs=float(full["lhs"]),
        rhs=float(math.exp(min(full["log_rhs"], 700.0))),
        ok=bool(ok),
        window=(report.t0, report.T),
        extra={
            "C2": float(C2),
            "log_C1": float(log_C1),
            "p_prime": float(p_prime),
            "log_margin": float(worst_margin),
            "monotone_in_window": bool(monotone),
            "rows": rows,
        },
    )


def standard_certificates(
    report: SolveReport,
    field: CoefficientField,
    driver: SampledPath,
    coarse_cap: int = 400,
) -> List[Certificate]:
    """Gronwall, growth and sewing certificates for a finished solve."""
    certs = []
    exps = report.exponents
    try:
        gin = build_gronwall_input(field, report, driver)
        certs.append(gronwall_certificate(gin, driver, exps.p, exps.q))
    except ParameterError:
        pass
    certs.append(growth_certificate(report, field, driver))

    y = report.solution
    idx = _coarse_indices(len(y.times), coarse_cap)
    y_c = SampledPath(y.times[idx], y.values[idx])
    comp = composed_path(field, y_c)
    w_on = SampledPath(y_c.times, driver.at(y_c.times))
    certs.append(young_loeve_check(comp, w_on, constants=exps.young0))
    return certs
