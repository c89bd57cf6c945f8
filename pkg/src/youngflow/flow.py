"""Cauchy operator, two-parameter flow axioms, and non-intersection checks.

The state transport X(t1, t2, w, x) solves forward when t1 <= t2 and
inverts the flow through the backward equation when t1 > t2.  The flow
axioms (identity, inversion, composition) are verified as residuals on
probe states; homeomorphy is checked operationally through the inversion
round trip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .coefficients import CoefficientField, ExponentSet
from .paths import SampledPath, WindowLike, as_interval, p_variation, p_variation_norm
from .solver import (
    SolveOptions,
    SolveReport,
    _coarse_indices,
    solve_backward,
    solve_forward,
)
from .young import Certificate

_LN2 = math.log(2.0)


def cauchy_operator(
    field: CoefficientField,
    driver: SampledPath,
    t1: float,
    t2: float,
    x,
    opts: Optional[SolveOptions] = None,
    exponents: Optional[ExponentSet] = None,
) -> np.ndarray:
    """Transport the state x from time t1 to time t2 along the dynamics."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if t1 == t2:
        return x.copy()
    if t1 < t2:
        rep = solve_forward(field, driver, t1, x, t2, opts=opts, exponents=exponents,
                            certify=False)
        return rep.solution.values[-1].copy()
    rep = solve_backward(field, driver, t1, x, t2, opts=opts, exponents=exponents,
                         certify=False)
    return rep.solution.values[0].copy()


@dataclass
class FlowCheckReport:
    times: Tuple[float, float, float]
    identity_residuals: np.ndarray
    inversion_residuals: np.ndarray
    composition_residuals: np.ndarray
    tol: float
    continuity_table: List[Tuple[float, float]] = dc_field(default_factory=list)

    @property
    def identity_residual(self) -> float:
        return float(np.max(self.identity_residuals))

    @property
    def inversion_residual(self) -> float:
        return float(np.max(self.inversion_residuals))

    @property
    def composition_residual(self) -> float:
        return float(np.max(self.composition_residuals))

    @property
    def ok(self) -> bool:
        return (
            self.identity_residual == 0.0
            and self.inversion_residual <= self.tol
            and self.composition_residual <= self.tol
        )

    def to_json(self) -> dict:
        return {
            "times": list(self.times),
            "identity_residual": self.identity_residual,
            "inversion_residual": self.inversion_residual,
            "composition_residual": self.composition_residual,
            "tol": self.tol,
            "ok": bool(self.ok),
            "continuity_table": [[float(a), float(b)] for a, b in self.continuity_table],
        }


def flow_axiom_check(
    field: CoefficientField,
    driver: SampledPath,
    times: Tuple[float, float, float],
    probes: Sequence,
    tol: float = 1e-5,
    opts: Optional[SolveOptions] = None,
    exponents: Optional[ExponentSet] = None,
    continuity_sizes: Optional[Sequence[float]] = None,
) -> FlowCheckReport:
    """Residuals of the flow axioms at one time triple over probe states.

    Per probe x: |X(s,s,x) - x| (exact zero, no solve), the inversion
    round trip |X(t,s,X(s,t,x)) - x| and the composition gap
    |X(u,t,X(s,u,x)) - X(s,t,x)|.
    """
    s, u, t = (float(v) for v in times)
    ident, invs, comps = [], [], []
    X = lambda a, b, x: cauchy_operator(field, driver, a, b, x, opts=opts, exponents=exponents)
    for probe in probes:
        x = np.atleast_1d(np.asarray(probe, dtype=float))
        ident.append(float(np.linalg.norm(X(s, s, x) - x)))
        x_st = X(s, t, x)
        invs.append(float(np.linalg.norm(X(t, s, x_st) - x)))
        comps.append(float(np.linalg.norm(X(u, t, X(s, u, x)) - x_st)))
    table: List[Tuple[float, float]] = []
    if continuity_sizes:
        base = np.atleast_1d(np.asarray(probes[0], dtype=float))
        ref = X(s, t, base)
        e1 = np.zeros_like(base)
        e1[0] = 1.0
        for eps in continuity_sizes:
            resp = float(np.linalg.norm(X(s, t, base + eps * e1) - ref))
            table.append((float(eps), resp))
    return FlowCheckReport(
        times=(s, u, t),
        identity_residuals=np.array(ident),
        inversion_residuals=np.array(invs),
        composition_residuals=np.array(comps),
        tol=tol,
        continuity_table=table,
    )


def difference_growth_log_constant(
    field: CoefficientField,
    driver: SampledPath,
    exponents: ExponentSet,
    window: WindowLike,
    N0: float,
    coarse_cap: int = 512,
) -> float:
    """log of the Lipschitz constant tying states at window ends.

    The difference z of two solutions satisfies the q-variation self-bound
    with control A = 0 and coefficient c_z = M'_{N0} (K0+1) (2 + 2 N0^delta),
    hence |z_t| <= |z_s| (1 + exp(C_z ((t-s)^p + |||w|||^p))) with
    C_z = 4^p c_z^p ln 2.  Returns log of that factor (it can overflow).
    """
    window = as_interval(window)
    w_sub = driver.restrict(window)
    idx = _coarse_indices(len(w_sub.times), coarse_cap)
    w_c = SampledPath(w_sub.times[idx], w_sub.values[idx])
    from .coefficients import derived_constants

    cons = derived_constants(field, window.lo, window.hi, exponents.K0)
    c_z = cons.M_prime(N0) * (exponents.K0 + 1.0) * (2.0 + 2.0 * N0 ** exponents.delta)
    C_z = (4.0 ** exponents.p) * (c_z ** exponents.p) * _LN2
    theta = (window.hi - window.lo) ** exponents.p + p_variation(w_c, exponents.p) ** exponents.p
    return float(np.logaddexp(0.0, C_z * theta))


def non_intersection_check(
    field: CoefficientField,
    driver: SampledPath,
    t0: float,
    x0,
    x0_prime,
    window: WindowLike,
    separation_floor: Optional[float] = None,
    opts: Optional[SolveOptions] = None,
    exponents: Optional[ExponentSet] = None,
) -> Certificate:
    """Minimum separation of two trajectories against a positive floor.

    The floor comes from transporting the separation back to t0: if the
    paths came within eps at some time, the backward continuity estimate
    would force |x0 - x0'| <= C eps, so the separation never drops below
    |x0 - x0'| / C.  A violated floor is reported in the certificate, not
    raised.
    """
    window = as_interval(window)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    x0p = np.atleast_1d(np.asarray(x0_prime, dtype=float))
    if np.allclose(x0, x0p):
        raise ValueError("non_intersection_check needs distinct initial states")
    rep_a = solve_forward(field, driver, window.lo, x0, window.hi, opts=opts,
                          exponents=exponents, certify=False)
    rep_b = solve_forward(field, driver, window.lo, x0p, window.hi, opts=opts,
                          exponents=exponents, certify=False)
    sep = np.linalg.norm(rep_a.solution.values - rep_b.solution.values, axis=1)
    min_sep = float(np.min(sep))
    argmin_t = float(rep_a.solution.times[int(np.argmin(sep))])

    idx = _coarse_indices(len(rep_a.solution.times), 400)
    norm_a = p_variation_norm(
        SampledPath(rep_a.solution.times[idx], rep_a.solution.values[idx]), exponents.q
    )
    norm_b = p_variation_norm(
        SampledPath(rep_b.solution.times[idx], rep_b.solution.values[idx]), exponents.q
    )
    N0 = max(norm_a, norm_b)
    log_C = difference_growth_log_constant(field, driver, exponents, window, N0)
    log_floor = math.log(float(np.linalg.norm(x0 - x0p))) - log_C
    if separation_floor is None:
        floor = math.exp(max(log_floor, -700.0))
    else:
        floor = float(separation_floor)
    ok = min_sep >= floor and min_sep > 0.0
    return Certificate(
        name="non_intersection",
        lhs=float(floor),
        rhs=float(min_sep),
        ok=bool(ok),
        window=(window.lo, window.hi),
        extra={
            "min_separation": min_sep,
            "argmin_time": argmin_t,
            "log_floor": float(log_floor),
            "log_constant": float(log_C),
            "N0": float(N0),
        },
    )
