import numpy as np
import pytest

from youngflow import (
    ControlFunction,
    GronwallInput,
    SampledPath,
    SolveOptions,
    analytic_driver,
    apply_F,
    apply_F_certificate,
    build_gronwall_input,
    euler_solve,
    gronwall_certificate,
    growth_certificate,
    linear_field,
    run_scenario,
    scalar_field,
    select_exponents,
    solve_backward,
    solve_forward,
    solve_interval,
)


def _sine(n=2001, t1=2.0, amp=1.0, freq=1.0):
    return analytic_driver("sine", {"amp": amp, "freq": freq}, np.linspace(0.0, t1, n))


def _mult_field():
    return linear_field(0.0, 0.0, 1.0, 0.0, name="mult")


EXPS = select_exponents(4.0 / 3.0, 0.75, 0.75, 1.0)


def test_apply_f_zero_field_constant():
    field = linear_field(0.0, 0.0, 0.0, 0.0)
    drv = _sine(301, 1.0)
    x = SampledPath(np.linspace(0, 1, 301), np.full(301, 0.7))
    fa = apply_F(field, drv, x)
    assert np.all(fa.path.values == 0.7)
    assert np.all(fa.drift_part.values == 0.0)
    assert np.all(fa.young_part.values == 0.0)


def test_apply_f_unit_drift():
    field = linear_field(0.0, 1.0, 0.0, 0.0)  # f == 1
    drv = _sine(301, 1.0)
    ts = np.linspace(0, 1, 301)
    x = SampledPath(ts, np.full(301, 0.25))
    fa = apply_F(field, drv, x)
    np.testing.assert_allclose(fa.path.values[:, 0], 0.25 + ts, atol=1e-13)


def test_apply_f_certificate_random(rng):
    field = linear_field()
    drv = _sine(501, 1.0)
    for _ in range(5):
        ts = np.linspace(0, 1, 301)
        x = SampledPath(ts, 0.4 * np.cumsum(rng.standard_normal(301)) * 0.05 + 0.3)
        cert = apply_F_certificate(field, drv, x, EXPS)
        assert cert.ok, (cert.lhs, cert.rhs)


def test_solve_zero_field_one_iteration():
    field = linear_field(0.0, 0.0, 0.0, 0.0)
    rep = solve_forward(field, _sine(), 0.0, [0.7], 2.0, exponents=EXPS)
    assert np.all(rep.solution.values == 0.7)
    assert rep.max_residual == 0.0
    assert rep.max_iters <= 2
    assert rep.ball_ok


def test_drift_closed_form():
    field = linear_field(-1.0, 0.0, 0.0, 0.0)
    rep = solve_forward(field, _sine(4001), 0.0, [1.0], 2.0, exponents=EXPS)
    target = np.exp(-rep.solution.times)
    assert np.max(np.abs(rep.solution.values[:, 0] - target)) < 1e-6


def test_short_interval_matches_exponential():
    # dx = x dw on a short window with a smooth driver: x = x0 exp(w_t - w_0)
    field = _mult_field()
    drv = _sine(4001, 0.5)
    opts = SolveOptions(oversample=80)
    path, iters, residual = solve_interval(field, drv, 0.0, [1.0], 0.5, opts, EXPS)
    target = np.exp(np.sin(path.times))
    assert np.max(np.abs(path.values[:, 0] - target)) < 1e-6
    assert residual < 1e-10


def test_warm_start_reaches_same_fixed_point():
    field = _mult_field()
    drv = _sine(2001, 0.4)
    opts = SolveOptions(oversample=4)
    cold, _, _ = solve_interval(field, drv, 0.0, [1.0], 0.4, opts, EXPS)
    warm_path = euler_solve(field, drv, 0.0, [1.0], 0.4, cold.times)
    warm, _, _ = solve_interval(field, drv, 0.0, [1.0], 0.4, opts, EXPS, warm_start=warm_path)
    assert np.max(np.abs(cold.values - warm.values)) <= 10 * opts.picard_tol


def test_concatenation_consistency(scenario_run):
    run = scenario_run("time-varying")
    rep = run.report
    ts = rep.solution.times
    mid_idx = np.searchsorted(ts, 0.5 * (rep.t0 + rep.T))
    t_mid = float(run.driver.times[np.searchsorted(run.driver.times, ts[mid_idx])])
    first = solve_forward(run.field, run.driver, rep.t0, [run.scenario.x0], t_mid,
                          opts=run.scenario.opts, exponents=run.exponents, certify=False)
    second = solve_forward(run.field, run.driver, t_mid, first.solution.values[-1], rep.T,
                           opts=run.scenario.opts, exponents=run.exponents, certify=False)
    # compare on the shared grid points
    joined_times = np.concatenate([first.solution.times, second.solution.times[1:]])
    joined_vals = np.concatenate([first.solution.values, second.solution.values[1:]])
    ref = rep.solution.at(joined_times)
    assert np.max(np.abs(joined_vals - ref)) <= 2e-10


def test_euler_agreement_improves_with_refinement():
    field = _mult_field()
    errs = []
    for n in (251, 501, 1001, 2001):
        grid = np.linspace(0.0, 2.0, n)
        drv = _sine(n)
        eul = euler_solve(field, drv, 0.0, [1.0], 2.0, grid)
        target = np.exp(np.sin(grid))
        errs.append(np.max(np.abs(eul.values[:, 0] - target)))
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_euler_vs_picard_agreement(scenario_run):
    run = scenario_run("flow-linear")
    grid = run.driver.times
    eul = euler_solve(run.field, run.driver, run.report.t0, [run.scenario.x0],
                      run.report.T, grid)
    sol = run.report.solution.at(grid)
    gap_coarse = np.max(np.abs(eul.values - sol))
    # refine the Euler grid: gap to the converged solution shrinks
    fine = np.linspace(run.report.t0, run.report.T, 4 * (len(grid) - 1) + 1)
    eul_f = euler_solve(run.field, run.driver, run.report.t0, [run.scenario.x0],
                        run.report.T, fine)
    gap_fine = np.max(np.abs(eul_f.values - run.report.solution.at(fine)))
    assert gap_fine < gap_coarse


def test_backward_zero_field_constant():
    field = linear_field(0.0, 0.0, 0.0, 0.0)
    rep = solve_backward(field, _sine(), 2.0, [0.3], 0.0, exponents=EXPS)
    assert np.all(rep.solution.values == 0.3)
    assert rep.direction == "backward"
    assert rep.solution.times[0] == 0.0 and rep.solution.times[-1] == 2.0


def test_backward_linear_closed_form():
    # terminal condition propagated backwards for dx = x dw, w = sin t
    field = _mult_field()
    drv = _sine(4001, 1.0)
    xT = float(np.exp(np.sin(1.0)))
    rep = solve_backward(field, drv, 1.0, [xT], 0.0,
                         opts=SolveOptions(oversample=40), exponents=EXPS)
    target = np.exp(np.sin(rep.solution.times))
    assert np.max(np.abs(rep.solution.values[:, 0] - target)) < 1e-5


def test_round_trip_small():
    field = linear_field(-0.4, 0.05, 0.3, 0.0)
    drv = _sine(2001, 1.0, amp=0.5)
    opts = SolveOptions(oversample=30)
    fwd = solve_forward(field, drv, 0.0, [0.9], 1.0, opts=opts, exponents=EXPS,
                        certify=False)
    back = solve_backward(field, drv, 1.0, fwd.solution.values[-1], 0.0, opts=opts,
                          exponents=EXPS, certify=False)
    assert abs(back.solution.values[0, 0] - 0.9) < 1e-6


def test_shrink_loop_recovers_from_oversized_chunks():
    # an oversized budget breaks per-chunk contraction; shrinking restores it
    field = _mult_field()
    drv = _sine(2001, 2.0)
    opts = SolveOptions(mu_override=3.0, oversample=2)
    rep = solve_forward(field, drv, 0.0, [1.0], 2.0, opts=opts, exponents=EXPS,
                        certify=False)
    target = np.exp(np.sin(rep.solution.times))
    # accuracy here is limited by the coarse quadrature, not the shrinking
    assert np.max(np.abs(rep.solution.values[:, 0] - target)) < 1e-3
    assert rep.max_residual <= opts.picard_tol


def test_fixed_point_residuals_within_tol(scenario_run):
    for name in ("zero", "time-varying", "flow-linear"):
        rep = scenario_run(name).report
        assert all(r <= 1e-10 for r in rep.fixed_point_residuals)
        assert rep.ball_ok


def test_gronwall_certificate_trivial_constant():
    ts = np.linspace(0.0, 1.0, 101)
    y = SampledPath(ts, np.full(101, 0.6))
    drv = _sine(101, 1.0)
    gin = GronwallInput(y=y, A=ControlFunction.zero(), a1=0.0, a2=0.0)
    cert = gronwall_certificate(gin, drv, 1.5, 1.8)
    assert cert.ok
    assert cert.extra["greedy_count"] == 0


def test_gronwall_certificate_reports_violation():
    # a jump that no zero-control hypothesis can explain
    ts = np.linspace(0.0, 1.0, 101)
    vals = np.zeros(101)
    vals[50:] = 1.0
    y = SampledPath(ts, vals)
    drv = _sine(101, 1.0)
    gin = GronwallInput(y=y, A=ControlFunction.zero(), a1=0.0, a2=0.0)
    cert = gronwall_certificate(gin, drv, 1.5, 1.8)
    assert not cert.ok
    assert not cert.extra["hypothesis_ok"]
    assert cert.extra["hypothesis_pair"] is not None


def test_gronwall_variation_variant(scenario_run):
    # the pointwise hypothesis implies the q-variation form with
    # coefficient c = max(a1, a2 (K+1)); the variation-form conclusion holds
    from youngflow.young import YoungConstants

    run = scenario_run("time-varying")
    gin = build_gronwall_input(run.field, run.report, run.driver)
    K = YoungConstants(run.exponents.p, run.exponents.q).K
    gin_var = GronwallInput(y=gin.y, A=gin.A, a1=gin.c(K), a2=0.0)
    cert = gronwall_certificate(gin_var, run.driver, run.exponents.p,
                                run.exponents.q, variant="variation")
    assert cert.ok, cert.extra
    assert cert.extra["variant"] == "variation"
    assert cert.extra["hypothesis_ok"]


def test_solution_dominated_by_budget_controls(scenario_run):
    # |x_t - x_s| <= c* (1 + ||x||) ((t-s)^alpha + |||w|||_{p,[s,t]}) turns
    # into domination by the controls (t-s)^{q alpha} and |||w|||^q
    from youngflow import dominated_variation_bound, p_variation, p_variation_norm

    run = scenario_run("flow-linear")
    rep = run.report
    exps = run.exponents
    idx = np.linspace(0, len(rep.solution.times) - 1, 160).astype(int)
    coarse = SampledPath(rep.solution.times[idx], rep.solution.values[idx])
    c_star = rep.constants.M * (exps.K0 + 2.0)
    coef = c_star * (1.0 + p_variation_norm(coarse, exps.q))
    driver_pow_q = ControlFunction(
        lambda s, t: p_variation(run.driver, exps.p, (s, t)) ** exps.q if t - s > 1e-12 else 0.0,
        "driver-pvar^q",
    )
    controls = [
        (coef, ControlFunction.power(exps.q * exps.alpha)),
        (coef, driver_pow_q),
    ]
    assert dominated_variation_bound(coarse, exps.q, controls, max_anchors=12)


def test_gronwall_certificate_solver_outputs(scenario_run):
    for name in ("linear-sine", "time-varying", "bounded-smooth"):
        run = scenario_run(name)
        cert = run.report.certificate("gronwall")
        assert cert is not None and cert.ok, (name, cert.extra if cert else None)
        assert cert.extra["hypothesis_ok"]
        assert cert.extra["induction_ok"]
        assert cert.extra["supnorm_ok"]


def test_growth_certificate_zero_field():
    field = linear_field(0.0, 0.0, 0.0, 0.0)
    rep = solve_forward(field, _sine(301, 1.0), 0.0, [0.7], 1.0, exponents=EXPS)
    cert = rep.certificate("growth")
    assert cert.ok
    assert cert.lhs == pytest.approx(0.7, abs=1e-12)


def test_growth_certificate_monotone_rows(scenario_run):
    run = scenario_run("flow-linear")
    cert = run.report.certificate("growth")
    assert cert.ok
    assert cert.extra["monotone_in_window"]


def test_continuity_in_initial_condition(scenario_run):
    # |X(t0,t,w,x0') - X(t0,t,w,x0)| <= C |x0-x0'| with C from the
    # difference self-bound machinery
    from youngflow.flow import difference_growth_log_constant
    from youngflow.paths import p_variation_norm

    run = scenario_run("flow-linear")
    base = run.report.solution
    perturbs = [1e-3, 1e-2, 1e-1]
    idx = np.linspace(0, len(base.times) - 1, 200).astype(int)
    n0 = p_variation_norm(SampledPath(base.times[idx], base.values[idx]), run.exponents.q)
    responses = []
    for eps in perturbs:
        rep = solve_forward(run.field, run.driver, run.report.t0,
                            [run.scenario.x0 + eps], run.report.T,
                            opts=run.scenario.opts, exponents=run.exponents,
                            certify=False)
        gap = float(np.max(np.abs(rep.solution.values - base.values)))
        responses.append(gap)
        log_C = difference_growth_log_constant(
            run.field, run.driver, run.exponents,
            (run.report.t0, run.report.T), max(n0, 1.0) + eps)
        assert np.log(gap) <= np.log(eps) + log_C
    assert all(b >= a for a, b in zip(responses, responses[1:]))


def test_continuity_in_driver(scenario_run):
    run = scenario_run("flow-linear")
    base = run.report.solution
    ts = run.driver.times
    from youngflow.paths import difference_pvar_norm

    for eps in (1e-3, 1e-2):
        bumped = SampledPath(ts, run.driver.values + eps * np.sin(3 * ts)[:, None])
        rep = solve_forward(run.field, bumped, run.report.t0, [run.scenario.x0],
                            run.report.T, opts=run.scenario.opts,
                            exponents=run.exponents, certify=False)
        gap = float(np.max(np.abs(rep.solution.values - base.values)))
        drv_gap = difference_pvar_norm(run.driver, bumped, run.exponents.p,
                                       (run.report.t0, run.report.T))
        # response is controlled by the driver perturbation size
        assert gap <= 10.0 * drv_gap


def test_report_json_serialisable(scenario_run):
    import json

    rep = scenario_run("time-varying").report
    payload = json.dumps(rep.to_json())
    assert "gronwall" in payload and "growth" in payload


def test_solve_window_outside_domain():
    from youngflow.errors import DomainError

    field = linear_field()
    drv = _sine(201, 1.0)
    with pytest.raises(DomainError):
        solve_forward(field, drv, 0.0, [1.0], 2.0, exponents=EXPS)
    with pytest.raises(DomainError):
        solve_backward(field, drv, 0.5, [1.0], 0.5, exponents=EXPS)


def test_solve_options_validation():
    from youngflow.errors import ParameterError

    with pytest.raises(ParameterError):
        SolveOptions(shrink_factor=1.5)
    with pytest.raises(ParameterError):
        SolveOptions(oversample=0)
    with pytest.raises(ParameterError):
        SolveOptions(picard_tol=-1.0)


def test_solve_report_build_gronwall_requires_structure():
    field = scalar_field(
        f=lambda t, x: np.zeros_like(x),
        g=lambda t, x: np.zeros_like(x),
        g_x=lambda t, x: np.zeros_like(x),
        L_g=0.0, M_N=0.0, delta=1.0, beta=0.75,
        h=ControlFunction.zero(), L_N=0.0, a=0.0, name="anon",
    )
    drv = _sine(101, 1.0)
    rep = solve_forward(field, drv, 0.0, [0.0], 1.0, exponents=EXPS, certify=False)
    from youngflow.errors import ParameterError

    with pytest.raises(ParameterError):
        build_gronwall_input(field, rep, drv)
