"""Acceptance suite: one test per verification criterion.

Each test enforces its stated tolerance and runtime budget and prints a
single PASS line (visible with `pytest -s` or in captured output).
Solves are memoised across criteria; the first criterion that needs a
scenario pays for its solve inside its own budget.
"""

import time

import numpy as np
import pytest

from youngflow import (
    DETERMINISTIC_BUNDLE,
    FLOW_BUNDLE,
    FbmSpec,
    SampledPath,
    analytic_driver,
    closed_form_error,
    count_bound,
    fbm_covariance_defect,
    fbm_sample,
    flow_axiom_check,
    greedy_sequence,
    p_variation,
    p_variation_bruteforce,
    reverse_integral,
    rs_sum,
    run_scenario,
    solve_backward,
    solve_forward,
    young_loeve_check,
)
from youngflow.young import YoungConstants

_RUNS = {}


def _bundle(name, seed=None):
    key = (name, seed)
    if key not in _RUNS:
        _RUNS[key] = run_scenario(name, seed=seed)
    return _RUNS[key]


def _announce(num, label, elapsed, budget):
    print(f"[criterion {num:02d}] PASS {label} ({elapsed:.1f}s, budget {budget}s)")


def test_criterion_01_pvar_oracle_equivalence():
    budget = 10.0
    start = time.time()
    rng = np.random.default_rng(101)
    for _ in range(200):
        n = int(rng.integers(3, 13))
        dim = int(rng.integers(1, 3))
        times = np.sort(rng.uniform(0, 1, n)) + np.arange(n) * 1e-6
        path = SampledPath(times, rng.standard_normal((n, dim)))
        for p in (1.0, 1.3, 1.5, 2.0):
            dp = p_variation(path, p)
            bf = p_variation_bruteforce(path, p)
            assert abs(dp - bf) <= 1e-12 * max(1.0, abs(bf))
    elapsed = time.time() - start
    assert elapsed < budget
    _announce(1, "p-variation DP == exhaustive oracle (200 paths x 4 exponents)", elapsed, budget)


def test_criterion_02_young_closed_forms():
    budget = 1.0
    start = time.time()
    ts = np.linspace(0.0, 1.0, 10_001)
    x = SampledPath(ts, ts)
    w = SampledPath(ts, ts ** 2)
    value = rs_sum(x, w)
    assert abs(value[0] - 2.0 / 3.0) < 2e-4
    # telescoping: integrand 1 returns the driver increment
    rng = np.random.default_rng(7)
    drv = SampledPath(ts, np.cumsum(rng.standard_normal(len(ts))) * 0.01)
    ones = SampledPath(ts, np.ones(len(ts)))
    tele = rs_sum(ones, drv)[0] - (drv.values[-1, 0] - drv.values[0, 0])
    assert abs(tele) <= 1e-13
    # reversal negates exactly
    assert abs(rs_sum(x, w)[0] + reverse_integral(x, w)[0]) <= 1e-14
    elapsed = time.time() - start
    assert elapsed < budget
    _announce(2, "Young closed forms: 2/3 integral, telescoping, reversal", elapsed, budget)


def test_criterion_03_young_loeve_certification():
    budget = 30.0
    start = time.time()
    rng = np.random.default_rng(303)
    constants = YoungConstants(4.0 / 3.0, 4.0 / 3.0)
    n = 257
    checked = 0
    for _ in range(50):
        ts = np.linspace(0.0, 1.5, n)
        x_vals = sum(
            c * np.sin((k + 1) * ts + ph)
            for k, (c, ph) in enumerate(zip(rng.standard_normal(4) * 0.5, rng.uniform(0, 6, 4)))
        )
        w_vals = sum(
            c * np.cos((k + 1) * ts + ph)
            for k, (c, ph) in enumerate(zip(rng.standard_normal(4) * 0.5, rng.uniform(0, 6, 4)))
        )
        x = SampledPath(ts, x_vals)
        w = SampledPath(ts, w_vals)
        for depth in range(4):
            pieces = 2 ** depth
            for i in range(pieces):
                lo = 1.5 * i / pieces
                hi = 1.5 * (i + 1) / pieces
                cert = young_loeve_check(x, w, (lo, hi), constants=constants, tol=1e-10)
                assert cert.ok, (lo, hi, cert.lhs, cert.rhs)
                assert cert.extra["yl1_ok"]
                checked += 1
    assert checked == 50 * 15
    elapsed = time.time() - start
    assert elapsed < budget
    _announce(3, "sewing-defect certificates on 50 pairs x 15 dyadic windows", elapsed, budget)


def test_criterion_04_greedy_correctness():
    budget = 30.0
    start = time.time()
    ramp = analytic_driver("linear", {}, np.linspace(0.0, 1.0, 501))
    seq = greedy_sequence(ramp, 0.0, 1.0, lam=1.0, mu=0.5, p=1.5)
    np.testing.assert_allclose(seq.times, [0.0, 0.25, 0.5, 0.75, 1.0], atol=1e-10)
    lam, mu, p = 0.75, 0.35, 1.5
    for seed in range(20):
        drv = fbm_sample(FbmSpec(hurst=0.75, horizon=1.0, samples=4096, seed=seed))
        s = greedy_sequence(drv, 0.0, 1.0, lam=lam, mu=mu, p=p)
        interior = s.residuals[:-1] if s.clamped else s.residuals
        assert np.all(np.abs(interior) <= 1e-8)
        cb = count_bound(drv, (0.0, 1.0), lam=lam, mu=mu, p=p, p_prime=1.5)
        assert cb.actual <= int(np.ceil(cb.bound))
    elapsed = time.time() - start
    assert elapsed < budget
    _announce(4, "greedy residuals <= 1e-8 and counting bound on 20 fBm drivers", elapsed, budget)


def test_criterion_05_solver_closed_forms():
    budget = 30.0
    start = time.time()
    ls = _bundle("linear-sine")
    assert closed_form_error(ls) <= 1e-5
    drift = _bundle("pure-drift")
    assert closed_form_error(drift) <= 1e-6
    elapsed = time.time() - start
    assert elapsed < budget
    _announce(5, "x0 e^{sin t} within 1e-5 and x0 e^{-t} within 1e-6", elapsed, budget)


def test_criterion_06_fixed_point_and_concatenation():
    budget = 60.0
    start = time.time()
    for name in DETERMINISTIC_BUNDLE:
        run = _bundle(name)
        assert all(r <= 1e-10 for r in run.report.fixed_point_residuals), name
        assert run.report.ball_ok, name
        rep = run.report
        base_times = run.driver.times
        t_mid = float(base_times[np.searchsorted(base_times, 0.5 * (rep.t0 + rep.T))])
        first = solve_forward(run.field, run.driver, rep.t0, [run.scenario.x0], t_mid,
                              opts=run.scenario.opts, exponents=run.exponents,
                              certify=False)
        second = solve_forward(run.field, run.driver, t_mid, first.solution.values[-1],
                               rep.T, opts=run.scenario.opts, exponents=run.exponents,
                               certify=False)
        split_times = np.concatenate([first.solution.times, second.solution.times[1:]])
        split_vals = np.concatenate([first.solution.values, second.solution.values[1:]])
        gap = float(np.max(np.abs(split_vals - rep.solution.at(split_times))))
        assert gap <= 2e-10, (name, gap)
    elapsed = time.time() - start
    assert elapsed < budget
    _announce(6, "per-interval residuals <= 1e-10; split == single within 2e-10", elapsed, budget)


def test_criterion_07_gronwall_certificates():
    budget = 60.0
    start = time.time()
    for name in DETERMINISTIC_BUNDLE:
        cert = _bundle(name).report.certificate("gronwall")
        assert cert is not None and cert.ok, name
    for seed in range(10):
        cert = _bundle("fbm-linear", seed).report.certificate("gronwall")
        assert cert is not None and cert.ok, seed
    elapsed = time.time() - start
    assert elapsed < budget
    _announce(7, "Gronwall-type certificate on the bundle and 10 fBm seeds", elapsed, budget)


def test_criterion_08_growth_certificates():
    budget = 60.0
    start = time.time()
    for name in DETERMINISTIC_BUNDLE:
        cert = _bundle(name).report.certificate("growth")
        assert cert is not None and cert.ok, name
    for seed in range(10):
        cert = _bundle("fbm-linear", seed).report.certificate("growth")
        assert cert is not None and cert.ok, seed
    elapsed = time.time() - start
    assert elapsed < budget
    _announce(8, "growth certificate with explicit constants on the same suite", elapsed, budget)


def test_criterion_09_flow_axioms():
    budget = 120.0
    start = time.time()
    rng = np.random.default_rng(909)
    for name in FLOW_BUNDLE:
        run = _bundle(name)
        t0, T = run.report.t0, run.report.T
        span = T - t0
        triples = [
            run.scenario.flow_triple,
            (t0 + 0.1 * span, t0 + 0.5 * span, t0 + 0.9 * span),
            (t0 + 0.05 * span, t0 + 0.35 * span, t0 + 0.6 * span),
        ]
        probes = rng.uniform(-1.5, 1.5, (10, run.field.dim_d))
        for triple in triples:
            rep = flow_axiom_check(run.field, run.driver, triple, probes, tol=1e-5,
                                   opts=run.scenario.opts, exponents=run.exponents)
            assert rep.identity_residual == 0.0, (name, triple)
            assert rep.inversion_residual <= 1e-5, (name, triple, rep.inversion_residual)
            assert rep.composition_residual <= 1e-5, (name, triple, rep.composition_residual)
    elapsed = time.time() - start
    assert elapsed < budget
    _announce(9, "flow axioms, 10 probes x 3 triples per flow scenario", elapsed, budget)


def test_criterion_10_backward_equivalence():
    budget = 120.0
    start = time.time()
    for name in DETERMINISTIC_BUNDLE:
        run = _bundle(name)
        rep = run.report
        back = solve_backward(run.field, run.driver, rep.T, rep.solution.values[-1],
                              rep.t0, opts=run.scenario.opts, exponents=run.exponents,
                              certify=False)
        gap = float(np.linalg.norm(back.solution.values[0] - np.atleast_1d(run.scenario.x0)))
        assert gap <= 1e-6, (name, gap)
    elapsed = time.time() - start
    assert elapsed < budget
    _announce(10, "forward-then-backward returns x0 within 1e-6 on the bundle", elapsed, budget)


def test_criterion_11_fbm_sanity():
    budget = 60.0
    start = time.time()
    for hurst, n in ((0.75, 512), (0.8, 256)):
        defect = fbm_covariance_defect(FbmSpec(hurst=hurst, horizon=1.0, samples=n, seed=0))
        assert defect <= 1e-10, (hurst, n, defect)
    big = fbm_sample(FbmSpec(hurst=0.75, horizon=1.0, samples=4097, seed=42))

    def refine_values(p):
        return [
            p_variation(SampledPath(big.times[::stride], big.values[::stride]), p)
            for stride in (4, 2, 1)
        ]

    stable = refine_values(1.5)  # p > 1/H = 4/3
    assert all(b / a <= 1.02 for a, b in zip(stable, stable[1:])), stable
    growing = refine_values(1.2)  # p < 1/H
    assert all(b / a >= 1.03 for a, b in zip(growing, growing[1:])), growing
    elapsed = time.time() - start
    assert elapsed < budget
    _announce(11, "fBm covariance exact to 1e-10; p-variation refinement trends", elapsed, budget)


def test_criterion_12_verify_determinism(tmp_path):
    from youngflow.cli import main

    start = time.time()
    rc1 = main(["verify", "--out", str(tmp_path / "v1"), "--seeds", "0,1"])
    rc2 = main(["verify", "--out", str(tmp_path / "v2"), "--seeds", "0,1"])
    assert rc1 == 0 and rc2 == 0
    a = (tmp_path / "v1" / "verify_summary.csv").read_bytes()
    b = (tmp_path / "v2" / "verify_summary.csv").read_bytes()
    assert a == b
    for sub in ("zero", "linear-sine", "fbm-linear"):
        sa = (tmp_path / "v1" / sub / "summary.csv").read_bytes()
        sb = (tmp_path / "v2" / sub / "summary.csv").read_bytes()
        assert sa == sb
    elapsed = time.time() - start
    _announce(12, "repeated verify runs byte-identical and all-ok", elapsed, 600.0)
