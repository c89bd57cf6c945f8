import numpy as np
import pytest

from youngflow import (
    SampledPath,
    SolveOptions,
    analytic_driver,
    cauchy_operator,
    flow_axiom_check,
    linear_field,
    non_intersection_check,
    select_exponents,
)

EXPS = select_exponents(4.0 / 3.0, 0.75, 0.75, 1.0)


def _zero_field():
    return linear_field(0.0, 0.0, 0.0, 0.0)


def _mult_setup(n=2001, t1=1.0):
    field = linear_field(0.0, 0.0, 1.0, 0.0)
    driver = analytic_driver("sine", {}, np.linspace(0.0, t1, n))
    return field, driver, SolveOptions(oversample=30)


def test_identity_no_solve():
    field, driver, opts = _mult_setup()
    x = np.array([1.23])
    out = cauchy_operator(field, driver, 0.4, 0.4, x, opts=opts, exponents=EXPS)
    assert np.array_equal(out, x)


def test_zero_field_transport_is_identity():
    field = _zero_field()
    driver = analytic_driver("sine", {}, np.linspace(0.0, 1.0, 301))
    for t1, t2 in ((0.0, 1.0), (0.8, 0.2), (0.3, 0.9)):
        out = cauchy_operator(field, driver, t1, t2, [0.42], exponents=EXPS)
        assert out[0] == pytest.approx(0.42, abs=1e-12)


def test_scalar_linear_closed_form_both_directions():
    field, driver, opts = _mult_setup(4001)
    x0 = 0.8
    fwd = cauchy_operator(field, driver, 0.0, 1.0, [x0], opts=opts, exponents=EXPS)
    assert fwd[0] == pytest.approx(x0 * np.exp(np.sin(1.0)), abs=1e-5)
    back = cauchy_operator(field, driver, 1.0, 0.0, [fwd[0]], opts=opts, exponents=EXPS)
    assert back[0] == pytest.approx(x0, abs=1e-5)
    # backward against the closed form directly
    back2 = cauchy_operator(field, driver, 1.0, 0.3, [x0], opts=opts, exponents=EXPS)
    assert back2[0] == pytest.approx(x0 * np.exp(np.sin(0.3) - np.sin(1.0)), abs=1e-5)


def test_flow_axioms_zero_field():
    field = _zero_field()
    driver = analytic_driver("sine", {}, np.linspace(0.0, 1.0, 301))
    probes = [[-1.0], [0.0], [2.5]]
    rep = flow_axiom_check(field, driver, (0.2, 0.5, 0.8), probes, tol=1e-12,
                           exponents=EXPS)
    assert rep.identity_residual == 0.0
    assert rep.inversion_residual == 0.0
    assert rep.composition_residual == 0.0
    assert rep.ok


def test_flow_axioms_linear(rng):
    field, driver, opts = _mult_setup(2001)
    probes = rng.uniform(-1.0, 1.0, (4, 1))
    rep = flow_axiom_check(field, driver, (0.1, 0.45, 0.9), probes, tol=1e-4,
                           opts=opts, exponents=EXPS,
                           continuity_sizes=[1e-3, 1e-2, 1e-1])
    assert rep.ok, rep.to_json()
    sizes = [r for _, r in rep.continuity_table]
    assert all(b >= a for a, b in zip(sizes, sizes[1:]))


def test_composition_residual_tracks_picard_tol():
    field, driver, _ = _mult_setup(1001, 1.0)
    probes = [[0.9]]
    res = {}
    for tol in (1e-4, 1e-10):
        opts = SolveOptions(picard_tol=tol, oversample=4)
        rep = flow_axiom_check(field, driver, (0.1, 0.5, 0.9), probes, tol=1.0,
                               opts=opts, exponents=EXPS)
        res[tol] = rep.composition_residual
    assert res[1e-10] <= res[1e-4]
    assert res[1e-10] < 1e-10


def test_non_intersection_zero_field():
    field = _zero_field()
    driver = analytic_driver("sine", {}, np.linspace(0.0, 1.0, 301))
    cert = non_intersection_check(field, driver, 0.0, [0.2], [0.9], (0.0, 1.0),
                                  exponents=EXPS)
    assert cert.ok
    assert cert.extra["min_separation"] == pytest.approx(0.7, abs=1e-12)


def test_non_intersection_linear_closed_form():
    field, driver, opts = _mult_setup(2001)
    x0, x0p = 1.0, 1.5
    cert = non_intersection_check(field, driver, 0.0, [x0], [x0p], (0.0, 1.0),
                                  opts=opts, exponents=EXPS)
    assert cert.ok
    # separation of dx = x dw trajectories: |x0-x0'| e^{sin t}
    expected = 0.5 * np.exp(np.min(np.sin(driver.times)))
    assert cert.extra["min_separation"] == pytest.approx(expected, rel=1e-4)


def test_non_intersection_random_probes(rng):
    field, driver, opts = _mult_setup(1001)
    for _ in range(5):
        a, b = rng.uniform(-1.0, 1.0, 2)
        if abs(a - b) < 1e-3:
            b += 0.1
        cert = non_intersection_check(field, driver, 0.0, [a], [b], (0.0, 1.0),
                                      opts=opts, exponents=EXPS)
        assert cert.ok
        assert cert.extra["min_separation"] > 0


def test_non_intersection_requires_distinct_points():
    field, driver, opts = _mult_setup(501)
    with pytest.raises(ValueError):
        non_intersection_check(field, driver, 0.0, [1.0], [1.0], (0.0, 1.0),
                               opts=opts, exponents=EXPS)


def test_flow_report_json():
    field = _zero_field()
    driver = analytic_driver("sine", {}, np.linspace(0.0, 1.0, 301))
    rep = flow_axiom_check(field, driver, (0.2, 0.5, 0.8), [[1.0]], tol=1e-9,
                           exponents=EXPS)
    payload = rep.to_json()
    assert payload["ok"] is True
    assert payload["times"] == [0.2, 0.5, 0.8]
