import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chronoinfer import (Basis, CellParams, DomainError, GridMismatchError, RegressionModel,
                         SingularDesignError, Transient, cottrell_current, fit_inverse,
                         fit_pulse, infer_full_sequence, predict, r_squared_vs,
                         simulate_transient, truncate)
from oracles import brute_force_fit, r2_by_hand, sse

# 50-digit evaluation of -8.4844e-8 + 1.5182e-6 / 6 (reported 100 Hz model at 6 s).
REF_100HZ_MODEL_AT_6S = 1.6818933333333333333e-7


def grid_transient(times, values, rate):
    return Transient(rate, np.asarray(times, float), np.asarray(values, float))


def test_exact_inverse_fixture():
    rep = fit_inverse([1, 2, 4], [3, 2, 1.5])
    assert rep.model.u == pytest.approx(1, abs=1e-14)
    assert rep.model.v == pytest.approx(2, abs=1e-14)
    assert rep.r_squared == pytest.approx(1, abs=1e-14)
    assert rep.n_points == 3


def test_fit_errors():
    with pytest.raises(DomainError):
        fit_inverse([1], [1])
    with pytest.raises(DomainError):
        fit_inverse([1, 2], [1])
    with pytest.raises(DomainError):
        fit_inverse([0, 1], [1, 2])
    with pytest.raises(SingularDesignError):
        fit_inverse([2, 2, 2], [1, 2, 3])


def test_constant_response():
    rep = fit_inverse([1, 2, 3], [5, 5, 5])
    assert rep.model.v == 0 and rep.model.u == 5
    assert rep.r_squared == 1.0 and rep.total_ss == 0


def test_noiseless_cottrell_matches_oracle():
    pulse = simulate_transient(CellParams(), 0.3, 100)
    rep = fit_inverse(pulse.times, pulse.currents)
    u, v, s = brute_force_fit(pulse.times.tolist(), pulse.currents.tolist())
    assert rep.model.u == pytest.approx(u, rel=1e-6)
    assert rep.model.v == pytest.approx(v, rel=1e-6)
    assert rep.residual_ss == pytest.approx(s, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_oracle_equivalence(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 51))
    x = np.sort(rng.uniform(0.01, 6.0, n))
    u0, v0 = rng.uniform(-1e-6, 1e-6, 2)
    y = u0 + v0 / x + rng.normal(0, 1e-8, n)
    rep = fit_inverse(x, y)
    u, v, s = brute_force_fit(x.tolist(), y.tolist())
    assert rep.residual_ss <= s * (1 + 1e-9)
    assert rep.residual_ss == pytest.approx(s, rel=1e-9)
    assert rep.model.u == pytest.approx(u, rel=1e-6)
    assert rep.model.v == pytest.approx(v, rel=1e-6)


@given(st.floats(-1e-6, 1e-6), st.floats(-1e-6, 1e-6).filter(lambda v: abs(v) > 1e-12),
       st.lists(st.floats(0.01, 10), min_size=3, max_size=60, unique=True))
def test_exact_recovery(u0, v0, xs):
    x = np.array(xs)
    rep = fit_inverse(x, u0 + v0 / x)
    scale = max(1.0, abs(u0), abs(v0))
    assert abs(rep.model.u - u0) < 1e-10 * scale
    assert abs(rep.model.v - v0) < 1e-10 * scale


@given(st.lists(st.tuples(st.floats(0.01, 10), st.floats(-1e-6, 1e-6)),
                min_size=3, max_size=40, unique_by=lambda p: p[0]))
def test_normal_equations(points):
    x = np.array([p[0] for p in points])
    y = np.array([p[1] for p in points])
    rep = fit_inverse(x, y)
    resid = y - predict(rep.model, x)
    z = 1 / x
    assert abs(resid.sum()) <= 1e-10 * np.abs(y).sum() + 1e-300
    assert abs(np.dot(resid, z)) <= 1e-10 * np.dot(np.abs(y), z) + 1e-300


@given(st.lists(st.tuples(st.floats(0.01, 10), st.floats(-1e-6, 1e-6)),
                min_size=3, max_size=40, unique_by=lambda p: p[0]),
       st.sampled_from([0.5, 2.0, 8.0, -4.0]))
def test_scale_equivariance(points, s):
    x = np.array([p[0] for p in points])
    y = np.array([p[1] for p in points])
    base = fit_inverse(x, y)
    scaled = fit_inverse(x, s * y)
    assert scaled.model.u == s * base.model.u
    assert scaled.model.v == s * base.model.v
    assert scaled.r_squared == pytest.approx(base.r_squared, abs=1e-12)


def test_predict():
    assert predict(RegressionModel(0, 0), 3.7) == 0
    assert predict(RegressionModel(1, 2), 2) == 2
    model = RegressionModel(-8.4844e-8, 1.5182e-6)
    assert predict(model, 6.0) == pytest.approx(REF_100HZ_MODEL_AT_6S, rel=1e-15)
    with pytest.raises(DomainError):
        predict(model, 0.0)


def test_model_invariants():
    with pytest.raises(DomainError):
        RegressionModel(float("nan"), 1)
    assert RegressionModel(1, 2, "value").basis is Basis.VALUE


def test_fit_pulse_time_basis_recovers():
    t = np.arange(1, 31) / 100
    pulse = grid_transient(t, 2e-8 + 3e-9 / t, 100)
    rep = fit_pulse(pulse, basis=Basis.TIME)
    assert rep.model.u == pytest.approx(2e-8, rel=1e-10)
    assert rep.model.v == pytest.approx(3e-9, rel=1e-10)
    assert rep.r_squared == pytest.approx(1, abs=1e-12)


def test_fit_pulse_time_basis_cottrell_oracle():
    baseline = simulate_transient(CellParams(), 6.0, 100)
    pulse = truncate(baseline, 0.3)
    rep = fit_pulse(pulse, baseline, Basis.TIME)
    u, v, _ = brute_force_fit(pulse.times.tolist(), pulse.currents.tolist())
    assert rep.model.u == pytest.approx(u, rel=1e-6)
    assert rep.model.v == pytest.approx(v, rel=1e-6)


def test_fit_pulse_value_mapping():
    baseline = simulate_transient(CellParams(), 6.0, 100)
    pulse = truncate(baseline, 0.3)
    b = pulse.currents
    mapped = pulse.with_currents(4e-9 + 2e-15 / b)
    rep = fit_pulse(mapped, baseline, Basis.VALUE)
    assert rep.model.basis is Basis.VALUE
    assert rep.model.u == pytest.approx(4e-9, rel=1e-9)
    assert rep.model.v == pytest.approx(2e-15, rel=1e-9)
    assert rep.r_squared == pytest.approx(1, abs=1e-12)


def test_fit_pulse_value_mapping_identity_is_least_squares():
    # k = b is not of the form u + v/b, so the identity pairing is fitted only approximately.
    baseline = simulate_transient(CellParams(), 6.0, 100)
    pulse = truncate(baseline, 0.3)
    rep = fit_pulse(pulse, baseline, Basis.VALUE)
    u, v, s = brute_force_fit(pulse.currents.tolist(), pulse.currents.tolist())
    assert rep.residual_ss == pytest.approx(s, rel=1e-9)
    assert rep.r_squared < 1


def test_fit_pulse_grid_checks():
    baseline = simulate_transient(CellParams(), 6.0, 100)
    other = simulate_transient(CellParams(), 6.0, 10)
    with pytest.raises(GridMismatchError):
        fit_pulse(truncate(other, 0.5), baseline)
    with pytest.raises(DomainError):
        fit_pulse(truncate(baseline, 0.3), None, Basis.VALUE)


def test_infer_exact_model_extends_exactly():
    u, v = 2e-8, 3e-9
    t = np.arange(1, 31) / 100
    pulse = grid_transient(t, u + v / t, 100)
    model = RegressionModel(u, v)
    full = infer_full_sequence(model, pulse, 6.0)
    assert len(full) == 600
    assert full.end_time == pytest.approx(6.0)
    assert np.allclose(full.currents, u + v / full.times, rtol=1e-15, atol=0)


def test_infer_cottrell_pulse():
    cell = CellParams()
    baseline = simulate_transient(cell, 6.0, 100)
    pulse = truncate(baseline, 0.3)
    rep = fit_pulse(pulse)
    full = infer_full_sequence(rep.model, pulse, 6.0)
    assert len(full) == 600
    assert np.allclose(full.times, baseline.times, atol=1e-12, rtol=0)
    assert np.array_equal(full.currents[:30], pulse.currents)
    u, v, _ = brute_force_fit(pulse.times.tolist(), pulse.currents.tolist())
    assert np.allclose(full.currents[30:], u + v / baseline.times[30:], rtol=1e-6, atol=0)


def test_infer_rejects_value_basis_and_short_duration():
    pulse = simulate_transient(CellParams(), 0.3, 100)
    with pytest.raises(DomainError):
        infer_full_sequence(RegressionModel(0, 1, Basis.VALUE), pulse, 6.0)
    with pytest.raises(DomainError):
        infer_full_sequence(RegressionModel(0, 1), pulse, 0.3)


def test_infer_keeps_file_origin():
    t = 2.0 + np.arange(5) / 10
    pulse = grid_transient(t, 1 / t, 10)
    full = infer_full_sequence(RegressionModel(0, 1), pulse, 3.0)
    assert full.times[0] == 2.0
    assert full.end_time == pytest.approx(3.0)
    assert len(full) == 11


def test_r_squared_vs_examples():
    ref = grid_transient([0.1, 0.2, 0.3], [1, 2, 3], 10)
    assert r_squared_vs(ref, ref) == 1.0
    assert r_squared_vs(ref, ref.with_currents([2, 2, 2])) == 0.0
    assert r_squared_vs(ref, ref.with_currents([1, 2, 4])) == pytest.approx(0.5, abs=1e-15)
    assert r_squared_vs(ref, ref.with_currents([3, 2, 1])) == pytest.approx(r2_by_hand([1, 2, 3], [3, 2, 1]))


def test_r_squared_vs_edge_cases():
    flat = grid_transient([0.1, 0.2], [1, 1], 10)
    assert r_squared_vs(flat, flat) == 1.0
    with pytest.raises(DomainError):
        r_squared_vs(flat, flat.with_currents([1, 2]))
    with pytest.raises(GridMismatchError):
        r_squared_vs(flat, grid_transient([0.1, 0.2, 0.3], [1, 1, 1], 10))


@given(st.lists(st.floats(-1e-6, 1e-6), min_size=2, max_size=50))
def test_r_squared_self_is_one(values):
    tr = Transient(10, np.arange(1, len(values) + 1) / 10, values)
    assert r_squared_vs(tr, tr) == 1.0


def test_sse_helper_agrees_with_report():
    x = np.array([0.5, 1.0, 1.5, 2.0])
    y = np.array([3.1, 2.0, 1.6, 1.6])
    rep = fit_inverse(x, y)
    assert rep.residual_ss == pytest.approx(sse(x, y, rep.model.u, rep.model.v), rel=1e-12)
    assert rep.r_squared == pytest.approx(1 - rep.residual_ss / rep.total_ss)
