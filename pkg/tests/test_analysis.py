import math
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mfflow.analysis import (
    decay_rate,
    fit_power_law,
    is_nonincreasing,
    late_window,
    moment_audit,
    rate_report,
    relative_change,
    sublinear_check,
)
from mfflow.oracle import ScalarFlow, closed_form_trace


@dataclass
class Rec:
    t: float
    risk_pop: float = 1.0
    risk_emp: float = 1.0
    second_moment: float = 1.0
    path_norm: float = 1.0


def power_records(prefactor, exponent, t_lo=2.0, t_hi=100.0, num=50):
    return [Rec(t, prefactor * t**-exponent) for t in np.linspace(t_lo, t_hi, num)]


@pytest.mark.parametrize("t,r,g", [(10, 0.1, 1.0), (100, 0.01, 1.0), (10, 1e-3, 3.0)])
def test_decay_rate_values(t, r, g):
    assert decay_rate(t, r) == pytest.approx(g)


@pytest.mark.parametrize("t,r", [(1.0, 0.5), (0.5, 0.5), (10.0, 0.0), (10.0, -1.0)])
def test_decay_rate_undefined(t, r):
    assert decay_rate(t, r) is None


@given(st.floats(1.01, 1e6), st.floats(0.01, 5))
def test_decay_rate_inverts_power(t, g):
    assert decay_rate(t, t**-g) == pytest.approx(g, rel=1e-9)


def test_fit_exact_power_law():
    assert fit_power_law(power_records(1.0, 2.0), (2, 100)) == pytest.approx(2.0, abs=1e-6)


def test_fit_prefactor_invariant():
    assert fit_power_law(power_records(5.0, 1.0), (2, 100)) == pytest.approx(1.0, abs=1e-6)


@given(st.floats(1e-3, 1e3))
def test_fit_scale_invariance(c):
    base = power_records(1.0, 0.7)
    scaled = [Rec(r.t, c * r.risk_pop) for r in base]
    assert fit_power_law(scaled, (2, 100)) == pytest.approx(fit_power_law(base, (2, 100)), abs=1e-9)


def test_fit_needs_five_points():
    recs = power_records(1.0, 1.0, num=4)
    with pytest.raises(ValueError):
        fit_power_law(recs, (2, 100))


def test_fit_rejects_nonpositive_risk():
    recs = power_records(1.0, 1.0)
    recs[10].risk_pop = 0.0
    with pytest.raises(ValueError):
        fit_power_law(recs, (2, 100))


@pytest.mark.parametrize("alpha", [2.0])
def test_fit_on_closed_form_energy(alpha):
    flow = ScalarFlow(alpha)
    est = fit_power_law(closed_form_trace(flow, 1e2, 1e4), (1e2, 1e4))
    assert est == pytest.approx(alpha / (alpha + 2), abs=0.05)


def test_rate_report():
    recs = [Rec(0.5, 0.9)] + power_records(1.0, 1.5)
    rep = rate_report(recs, (2, 100))
    assert rep.fitted_exponent == pytest.approx(1.5, abs=1e-6)
    assert all(t > 1 for t, _ in rep.gamma_at)
    with pytest.raises(ValueError):
        rate_report(recs, (1.0, 100))


def test_late_window():
    assert late_window(20.0) == (2.0, 20.0)


def test_moment_audit_constant():
    recs = [Rec(t, risk_emp=0.3, second_moment=2.0) for t in (0, 1, 2, 3)]
    audit = moment_audit(recs, h=0.01)
    assert all(a.passed for a in audit)
    assert all(a.lhs == 0 for a in audit)


def test_moment_audit_flags_violation():
    recs = [Rec(0.0, risk_emp=1.0, second_moment=1.0), Rec(1.0, risk_emp=0.99, second_moment=4.0)]
    audit = moment_audit(recs, h=0.01)
    assert not audit[0].passed
    assert audit[0].lhs == pytest.approx(1.0)
    assert audit[0].rhs == pytest.approx(math.sqrt(0.01) + 0.1)


def test_moment_audit_risk_increase_counts_as_zero():
    recs = [Rec(0.0, risk_emp=1.0, second_moment=1.0), Rec(1.0, risk_emp=2.0, second_moment=1.0)]
    assert moment_audit(recs, h=0.0)[0].rhs == 0.0


def test_moment_audit_requires_sorted():
    with pytest.raises(ValueError):
        moment_audit([Rec(1.0), Rec(0.5)], h=0.1)


def test_sublinear_bounded():
    recs = [Rec(t, second_moment=3.0) for t in np.linspace(2, 50, 30)]
    trend = sublinear_check(recs)
    assert trend.tail_slope < 0 and trend.tail_nonincreasing


def test_sublinear_linear_growth():
    recs = [Rec(t, second_moment=t) for t in np.linspace(2, 50, 30)]
    trend = sublinear_check(recs)
    assert all(v == pytest.approx(1.0) for _, v in trend.ratios)
    assert trend.tail_slope == pytest.approx(0.0, abs=1e-12)


def test_sublinear_needs_records():
    with pytest.raises(ValueError):
        sublinear_check([Rec(0.5), Rec(2.0)])


def test_relative_change_and_monotone():
    recs = [Rec(float(t), risk_emp=1.0 / (t + 1), path_norm=1.0 + 0.01 * t) for t in range(11)]
    assert relative_change(recs, "path_norm") == pytest.approx(0.05 / 1.05)
    assert is_nonincreasing(recs)
    recs[3].risk_emp = 10.0
    assert not is_nonincreasing(recs)
