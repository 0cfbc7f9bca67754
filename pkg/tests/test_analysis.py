"""Critical-point scans, endpoint limits, the verification tables, and the
degeneration utilities."""

from __future__ import annotations

import math

import numpy as np
import pytest

from oracles import central_difference
from touching_conics.analysis import (
    FamilyLabel,
    HScanCache,
    LimitKind,
    NormalBundleVerdict,
    ScanConfig,
    critical_points,
    endpoint_limit,
    h0_critical_on_i2,
    h0_pairing,
    h_handle,
    k_profile,
    normal_bundle_at,
    psi_check,
    verify_h_tables,
)
from touching_conics.errors import DomainError, InputError, UnclassifiableLimitError
from touching_conics.resolution import HKind, LinearForm, ResolutionChoice, all_resolutions
from touching_conics.surface import f_value, intervals, q_value


CH0 = all_resolutions()[0]


def test_critical_points_parabola():
    rep = critical_points(lambda x: (x - 0.7) ** 2, (-0.3, 1.7))
    assert rep.count == 1
    assert abs(rep.points[0].location - 0.7) < 1e-8


def test_critical_points_monotone():
    rep = critical_points(lambda x: 3.0 * x + 1.0, (0.0, 5.0))
    assert rep.count == 0


def test_critical_points_needs_domain():
    with pytest.raises(InputError):
        critical_points(lambda x: float("nan"), (0.0, 1.0))


def test_critical_points_unbounded_tail():
    # single interior minimum on an unbounded interval
    rep = critical_points(lambda x: x + 4.0 / x, (0.0, math.inf))
    assert rep.count == 1
    assert abs(rep.points[0].location - 2.0) < 1e-7


def test_h0_unique_critical_point_on_i2(params_star):
    rep = critical_points(h_handle(HKind.H0, CH0, params_star), (-1.0, 0.0))
    assert rep.count == 1


def test_endpoint_limit_reciprocal_example():
    assert endpoint_limit(lambda x: 1.0 / x, 0.0, "right").kind is LimitKind.INFINITY


def test_endpoint_limit_finite():
    lim = endpoint_limit(lambda x: 3.0 + x * x, 0.0, "right")
    assert lim.kind is LimitKind.FINITE
    assert abs(lim.value - 3.0) < 1e-6


def test_endpoint_limit_unclassifiable():
    with pytest.raises(UnclassifiableLimitError):
        endpoint_limit(lambda x: math.sin(1.0 / x), 0.0, "right")


def test_endpoint_limit_h1_at_minus_one(params_star):
    h = h_handle(HKind.H1, ResolutionChoice(LinearForm.X1, LinearForm.X0, LinearForm.X0_PLUS_X1), params_star)
    assert endpoint_limit(h, -1.0, "left").kind is LimitKind.ZERO


def test_endpoint_limit_h2_example(params_star):
    h = h_handle(
        HKind.H2,
        ResolutionChoice(LinearForm.X0_PLUS_X1, LinearForm.AX0_MINUS_BX1, LinearForm.X0),
        params_star,
    )
    assert endpoint_limit(h, -1.0, "right").kind is LimitKind.INFINITY


def test_verify_h_tables_params_star(params_star):
    rep = verify_h_tables(params_star)
    assert rep.passed, rep.failures()
    assert len(rep.rows) >= 60
    # the stated limit rows alone exceed twenty
    assert sum("limit" in r.check for r in rep.rows) >= 20


def test_h_table_specific_rows(params_star):
    rep = verify_h_tables(params_star)
    row = {(r.function, r.choice, r.check): (r.expected, r.computed) for r in rep.rows}
    assert row[("h2", "{X0,X1}", "limit at -1.0 (right)")] == ("Zero", "Zero")
    assert row[("h2", "{X0,X1}", "limit at 0.0 (left)")] == ("Infinity", "Infinity")
    assert row[("h2", "{X0,X1}", "limit at b/a (right)")] == ("Zero", "Zero")
    assert row[("h2", "{X0,X1}", "limit at +inf (right)")] == ("Infinity", "Infinity")
    assert row[("h3", "{X0,X0plusX1,X1}", "limit at 0.0 (right)")] == ("Infinity", "Infinity")
    assert row[("h3", "{X0,X0plusX1,X1}", "limit at b/a (left)")] == ("Zero", "Zero")


def test_gamma_and_h0_critical_points_coincide(params_star):
    crit_h0 = h0_critical_on_i2(params_star)
    gamma = lambda lam: q_value(params_star, lam) ** 2 / f_value(params_star, lam)
    rep = critical_points(gamma, (-1.0, 0.0))
    assert rep.count == 1
    assert abs(rep.points[0].location - crit_h0) < 1e-8


def test_h1_and_h1_squared_critical_points_coincide(params_star):
    ch = ResolutionChoice(LinearForm.X1, LinearForm.X0, LinearForm.X0_PLUS_X1)
    h = h_handle(HKind.H1, ch, params_star)
    part = intervals(params_star)
    rep = critical_points(h, part.i3)
    rep_sq = critical_points(lambda lam: h(lam) ** 2, part.i3)
    assert rep.count == rep_sq.count == 1
    assert abs(rep.points[0].location - rep_sq.points[0].location) < 1e-8


def test_scan_stable_under_doubling(params_star):
    h = h_handle(HKind.H0, CH0, params_star)
    a = critical_points(h, (-1.0, 0.0), ScanConfig(grid=800))
    b = critical_points(h, (-1.0, 0.0), ScanConfig(grid=1600))
    assert a.count == b.count == 1
    assert abs(a.points[0].location - b.points[0].location) < 1e-7


def test_normal_bundle_verdicts(params_star):
    crit = h0_critical_on_i2(params_star)
    ch = ResolutionChoice(LinearForm.X1, LinearForm.X0_PLUS_X1, LinearForm.X0)
    assert normal_bundle_at(FamilyLabel.GEN_PLUS, ch, params_star, crit) is NormalBundleVerdict.DEGENERATE
    part = intervals(params_star)
    lam4 = 0.5 * (part.i4minus[0] + part.lambda0)
    assert normal_bundle_at(FamilyLabel.GEN_PLUS, ch, params_star, lam4) is NormalBundleVerdict.BALANCED
    orbit_ch = ResolutionChoice(LinearForm.X0, LinearForm.X1, LinearForm.X0_PLUS_X1)
    assert normal_bundle_at(FamilyLabel.ORBIT, orbit_ch, params_star, -0.5) is NormalBundleVerdict.BALANCED


def test_normal_bundle_domain_check(params_star):
    with pytest.raises(DomainError):
        normal_bundle_at(FamilyLabel.SP_PLUS, CH0, params_star, -0.5)


def test_degenerate_set_has_measure_zero(params_star):
    ch = ResolutionChoice(LinearForm.X1, LinearForm.X0_PLUS_X1, LinearForm.X0)
    cache = HScanCache(params_star)
    grid = np.linspace(-0.999, -0.001, 1000)
    hits = sum(
        normal_bundle_at(FamilyLabel.GEN_PLUS, ch, params_star, float(lam), cache=cache)
        is NormalBundleVerdict.DEGENERATE
        for lam in grid
    )
    assert hits <= 1


def test_h0_pairing(params_star):
    crit = h0_critical_on_i2(params_star)
    h = h_handle(HKind.H0, CH0, params_star)
    for lam in (-0.9, -0.6, crit + 0.1, -0.05):
        if abs(lam - crit) < 1e-3:
            continue
        mu = h0_pairing(params_star, lam)
        assert (lam - crit) * (mu - crit) < 0.0  # opposite sides
        assert abs(h(mu) - h(lam)) < 1e-8


def test_h0_pairing_rejects_critical_plane(params_star):
    crit = h0_critical_on_i2(params_star)
    with pytest.raises(DomainError):
        h0_pairing(params_star, crit)


def test_psi_profile():
    rep = psi_check(1000)
    assert rep.passed
    assert rep.k_at_zero == 0.0
    assert rep.monotone
    assert k_profile(1e6) > 1.0 - 1e-5
    assert abs(rep.boundary_derivative + 1.0) < 1e-6


def test_psi_requires_samples():
    with pytest.raises(InputError):
        psi_check(5)


def test_derivative_residuals_at_reported_criticals(params_star):
    rep = critical_points(h_handle(HKind.H0, CH0, params_star), (-1.0, 0.0))
    h = h_handle(HKind.H0, CH0, params_star)
    for pt in rep.points:
        assert abs(central_difference(h, pt.location, 1e-6)) < 1e-5
