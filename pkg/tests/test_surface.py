"""Surface-family validation, double root, intervals, singular locus, search."""

from __future__ import annotations

import math

import numpy as np
import pytest

from oracles import dense_grid_certificate
from touching_conics.errors import InvalidParameterError, NotFoundError, PreconditionError
from touching_conics.poly import evaluate, root_clusters
from touching_conics.surface import (
    STRUCTURAL_CLUSTER_TOL,
    SearchConfig,
    SurfaceParams,
    complex_multiple_roots,
    discriminant_poly,
    f_poly,
    f_value,
    find_valid_params,
    intervals,
    lambda0,
    Q_restricted,
    q_value,
    SingularKind,
    singular_locus,
    validate,
)

# frozen fsolve solution planting a triple root of Q^2 - f at lam = 2 (a = b = 1)
TRIPLE_ROOT_PARAMS = SurfaceParams(
    0.1956189725139344, 1.462889707495509, -1.2587655622635772, 1.0, 1.0
)


def test_f_poly_unit_case():
    assert f_poly(SurfaceParams(0, 0, 0, 1.0, 1.0)).coefficients == (0.0, -1.0, 0.0, 1.0)


def test_f_poly_roots_by_construction():
    p = SurfaceParams(0.3, 0.1, 0.9, 1.7, 0.4)
    f = f_poly(p)
    for root in (0.0, -1.0, p.b / p.a):
        assert abs(evaluate(f, root)) < 1e-12


def test_f_direct_arithmetic():
    assert f_value(SurfaceParams(0, 0, 0, 2.0, 3.0), 1.0) == -2.0


def test_Q_restricted_shapes():
    assert Q_restricted(SurfaceParams(1, 0, 0, 1, 1)).coefficients == (0.0, 0.0, 1.0)
    assert Q_restricted(SurfaceParams(0, 0, 2.5, 1, 1)).coefficients == (2.5,)


def test_defining_identity_as_polynomials():
    p = SurfaceParams(0.7, -0.3, 1.1, 1.3, 0.6)
    q = Q_restricted(p)
    identity = q * q - discriminant_poly(p)
    assert np.allclose(identity.coefficients, f_poly(p).coefficients, atol=1e-12)


def test_discriminant_degree_drop():
    p = SurfaceParams(0, 0, 1, 1, 1)
    assert discriminant_poly(p).coefficients == (1.0, 1.0, 0.0, -1.0)


def test_discriminant_pointwise_identity():
    p = SurfaceParams(0.9, 0.2, -0.4, 0.8, 1.9)
    d = discriminant_poly(p)
    rng = np.random.default_rng(5)
    for lam in rng.uniform(-5, 5, size=25):
        direct = q_value(p, lam) ** 2 - f_value(p, lam)
        scale = 1.0 + abs(direct)
        assert abs(evaluate(d, lam) - direct) < 1e-12 * scale


def test_params_star_has_unique_double_root(params_star):
    clusters = root_clusters(discriminant_poly(params_star).coefficients, STRUCTURAL_CLUSTER_TOL)
    real = [c for c in clusters if abs(c.value.imag) < 1e-4]
    assert len(real) == 1 and real[0].multiplicity == 2
    cert = dense_grid_certificate(params_star, 2.0)
    assert cert["condition_i"] and cert["equality_only_near_root"]


def test_validate_params_star_agrees_with_oracle(params_star):
    rep = validate(params_star)
    cert = dense_grid_certificate(params_star, rep.lambda0)
    assert rep.passed
    assert cert["condition_i"] and cert["condition_star"]
    assert rep.f_at_lambda0 > 0.0
    assert abs(rep.q_at_lambda0 - math.sqrt(rep.f_at_lambda0)) < 1e-8


def test_validate_zero_form_fails_condition_i():
    rep = validate(SurfaceParams(0, 0, 0, 1, 1))
    assert not rep.condition_i.passed
    assert not rep.passed


def test_validate_negative_q_on_i2_fails_star():
    # Q(lam) = lam^2 - 1 is negative throughout I2
    rep = validate(SurfaceParams(1.0, 0.0, -1.0, 1.0, 1.0))
    assert not rep.condition_star.passed


def test_validate_rejects_nonpositive_ab():
    with pytest.raises(InvalidParameterError):
        validate(SurfaceParams(1, 0, 1, -1.0, 1.0))


def test_lambda0_hits_target(params_star):
    lam0 = lambda0(params_star)
    assert abs(lam0 - 2.0) < 1e-8
    d = discriminant_poly(params_star)
    from touching_conics.poly import derivative

    assert abs(evaluate(d, lam0)) < 1e-9
    assert abs(evaluate(derivative(d), lam0)) < 1e-9
    assert f_value(params_star, lam0) > 0.0
    assert lam0 > params_star.b / params_star.a


def test_lambda0_requires_condition_i():
    with pytest.raises(PreconditionError):
        lambda0(SurfaceParams(0, 0, 1, 1, 1))


def test_intervals_unit_case(params_star):
    part = intervals(params_star)
    assert part.i1 == (-math.inf, -1.0)
    assert part.i2 == (-1.0, 0.0)
    assert part.i3 == (0.0, 1.0)
    assert part.i4minus == (1.0, part.lambda0)
    assert part.i4plus[0] == part.lambda0 and math.isinf(part.i4plus[1])
    assert not (-1.0 <= part.lambda0 <= 0.0)


def test_f_sign_pattern(params_star):
    part = intervals(params_star)
    samples = {
        "neg": [-5.0, 0.5 * part.i3[1]],
        "pos": [-0.5, 0.5 * (part.i4minus[0] + part.lambda0)],
    }
    for lam in samples["neg"]:
        assert f_value(params_star, lam) < 0.0
    for lam in samples["pos"]:
        assert f_value(params_star, lam) > 0.0


def test_singular_locus_params_star(params_star):
    pts = singular_locus(params_star)
    assert len(pts) == 3
    assert pts[0].location == "Pinf" and pts[0].kind is SingularKind.ELLIPTIC_E7
    assert pts[1].location == "PinfBar" and pts[1].kind is SingularKind.ELLIPTIC_E7
    assert pts[2].kind is SingularKind.ODP
    assert abs(pts[2].lam - 2.0) < 1e-6


def test_singular_locus_triple_root_is_not_odp():
    pts = singular_locus(TRIPLE_ROOT_PARAMS)
    axis = [p for p in pts if p.lam is not None]
    assert len(axis) == 1
    assert axis[0].kind is SingularKind.NON_ODP
    assert axis[0].multiplicity == 3
    # a triple root is a hard admissibility failure, not a diagnostic branch
    assert not validate(TRIPLE_ROOT_PARAMS).passed


def test_no_complex_multiple_roots_for_params_star(params_star):
    assert complex_multiple_roots(params_star) == []
    assert all(p.lam is None or abs(p.lam - 2.0) < 1e-6 for p in singular_locus(params_star))


def test_find_valid_params_deterministic(params_star):
    again = find_valid_params(SearchConfig())
    assert again == params_star
    assert validate(again) == validate(params_star)
    assert validate(again).passed


def test_find_valid_params_empty_range():
    with pytest.raises(NotFoundError):
        find_valid_params(SearchConfig(q0_steps=0))


def test_find_valid_params_bad_target():
    with pytest.raises(NotFoundError):
        find_valid_params(SearchConfig(lambda0=0.5))  # not right of b/a = 1


def test_grid_positivity_invariant(params_star):
    lam0 = lambda0(params_star)
    grid = np.linspace(-10.0, lam0 + 10.0, 100_000)
    q = (params_star.q0 * grid + params_star.q1) * grid + params_star.q2
    f = grid * (grid + 1.0) * (params_star.a * grid - params_star.b)
    disc = q * q - f
    scale = 1.0 + np.abs(grid) ** 4
    assert np.all(disc >= -1e-9 * scale)
    low = grid[disc < 1e-4 * scale]
    assert np.all(np.abs(low - lam0) < 0.1)
