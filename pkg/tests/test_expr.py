"""Expression layer: grammar, exact derivatives against finite differences,
and the error taxonomy."""

import numpy as np
import pytest

from lcslab import expr
from lcslab.errors import (
    CoordinateRangeError,
    DimensionMismatchError,
    EvaluationDomainError,
    ExprSyntaxError,
)

CASES = [
    ("x1^2 + 3*x2 - 1/2", 3, lambda p, t, s: p[:, 0] ** 2 + 3 * p[:, 1] - 0.5),
    ("sin(x1)*cos(x2) + exp(x3)", 3,
     lambda p, t, s: np.sin(p[:, 0]) * np.cos(p[:, 1]) + np.exp(p[:, 2])),
    ("sqrt(x1^2 + x2^2)", 2, lambda p, t, s: np.hypot(p[:, 0], p[:, 1])),
    ("atan2(x2, x1)", 2, lambda p, t, s: np.arctan2(p[:, 1], p[:, 0])),
    ("x1*t + s^2", 2, lambda p, t, s: p[:, 0] * t + s ** 2),
    ("x1^(3/2) / (1 + x2^2)", 2,
     lambda p, t, s: p[:, 0] ** 1.5 / (1 + p[:, 1] ** 2)),
    ("-x1 + 2", 2, lambda p, t, s: -p[:, 0] + 2),
    ("ln(1 + x1^2)", 1, lambda p, t, s: np.log(1 + p[:, 0] ** 2)),
]


def test_parse_eval_matches_numpy(rng):
    for src, dim, want in CASES:
        f = expr.compiled(expr.parse(src, dim))
        pts = np.abs(rng.normal(size=(30, dim))) + 0.1
        got = f(pts, 0.7, -0.3) * np.ones(30)
        assert np.max(np.abs(got - want(pts, 0.7, -0.3))) < 1e-12, src


def test_precedence_and_rational_powers():
    pts = np.array([[0.5, 0.25]])
    # the exponent grabs INT/INT greedily
    e = expr.parse("2*x1^3/2", 2)
    assert abs(expr.compiled(e)(pts, 0, 0)[0] - 2 * 0.5 ** 1.5) < 1e-15
    e = expr.parse("x1^-2", 2)
    assert abs(expr.compiled(e)(pts, 0, 0)[0] - 4.0) < 1e-15
    e = expr.parse("(-x1)^2", 2)
    assert abs(expr.compiled(e)(pts, 0, 0)[0] - 0.25) < 1e-15


def test_to_source_round_trip(rng):
    for src, dim, _ in CASES:
        e = expr.parse(src, dim)
        again = expr.parse(expr.to_source(e), dim)
        pts = np.abs(rng.normal(size=(20, dim))) + 0.1
        a = expr.compiled(e)(pts, 0.3, 0.9) * np.ones(20)
        b = expr.compiled(again)(pts, 0.3, 0.9) * np.ones(20)
        assert np.max(np.abs(a - b)) == 0.0, src


def _central(f, pts, i, h=1e-6):
    up = pts.copy()
    dn = pts.copy()
    up[:, i] += h
    dn[:, i] -= h
    return (f(up, 0.4, 0.2) - f(dn, 0.4, 0.2)) / (2 * h)


def test_partial_matches_central_difference(rng):
    for src, dim, _ in CASES:
        e = expr.parse(src, dim)
        f = expr.compiled(e)
        pts = np.abs(rng.normal(size=(15, dim))) + 0.3
        for i in range(dim):
            exact = expr.compiled(expr.partial(e, i))(pts, 0.4, 0.2) * np.ones(15)
            fd = _central(f, pts, i) * np.ones(15)
            scale = 1.0 + np.max(np.abs(exact))
            assert np.max(np.abs(exact - fd)) < 5e-7 * scale, (src, i)


def test_param_partial(rng):
    e = expr.parse("x1*t^2 + s*x1", 1)
    dt = expr.param_partial(e, "t")
    ds = expr.param_partial(e, "s")
    pts = rng.normal(size=(10, 1))
    assert np.max(np.abs(expr.compiled(dt)(pts, 3.0, 0.0) - 6.0 * pts[:, 0])) < 1e-12
    assert np.max(np.abs(expr.compiled(ds)(pts, 3.0, 0.0) - pts[:, 0])) < 1e-12


def test_fd_helpers_agree_with_exact_rules(rng):
    f = expr.ScalarField.from_source("exp(x1)*sin(x2)", 2)
    p = np.array([0.3, -0.7])
    for i in range(2):
        exact = f.partial(i).evaluate(p[None, :])[0]
        assert abs(expr.fd_partial(f, p, i) - exact) < 1e-7


def test_substitute_and_shift():
    e = expr.parse("x1 + 2*x2", 2)
    swapped = expr.substitute(e, coord_map={0: expr.parse("x2", 2),
                                            1: expr.parse("x1", 2)})
    pts = np.array([[1.0, 10.0]])
    assert expr.compiled(swapped)(pts, 0, 0)[0] == 12.0
    shifted = expr.shift_coords(expr.parse("x1*x2", 2), 2)
    assert expr.compiled(shifted)(np.array([[0, 0, 3.0, 4.0]]), 0, 0)[0] == 12.0


def test_uses_param():
    assert expr.uses_param(expr.parse("x1*t", 1), "t")
    assert not expr.uses_param(expr.parse("x1*t", 1), "s")


@pytest.mark.parametrize("src", ["x1 +* 2", "3 - -x1", "x1 @ 2", "foo(x1)",
                                 "(x1", "x1^x2", "atan2(x1)"])
def test_syntax_errors(src):
    with pytest.raises(ExprSyntaxError):
        expr.parse(src, 2)


def test_syntax_error_carries_offset():
    with pytest.raises(ExprSyntaxError, match="offset 4"):
        expr.parse("x1 +* 2", 2)


def test_coordinate_range_error():
    with pytest.raises(CoordinateRangeError):
        expr.parse("x4", 3)
    expr.parse("x4", 4)  # boundary is fine


def test_field_domain_error():
    f = expr.ScalarField.from_source("ln(x1)", 1)
    with pytest.raises(EvaluationDomainError):
        f.evaluate(np.array([[-2.0]]))
    f = expr.ScalarField.from_source("1/x1", 1)
    with pytest.raises(EvaluationDomainError):
        f.evaluate(np.array([[0.0]]))


def test_scalar_field_arithmetic(rng):
    dim = 2
    f = expr.ScalarField.from_source("x1", dim)
    g = expr.ScalarField.from_source("x2", dim)
    pts = rng.normal(size=(12, dim))
    combo = (f * g + f - g).evaluate(pts)
    want = pts[:, 0] * pts[:, 1] + pts[:, 0] - pts[:, 1]
    assert np.max(np.abs(combo - want)) < 1e-14
    assert np.max(np.abs(f.exp().evaluate(pts) - np.exp(pts[:, 0]))) < 1e-12


def test_scalar_field_dimension_guard():
    f = expr.ScalarField.from_source("x1 + x2", 2)
    with pytest.raises(DimensionMismatchError):
        f.evaluate(np.zeros((3, 4)))
