"""Forms, brackets, flows: every exact operator is played against a finite
difference or a closed form computed by hand."""

import numpy as np
import pytest

from lcslab.calculus import (
    DiffeoMap,
    KForm,
    VectorField,
    bracket_values,
    exterior_derivative,
    flow_lie_derivative,
    flow_with_frame,
    form_on_field,
    interior_product,
    lie_bracket,
    lie_derivative,
    pullback,
    pushforward_field,
    rk4_flow,
    twisted_d,
    twisted_lie,
    twisted_lie_cartan,
    wedge,
    wedge_power,
)
from lcslab.errors import DegreeError


def rand_one_form(dim, rng):
    def lin(i):
        c0, c1 = rng.normal(size=2)
        sign = "-" if c1 < 0 else "+"
        return f"{c0:.6f} {sign} {abs(c1):.6f}*x{i % dim + 1}"
    return KForm(1, dim, {(i,): lin(i) for i in range(dim)})


def test_wedge_determinant_pairing(rng):
    dim = 4
    a = rand_one_form(dim, rng)
    b = rand_one_form(dim, rng)
    pts = rng.normal(size=(25, dim))
    u = rng.normal(size=(25, dim))
    v = rng.normal(size=(25, dim))
    want = (a.evaluate(pts, [u]) * b.evaluate(pts, [v])
            - a.evaluate(pts, [v]) * b.evaluate(pts, [u]))
    got = wedge(a, b).evaluate(pts, [u, v])
    assert np.max(np.abs(got - want)) < 1e-12


def test_wedge_antisymmetry(rng):
    dim = 3
    a = rand_one_form(dim, rng)
    b = rand_one_form(dim, rng)
    pts = rng.normal(size=(10, dim))
    u = rng.normal(size=(10, dim))
    v = rng.normal(size=(10, dim))
    lhs = wedge(a, b).evaluate(pts, [u, v])
    rhs = wedge(b, a).evaluate(pts, [u, v])
    assert np.max(np.abs(lhs + rhs)) < 1e-13
    assert np.max(np.abs(wedge(a, a).evaluate(pts, [u, v]))) < 1e-13


def test_wedge_above_top_degree_is_empty():
    dim = 2
    area = wedge(KForm.coordinate_differential(0, dim),
                 KForm.coordinate_differential(1, dim))
    over = wedge(area, KForm.coordinate_differential(0, dim))
    assert over.degree == 3 and not over.coeffs


def test_wedge_power():
    dim = 4
    omega = (wedge(KForm.coordinate_differential(0, dim), KForm.coordinate_differential(1, dim))
             + wedge(KForm.coordinate_differential(2, dim), KForm.coordinate_differential(3, dim)))
    top = wedge_power(omega, 2)
    pts = np.zeros((1, dim))
    frame = [np.eye(dim)[i][None, :] for i in range(dim)]
    # (dx12 + dx34)^2 = 2 dx1234
    assert abs(top.evaluate(pts, frame)[0] - 2.0) < 1e-14


def test_exterior_derivative_against_finite_difference(rng):
    dim = 3
    a = rand_one_form(dim, rng)
    pts = rng.normal(size=(12, dim))
    u = rng.normal(size=(12, dim))
    v = rng.normal(size=(12, dim))
    h = 1e-5

    def pair(points, w):
        return a.evaluate(points, [np.broadcast_to(w, points.shape)])

    fd = np.empty(12)
    for m in range(12):
        p = pts[m][None, :]
        du = (pair(p + h * u[m], v[m]) - pair(p - h * u[m], v[m])) / (2 * h)
        dv = (pair(p + h * v[m], u[m]) - pair(p - h * v[m], u[m])) / (2 * h)
        fd[m] = du[0] - dv[0]
    got = exterior_derivative(a).evaluate(pts, [u, v])
    assert np.max(np.abs(got - fd)) < 1e-7


def test_d_squared_is_zero_exactly(rng):
    dim = 4
    a = KForm(1, dim, {(0,): "sin(x2)*x3", (2,): "exp(x1) + x4^2"})
    dda = exterior_derivative(exterior_derivative(a))
    pts = rng.normal(size=(10, dim))
    args = [rng.normal(size=(10, dim)) for _ in range(3)]
    assert np.max(np.abs(dda.evaluate(pts, args))) == 0.0


def test_lie_bracket_against_finite_difference(rng):
    dim = 3
    x = VectorField.from_sources(["x2^2", "sin(x3)", "x1*x2"], dim)
    y = VectorField.from_sources(["exp(x3)", "x1", "0 - x2"], dim)
    pts = rng.normal(size=(8, dim))
    h = 1e-6
    xv = x.evaluate(pts)
    yv = y.evaluate(pts)
    dy_x = (y.evaluate(pts + h * xv) - y.evaluate(pts - h * xv)) / (2 * h)
    dx_y = (x.evaluate(pts + h * yv) - x.evaluate(pts - h * yv)) / (2 * h)
    want = dy_x - dx_y
    got = lie_bracket(x, y).evaluate(pts)
    assert np.max(np.abs(got - want)) < 1e-6
    assert np.max(np.abs(bracket_values(x, y, pts) - want)) < 1e-6


def test_bracket_orientation_frozen():
    # X = x2 d1, Y = d2: (DY)X - (DX)Y = -(1, 0)
    x = VectorField.from_sources(["x2", "0"], 2)
    y = VectorField.from_sources(["0", "1"], 2)
    got = lie_bracket(x, y).evaluate(np.array([[0.3, 0.8]]))
    assert np.max(np.abs(got - np.array([[-1.0, 0.0]]))) == 0.0


def test_interior_product(rng):
    dim = 4
    a = rand_one_form(dim, rng)
    b = rand_one_form(dim, rng)
    omega = wedge(a, b)
    x = VectorField.from_sources(["x2", "0 - x1", "x4^2", "1"], dim)
    pts = rng.normal(size=(10, dim))
    v = rng.normal(size=(10, dim))
    got = interior_product(x, omega).evaluate(pts, [v])
    want = omega.evaluate(pts, [x.evaluate(pts), v])
    assert np.max(np.abs(got - want)) < 1e-12


def test_form_on_field(rng):
    dim = 3
    a = rand_one_form(dim, rng)
    x = VectorField.from_sources(["x1", "x3", "0 - x2"], dim)
    pts = rng.normal(size=(10, dim))
    got = form_on_field(a, x).evaluate(pts)
    want = a.evaluate(pts, [x.evaluate(pts)])
    assert np.max(np.abs(got - want)) < 1e-13


def test_lie_derivative_cartan_and_flow(rng):
    dim = 3
    a = rand_one_form(dim, rng)
    x = VectorField.from_sources(["x2", "0 - x1", "x1*x3"], dim)
    pts = rng.normal(size=(6, dim))
    v = rng.normal(size=(6, dim))
    cartan = (interior_product(x, exterior_derivative(a))
              + exterior_derivative(interior_product(x, a)))
    exact = lie_derivative(x, a).evaluate(pts, [v])
    assert np.max(np.abs(exact - cartan.evaluate(pts, [v]))) < 1e-12
    fd, fd_err = flow_lie_derivative(x, a, pts, [v])
    assert np.max(np.abs(exact - fd)) < 1e-5 + 10 * fd_err


def test_twisted_d_decomposition(rng):
    dim = 4
    theta = KForm(1, dim, {(0,): "0.3", (2,): "0.2"})
    a = rand_one_form(dim, rng)
    pts = rng.normal(size=(10, dim))
    u = rng.normal(size=(10, dim))
    v = rng.normal(size=(10, dim))
    got = twisted_d(theta, a).evaluate(pts, [u, v])
    want = (exterior_derivative(a).evaluate(pts, [u, v])
            - wedge(theta, a).evaluate(pts, [u, v]))
    assert np.max(np.abs(got - want)) < 1e-13


def test_twisted_d_warns_on_nonclosed_twist():
    theta = KForm(1, 2, {(0,): "x2"})
    a = KForm(1, 2, {(1,): "x1"})
    with pytest.warns(UserWarning, match="not closed"):
        twisted_d(theta, a, check_points=np.array([[0.3, 0.4]]))


def test_twisted_square_zero(rng):
    dim = 4
    theta = KForm(1, dim, {(1,): "0.7"})
    f = KForm.from_scalar("sin(x1)*x4", dim)
    dd = twisted_d(theta, twisted_d(theta, f))
    pts = rng.normal(size=(10, dim))
    u = rng.normal(size=(10, dim))
    v = rng.normal(size=(10, dim))
    assert np.max(np.abs(dd.evaluate(pts, [u, v]))) < 1e-14


def test_twisted_lie_routes_agree(rng):
    dim = 4
    theta = KForm(1, dim, {(0,): "1/2"})
    a = rand_one_form(dim, rng)
    x = VectorField.from_sources(["x2", "0 - x1", "0", "x3"], dim)
    pts = rng.normal(size=(8, dim))
    v = rng.normal(size=(8, dim))
    direct = twisted_lie(theta, x, a).evaluate(pts, [v])
    cartan = twisted_lie_cartan(theta, x, a).evaluate(pts, [v])
    assert np.max(np.abs(direct - cartan)) < 1e-12


def test_pullback_against_jacobian(rng):
    dim = 2
    phi = DiffeoMap.from_sources(["x1*cos(x2)", "x1*sin(x2)"], dim)
    a = rand_one_form(dim, rng)
    pts = np.abs(rng.normal(size=(10, dim))) + 0.5
    v = rng.normal(size=(10, dim))
    got = pullback(phi, a).evaluate(pts, [v])
    jac = phi.jacobian_at(pts)
    pushed = np.einsum("mij,mj->mi", jac, v)
    want = a.evaluate(phi.apply(pts), [pushed])
    assert np.max(np.abs(got - want)) < 1e-11


def test_pullback_composes(rng):
    dim = 2
    phi = DiffeoMap.from_sources(["x1 + x2^2", "x2"], dim)
    psi = DiffeoMap.from_sources(["2*x1", "x1 + x2"], dim)
    a = rand_one_form(dim, rng)
    pts = rng.normal(size=(8, dim))
    v = rng.normal(size=(8, dim))
    # (phi . psi)* a = psi* (phi* a)
    lhs = pullback(phi.compose(psi), a).evaluate(pts, [v])
    rhs = pullback(psi, pullback(phi, a)).evaluate(pts, [v])
    assert np.max(np.abs(lhs - rhs)) < 1e-11


def test_jacobian_matches_finite_difference(rng):
    dim = 3
    phi = DiffeoMap.from_sources(["x1*x2", "sin(x3)", "exp(x1) - x2"], dim)
    pts = rng.normal(size=(6, dim))
    jac = phi.jacobian_at(pts)
    h = 1e-6
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = h
        fd = (phi.apply(pts + e) - phi.apply(pts - e)) / (2 * h)
        assert np.max(np.abs(jac[:, :, k] - fd)) < 1e-6


def test_pushforward_field_round_trip(rng):
    dim = 2
    phi = DiffeoMap.from_sources(["x1 + 1", "2*x2"], dim)
    inv = DiffeoMap.from_sources(["x1 - 1", "x2/2"], dim)
    x = VectorField.from_sources(["x2", "x1"], dim)
    pushed = pushforward_field(phi, x, inv)
    pts = rng.normal(size=(10, dim))
    # (phi_* X)(y) = Dphi(phi^-1 y) X(phi^-1 y)
    pre = inv.apply(pts)
    want = np.einsum("mij,mj->mi", phi.jacobian_at(pre), x.evaluate(pre))
    assert np.max(np.abs(pushed.evaluate(pts) - want)) < 1e-12


def test_rk4_flow_rotation_closed_form(rng):
    dim = 2
    x = VectorField.from_sources(["0 - x2", "x1"], dim)
    pts = rng.normal(size=(12, dim))
    t = 0.7
    end = rk4_flow(x, pts, t)
    rot = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    assert np.max(np.abs(end - pts @ rot.T)) < 1e-10


def test_flow_with_frame_transports_linearly(rng):
    dim = 2
    x = VectorField.from_sources(["0 - x2", "x1"], dim)
    pts = rng.normal(size=(6, dim))
    vecs = rng.normal(size=(6, dim))
    t = 0.9
    end, frames = flow_with_frame(x, pts, [vecs], t, steps=200)
    rot = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    assert np.max(np.abs(end - pts @ rot.T)) < 1e-9
    assert np.max(np.abs(frames[0] - vecs @ rot.T)) < 1e-9


def test_kform_validation():
    with pytest.raises(DegreeError):
        KForm(2, 3, {(1, 0): "1"})
    with pytest.raises(DegreeError):
        KForm(2, 3, {(0, 0): "1"})
    with pytest.raises(DegreeError):
        KForm(1, 2, {(0, 1): "1"})


def test_kform_scaling_and_sum(rng):
    dim = 3
    a = rand_one_form(dim, rng)
    pts = rng.normal(size=(8, dim))
    v = rng.normal(size=(8, dim))
    doubled = (a + a).evaluate(pts, [v])
    scaled = a.scaled(2.0).evaluate(pts, [v])
    assert np.max(np.abs(doubled - scaled)) < 1e-14
    assert np.max(np.abs(a.scaled("x1").evaluate(pts, [v])
                         - pts[:, 0] * a.evaluate(pts, [v]))) < 1e-13
