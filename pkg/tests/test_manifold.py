"""Constraint sets: sampling, projection, tangent frames, and the damped
Newton corrector that has to survive exponential constraints."""

import numpy as np
import pytest

from lcslab.errors import EvaluationDomainError, NonConvergenceError
from lcslab.manifold import CONSTRAINT_TOL, ConstrainedManifold, gauss_newton_zero


def test_ambient_has_no_constraints(rng):
    m = ConstrainedManifold.ambient(3)
    assert m.codim == 0 and m.tangent_dim == 3
    pts = m.sample(10, rng)
    assert pts.shape == (10, 3)
    assert m.contains(pts)
    basis = m.tangent_basis(pts)
    assert basis.shape == (10, 3, 3)


def test_sphere_sampling(rng):
    m = ConstrainedManifold.unit_sphere(4)
    pts = m.sample(40, rng)
    assert np.max(np.abs(np.sum(pts ** 2, axis=1) - 1.0)) < 1e-10
    m.require_membership(pts)


def test_tangent_basis_orthonormal_in_kernel(rng):
    m = ConstrainedManifold.unit_sphere(4)
    pts = m.sample(10, rng)
    basis = m.tangent_basis(pts)
    assert basis.shape == (10, 4, 3)
    jac = m.constraint_jacobian(pts)
    for k in range(10):
        b = basis[k]
        assert np.max(np.abs(b.T @ b - np.eye(3))) < 1e-10
        assert np.max(np.abs(jac[k] @ b)) < 1e-10


def test_project_converges(rng):
    m = ConstrainedManifold.unit_sphere(3)
    raw = rng.normal(size=(12, 3)) * 2.0 + 0.1
    pts = m.project(raw)
    assert np.max(np.abs(np.sum(pts ** 2, axis=1) - 1.0)) < 1e-10


def test_product_stacks_constraints(rng):
    circle = ConstrainedManifold.unit_sphere(2)
    sphere = ConstrainedManifold.unit_sphere(4)
    both = circle.product(sphere)
    assert both.ambient_dim == 6 and both.codim == 2
    pts = both.sample(8, rng)
    assert np.max(np.abs(np.sum(pts[:, :2] ** 2, axis=1) - 1.0)) < 1e-10
    assert np.max(np.abs(np.sum(pts[:, 2:] ** 2, axis=1) - 1.0)) < 1e-10


def test_membership_guard():
    m = ConstrainedManifold.unit_sphere(3)
    with pytest.raises(EvaluationDomainError):
        m.require_membership(np.array([[2.0, 0.0, 0.0]]))


def test_degenerate_level_does_not_sample(rng):
    # the only solution is the origin, where the gradient vanishes
    m = ConstrainedManifold(2, ("x1^2 + x2^2",))
    with pytest.raises(NonConvergenceError):
        m.sample(4, rng)


def test_newton_handles_exponential_overshoot(rng):
    # starts inside the level see a nearly flat exponential, so the full
    # Newton step is enormous and its residual overflows; the backtracking
    # line search has to absorb that and still converge
    m = ConstrainedManifold(2, ("exp(6*(x1^2 + x2^2 - 1)) - 1",))
    raw = rng.normal(size=(10, 2)) * 0.15
    pts = m.project(raw)
    assert np.all(np.isfinite(pts))
    assert np.max(np.abs(np.sum(pts ** 2, axis=1) - 1.0)) < 1e-8


def test_gauss_newton_zero_accepts_converged(rng):
    m = ConstrainedManifold.unit_sphere(3)
    start = rng.normal(size=(6, 3)) * 1.5 + 0.2
    out = gauss_newton_zero(m.constraints, start)
    res = np.abs(np.sum(out ** 2, axis=1) - 1.0)
    assert np.max(res) <= CONSTRAINT_TOL


def test_sample_keep_filter(rng):
    m = ConstrainedManifold.unit_sphere(3)
    pts = m.sample(12, rng, keep=lambda p: p[:, 0] > 0.1)
    assert pts.shape[0] == 12
    assert np.min(pts[:, 0]) > 0.1


def test_jacobian_rank_margin(rng):
    m = ConstrainedManifold.unit_sphere(3)
    pts = m.sample(6, rng)
    # gradient of |x|^2 - 1 on the sphere has length 2
    assert abs(m.jacobian_rank_margin(pts) - 2.0) < 1e-10
