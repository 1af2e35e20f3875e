"""Locally conformally symplectic structures on constrained manifolds.

The defining data is a non-degenerate 2-form together with a closed 1-form
satisfying d(omega) = theta ^ omega on tangent vectors. Duality against
omega is computed on orthonormal tangent bases, so every dual object comes
back as an ambient vector lying in the tangent space.

Convention: the omega-dual v of a covector alpha satisfies
omega(v, w) = alpha(w) for tangent w (the dual vector sits in the left slot).
"""

import numpy as np

from .calculus import KForm, NumericVectorField, exterior_derivative, twisted_d, wedge
from .errors import DegreeError, DimensionMismatchError, SingularSystemError
from .expr import ScalarField, as_field
from .manifold import ConstrainedManifold
from .numerics import null_space, svd_rank
from .report import make_floor_result, make_result, attaining_point

NONDEGENERACY_FLOOR = 1e-8


class LcsStructure:
    """A 2-form and its twisting 1-form over a constrained manifold."""

    __slots__ = ("omega", "theta", "manifold")

    def __init__(self, omega: KForm, theta: KForm, manifold: ConstrainedManifold):
        if omega.degree != 2:
            raise DegreeError("structure form must have degree 2")
        if theta.degree != 1:
            raise DegreeError("twisting form must have degree 1")
        if omega.dim != manifold.ambient_dim or theta.dim != manifold.ambient_dim:
            raise DimensionMismatchError("forms and manifold disagree on ambient dimension")
        self.omega = omega
        self.theta = theta
        self.manifold = manifold

    @property
    def dim(self) -> int:
        return self.manifold.ambient_dim

    def tangent_gram(self, points, bases=None):
        """omega on the orthonormal tangent basis: (m, d, d) antisymmetric."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        bases = self.manifold.tangent_basis(pts) if bases is None else bases
        matrices = self.omega.matrix_at(pts)
        return np.matmul(np.transpose(bases, (0, 2, 1)), np.matmul(matrices, bases))


class ConformalGauge:
    """A gauge function f, acting as omega -> e^f omega, theta -> theta + df."""

    __slots__ = ("f",)

    def __init__(self, f):
        self.f = f if isinstance(f, ScalarField) else f

    @classmethod
    def of(cls, value, dim: int) -> "ConformalGauge":
        return cls(as_field(value, dim))


def verify_lcs(s: LcsStructure, samples, rng, tol: float = 1e-9,
               floor: float = NONDEGENERACY_FLOOR, prefix: str = "lcs"):
    """Closedness, the defining identity on tangent triples, non-degeneracy."""
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    s.manifold.require_membership(pts)
    bases = s.manifold.tangent_basis(pts)
    d = bases.shape[2]

    def tangent_draw():
        coeff = rng.normal(size=(pts.shape[0], d))
        return np.einsum("mnd,md->mn", bases, coeff)

    u, v, w = tangent_draw(), tangent_draw(), tangent_draw()

    d_theta = exterior_derivative(s.theta)
    closed_res = np.abs(d_theta.evaluate(pts, [u, v]))

    identity = exterior_derivative(s.omega) - wedge(s.theta, s.omega)
    ident_res = np.abs(identity.evaluate(pts, [u, v, w]))

    gram = s.tangent_gram(pts, bases)
    margins = np.abs(np.linalg.det(gram))

    return [
        make_result(f"{prefix}.theta_closed", float(np.max(closed_res)), tol,
                    anchor="d(twisting form) = 0 on tangent pairs",
                    point=attaining_point(pts, closed_res)),
        make_result(f"{prefix}.defining_identity", float(np.max(ident_res)), tol,
                    anchor="d(omega) - twisting ^ omega = 0 on tangent triples",
                    point=attaining_point(pts, ident_res)),
        make_floor_result(f"{prefix}.nondegenerate", float(np.min(margins)), floor,
                          anchor="det of tangent pairing matrix stays away from zero",
                          point=pts[int(np.argmin(margins))]),
    ]


def omega_dual_values(s: LcsStructure, covectors, points, bases=None) -> np.ndarray:
    """Solve omega(v, .) = alpha(.) on tangent spaces for a batch of covectors.

    covectors holds alpha as ambient row vectors, shape (m, N).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    cov = np.atleast_2d(np.asarray(covectors, dtype=float))
    bases = s.manifold.tangent_basis(pts) if bases is None else bases
    gram = s.tangent_gram(pts, bases)
    sv = np.linalg.svd(gram, compute_uv=False)
    if np.any(sv[:, -1] <= 1e-12 * np.maximum(sv[:, 0], 1e-300)):
        raise SingularSystemError("structure form is degenerate on a tangent space")
    rhs = np.einsum("mnd,mn->md", bases, cov)
    # omega(v, b_j) = sum_i c_i gram[i, j]; row vector c^T gram = rhs
    coeff = np.linalg.solve(np.transpose(gram, (0, 2, 1)), rhs[:, :, None])[:, :, 0]
    return np.einsum("mnd,md->mn", bases, coeff)


def omega_dual_covector(s: LcsStructure, alpha: KForm, point) -> np.ndarray:
    """The tangent vector v with omega(v, w) = alpha(w) for all tangent w."""
    if alpha.degree != 1:
        raise DegreeError("dual of a non-1-form")
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    s.manifold.require_membership(pts)
    return omega_dual_values(s, alpha.covector_at(pts), pts)[0]


def omega_dual_subspace(s: LcsStructure, w_vectors, point):
    """Basis of the omega-orthogonal complement of span(w_vectors) in T_p.

    Returns (basis columns (N, k), flagged). Dimensions satisfy
    span dim + k = tangent dim when the structure is non-degenerate.
    """
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    s.manifold.require_membership(pts)
    base = s.manifold.tangent_basis(pts)[0]
    w = np.atleast_2d(np.asarray(w_vectors, dtype=float))
    if w.shape[0] == s.dim and w.shape[1] != s.dim:
        w = w.T  # accept column layout
    matrix = s.omega.matrix_at(pts)[0]
    # rows: one equation omega(v, w_j) = 0 per spanning vector
    system = w @ matrix.T @ base
    null, flagged = null_space(system)
    return base @ null, flagged


def anti_lee_field(s: LcsStructure) -> NumericVectorField:
    """The omega-dual of the twisting form, as a pointwise-solved field."""
    theta = s.theta

    def evaluator(points):
        return omega_dual_values(s, theta.covector_at(points), points)

    return NumericVectorField(s.dim, evaluator)


def conformal_rescale(s: LcsStructure, gauge: ConformalGauge) -> LcsStructure:
    f = as_field(gauge.f, s.dim)
    omega = s.omega.scaled(f.exp())
    theta = s.theta + exterior_derivative(KForm.from_scalar(f, s.dim))
    return LcsStructure(omega, theta, s.manifold)


def twisted_poisson(s: LcsStructure, f, g, points) -> np.ndarray:
    """Bracket of two functions through their twisted-differential duals."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    s.manifold.require_membership(pts)
    f = as_field(f, s.dim)
    g = as_field(g, s.dim)
    df = twisted_d(s.theta, KForm.from_scalar(f, s.dim))
    dg = twisted_d(s.theta, KForm.from_scalar(g, s.dim))
    bases = s.manifold.tangent_basis(pts)
    vf = omega_dual_values(s, df.covector_at(pts), pts, bases)
    vg = omega_dual_values(s, dg.covector_at(pts), pts, bases)
    return s.omega.evaluate(pts, [vf, vg])


def h0_vanishing_probe(s: LcsStructure, basis, samples):
    """Least-squares floor of |d_theta u|^2 over the span of the basis.

    Minimizes the mean squared tangential twisted differential of
    u = sum c_i b_i over unit coefficient vectors. A large floor certifies
    that no function in the span is twisted-closed; an exact gauge in the
    span drives it to zero. Returns (floor, coefficients).
    """
    basis = [as_field(b, s.dim) for b in basis]
    if not basis:
        return float("inf"), np.zeros(0)
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    s.manifold.require_membership(pts)
    m = pts.shape[0]

    values = np.stack([b.evaluate(pts) * np.ones(m) for b in basis], axis=1)
    gram = values.T @ values / m
    gram_sv = np.linalg.svd(gram, compute_uv=False)
    if gram_sv[-1] <= 1e-12 * max(gram_sv[0], 1e-300):
        raise SingularSystemError("basis functions are dependent at the samples")

    bases = s.manifold.tangent_basis(pts)
    theta_rows = s.theta.covector_at(pts)
    rows = []
    for i, b in enumerate(basis):
        grad = np.stack([b.partial(j).evaluate(pts) * np.ones(m)
                         for j in range(s.dim)], axis=1)
        ambient = grad - values[:, i][:, None] * theta_rows
        rows.append(np.einsum("mn,mnd->md", ambient, bases))
    # design[sample*direction, basis index]
    design = np.stack(rows, axis=2).reshape(-1, len(basis))
    eigvals, eigvecs = np.linalg.eigh(design.T @ design / m)
    return float(max(eigvals[0], 0.0)), eigvecs[:, 0]
