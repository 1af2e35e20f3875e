"""Group actions with conformal cocycles and momentum data.

An action is given through one-parameter flow families (one per algebra
basis element, parameter symbol t) plus a sampled bag of finite elements,
each carrying its inverse and its conformal cocycle. Cocycles of composites
follow phi_{gh} = phi_g . h + phi_h, so elements built from the flows stay
exact expression objects all the way through.

Momentum data is supplied, never solved for: the twisted Hamiltonian
condition i_{X_a} omega = d_theta rho_a is verified against it.
"""

import numpy as np

from .calculus import (DiffeoMap, KForm, VectorField, form_on_field,
                       interior_product, pushforward_at, twisted_d)
from .errors import DimensionMismatchError, UnsupportedGroupError
from .expr import Const, ScalarField, as_field, call, mul, add
from .lcs import (ConformalGauge, LcsStructure, anti_lee_field, conformal_rescale,
                  omega_dual_values, twisted_poisson)
from .numerics import circle_nodes, matrix_exp_series
from .report import make_result, attaining_point

ALGEBRA_TOL = 1e-12


class LieAlgebraSpec:
    """Structure constants c[i][j][l] for [a_i, a_j] = sum_l c[i][j][l] a_l."""

    __slots__ = ("dim", "structure_constants")

    def __init__(self, structure_constants):
        c = np.asarray(structure_constants, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise DimensionMismatchError("structure constants must be a cubic array")
        self.dim = c.shape[0]
        self.structure_constants = c
        anti = np.max(np.abs(c + np.transpose(c, (1, 0, 2))))
        if anti > ALGEBRA_TOL:
            raise DimensionMismatchError(
                f"structure constants are not antisymmetric (residual {anti:.3e})")
        jac = np.einsum("abm,mcl->abcl", c, c)
        jacobi = jac + np.transpose(jac, (1, 2, 0, 3)) + np.transpose(jac, (2, 0, 1, 3))
        worst = np.max(np.abs(jacobi)) if c.size else 0.0
        if worst > ALGEBRA_TOL:
            raise DimensionMismatchError(
                f"structure constants violate the Jacobi identity (residual {worst:.3e})")

    @classmethod
    def abelian(cls, dim: int) -> "LieAlgebraSpec":
        return cls(np.zeros((dim, dim, dim)))

    def bracket(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return np.einsum("i,j,ijl->l", a, b, self.structure_constants)

    def ad_matrix(self, a) -> np.ndarray:
        """Matrix of b -> [a, b]."""
        a = np.asarray(a, dtype=float)
        return np.einsum("i,ijl->lj", a, self.structure_constants)

    @property
    def is_abelian(self) -> bool:
        return not np.any(self.structure_constants)


class GroupElement:
    """A sampled group element: the map, its inverse, and its cocycle."""

    __slots__ = ("map", "inverse", "cocycle", "factors")

    def __init__(self, map: DiffeoMap, inverse: DiffeoMap, cocycle: ScalarField,
                 factors=()):
        self.map = map
        self.inverse = inverse
        self.cocycle = cocycle
        self.factors = tuple(factors)

    def inverse_cocycle(self) -> ScalarField:
        """phi of the inverse element: -phi_g composed with g^{-1}."""
        return -(self.cocycle.compose(list(self.inverse.components)))


class GroupAction:
    """Flows, finite elements, and cocycle families for one group action."""

    __slots__ = ("algebra", "flows", "flow_cocycles", "elements", "torus_rank")

    def __init__(self, algebra: LieAlgebraSpec, flows, flow_cocycles=None,
                 elements=(), torus_rank=None):
        self.algebra = algebra
        self.flows = tuple(flows)
        if len(self.flows) != algebra.dim:
            raise DimensionMismatchError(
                f"{algebra.dim}-dimensional algebra needs {algebra.dim} flows, "
                f"got {len(self.flows)}")
        dim = self.flows[0].source_dim
        if any(f.source_dim != dim for f in self.flows):
            raise DimensionMismatchError(
                "flows act on spaces of different dimensions")
        if flow_cocycles is None:
            flow_cocycles = [ScalarField.constant(0.0, dim) for _ in self.flows]
        self.flow_cocycles = tuple(as_field(c, dim) for c in flow_cocycles)
        self.elements = tuple(elements)
        self.torus_rank = torus_rank

    @property
    def ambient_dim(self) -> int:
        return self.flows[0].source_dim

    def fundamental_field(self, index: int) -> VectorField:
        """Generator of flow `index`: the t-derivative of the family at t = 0."""
        return self.flows[index].velocity_field(0.0)

    def fundamental_fields(self):
        return [self.fundamental_field(i) for i in range(self.algebra.dim)]

    def element_at(self, index: int, t: float) -> GroupElement:
        """Finite element exp(t a_index) with cocycle from the flow family."""
        flow = self.flows[index]
        return GroupElement(
            flow.at_param("t", float(t)),
            flow.at_param("t", -float(t)),
            self.flow_cocycles[index].at_param("t", float(t)),
            factors=((index, float(t)),))

    def compose_elements(self, g: GroupElement, h: GroupElement) -> GroupElement:
        """gh, with the cocycle composed by the cocycle rule."""
        return GroupElement(
            g.map.compose(h.map),
            h.inverse.compose(g.inverse),
            g.cocycle.compose(list(h.map.components)) + h.cocycle,
            factors=g.factors + h.factors)

    def adjoint_matrix(self, element: GroupElement) -> np.ndarray:
        """Ad(g) from the element's exponential factors."""
        out = np.eye(self.algebra.dim)
        for index, t in element.factors:
            basis = np.zeros(self.algebra.dim)
            basis[index] = 1.0
            out = out @ matrix_exp_series(t * self.algebra.ad_matrix(basis))
        return out

    def coadjoint_matrix(self, element: GroupElement) -> np.ndarray:
        """Matrix sending mu to mu . Ad(g^{-1})."""
        inv = GroupElement(element.inverse, element.map,
                           element.inverse_cocycle(),
                           factors=tuple((i, -t) for i, t in reversed(element.factors)))
        return self.adjoint_matrix(inv).T

    def with_gauge_cocycles(self, gauge: ConformalGauge) -> "GroupAction":
        """The same action acting on e^f omega: cocycles become f . g - f."""
        f = as_field(gauge.f, self.ambient_dim)
        cocycles = [f.compose(list(flow.components)) - f for flow in self.flows]
        elements = [GroupElement(e.map,
                                 e.inverse,
                                 f.compose(list(e.map.components)) - f,
                                 factors=e.factors)
                    for e in self.elements]
        return GroupAction(self.algebra, self.flows, cocycles, elements,
                           torus_rank=self.torus_rank)

    def sampled_elements(self, rng, count: int, spread: float = 1.0):
        """Elements drawn from the flows at random parameter values."""
        out = []
        for _ in range(count):
            index = int(rng.integers(self.algebra.dim))
            g = self.element_at(index, float(rng.uniform(-spread, spread)))
            if self.algebra.dim > 1 and rng.uniform() < 0.5:
                other = int(rng.integers(self.algebra.dim))
                g = self.compose_elements(
                    g, self.element_at(other, float(rng.uniform(-spread, spread))))
            out.append(g)
        return out


class MomentumData:
    """One component function per algebra basis element."""

    __slots__ = ("rho",)

    def __init__(self, rho):
        comps = tuple(rho)
        if not comps:
            raise DimensionMismatchError("momentum data needs at least one component")
        dim = comps[0].dim
        if any(c.dim != dim for c in comps):
            raise DimensionMismatchError("momentum components disagree on dimension")
        self.rho = comps

    @classmethod
    def from_sources(cls, sources, dim: int) -> "MomentumData":
        return cls(tuple(as_field(s, dim) for s in sources))

    @property
    def k(self) -> int:
        return len(self.rho)

    @property
    def dim(self) -> int:
        return self.rho[0].dim

    def values(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.stack([r.evaluate(pts) * np.ones(pts.shape[0]) for r in self.rho],
                        axis=1)

    def pairing(self, xi) -> "ScalarField":
        """The scalar field x -> mu(x)(xi) for a dual vector xi."""
        xi = np.asarray(xi, dtype=float)
        acc = ScalarField.constant(0.0, self.dim)
        for coeff, r in zip(xi, self.rho):
            acc = acc + float(coeff) * r
        return acc


def rescaled_momentum(m: MomentumData, gauge: ConformalGauge) -> MomentumData:
    f = as_field(gauge.f, m.dim)
    ef = f.exp()
    return MomentumData(tuple(ef * r for r in m.rho))


def verify_conformal_action(act: GroupAction, s: LcsStructure, samples, rng,
                            elements=None, tol: float = 1e-9,
                            prefix: str = "action"):
    """g* omega = e^{phi_g} omega for each element, and the cocycle rule."""
    from .calculus import pullback

    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    elements = act.elements if elements is None else elements
    s.manifold.require_membership(pts)
    bases = s.manifold.tangent_basis(pts)
    d = bases.shape[2]

    def tangent_draw():
        coeff = rng.normal(size=(pts.shape[0], d))
        return np.einsum("mnd,md->mn", bases, coeff)

    u, v = tangent_draw(), tangent_draw()
    base_vals = s.omega.evaluate(pts, [u, v])

    worst = 0.0
    worst_point = pts[0]
    for element in elements:
        pulled = pullback(element.map, s.omega)
        scale = np.exp(element.cocycle.evaluate(pts) * np.ones(pts.shape[0]))
        res = np.abs(pulled.evaluate(pts, [u, v]) - scale * base_vals)
        if np.max(res) > worst:
            worst = float(np.max(res))
            worst_point = pts[int(np.argmax(res))]

    results = [make_result(f"{prefix}.conformal_pullback", worst, tol,
                           anchor="pullback of omega by each element rescales "
                                  "by exp of its cocycle",
                           point=worst_point)]

    worst = 0.0
    worst_point = pts[0]
    for i in range(act.algebra.dim):
        for ta, tb in ((0.3, 0.5), (-0.7, 0.2)):
            g = act.element_at(i, ta)
            h = act.element_at(i, tb)
            gh = act.compose_elements(g, h)
            direct = act.element_at(i, ta + tb)
            res = np.abs(gh.cocycle.evaluate(pts) * np.ones(pts.shape[0])
                         - direct.cocycle.evaluate(pts) * np.ones(pts.shape[0]))
            if np.max(res) > worst:
                worst = float(np.max(res))
                worst_point = pts[int(np.argmax(res))]
    results.append(make_result(f"{prefix}.cocycle_rule", worst, tol,
                               anchor="cocycle of a product is cocycle of the first "
                                      "composed with the second plus the second's",
                               point=worst_point))
    return results


def verify_twisted_hamiltonian(act: GroupAction, s: LcsStructure, m: MomentumData,
                               samples, rng, tol: float = 1e-9,
                               prefix: str = "momentum"):
    """d_theta rho_a = i_{X_a} omega on tangent vectors, plus the cocycle rate."""
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    s.manifold.require_membership(pts)
    bases = s.manifold.tangent_basis(pts)
    coeff = rng.normal(size=(pts.shape[0], bases.shape[2]))
    v = np.einsum("mnd,md->mn", bases, coeff)

    results = []
    for i in range(act.algebra.dim):
        x_a = act.fundamental_field(i)
        lhs = twisted_d(s.theta, KForm.from_scalar(m.rho[i], s.dim))
        rhs = interior_product(x_a, s.omega)
        res = np.abs((lhs - rhs).evaluate(pts, [v]))
        results.append(make_result(
            f"{prefix}.hamiltonian_{i + 1}", float(np.max(res)), tol,
            anchor="twisted differential of the momentum component equals "
                   "omega contracted with the generator",
            point=attaining_point(pts, res)))

        rate = act.flow_cocycles[i].param_partial("t").at_param("t", 0.0)
        pairing = form_on_field(s.theta, x_a)
        res = np.abs((rate - pairing).evaluate(pts) * np.ones(pts.shape[0]))
        results.append(make_result(
            f"{prefix}.cocycle_rate_{i + 1}", float(np.max(res)), tol,
            anchor="t-derivative at 0 of the flow cocycle equals the twisting "
                   "form on the generator",
            point=attaining_point(pts, res)))
    return results


def haar_average(act: GroupAction, s: LcsStructure, nodes: int = 256):
    """Average the structure over a circle or torus action.

    Builds F = ln sum_i w_i e^{phi(t_i, x)} as one literal expression, so the
    averaged structure (e^F omega, theta + dF) keeps exact derivatives.
    Returns (averaged structure, F).
    """
    rank = act.torus_rank
    if not rank or rank < 1:
        raise UnsupportedGroupError("averaging needs a circle or torus action")
    dim = act.ambient_dim

    terms = []
    if rank == 1:
        angles, weights = circle_nodes(nodes)
        cocycle = act.flow_cocycles[0]
        for angle, weight in zip(angles, weights):
            term = cocycle.at_param("t", float(angle)).expression
            terms.append(mul(Const(float(weight)), call("exp", term)))
    else:
        import itertools as _it

        per_axis = max(8, int(round(nodes ** (1.0 / rank))))
        angles, weights = circle_nodes(per_axis)
        for combo in _it.product(range(per_axis), repeat=rank):
            element = act.element_at(0, float(angles[combo[0]]))
            for axis in range(1, rank):
                element = act.compose_elements(
                    element, act.element_at(axis, float(angles[combo[axis]])))
            weight = float(np.prod([weights[c] for c in combo]))
            terms.append(mul(Const(weight), call("exp", element.cocycle.expression)))
    f_field = ScalarField(call("ln", _balanced_sum(terms)), dim)
    return conformal_rescale(s, ConformalGauge(f_field)), f_field


def _balanced_sum(terms):
    """Pairwise summation tree; keeps expression depth logarithmic so very
    long quadrature sums survive compilation."""
    terms = list(terms)
    if not terms:
        return Const(0.0)
    while len(terms) > 1:
        merged = [add(terms[i], terms[i + 1]) for i in range(0, len(terms) - 1, 2)]
        if len(terms) % 2:
            merged.append(terms[-1])
        terms = merged
    return terms[0]


def average_invariance_check(act: GroupAction, averaged: LcsStructure,
                             f_field: ScalarField, samples, rng, elements=None,
                             tol: float = 1e-8, prefix: str = "average"):
    """Every sampled element fixes the averaged form; F . h = F - phi_h."""
    from .calculus import pullback

    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    bases = averaged.manifold.tangent_basis(pts)
    coeff = rng.normal(size=(2, pts.shape[0], bases.shape[2]))
    u = np.einsum("mnd,md->mn", bases, coeff[0])
    v = np.einsum("mnd,md->mn", bases, coeff[1])
    base_vals = averaged.omega.evaluate(pts, [u, v])

    worst_inv = 0.0
    worst_shift = 0.0
    elements = act.elements if elements is None else elements
    for element in elements:
        pulled = pullback(element.map, averaged.omega)
        worst_inv = max(worst_inv,
                        float(np.max(np.abs(pulled.evaluate(pts, [u, v]) - base_vals))))
        shifted = f_field.compose(list(element.map.components))
        res = (shifted - f_field + element.cocycle).evaluate(pts) * np.ones(pts.shape[0])
        worst_shift = max(worst_shift, float(np.max(np.abs(res))))
    return [
        make_result(f"{prefix}.invariant", worst_inv, tol,
                    anchor="averaged form is fixed by every sampled element"),
        make_result(f"{prefix}.gauge_shift", worst_shift, tol,
                    anchor="averaged gauge composed with an element drops by "
                           "that element's cocycle"),
    ]


def equivariance_check(act: GroupAction, m: MomentumData, samples, elements=None,
                       tol: float = 1e-8, prefix: str = "momentum"):
    """mu(g x) = e^{phi_g(x)} mu(x) . Ad(g^{-1}), maximized over (g, x)."""
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    elements = act.elements if elements is None else elements
    mu = m.values(pts)
    worst = 0.0
    worst_point = pts[0]
    for element in elements:
        mapped = element.map.apply(pts)
        lhs = m.values(mapped)
        coad = act.coadjoint_matrix(element)
        scale = np.exp(element.cocycle.evaluate(pts) * np.ones(pts.shape[0]))
        rhs = scale[:, None] * (mu @ coad.T)
        res = np.max(np.abs(lhs - rhs), axis=1)
        if np.max(res) > worst:
            worst = float(np.max(res))
            worst_point = pts[int(np.argmax(res))]
    return make_result(f"{prefix}.equivariance", worst, tol,
                       anchor="momentum of a moved point is the coadjoint move "
                              "of the momentum, scaled by exp of the cocycle",
                       point=worst_point)


def poisson_homomorphism_check(act: GroupAction, s: LcsStructure, m: MomentumData,
                               samples, tol: float = 1e-8, prefix: str = "momentum"):
    """{rho_a, rho_b} matches rho_{[a,b]} at the samples."""
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    c = act.algebra.structure_constants
    worst = 0.0
    worst_point = pts[0]
    for i in range(act.algebra.dim):
        for j in range(i + 1, act.algebra.dim):
            bracket_rho = ScalarField.constant(0.0, s.dim)
            for l in range(act.algebra.dim):
                if c[i][j][l]:
                    bracket_rho = bracket_rho + float(c[i][j][l]) * m.rho[l]
            lhs = twisted_poisson(s, m.rho[i], m.rho[j], pts)
            rhs = bracket_rho.evaluate(pts) * np.ones(pts.shape[0])
            res = np.abs(lhs - rhs)
            if np.max(res) > worst:
                worst = float(np.max(res))
                worst_point = pts[int(np.argmax(res))]
    if act.algebra.dim == 1:
        lhs = twisted_poisson(s, m.rho[0], m.rho[0], pts)
        worst = float(np.max(np.abs(lhs)))
        worst_point = pts[int(np.argmax(np.abs(lhs)))]
    return make_result(f"{prefix}.poisson_homomorphism", worst, tol,
                       anchor="momentum components bracket to the momentum of "
                              "the algebra bracket",
                       point=worst_point)


def anti_lee_transport_check(act: GroupAction, s: LcsStructure, samples,
                             elements=None, tol: float = 1e-8,
                             prefix: str = "action"):
    """Pushforward law for the dual of the twisting form.

    g_* (dual of theta) = e^{-phi_{g^{-1}}} (dual of theta)
                          - dual of d(e^{-phi_{g^{-1}}}),
    evaluated at the image points.
    """
    from .calculus import exterior_derivative

    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    s.manifold.require_membership(pts)
    field = anti_lee_field(s)
    elements = act.elements if elements is None else elements
    worst = 0.0
    worst_point = pts[0]
    for element in elements:
        source = element.inverse.apply(pts)
        _, pushed = pushforward_at(element.map, field, source)
        inv_cocycle = element.inverse_cocycle()
        weight = (-inv_cocycle).exp()
        scale = weight.evaluate(pts) * np.ones(pts.shape[0])
        dual_here = field.evaluate(pts)
        d_weight = exterior_derivative(KForm.from_scalar(weight, s.dim))
        correction = omega_dual_values(s, d_weight.covector_at(pts), pts)
        res = np.max(np.abs(pushed - (scale[:, None] * dual_here - correction)), axis=1)
        if np.max(res) > worst:
            worst = float(np.max(res))
            worst_point = pts[int(np.argmax(res))]
    return make_result(f"{prefix}.anti_lee_transport", worst, tol,
                       anchor="elements push the dual of the twisting form to "
                              "its rescale minus the dual of the rescale's "
                              "differential",
                       point=worst_point)
