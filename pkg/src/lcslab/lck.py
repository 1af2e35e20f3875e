"""Complex structures and compatible metrics in the twisted setting.

Both the complex structure and the metric are ambient matrix fields that act
on tangent vectors; the compatibility convention is fixed so that the metric
is the two-form with the complex structure in its first slot,

    g(u, v) = omega(J u, v),

which with the sign conventions of the flat model (block rotation J, doubled
Euclidean metric, minus-two area forms) makes the metric positive and sends
the metric dual of the twisting form to its omega dual under J.

Lie derivatives of the complex structure run along two routes: an algebraic
column computation with exact brackets where possible, and a flow-conjugation
finite difference as an independent guard.
"""

import numpy as np

from .action import GroupAction, MomentumData
from .calculus import (KForm, NumericVectorField, VectorField, bracket_values,
                       flow_with_frame)
from .errors import (DimensionMismatchError, PreconditionError,
                     SingularSystemError)
from .expr import ScalarField, as_field
from .lcs import LcsStructure, anti_lee_field
from .numerics import null_space
from .report import make_floor_result, make_result, attaining_point

METRIC_FLOOR = 1e-8


class MatrixField:
    """Square matrix of expression coefficients acting on tangent vectors."""

    __slots__ = ("dim", "entries")

    def __init__(self, entries):
        rows = tuple(tuple(e for e in row) for row in entries)
        dim = len(rows)
        if any(len(row) != dim for row in rows):
            raise DimensionMismatchError("matrix entries are not square")
        self.dim = dim
        self.entries = tuple(tuple(as_field(e, dim) for e in row) for row in rows)

    @classmethod
    def constant(cls, values) -> "MatrixField":
        values = np.asarray(values, dtype=float)
        return cls([[float(v) for v in row] for row in values])

    @classmethod
    def identity(cls, dim: int) -> "MatrixField":
        return cls.constant(np.eye(dim))

    @classmethod
    def zero(cls, dim: int) -> "MatrixField":
        return cls.constant(np.zeros((dim, dim)))

    @classmethod
    def outer(cls, image: VectorField, source_dual: KForm) -> "MatrixField":
        """Rank-one block sending v to image * source_dual(v)."""
        if source_dual.degree != 1:
            raise DimensionMismatchError("the dual side must be a 1-form")
        dim = source_dual.dim
        cov = [source_dual.coefficient((j,)) for j in range(dim)]
        return cls([[image.components[i] * cov[j] for j in range(dim)]
                    for i in range(dim)])

    @classmethod
    def covector_square(cls, a: KForm) -> "MatrixField":
        """The symmetric product a_i a_j of a 1-form with itself."""
        if a.degree != 1:
            raise DimensionMismatchError("need a 1-form")
        cov = [a.coefficient((j,)) for j in range(a.dim)]
        return cls([[cov[i] * cov[j] for j in range(a.dim)]
                    for i in range(a.dim)])

    def entry(self, i: int, j: int) -> ScalarField:
        return self.entries[i][j]

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty((pts.shape[0], self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                out[:, i, j] = self.entries[i][j].evaluate(pts) * np.ones(pts.shape[0])
        return out

    def column_field(self, j: int) -> VectorField:
        return VectorField(tuple(self.entries[i][j] for i in range(self.dim)))

    def partial_values(self, points) -> np.ndarray:
        """Exact entry partials, D[m, i, j, k] = d entry_ij / d x_k."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty((pts.shape[0], self.dim, self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                for k in range(self.dim):
                    out[:, i, j, k] = (self.entries[i][j].partial(k).evaluate(pts)
                                       * np.ones(pts.shape[0]))
        return out

    def shifted_into(self, dim: int, offset: int) -> "MatrixField":
        zero = ScalarField.constant(0.0, dim)
        rows = [[zero for _ in range(dim)] for _ in range(dim)]
        for i in range(self.dim):
            for j in range(self.dim):
                rows[i + offset][j + offset] = self.entries[i][j].shift_into(dim, offset)
        return MatrixField(rows)

    def transpose(self) -> "MatrixField":
        return MatrixField([[self.entries[j][i] for j in range(self.dim)]
                            for i in range(self.dim)])

    def scaled(self, factor) -> "MatrixField":
        f = as_field(factor, self.dim)
        return MatrixField([[f * e for e in row] for row in self.entries])

    def __add__(self, other: "MatrixField") -> "MatrixField":
        if self.dim != other.dim:
            raise DimensionMismatchError("matrix dimensions differ")
        return MatrixField([[a + b for a, b in zip(ra, rb)]
                            for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other: "MatrixField") -> "MatrixField":
        return self + other.scaled(-1.0)


class NumericMatrixField:
    """Matrix field given by a batch evaluator; partials by central differences."""

    __slots__ = ("dim", "evaluator", "fd_scale")

    def __init__(self, dim: int, evaluator, fd_scale: float = 1e-5):
        self.dim = int(dim)
        self.evaluator = evaluator
        self.fd_scale = float(fd_scale)

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.asarray(self.evaluator(pts), dtype=float)
        if out.shape != (pts.shape[0], self.dim, self.dim):
            raise DimensionMismatchError(
                f"evaluator returned shape {out.shape}")
        return out

    def column_field(self, j: int) -> NumericVectorField:
        return NumericVectorField(self.dim,
                                  lambda pts, _j=j: self.evaluate(pts)[:, :, _j])

    def partial_values(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty((pts.shape[0], self.dim, self.dim, self.dim))
        for k in range(self.dim):
            h = self.fd_scale * (1.0 + np.abs(pts[:, k]))
            fwd = pts.copy()
            fwd[:, k] += h
            bwd = pts.copy()
            bwd[:, k] -= h
            out[:, :, :, k] = (self.evaluate(fwd) - self.evaluate(bwd)) / (2.0 * h)[:, None, None]
        return out


def matrix_apply(matrix, points, vectors) -> np.ndarray:
    return np.einsum("mij,mj->mi", matrix.evaluate(points),
                     np.atleast_2d(np.asarray(vectors, dtype=float)))


def applied_field(matrix, field) -> NumericVectorField:
    """The pointwise image of a vector field under a matrix field."""
    return NumericVectorField(
        matrix.dim,
        lambda pts: np.einsum("mij,mj->mi", matrix.evaluate(pts),
                              field.evaluate(pts)))


def projected_field(manifold, seed) -> NumericVectorField:
    """Tangential part of a frozen ambient vector, as a smooth field."""
    seed = np.asarray(seed, dtype=float)

    def evaluator(pts):
        bases = manifold.tangent_basis(pts)
        return np.einsum("mnd,md->mn", bases,
                         np.einsum("mnd,n->md", bases, seed))

    return NumericVectorField(manifold.ambient_dim, evaluator)


class LckStructure:
    """A twisted structure together with a complex structure and metric."""

    __slots__ = ("structure", "j", "g")

    def __init__(self, structure: LcsStructure, j, g):
        if j.dim != structure.dim or g.dim != structure.dim:
            raise DimensionMismatchError("matrix fields do not match the ambient")
        self.structure = structure
        self.j = j
        self.g = g

    @property
    def dim(self) -> int:
        return self.structure.dim

    @property
    def manifold(self):
        return self.structure.manifold


def _tangent_draws(manifold, points, rng, count: int = 2):
    bases = manifold.tangent_basis(points)
    coeff = rng.normal(size=(count, points.shape[0], bases.shape[2]))
    return [np.einsum("mnd,md->mn", bases, c) for c in coeff], bases


def lck_check(l: LckStructure, points, rng, tol: float = 1e-9,
              floor: float = METRIC_FLOOR, prefix: str = "lck"):
    """Compatibility of the complex structure, the metric, and the two-form."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    (u, v), bases = _tangent_draws(l.manifold, pts, rng)
    jm = l.j.evaluate(pts)
    gm = l.g.evaluate(pts)
    om = l.structure.omega.matrix_at(pts)
    ju = np.einsum("mij,mj->mi", jm, u)
    jv = np.einsum("mij,mj->mi", jm, v)

    res_sq = np.max(np.abs(np.einsum("mij,mj->mi", jm, ju) + u), axis=1)
    proj = np.einsum("mnd,md->mn", bases, np.einsum("mnd,mn->md", bases, ju))
    res_tan = np.max(np.abs(ju - proj), axis=1)
    g_uv = np.einsum("mi,mij,mj->m", u, gm, v)
    res_compat = np.abs(g_uv - np.einsum("mi,mij,mj->m", ju, om, v))
    res_inv = np.abs(np.einsum("mi,mij,mj->m", ju, gm, jv) - g_uv)
    res_sym = np.max(np.abs(gm - np.transpose(gm, (0, 2, 1))), axis=(1, 2))
    restricted = np.einsum("mnd,mnk,mke->mde", bases, gm, bases)
    eigs = np.linalg.eigvalsh(restricted)
    res_pos = float(np.min(eigs[:, 0]))

    return [
        make_result(f"{prefix}.j_squares_to_minus_one", float(np.max(res_sq)),
                    tol, anchor="the structure squares to minus the identity "
                                "on tangent vectors",
                    point=attaining_point(pts, res_sq)),
        make_result(f"{prefix}.j_preserves_tangent", float(np.max(res_tan)),
                    tol, anchor="tangent vectors stay tangent",
                    point=attaining_point(pts, res_tan)),
        make_result(f"{prefix}.metric_matches_form", float(np.max(res_compat)),
                    tol, anchor="the metric is the two-form with the complex "
                                "structure in its first slot",
                    point=attaining_point(pts, res_compat)),
        make_result(f"{prefix}.metric_j_invariant", float(np.max(res_inv)),
                    tol, anchor="the metric is invariant under the complex "
                                "structure",
                    point=attaining_point(pts, res_inv)),
        make_result(f"{prefix}.metric_symmetric", float(np.max(res_sym)), tol,
                    anchor="the metric matrix is symmetric"),
        make_floor_result(f"{prefix}.metric_positive", res_pos, floor,
                          anchor="the metric is positive on tangent spaces"),
    ]


def lee_vector_values(l: LckStructure, points) -> np.ndarray:
    """Metric dual of the twisting form, solved on tangent spaces."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    bases = l.manifold.tangent_basis(pts)
    gm = l.g.evaluate(pts)
    gram = np.einsum("mnd,mnk,mke->mde", bases, gm, bases)
    rhs = np.einsum("mnd,mn->md", bases, l.structure.theta.covector_at(pts))
    sv = np.linalg.svd(gram, compute_uv=False)
    if np.any(sv[:, -1] < 1e-12 * np.maximum(sv[:, 0], 1.0)):
        raise SingularSystemError("metric gram matrix is numerically singular")
    coeff = np.linalg.solve(gram, rhs[:, :, None])[:, :, 0]
    return np.einsum("mnd,md->mn", bases, coeff)


def lee_field(l: LckStructure) -> NumericVectorField:
    return NumericVectorField(l.dim, lambda pts: lee_vector_values(l, pts))


def lee_fields(l: LckStructure, points):
    """Tabulated metric dual and omega dual of the twisting form."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    sharp = lee_vector_values(l, pts)
    dual = anti_lee_field(l.structure).evaluate(pts)
    return sharp, dual


def lee_checks(l: LckStructure, points, rng, tol: float = 1e-9,
               prefix: str = "lck"):
    """The metric dual solves its defining system and rotates onto the
    omega dual under the complex structure."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    sharp, dual = lee_fields(l, pts)
    (v,), _ = _tangent_draws(l.manifold, pts, rng, count=1)
    gm = l.g.evaluate(pts)
    theta_v = l.structure.theta.evaluate(pts, [v])
    res_solve = np.abs(np.einsum("mi,mij,mj->m", sharp, gm, v) - theta_v)
    res_rot = np.max(np.abs(matrix_apply(l.j, pts, sharp) - dual), axis=1)
    return [
        make_result(f"{prefix}.lee_dual_solves", float(np.max(res_solve)), tol,
                    anchor="the metric dual of the twisting form pairs "
                           "correctly against tangent vectors",
                    point=attaining_point(pts, res_solve)),
        make_result(f"{prefix}.lee_rotation", float(np.max(res_rot)), tol,
                    anchor="the complex structure carries the metric dual of "
                           "the twisting form onto its omega dual",
                    point=attaining_point(pts, res_rot)),
    ]


def nijenhuis(j, x_field, y_field, points) -> np.ndarray:
    """[JX,JY] - J[JX,Y] - J[X,JY] - [X,Y] evaluated on a batch."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    jx = applied_field(j, x_field)
    jy = applied_field(j, y_field)
    b1 = bracket_values(jx, jy, pts)
    b2 = bracket_values(jx, y_field, pts)
    b3 = bracket_values(x_field, jy, pts)
    b4 = bracket_values(x_field, y_field, pts)
    return (b1 - np.einsum("mij,mj->mi", j.evaluate(pts), b2 + b3) - b4)


def integrability_check(l: LckStructure, points, rng, pairs: int = 2,
                        tol: float = 1e-8, prefix: str = "lck"):
    """Nijenhuis tensor on random tangential fields."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    worst = 0.0
    worst_point = pts[0]
    for _ in range(pairs):
        x = projected_field(l.manifold, rng.normal(size=l.dim))
        y = projected_field(l.manifold, rng.normal(size=l.dim))
        vals = np.max(np.abs(nijenhuis(l.j, x, y, pts)), axis=1)
        k = int(np.argmax(vals))
        if vals[k] > worst:
            worst, worst_point = float(vals[k]), pts[k]
    return make_result(f"{prefix}.nijenhuis_vanishes", worst, tol,
                       anchor="the complex structure is integrable",
                       point=worst_point)


def lie_derivative_of_matrix(j, x_field, points) -> np.ndarray:
    """Column route: (L_X J) e_j = [X, J e_j] + J (DX e_j), batched."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    jm = j.evaluate(pts)
    jac = x_field.jacobian_at(pts)
    out = np.empty((pts.shape[0], j.dim, j.dim))
    for col in range(j.dim):
        bracket = bracket_values(x_field, j.column_field(col), pts)
        out[:, :, col] = bracket + np.einsum("mik,mk->mi", jm, jac[:, :, col])
    return out


def holomorphic_check(l: LckStructure, x_field, points, rng,
                      tol: float = 1e-8, flow_tol: float = 1e-5,
                      label: str = "", prefix: str = "lck"):
    """The field preserves the complex structure, on two routes.

    The algebraic route contracts the column Lie derivative with tangent
    vectors; the flow route conjugates the structure through the integrated
    flow and differences in time. Their agreement guards the sign chain.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    (v,), _ = _tangent_draws(l.manifold, pts, rng, count=1)
    lie = lie_derivative_of_matrix(l.j, x_field, pts)
    algebraic = np.einsum("mij,mj->mi", lie, v)
    res_alg = np.max(np.abs(algebraic), axis=1)

    h = 1e-3
    conjugated = []
    for sgn in (1.0, -1.0):
        ahead, moved = flow_with_frame(x_field, pts, [v], sgn * h, steps=8)
        w = matrix_apply(l.j, ahead, moved[0])
        _, back = flow_with_frame(x_field, ahead, [w], -sgn * h, steps=8)
        conjugated.append(back[0])
    flow_route = (conjugated[0] - conjugated[1]) / (2.0 * h)
    res_agree = float(np.max(np.abs(flow_route - algebraic)))

    tag = f"_{label}" if label else ""
    return [
        make_result(f"{prefix}.holomorphic{tag}", float(np.max(res_alg)), tol,
                    anchor="the flow of the field preserves the complex "
                           "structure",
                    point=attaining_point(pts, res_alg)),
        make_result(f"{prefix}.holomorphic_routes_agree{tag}", res_agree,
                    flow_tol,
                    anchor="algebraic and flow-conjugation derivatives of the "
                           "complex structure coincide"),
    ]


def metric_lie_derivative(g, t_field, points) -> np.ndarray:
    """L_T g in coordinates: T^k dg_ij/dx_k + g_kj dT^k/dx_i + g_ik dT^k/dx_j."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    gm = g.evaluate(pts)
    dg = g.partial_values(pts)
    tv = t_field.evaluate(pts)
    jac = t_field.jacobian_at(pts)
    return (np.einsum("mijk,mk->mij", dg, tv)
            + np.einsum("mkj,mki->mij", gm, jac)
            + np.einsum("mik,mkj->mij", gm, jac))


def vaisman_check(l: LckStructure, points, rng, tol: float = 1e-8,
                  prefix: str = "lck"):
    """The metric dual of the twisting form is a Killing field."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    killing = metric_lie_derivative(l.g, lee_field(l), pts)
    (u, v), _ = _tangent_draws(l.manifold, pts, rng)
    res = np.abs(np.einsum("mi,mij,mj->m", u, killing, v))
    return make_result(f"{prefix}.lee_killing", float(np.max(res)), tol,
                       anchor="the metric dual of the twisting form moves the "
                              "metric by zero",
                       point=attaining_point(pts, res))


def sasaki_check(c, g_c, samples: int, rng, tol: float = 1e-8,
                 prefix: str = "sasaki"):
    """Certificate that the circle product of a contact metric manifold is of
    the compatible twisted kind with a Killing dual field.

    The product complex structure rotates the circle direction into the
    distinguished contact field and acts on contact planes through the metric
    contraction of the differential of the defining form.
    """
    from .contact import angle_form, lcs_from_contact, reeb_values

    bridge = lcs_from_contact(c, scale=1.0)
    n = c.dim + 2
    product = bridge.structure.manifold
    pts = product.sample(int(samples), rng)

    from .calculus import exterior_derivative
    d_alpha_c = exterior_derivative(c.alpha)
    angle = angle_form(n)

    def j_eval(batch):
        batch = np.atleast_2d(np.asarray(batch, dtype=float))
        m = batch.shape[0]
        sub = batch[:, 2:]
        bases = c.manifold.tangent_basis(sub)
        gm = g_c.evaluate(sub)
        dm = d_alpha_c.matrix_at(sub)
        gram = np.einsum("mnd,mnk,mke->mde", bases, gm, bases)
        skew = np.einsum("mnd,mnk,mke->mde", bases, dm, bases)
        phi_coeff = np.linalg.solve(gram, skew)
        phi = np.einsum("mnd,mde,mke->mnk", bases, phi_coeff, bases)
        out = np.zeros((m, n, n))
        out[:, 2:, 2:] = phi
        reeb = np.zeros((m, n))
        reeb[:, 2:] = reeb_values(c, sub)
        circle = np.zeros((m, n))
        circle[:, 0] = -batch[:, 1]
        circle[:, 1] = batch[:, 0]
        dt = angle.covector_at(batch)
        alpha_cov = bridge.alpha_lift.covector_at(batch)
        out += np.einsum("mi,mj->mij", reeb, dt)
        out -= np.einsum("mi,mj->mij", circle, alpha_cov)
        return out

    j_prod = NumericMatrixField(n, j_eval)
    g_prod = g_c.shifted_into(n, 2) + MatrixField.covector_square(angle)
    l = LckStructure(bridge.structure, j_prod, g_prod)
    results = lck_check(l, pts, rng, prefix=prefix)
    results.extend(lee_checks(l, pts, rng, prefix=prefix))
    results.append(vaisman_check(l, pts, rng, tol=tol, prefix=prefix))
    return results


class LckQuotientWitness:
    """Quotient witness extended with reduced complex structure and metric."""

    __slots__ = ("base", "j_reduced", "g_reduced", "vaisman")

    def __init__(self, base, j_reduced, g_reduced, vaisman: bool = False):
        self.base = base
        self.j_reduced = j_reduced
        self.g_reduced = g_reduced
        self.vaisman = bool(vaisman)


def orthogonal_complement_in_level(l: LckStructure, act: GroupAction,
                                   m: MomentumData, xi, point):
    """Metric complement of the characteristic directions inside the
    level-set tangent space at one point."""
    from .reduction import characteristic_basis, level_manifold

    pts = np.atleast_2d(np.asarray(point, dtype=float))
    lvl = level_manifold(l.manifold, m, xi)
    tangent = lvl.tangent_basis(pts)[0]
    entry = characteristic_basis(l.structure, act, m, xi, pts[0])
    if entry.basis.shape[1] == 0:
        return tangent, entry
    gm = l.g.evaluate(pts)[0]
    rows = entry.basis.T @ gm @ tangent
    coeff, _ = null_space(rows)
    return tangent @ coeff, entry


def lck_quotient_checks(l: LckStructure, act: GroupAction, m: MomentumData,
                        xi, witness: LckQuotientWitness, level_points, rng,
                        tol: float = 1e-8, nijenhuis_tol: float = 1e-7,
                        prefix: str = "lck"):
    """Pointwise ingredients of the reduced compatible structure.

    Preconditions (the base quotient witness and holomorphy of the omega
    dual) are re-run; a failure aborts naming the failing check.
    """
    from .reduction import quotient_verify

    pts = np.atleast_2d(np.asarray(level_points, dtype=float))
    s = l.structure

    pre = quotient_verify(s, act, m, xi, witness.base, pts, rng)
    pre.extend(holomorphic_check(l, anti_lee_field(s), pts, rng,
                                 label="omega_dual", prefix=prefix))
    for r in pre:
        if not r.passed:
            raise PreconditionError(
                f"precondition {r.check_id} failed with residual "
                f"{r.residual:.3e}")

    results = []
    pi = witness.base.projection
    mapped = pi.apply(pts)
    jac = pi.jacobian_at(pts)
    jm = l.j.evaluate(pts)
    gm = l.g.evaluate(pts)
    j_red = witness.j_reduced.evaluate(mapped)
    g_red = witness.g_reduced.evaluate(mapped)
    scale = np.exp(witness.base.gauge.evaluate(pts) * np.ones(pts.shape[0]))

    res_inv = np.zeros(pts.shape[0])
    res_twine = np.zeros(pts.shape[0])
    res_metric = np.zeros(pts.shape[0])
    res_nij = np.zeros(pts.shape[0])
    stab = None
    for k in range(pts.shape[0]):
        block, entry = orthogonal_complement_in_level(l, act, m, xi, pts[k])
        stab = entry.stabilizer if stab is None else stab
        q, _ = np.linalg.qr(block)
        image = jm[k] @ q
        res_inv[k] = np.max(np.abs(image - q @ (q.T @ image))) if q.size else 0.0

        res_twine[k] = np.max(np.abs(jac[k] @ (jm[k] @ block)
                                     - j_red[k] @ (jac[k] @ block)))

        pushed = jac[k] @ block
        lhs = pushed.T @ g_red[k] @ pushed
        rhs = scale[k] * (block.T @ gm[k] @ block)
        res_metric[k] = np.max(np.abs(lhs - rhs))

        coeff = rng.normal(size=(block.shape[1], 2))
        u_vec = block @ coeff[:, 0]
        w_vec = block @ coeff[:, 1]
        n_src = nijenhuis(l.j,
                          VectorField.constant(u_vec),
                          VectorField.constant(w_vec),
                          pts[k:k + 1])[0]
        n_tgt = nijenhuis(witness.j_reduced,
                          VectorField.constant(jac[k] @ u_vec),
                          VectorField.constant(jac[k] @ w_vec),
                          mapped[k:k + 1])[0]
        res_nij[k] = np.max(np.abs(jac[k] @ n_src - n_tgt))

    results.append(make_result(
        f"{prefix}.orthogonal_block_j_invariant", float(np.max(res_inv)), tol,
        anchor="the metric complement of the characteristic directions inside "
               "the level tangent space is preserved by the complex structure",
        point=attaining_point(pts, res_inv)))

    worst_hol = 0.0
    if stab is not None and stab.shape[1]:
        from .reduction import characteristic_field
        for a_vec in stab.T:
            psi = characteristic_field(s, act, xi, a_vec)
            lie = lie_derivative_of_matrix(l.j, psi, pts)
            (v,), _ = _tangent_draws(l.manifold, pts, rng, count=1)
            worst_hol = max(worst_hol,
                            float(np.max(np.abs(np.einsum("mij,mj->mi", lie, v)))))
    results.append(make_result(
        f"{prefix}.foliation_holomorphic", worst_hol, tol,
        anchor="characteristic directions preserve the complex structure"))

    results.append(make_result(
        f"{prefix}.complex_structures_intertwine", float(np.max(res_twine)),
        tol, anchor="the projection differential conjugates the complex "
                    "structure onto the reduced one",
        point=attaining_point(pts, res_twine)))
    results.append(make_result(
        f"{prefix}.reduced_metric_pullback", float(np.max(res_metric)), tol,
        anchor="pullback of the reduced metric is the gauge rescale of the "
               "metric on the orthogonal block",
        point=attaining_point(pts, res_metric)))
    results.append(make_result(
        f"{prefix}.nijenhuis_projects", float(np.max(res_nij)), nijenhuis_tol,
        anchor="the Nijenhuis tensor pushes forward onto the reduced one",
        point=attaining_point(pts, res_nij)))

    if witness.vaisman:
        from .reduction import momentum_jacobian
        sharp = lee_vector_values(l, pts)
        rows = momentum_jacobian(m, pts)
        res_tan = np.max(np.abs(np.einsum("mkn,mn->mk", rows, sharp)), axis=1)
        results.append(make_result(
            f"{prefix}.lee_tangent_to_level", float(np.max(res_tan)), tol,
            anchor="the metric dual of the twisting form is tangent to the "
                   "level set",
            point=attaining_point(pts, res_tan)))
        reduced = LckStructure(witness.base.reduced, witness.j_reduced,
                               witness.g_reduced)
        sharp_red = lee_vector_values(reduced, mapped)
        res_proj = np.max(np.abs(np.einsum("mij,mj->mi", jac, sharp)
                                 - sharp_red), axis=1)
        results.append(make_result(
            f"{prefix}.lee_field_projects", float(np.max(res_proj)), tol,
            anchor="the projection carries the metric dual of the twisting "
                   "form onto the reduced one",
            point=attaining_point(pts, res_proj)))
    return results
