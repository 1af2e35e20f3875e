"""Contact structures, their circle bridges, and quotient witnesses.

A contact form is certified by the top wedge staying away from zero on
tangent frames. The bridge to the twisted setting runs over a circle factor:
the product carries the twisted differential of the lifted form, and the
power identity tying its top powers to the contact volume is checked on
random frames rather than assumed.
"""

import numpy as np

from .action import GroupAction, MomentumData, equivariance_check
from .calculus import (KForm, exterior_derivative, form_on_field, lie_derivative,
                       twisted_d, wedge, wedge_all, wedge_power)
from .errors import DegreeError, SingularSystemError
from .lcs import LcsStructure
from .manifold import ConstrainedManifold
from .numerics import null_space
from .report import make_floor_result, make_result, attaining_point

VOLUME_FLOOR = 1e-8


class ContactStructure:
    """A 1-form on an odd-dimensional constraint set."""

    __slots__ = ("alpha", "manifold", "half_rank")

    def __init__(self, alpha: KForm, manifold: ConstrainedManifold):
        if alpha.degree != 1:
            raise DegreeError("the defining form must have degree 1")
        if alpha.dim != manifold.ambient_dim:
            raise DegreeError("form and manifold live in different ambient spaces")
        if manifold.tangent_dim % 2 == 0:
            raise DegreeError(
                f"tangent dimension {manifold.tangent_dim} is even; "
                f"an odd dimension is required")
        self.alpha = alpha
        self.manifold = manifold
        self.half_rank = (manifold.tangent_dim - 1) // 2

    @property
    def dim(self) -> int:
        return self.manifold.ambient_dim


def contact_volume_values(c: ContactStructure, points) -> np.ndarray:
    """alpha wedge (d alpha)^k evaluated on orthonormal tangent frames."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    top = wedge(c.alpha, wedge_power(exterior_derivative(c.alpha), c.half_rank))
    bases = c.manifold.tangent_basis(pts)
    frame = [bases[:, :, j] for j in range(bases.shape[2])]
    return top.evaluate(pts, frame)


def verify_contact(c: ContactStructure, points, floor: float = VOLUME_FLOOR,
                   prefix: str = "contact"):
    """The top wedge is bounded away from zero on the sample."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vals = np.abs(contact_volume_values(c, pts))
    return [make_floor_result(f"{prefix}.volume", float(np.min(vals)), floor,
                              anchor="the defining form wedged with the top power "
                                     "of its differential never degenerates",
                              point=attaining_point(pts, -vals))]


def reeb_values(c: ContactStructure, points) -> np.ndarray:
    """The unique tangent field with d(alpha)(R, .) = 0 and alpha(R) = 1."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d_alpha = exterior_derivative(c.alpha)
    matrices = d_alpha.matrix_at(pts)
    covs = c.alpha.covector_at(pts)
    bases = c.manifold.tangent_basis(pts)
    out = np.empty((pts.shape[0], c.dim))
    for i in range(pts.shape[0]):
        b = bases[i]
        gram = b.T @ matrices[i].T @ b
        kern, _ = null_space(gram)
        if kern.shape[1] != 1:
            raise SingularSystemError(
                f"differential kernel has dimension {kern.shape[1]} on the "
                f"tangent space; expected a line")
        v = b @ kern[:, 0]
        pairing = float(covs[i] @ v)
        if abs(pairing) < 1e-12:
            raise SingularSystemError("the kernel line pairs to zero with the form")
        out[i] = v / pairing
    return out


def reeb_check(c: ContactStructure, points, rng, tol: float = 1e-9,
               prefix: str = "contact"):
    """Definition of the distinguished field checked against random vectors."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    reeb = reeb_values(c, pts)
    bases = c.manifold.tangent_basis(pts)
    coeff = rng.normal(size=(pts.shape[0], bases.shape[2]))
    probe = np.einsum("mnd,md->mn", bases, coeff)
    d_alpha = exterior_derivative(c.alpha)
    res_kernel = np.abs(d_alpha.evaluate(pts, [reeb, probe]))
    res_unit = np.abs(c.alpha.evaluate(pts, [reeb]) - 1.0)
    return [
        make_result(f"{prefix}.reeb_in_kernel", float(np.max(res_kernel)), tol,
                    anchor="the distinguished field sits in the kernel of the "
                           "differential of the defining form",
                    point=attaining_point(pts, res_kernel)),
        make_result(f"{prefix}.reeb_pairs_to_one", float(np.max(res_unit)), tol,
                    anchor="the distinguished field pairs to one with the "
                           "defining form"),
    ]


def contact_momentum(c: ContactStructure, act: GroupAction) -> MomentumData:
    """Components are the form paired with the fundamental fields."""
    return MomentumData(tuple(form_on_field(c.alpha, x)
                              for x in act.fundamental_fields()))


def contact_invariance_check(c: ContactStructure, act: GroupAction, points, rng,
                             tol: float = 1e-9, prefix: str = "contact"):
    """Each generator preserves the defining form (the strict setting)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    bases = c.manifold.tangent_basis(pts)
    coeff = rng.normal(size=(pts.shape[0], bases.shape[2]))
    probe = np.einsum("mnd,md->mn", bases, coeff)
    worst = 0.0
    for x in act.fundamental_fields():
        res = np.abs(lie_derivative(x, c.alpha).evaluate(pts, [probe]))
        worst = max(worst, float(np.max(res)))
    return make_result(f"{prefix}.form_invariant", worst, tol,
                       anchor="the action preserves the defining form")


def contact_momentum_checks(c: ContactStructure, act: GroupAction,
                            m: MomentumData, points, rng, tol: float = 1e-9,
                            prefix: str = "contact"):
    """Invariance plus strict equivariance of the paired components."""
    results = [contact_invariance_check(c, act, points, rng, tol=tol, prefix=prefix)]
    results.append(equivariance_check(act, m, points,
                                      elements=act.sampled_elements(rng, 3),
                                      tol=max(tol, 1e-8), prefix=prefix))
    return results


class CircleBridge:
    """Product of a circle with a contact manifold, twisted by the angle form."""

    __slots__ = ("structure", "alpha_lift", "contact", "scale")

    def __init__(self, structure: LcsStructure, alpha_lift: KForm,
                 contact: ContactStructure, scale: float):
        self.structure = structure
        self.alpha_lift = alpha_lift
        self.contact = contact
        self.scale = scale


def angle_form(dim: int, first: int = 0) -> KForm:
    """The closed non-exact angular form of a planar circle factor."""
    i, j = first, first + 1
    denom = f"(x{i + 1}^2 + x{j + 1}^2)"
    return KForm(1, dim, {(i,): f"0 - x{j + 1} / {denom}",
                          (j,): f"x{i + 1} / {denom}"})


def lcs_from_contact(c: ContactStructure, scale: float = 1.0) -> CircleBridge:
    """Twisted structure on circle x contact manifold.

    The two-form is the twisted differential of the lifted defining form; its
    class is controlled by the angle form of the circle factor.
    """
    n = c.dim + 2
    circle = ConstrainedManifold.unit_sphere(2)
    product = circle.product(c.manifold)
    theta = angle_form(n)
    alpha_lift = c.alpha.shifted_into(n, 2).scaled(float(scale))
    omega = twisted_d(theta, alpha_lift)
    return CircleBridge(LcsStructure(omega, theta, product), alpha_lift, c,
                        float(scale))


def bridge_power_identity_check(bridge: CircleBridge, points, rng,
                                tol: float = 1e-9, prefix: str = "contact"):
    """(twisted d of the lift)^(k+1) against the contact volume of the factor.

    The residual form should vanish identically; it is evaluated on random
    tangent frames of the product.
    """
    c = bridge.contact
    k = c.half_rank
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    omega = bridge.structure.omega
    theta = bridge.structure.theta
    d_lift = exterior_derivative(bridge.alpha_lift)
    lhs = wedge_power(omega, k + 1)
    rhs = wedge_all(theta, bridge.alpha_lift, *([d_lift] * k)).scaled(float(k + 1))
    residual_form = lhs + rhs
    bases = bridge.structure.manifold.tangent_basis(pts)
    coeff = rng.normal(size=(2 * k + 2, pts.shape[0], bases.shape[2]))
    frame = [np.einsum("mnd,md->mn", bases, coeff[j]) for j in range(2 * k + 2)]
    res = np.abs(residual_form.evaluate(pts, frame))
    return make_result(f"{prefix}.bridge_power_identity", float(np.max(res)), tol,
                       anchor="top powers of the twisted differential reduce to "
                              "the angle form wedged with the contact volume",
                       point=attaining_point(pts, res))


def contact_stabilizer(act: GroupAction, xi):
    """Kernel of the coadjoint map at xi (no twisting in the strict setting)."""
    from .reduction import stabilizer_matrix
    tau = np.zeros(act.algebra.dim)
    return null_space(stabilizer_matrix(act, xi, tau))


def contact_foliation_basis(c: ContactStructure, act: GroupAction, xi, points,
                            drop_tol: float = 1e-10):
    """Spans of X_a - xi(a) R over the stabilizer, one basis per point.

    Combinations that vanish pointwise (norm at most drop_tol) are excluded
    rather than padded, so ranks can drop on degenerate strata.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    stab, _ = contact_stabilizer(act, xi_arr)
    reeb = reeb_values(c, pts)
    gen_vals = [x.evaluate(pts) for x in act.fundamental_fields()]
    out = []
    for i in range(pts.shape[0]):
        cols = []
        for a_vec in stab.T:
            v = -float(xi_arr @ a_vec) * reeb[i]
            for coeff, vals in zip(a_vec, gen_vals):
                if coeff:
                    v = v + coeff * vals[i]
            if np.linalg.norm(v) > drop_tol:
                cols.append(v)
        out.append(np.stack(cols, axis=1) if cols else np.zeros((c.dim, 0)))
    return out


class ContactWitness:
    """Supplied projection and candidate reduced contact structure."""

    __slots__ = ("projection", "reduced")

    def __init__(self, projection, reduced: ContactStructure):
        self.projection = projection
        self.reduced = reduced


def contact_quotient_verify(c: ContactStructure, act: GroupAction,
                            m: MomentumData, xi, witness: ContactWitness,
                            level_points, rng, tol: float = 1e-8,
                            prefix: str = "contact"):
    """Projection compatibility and the reduced volume bound on a witness."""
    from .calculus import pullback
    from .reduction import level_manifold

    pts = np.atleast_2d(np.asarray(level_points, dtype=float))
    pi = witness.projection
    mapped = pi.apply(pts)
    results = []

    membership = witness.reduced.manifold.constraint_values(mapped)
    res0 = float(np.max(np.abs(membership))) if membership.size else 0.0
    results.append(make_result(
        f"{prefix}.witness_maps_into_quotient", res0, 1e-9,
        anchor="the projection lands in the declared quotient constraint set"))

    jac = pi.jacobian_at(pts)
    bases = contact_foliation_basis(c, act, xi, pts)
    worst = 0.0
    worst_point = pts[0]
    for k, p in enumerate(pts):
        if bases[k].shape[1] == 0:
            continue
        res = float(np.max(np.abs(jac[k] @ bases[k])))
        if res > worst:
            worst, worst_point = res, p
    results.append(make_result(f"{prefix}.projection_kills_foliation", worst, tol,
                               anchor="the projection differential annihilates "
                                      "the level-set foliation",
                               point=worst_point))

    lvl = level_manifold(c.manifold, m, xi)
    lvl_bases = lvl.tangent_basis(pts)
    coeff = rng.normal(size=(pts.shape[0], lvl_bases.shape[2]))
    u = np.einsum("mnd,md->mn", lvl_bases, coeff)
    lhs = pullback(pi, witness.reduced.alpha).evaluate(pts, [u])
    rhs = c.alpha.evaluate(pts, [u])
    res = np.abs(lhs - rhs)
    results.append(make_result(f"{prefix}.reduced_form_pullback",
                               float(np.max(res)), tol,
                               anchor="pullback of the reduced form restricts "
                                      "to the defining form on the level set",
                               point=attaining_point(pts, res)))

    results.extend(verify_contact(witness.reduced, mapped,
                                  prefix=f"{prefix}.reduced"))
    return results


def bridge_consistency_check(reduced_lcs: LcsStructure,
                             reduced_contact: ContactStructure, points, rng,
                             tol: float = 1e-9, prefix: str = "contact"):
    """The reduced product structure is the twisted differential of the lifted
    reduced contact form; the two reduction routes must land on the same form."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = reduced_lcs.dim
    alpha_lift = reduced_contact.alpha.shifted_into(n, 2)
    candidate = twisted_d(reduced_lcs.theta, alpha_lift)
    diff = reduced_lcs.omega + candidate.scaled(-1.0)
    bases = reduced_lcs.manifold.tangent_basis(pts)
    coeff = rng.normal(size=(2, pts.shape[0], bases.shape[2]))
    u = np.einsum("mnd,md->mn", bases, coeff[0])
    v = np.einsum("mnd,md->mn", bases, coeff[1])
    res = np.abs(diff.evaluate(pts, [u, v]))
    return make_result(f"{prefix}.bridge_reduction_consistent",
                       float(np.max(res)), tol,
                       anchor="reducing the bridge and bridging the reduction "
                              "give the same two-form",
                       point=attaining_point(pts, res))
