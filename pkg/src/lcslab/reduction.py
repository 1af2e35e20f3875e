"""Level sets of the momentum map and the reduction apparatus.

The characteristic distribution at a level-set point is computed along two
independent routes and compared: once as the intersection of the kernel of
the momentum differential with its omega-orthogonal complement (pure linear
algebra), and once as the span of the structured combinations

    psi(a) = X_a + xi(a) * (dual of the twisting form),  a in the stabilizer

for the stabilizer subalgebra of xi. Quotients are never constructed; they
are verified against supplied witnesses.
"""

import numpy as np

from .action import GroupAction, MomentumData
from .calculus import KForm, NumericVectorField, exterior_derivative, form_on_field
from .errors import NonConvergenceError, RankDeficiencyError
from .expr import ScalarField, as_field
from .lcs import LcsStructure, anti_lee_field, omega_dual_values, verify_lcs
from .manifold import ConstrainedManifold, gauss_newton_zero
from .numerics import null_space, span_distance
from .report import make_floor_result, make_result, attaining_point

REGULARITY_FLOOR = 1e-6


def level_fields(m: MomentumData, xi):
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape[0] != m.k:
        raise RankDeficiencyError(
            f"dual vector has {xi.shape[0]} entries for a {m.k}-component momentum")
    return [r - float(v) for r, v in zip(m.rho, xi)]


def level_manifold(manifold: ConstrainedManifold, m: MomentumData, xi) -> ConstrainedManifold:
    """The level set as a constrained manifold in the same ambient space."""
    return ConstrainedManifold(manifold.ambient_dim,
                               tuple(manifold.constraints) + tuple(level_fields(m, xi)))


def project_to_level(manifold: ConstrainedManifold, m: MomentumData, xi, seeds,
                     on_rank_loss: str = "raise"):
    """Gauss-Newton projection onto constraints plus momentum level.

    Raises RankDeficiencyError when the combined Jacobian degenerates along
    the way or the result fails the regularity floor, which is how a
    non-regular level value announces itself. on_rank_loss="drop" discards
    starts whose Newton path degenerates instead of aborting the batch.
    """
    fields = list(manifold.constraints) + level_fields(m, xi)
    pts = gauss_newton_zero(fields, seeds, on_rank_loss=on_rank_loss)
    margin = momentum_rank_margin(manifold, m, pts)
    if margin < REGULARITY_FLOOR:
        raise RankDeficiencyError(
            f"momentum differential margin {margin:.3e} at the projected points; "
            f"the level value looks non-regular")
    return pts


def momentum_rank_margin(manifold: ConstrainedManifold, m: MomentumData, points) -> float:
    """Min singular value of the momentum differential on tangent spaces."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    bases = manifold.tangent_basis(pts)
    rows = momentum_jacobian(m, pts)
    restricted = np.matmul(rows, bases)
    sv = np.linalg.svd(restricted, compute_uv=False)
    return float(np.min(sv[:, -1]))


def momentum_jacobian(m: MomentumData, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = m.dim
    out = np.empty((pts.shape[0], m.k, n))
    for a, r in enumerate(m.rho):
        for j in range(n):
            out[:, a, j] = r.partial(j).evaluate(pts) * np.ones(pts.shape[0])
    return out


def sample_level_set(manifold: ConstrainedManifold, m: MomentumData, xi, rng,
                     count: int, radius: float = 1.5, keep=None, max_rounds: int = 60):
    """Level-set points from projected ambient draws; regularity enforced.

    Rounds whose every start degenerates are retried with fresh seeds; the
    rank error only propagates when no round produced a single point, since
    that is the signature of a non-regular level value rather than bad luck.
    """
    out = []
    have = 0
    level_error = None
    for _ in range(max_rounds):
        seeds = rng.normal(scale=radius, size=(max(count - have, 4), manifold.ambient_dim))
        try:
            pts = project_to_level(manifold, m, xi, seeds, on_rank_loss="drop")
        except (RankDeficiencyError, NonConvergenceError) as exc:
            level_error = exc
            continue
        if keep is not None:
            pts = pts[np.asarray(keep(pts), dtype=bool)]
        if pts.size:
            out.append(pts)
            have += pts.shape[0]
        if have >= count:
            break
    if have < count:
        if have == 0 and level_error is not None:
            raise level_error
        raise RankDeficiencyError(
            f"could not sample {count} level-set points (got {have})")
    return np.concatenate(out, axis=0)[:count]


def regularity_check(manifold: ConstrainedManifold, m: MomentumData, xi, points,
                     floor: float = REGULARITY_FLOOR, prefix: str = "reduction"):
    """Reports the momentum rank margin; non-regular values fail the floor."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    margin = momentum_rank_margin(manifold, m, pts)
    level_res = float(np.max(np.abs(m.values(pts) - np.atleast_1d(xi)[None, :])))
    return make_floor_result(f"{prefix}.regular", margin, floor,
                             anchor="momentum differential keeps full rank on "
                                    "tangent spaces along the level set",
                             notes=f"level residual {level_res:.2e}")


def generator_pairings(s: LcsStructure, act: GroupAction, points) -> np.ndarray:
    """theta(X_a) at each point, shape (m, algebra dim)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    cols = []
    for i in range(act.algebra.dim):
        pairing = form_on_field(s.theta, act.fundamental_field(i))
        cols.append(pairing.evaluate(pts) * np.ones(pts.shape[0]))
    return np.stack(cols, axis=1)


def stabilizer_matrix(act: GroupAction, xi, pairings_row) -> np.ndarray:
    """Rows b, columns a of -xi([a,b]) + xi(b) theta(X_a) - xi(a) theta(X_b)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    tau = np.asarray(pairings_row, dtype=float)
    c = act.algebra.structure_constants
    bracket_part = -np.einsum("abl,l->ba", c, xi)
    skew = np.outer(xi, tau) - np.outer(tau, xi)
    return bracket_part + skew


def stabilizer_subalgebra(s: LcsStructure, act: GroupAction, xi, point):
    """Basis (columns) of the subalgebra fixing xi, twisted by theta(X).

    Returns (basis, flagged). With vanishing pairings this is the kernel of
    the coadjoint map, so abelian algebras give back everything.
    """
    tau = generator_pairings(s, act, point)[0]
    return null_space(stabilizer_matrix(act, xi, tau))


def obstruction_values(s: LcsStructure, act: GroupAction, xi, points) -> np.ndarray:
    """Max over basis pairs of |xi(a) theta(X_b) - xi(b) theta(X_a)| per point."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    tau = generator_pairings(s, act, points)
    skew = xi[None, :, None] * tau[:, None, :] - xi[None, None, :] * tau[:, :, None]
    if act.algebra.dim == 1:
        return np.zeros(tau.shape[0])
    return np.max(np.abs(skew), axis=(1, 2))


def obstruction_check(s: LcsStructure, act: GroupAction, xi, points,
                      tol: float = 1e-9, prefix: str = "reduction"):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vals = obstruction_values(s, act, xi, pts)
    return make_result(f"{prefix}.obstruction", float(np.max(vals)), tol,
                       anchor="the pairing obstruction built from the dual "
                              "value and the twisting form vanishes",
                       point=attaining_point(pts, vals))


def characteristic_field(s: LcsStructure, act: GroupAction, xi, a_vec) -> NumericVectorField:
    """psi(a) = sum a_i X_i + xi(a) * (dual of the twisting form)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    a_vec = np.atleast_1d(np.asarray(a_vec, dtype=float))
    weight = float(xi @ a_vec)
    generators = act.fundamental_fields()
    dual = anti_lee_field(s)

    def evaluator(points):
        out = weight * dual.evaluate(points)
        for coeff, x_field in zip(a_vec, generators):
            if coeff:
                out = out + coeff * x_field.evaluate(points)
        return out

    return NumericVectorField(s.dim, evaluator)


class CharacteristicEntry:
    """Both computations of the characteristic space at one point."""

    __slots__ = ("point", "basis", "rank", "stabilizer", "span_angle", "flagged")

    def __init__(self, point, basis, rank, stabilizer, span_angle, flagged):
        self.point = np.asarray(point, dtype=float)
        self.basis = basis
        self.rank = int(rank)
        self.stabilizer = stabilizer
        self.span_angle = float(span_angle)
        self.flagged = bool(flagged)


def characteristic_basis(s: LcsStructure, act: GroupAction, m: MomentumData, xi,
                         point) -> CharacteristicEntry:
    """Intersection route vs structured-combination route at one point."""
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    base = s.manifold.tangent_basis(pts)[0]

    # route one: Ker(dmu) inside the tangent space, then its omega-complement
    rows = np.matmul(momentum_jacobian(m, pts)[0], base)
    ker_coeff, flag1 = null_space(rows)
    kernel = base @ ker_coeff
    matrix = s.omega.matrix_at(pts)[0]
    system = kernel.T @ matrix.T @ base
    comp_coeff, flag2 = null_space(system)
    complement = base @ comp_coeff
    # intersection of the two spans
    if kernel.shape[1] == 0 or complement.shape[1] == 0:
        intersection = np.zeros((s.dim, 0))
        flag3 = False
    else:
        stacked = np.concatenate([kernel, -complement], axis=1)
        mix, flag3 = null_space(stacked)
        intersection = kernel @ mix[:kernel.shape[1]]
        if intersection.shape[1]:
            intersection, _ = np.linalg.qr(intersection)

    # route two: structured combinations over the stabilizer subalgebra
    stab, flag4 = stabilizer_subalgebra(s, act, xi, pts)
    columns = []
    for a_vec in stab.T:
        vec = characteristic_field(s, act, xi, a_vec).evaluate(pts)[0]
        if np.linalg.norm(vec) > 1e-10:
            columns.append(vec)
    structured = np.stack(columns, axis=1) if columns else np.zeros((s.dim, 0))

    angle = span_distance(intersection, structured)
    return CharacteristicEntry(pts[0], structured, intersection.shape[1], stab,
                               angle, flag1 or flag2 or flag3 or flag4)


def characteristic_span_check(s: LcsStructure, act: GroupAction, m: MomentumData,
                              xi, points, tol: float = 1e-8,
                              prefix: str = "reduction"):
    """Max principal angle between the two routes over the points, plus
    rank-vs-stabilizer agreement."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    worst = 0.0
    worst_point = pts[0]
    flagged = False
    rank_ok = True
    for p in pts:
        entry = characteristic_basis(s, act, m, xi, p)
        degenerate = entry.stabilizer.shape[1] - entry.basis.shape[1]
        if degenerate:
            # structured combinations that vanish pointwise (norm below 1e-10)
            # are excluded from the span; the intersection must shrink to match
            rank_ok &= entry.rank == entry.basis.shape[1]
        else:
            rank_ok &= entry.rank == entry.stabilizer.shape[1]
        flagged |= entry.flagged
        if entry.span_angle > worst:
            worst = entry.span_angle
            worst_point = p
    results = [make_result(f"{prefix}.span_agreement", worst, tol,
                           anchor="linear-algebra intersection matches the span "
                                  "of the structured combinations",
                           point=worst_point, flagged=flagged)]
    results.append(make_result(
        f"{prefix}.rank_matches_stabilizer", 0.0 if rank_ok else 1.0, 0.5,
        anchor="characteristic rank equals the stabilizer dimension"))
    return results


def rank_scan(s: LcsStructure, act: GroupAction, m: MomentumData, xi, points,
              prefix: str = "reduction"):
    """Asserts one characteristic rank across the points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    ranks = []
    dims = []
    for p in pts:
        entry = characteristic_basis(s, act, m, xi, p)
        ranks.append(entry.rank)
        dims.append(entry.stabilizer.shape[1])
    unique = sorted(set(ranks))
    constant = len(unique) == 1
    note = f"ranks {unique}, stabilizer dim {sorted(set(dims))}"
    return make_result(f"{prefix}.rank_constant", 0.0 if constant else 1.0, 0.5,
                       anchor="characteristic rank is constant along the level set",
                       notes=note), (unique[0] if constant else None)


def leaf_flow(s: LcsStructure, act: GroupAction, m: MomentumData, xi, a_vec,
              start, time: float, steps: int = 200):
    """Integrate the structured combination along the level set.

    Classic fourth-order steps with a constraint re-projection after each;
    returns the path including both endpoints.
    """
    field = characteristic_field(s, act, xi, a_vec)
    manifold = s.manifold
    pts = np.atleast_2d(np.asarray(start, dtype=float)).copy()
    h = time / steps
    path = [pts.copy()]
    for _ in range(steps):
        k1 = field.evaluate(pts)
        k2 = field.evaluate(pts + 0.5 * h * k1)
        k3 = field.evaluate(pts + 0.5 * h * k2)
        k4 = field.evaluate(pts + h * k3)
        pts = pts + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        pts = manifold.project(pts)
        path.append(pts.copy())
    return np.stack(path, axis=0)


def leaf_invariance_check(s, act, m: MomentumData, xi, a_vec, start,
                          time: float = 1.0, steps: int = 200,
                          tol: float = 1e-8, prefix: str = "reduction"):
    """Momentum stays constant along an integrated leaf."""
    path = leaf_flow(s, act, m, xi, a_vec, start, time, steps)
    flat = path.reshape(-1, path.shape[-1])
    drift = np.max(np.abs(m.values(flat) - np.atleast_1d(xi)[None, :]))
    return make_result(f"{prefix}.leaf_momentum_constant", float(drift), tol,
                       anchor="momentum is constant along integrated leaves")


def algebra_identities_check(s: LcsStructure, act: GroupAction, m: MomentumData,
                             xi, points, tol: float = 1e-8, xi_tol: float = 1e-12,
                             prefix: str = "reduction", basis=None):
    """Bracket relation of the structured combinations, and the level value
    killing brackets of stabilizer elements.

    By default pairs run over the stabilizer subalgebra; pass an explicit
    (k, r) column basis to exercise the bracket identity on other elements,
    in which case the level check is skipped (it only holds on the
    stabilizer).
    """
    from .calculus import bracket_values

    pts = np.atleast_2d(np.asarray(points, dtype=float))
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if basis is None:
        stab, _ = stabilizer_subalgebra(s, act, xi, pts[:1])
        check_level = True
    else:
        stab = np.atleast_2d(np.asarray(basis, dtype=float))
        check_level = False
    r = stab.shape[1]

    worst_bracket = 0.0
    worst_xi = 0.0
    for i in range(r):
        for j in range(i + 1, r):
            a_vec = stab[:, i]
            b_vec = stab[:, j]
            psi_a = characteristic_field(s, act, xi, a_vec)
            psi_b = characteristic_field(s, act, xi, b_vec)
            lie = bracket_values(psi_a, psi_b, pts)
            bracket_ab = act.algebra.bracket(a_vec, b_vec)
            x_bracket = np.zeros_like(lie)
            for l, coeff in enumerate(bracket_ab):
                if coeff:
                    x_bracket += coeff * act.fundamental_field(l).evaluate(pts)
            worst_bracket = max(worst_bracket, float(np.max(np.abs(lie + x_bracket))))
            worst_xi = max(worst_xi, float(abs(xi_arr @ bracket_ab)))
    results = [
        make_result(f"{prefix}.combination_bracket", worst_bracket, tol,
                    anchor="bracket of two structured combinations is minus the "
                           "generator of the algebra bracket"),
    ]
    if check_level:
        results.append(make_result(
            f"{prefix}.level_kills_brackets", worst_xi, xi_tol,
            anchor="the level value vanishes on brackets of stabilizer "
                   "elements"))
    return results


class QuotientWitness:
    """Supplied projection and candidate reduced structure."""

    __slots__ = ("projection", "reduced", "gauge")

    def __init__(self, projection, reduced: LcsStructure, gauge):
        self.projection = projection
        self.reduced = reduced
        self.gauge = as_field(gauge, projection.source_dim)


def quotient_verify(s: LcsStructure, act: GroupAction, m: MomentumData, xi,
                    witness: QuotientWitness, level_points, rng,
                    tol: float = 1e-8, prefix: str = "reduction"):
    """All pointwise conclusions of the reduction statement on a witness."""
    pts = np.atleast_2d(np.asarray(level_points, dtype=float))
    pi = witness.projection
    mapped = pi.apply(pts)
    results = []

    membership = witness.reduced.manifold.constraint_values(mapped)
    res0 = float(np.max(np.abs(membership))) if membership.size else 0.0
    results.append(make_result(
        f"{prefix}.witness_maps_into_quotient", res0, 1e-9,
        anchor="the projection lands in the declared quotient constraint set",
        point=attaining_point(pts, np.max(np.abs(membership), axis=1)
                              if membership.size else np.zeros(pts.shape[0]))))

    # (i) the projection annihilates the characteristic directions
    jac = pi.jacobian_at(pts)
    worst = 0.0
    worst_point = pts[0]
    for k, p in enumerate(pts):
        entry = characteristic_basis(s, act, m, xi, p)
        if entry.basis.shape[1] == 0:
            continue
        pushed = jac[k] @ entry.basis
        res = float(np.max(np.abs(pushed)))
        if res > worst:
            worst, worst_point = res, p
    results.append(make_result(f"{prefix}.projection_kills_foliation", worst, tol,
                               anchor="the projection differential annihilates "
                                      "the characteristic directions",
                               point=worst_point))

    # tangent frame of the level set for the pullback identities
    lvl = level_manifold(s.manifold, m, xi)
    bases = lvl.tangent_basis(pts)
    d = bases.shape[2]
    coeff = rng.normal(size=(2, pts.shape[0], d))
    u = np.einsum("mnd,md->mn", bases, coeff[0])
    v = np.einsum("mnd,md->mn", bases, coeff[1])

    from .calculus import pullback

    # (ii) pullback of the reduced form matches the rescaled restriction
    scale = np.exp(witness.gauge.evaluate(pts) * np.ones(pts.shape[0]))
    lhs = pullback(pi, witness.reduced.omega).evaluate(pts, [u, v])
    rhs = scale * s.omega.evaluate(pts, [u, v])
    res = np.abs(lhs - rhs)
    results.append(make_result(f"{prefix}.reduced_form_pullback",
                               float(np.max(res)), tol,
                               anchor="pullback of the reduced form is the gauge "
                                      "rescale of the restricted form",
                               point=attaining_point(pts, res)))

    # (iii) pullback of the reduced twisting form
    gauge_d = exterior_derivative(KForm.from_scalar(witness.gauge, s.dim))
    lhs = pullback(pi, witness.reduced.theta).evaluate(pts, [u])
    rhs = (s.theta + gauge_d).evaluate(pts, [u])
    res = np.abs(lhs - rhs)
    results.append(make_result(f"{prefix}.reduced_twisting_pullback",
                               float(np.max(res)), tol,
                               anchor="pullback of the reduced twisting form is "
                                      "the twisting form plus the gauge "
                                      "differential",
                               point=attaining_point(pts, res)))

    # (iv) the reduced structure is itself of the right kind
    results.extend(verify_lcs(witness.reduced, mapped, rng,
                              prefix=f"{prefix}.reduced"))
    return results


def sweep_values(s: LcsStructure, act: GroupAction, m: MomentumData, values,
                 rng, count: int = 12, radius: float = 1.5,
                 prefix: str = "sweep"):
    """Regularity, rank constancy, and stabilizer dimension along a level path.

    A non-regular value raises RankDeficiencyError naming the parameter.
    """
    results = []
    ranks = []
    dims = []
    for step, xi in enumerate(values):
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
        label = f"{prefix}.step_{step:02d}"
        try:
            pts = sample_level_set(s.manifold, m, xi_arr, rng, count, radius=radius)
        except RankDeficiencyError as err:
            raise RankDeficiencyError(
                f"sweep rejected at parameter {xi_arr.tolist()}: {err}") from err
        results.append(regularity_check(s.manifold, m, xi_arr, pts, prefix=label))
        scan, rank = rank_scan(s, act, m, xi_arr, pts, prefix=label)
        results.append(scan)
        ranks.append(rank)
        stab, _ = stabilizer_subalgebra(s, act, xi_arr, pts[:1])
        dims.append(stab.shape[1])
    constant = len(set(ranks)) == 1 and len(set(dims)) == 1 and ranks[0] is not None
    results.append(make_result(
        f"{prefix}.path_rank_constant", 0.0 if constant else 1.0, 0.5,
        anchor="rank and stabilizer dimension are constant along the path",
        notes=f"ranks {ranks}, stabilizer dims {dims}"))
    return results


def sweep_gauges(s: LcsStructure, act: GroupAction, m: MomentumData, xi, gauges,
                 rng, count: int = 12, radius: float = 1.5,
                 prefix: str = "sweep"):
    """The same scan along a path of conformal gauges at a fixed level value."""
    from .lcs import ConformalGauge, conformal_rescale
    from .action import rescaled_momentum

    results = []
    ranks = []
    dims = []
    for step, gauge_field in enumerate(gauges):
        gauge = ConformalGauge.of(gauge_field, s.dim)
        s_g = conformal_rescale(s, gauge)
        act_g = act.with_gauge_cocycles(gauge)
        m_g = rescaled_momentum(m, gauge)
        label = f"{prefix}.gauge_{step:02d}"
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
        try:
            pts = sample_level_set(s.manifold, m_g, xi_arr, rng, count, radius=radius)
        except RankDeficiencyError as err:
            raise RankDeficiencyError(
                f"sweep rejected at gauge step {step}: {err}") from err
        results.append(regularity_check(s.manifold, m_g, xi_arr, pts, prefix=label))
        scan, rank = rank_scan(s_g, act_g, m_g, xi_arr, pts, prefix=label)
        results.append(scan)
        ranks.append(rank)
        stab, _ = stabilizer_subalgebra(s_g, act_g, xi_arr, pts[:1])
        dims.append(stab.shape[1])
    constant = len(set(ranks)) == 1 and len(set(dims)) == 1 and ranks[0] is not None
    results.append(make_result(
        f"{prefix}.path_rank_constant", 0.0 if constant else 1.0, 0.5,
        anchor="rank and stabilizer dimension are constant along the gauge path",
        notes=f"ranks {ranks}, stabilizer dims {dims}"))
    return results
