"""Group actions: algebra validation, cocycles, momenta, equivariance, and
circle averaging."""

import numpy as np
import pytest

from lcslab.action import (
    GroupAction,
    LieAlgebraSpec,
    MomentumData,
    anti_lee_transport_check,
    average_invariance_check,
    equivariance_check,
    haar_average,
    poisson_homomorphism_check,
    rescaled_momentum,
    verify_conformal_action,
    verify_twisted_hamiltonian,
)
from lcslab.calculus import DiffeoMap
from lcslab.errors import DimensionMismatchError, UnsupportedGroupError
from lcslab.expr import ScalarField
from lcslab.gallery import circle_action, load_example
from lcslab.lcs import ConformalGauge


def test_algebra_rejects_broken_antisymmetry():
    c = np.zeros((2, 2, 2))
    c[0][1][0] = 1.0
    c[1][0][0] = 1.0  # should be -1
    with pytest.raises(DimensionMismatchError, match="antisymmetric"):
        LieAlgebraSpec(c)


def test_algebra_rejects_broken_jacobi():
    c = np.zeros((3, 3, 3))
    # [e1,e2] = e3, [e2,e3] = e1, [e3,e1] = e1: fails Jacobi
    c[0][1][2] = 1.0
    c[1][0][2] = -1.0
    c[1][2][0] = 1.0
    c[2][1][0] = -1.0
    c[2][0][0] = 1.0
    c[0][2][0] = -1.0
    with pytest.raises(DimensionMismatchError, match="Jacobi"):
        LieAlgebraSpec(c)


def test_abelian_algebra():
    alg = LieAlgebraSpec.abelian(3)
    assert alg.dim == 3 and alg.is_abelian
    assert np.max(np.abs(alg.structure_constants)) == 0.0


def test_affine_bracket_frozen():
    alg = load_example("affine_plane").action.algebra
    assert not alg.is_abelian
    got = alg.bracket(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    assert np.max(np.abs(got - np.array([-1.0, 0.0]))) == 0.0
    # ad_b e_a reads the same constants
    ad = alg.ad_matrix(np.array([0.0, 1.0]))
    assert np.max(np.abs(ad @ np.array([1.0, 0.0]) - np.array([1.0, 0.0]))) == 0.0


def test_element_composition_cocycle_rule(rng):
    scn = load_example("cn_conformal")
    act = scn.action
    g = act.element_at(0, 0.7)
    h = act.element_at(0, -1.3)
    gh = act.compose_elements(g, h)
    pts = rng.normal(size=(10, 4))
    # phi_{gh} = phi_g . h + phi_h
    lhs = gh.cocycle.evaluate(pts) * np.ones(10)
    rhs = (g.cocycle.evaluate(h.map.apply(pts))
           + h.cocycle.evaluate(pts) * np.ones(10))
    assert np.max(np.abs(lhs - rhs)) < 1e-12
    assert np.max(np.abs(gh.map.apply(pts) - g.map.apply(h.map.apply(pts)))) < 1e-12


def test_gauge_cocycle_closed_form(rng):
    act = circle_action(4, [(0, 1, "t"), (2, 3, "t")])
    f = ScalarField.from_source("(3*x1 + 2*x3) / 10", 4)
    gauged = act.with_gauge_cocycles(ConformalGauge(f))
    el = gauged.element_at(0, 0.8)
    pts = rng.normal(size=(8, 4))
    want = f.evaluate(el.map.apply(pts)) - f.evaluate(pts)
    got = el.cocycle.evaluate(pts) * np.ones(8)
    assert np.max(np.abs(got - want)) < 1e-12
    assert gauged.torus_rank == act.torus_rank


def test_adjoint_of_squeeze_frozen():
    act = load_example("affine_plane").action
    ad = act.adjoint_matrix(act.element_at(1, -1.0))
    assert np.max(np.abs(ad - np.diag([np.exp(-1.0), 1.0]))) < 1e-12


def test_coadjoint_inverts_adjoint():
    act = load_example("affine_plane").action
    el = act.element_at(1, 0.6)
    ad = act.adjoint_matrix(el)
    coad = act.coadjoint_matrix(el)
    assert np.max(np.abs(coad @ ad.T - np.eye(2))) < 1e-10


def test_fundamental_fields_match_flow_velocity(rng):
    scn = load_example("cn_standard")
    act = scn.action
    pts = rng.normal(size=(8, 4))
    for i, field in enumerate(act.fundamental_fields()):
        vel = act.flows[i].velocity_field().evaluate(pts)
        assert np.max(np.abs(field.evaluate(pts) - vel)) < 1e-12


def test_verify_conformal_action_ids(rng):
    scn = load_example("cn_conformal")
    pts = scn.manifold.sample(12, rng, radius=1.2)
    results = verify_conformal_action(scn.action, scn.structure, pts, rng,
                                      elements=scn.action.sampled_elements(rng, 3))
    ids = {r.check_id for r in results}
    assert ids == {"action.conformal_pullback", "action.cocycle_rule"}
    assert all(r.status == "PASS" for r in results)


def test_conformal_action_detects_wrong_cocycle(rng):
    # rotations preserve the flat form but the structure here is twisted, so
    # claiming zero cocycles breaks the pullback law at finite elements
    scn = load_example("cn_conformal")
    base = circle_action(4, [(0, 1, "t"), (2, 3, "t")])  # zero cocycles
    pts = scn.manifold.sample(10, rng, radius=1.2)
    results = verify_conformal_action(base, scn.structure, pts, rng,
                                      elements=base.sampled_elements(rng, 3))
    by_id = {r.check_id: r for r in results}
    assert by_id["action.conformal_pullback"].status == "FAIL"
    assert by_id["action.conformal_pullback"].residual > 1e-3


def test_conformal_action_defaults_to_declared_elements(rng):
    # with no declared and no supplied elements the pullback loop is empty,
    # so the caller is responsible for sampling; residual stays at zero
    scn = load_example("cn_conformal")
    pts = scn.manifold.sample(6, rng, radius=1.2)
    results = verify_conformal_action(scn.action, scn.structure, pts, rng)
    by_id = {r.check_id: r for r in results}
    assert by_id["action.conformal_pullback"].residual == 0.0


def test_twisted_hamiltonian_ids(rng):
    scn = load_example("blowup_action")
    pts = scn.manifold.sample(10, rng, radius=1.2)
    results = verify_twisted_hamiltonian(scn.action, scn.structure,
                                         scn.momentum, pts, rng)
    ids = {r.check_id for r in results}
    assert ids == {"momentum.hamiltonian_1", "momentum.cocycle_rate_1"}
    assert all(r.status == "PASS" for r in results)


def test_equivariance_50_pairs(rng):
    scn = load_example("cn_conformal")
    pts = scn.manifold.sample(10, rng, radius=1.2)
    elements = scn.action.sampled_elements(rng, 5)
    r = equivariance_check(scn.action, scn.momentum, pts, elements=elements)
    assert r.check_id == "momentum.equivariance"
    assert r.status == "PASS" and r.residual < 1e-10


def test_equivariance_detects_wrong_momentum(rng):
    scn = load_example("cn_conformal")
    pts = scn.manifold.sample(10, rng, radius=1.2)
    bad = MomentumData.from_sources(["x1^2 + x2^2"], 4)  # missing the gauge factor
    r = equivariance_check(scn.action, bad, pts,
                           elements=scn.action.sampled_elements(rng, 5))
    assert r.status == "FAIL"


def test_poisson_homomorphism_affine(rng):
    scn = load_example("affine_plane")
    pts = rng.normal(size=(12, 2))
    r = poisson_homomorphism_check(scn.action, scn.structure, scn.momentum, pts)
    assert r.check_id == "momentum.poisson_homomorphism"
    assert r.status == "PASS"


def test_rescaled_momentum_scales_pointwise(rng):
    scn = load_example("cn_standard")
    f = ScalarField.from_source("x2/4", 4)
    scaled = rescaled_momentum(scn.momentum, ConformalGauge(f))
    pts = rng.normal(size=(10, 4))
    want = np.exp(f.evaluate(pts))[:, None] * scn.momentum.values(pts)
    assert np.max(np.abs(scaled.values(pts) - want)) < 1e-12


def test_haar_average_invariance(rng):
    scn = load_example("cn_conformal")
    averaged, f_avg = haar_average(scn.action, scn.structure)
    pts = scn.manifold.sample(6, rng, radius=1.2)
    results = average_invariance_check(scn.action, averaged, f_avg, pts, rng)
    ids = {r.check_id for r in results}
    assert ids == {"average.invariant", "average.gauge_shift"}
    assert all(r.status == "PASS" for r in results)


def test_haar_average_needs_torus():
    scn = load_example("affine_plane")
    with pytest.raises(UnsupportedGroupError):
        haar_average(scn.action, scn.structure)


def test_anti_lee_transport(rng):
    scn = load_example("hopf")
    pts = scn.manifold.sample(5, rng)
    r = anti_lee_transport_check(scn.action, scn.structure, pts,
                                 elements=scn.action.sampled_elements(rng, 2))
    results = r if isinstance(r, list) else [r]
    assert all(x.status == "PASS" for x in results)


def test_momentum_data_shapes(rng):
    m = MomentumData.from_sources(["x1", "x2^2"], 3)
    assert m.k == 2 and m.dim == 3
    pts = rng.normal(size=(7, 3))
    vals = m.values(pts)
    assert vals.shape == (7, 2)
    assert np.max(np.abs(vals[:, 0] - pts[:, 0])) == 0.0
    pair = m.pairing(np.array([2.0, -1.0]))
    got = pair.evaluate(pts) * np.ones(7)
    assert np.max(np.abs(got - (2 * pts[:, 0] - pts[:, 1] ** 2))) < 1e-14


def test_group_action_dimension_guard():
    flow2 = DiffeoMap.from_sources(["x1 + t", "x2"], 2)
    flow3 = DiffeoMap.from_sources(["x1 + t", "x2", "x3"], 3)
    with pytest.raises(DimensionMismatchError):
        GroupAction(LieAlgebraSpec.abelian(2), [flow2, flow3])
