"""Odd-dimensional structures, the circle bridge, and strict reduction."""

import numpy as np
import pytest

from lcslab.calculus import KForm, exterior_derivative
from lcslab.contact import (ContactStructure, angle_form,
                            bridge_consistency_check,
                            bridge_power_identity_check, contact_foliation_basis,
                            contact_momentum, contact_momentum_checks,
                            contact_quotient_verify, contact_stabilizer,
                            contact_volume_values, lcs_from_contact,
                            reeb_check, reeb_values, verify_contact)
from lcslab.errors import DegreeError, SingularSystemError
from lcslab.gallery import load_example
from lcslab.lcs import verify_lcs
from lcslab.manifold import ConstrainedManifold
from lcslab.reduction import sample_level_set


def round_sphere_contact(pairs):
    """Standard odd-sphere structure x dy - y dx over each planar pair."""
    n = 2 * pairs
    coeffs = {}
    for p in range(pairs):
        i, j = 2 * p, 2 * p + 1
        coeffs[(i,)] = f"0 - x{j + 1}"
        coeffs[(j,)] = f"x{i + 1}"
    return ContactStructure(KForm(1, n, coeffs), ConstrainedManifold.unit_sphere(n))


def test_structure_attrs_and_guards():
    c = load_example("sphere_contact").structure
    assert c.dim == 4 and c.half_rank == 1

    with pytest.raises(DegreeError, match="degree 1"):
        ContactStructure(KForm(2, 4, {(0, 1): "1"}),
                         ConstrainedManifold.unit_sphere(4))
    with pytest.raises(DegreeError, match="even"):
        ContactStructure(KForm(1, 3, {(0,): "1"}),
                         ConstrainedManifold.unit_sphere(3))


def test_volume_frozen_for_doubled_form(rng):
    # the declared form is twice the round one, so alpha wedge d(alpha)
    # picks up a factor of four over the round volume value of two
    c = load_example("sphere_contact").structure
    pts = c.manifold.sample(40, rng)
    vals = contact_volume_values(c, pts)
    assert np.max(np.abs(np.abs(vals) - 8.0)) < 1e-10

    results = verify_contact(c, pts)
    assert [r.check_id for r in results] == ["contact.volume"]
    assert results[0].direction == "above"
    assert results[0].status == "PASS"


def test_degenerate_form_fails_volume(rng):
    c = ContactStructure(KForm(1, 4, {(0,): "1"}),
                         ConstrainedManifold.unit_sphere(4))
    pts = c.manifold.sample(10, rng)
    assert verify_contact(c, pts)[0].status == "FAIL"


def test_reeb_frozen_half_speed(rng):
    # doubling the form halves its distinguished field
    c = load_example("sphere_contact").structure
    pts = c.manifold.sample(25, rng)
    expected = 0.5 * np.stack([-pts[:, 1], pts[:, 0], -pts[:, 3], pts[:, 2]],
                              axis=1)
    assert np.max(np.abs(reeb_values(c, pts) - expected)) < 1e-12

    results = reeb_check(c, pts, rng)
    assert {r.check_id for r in results} == {"contact.reeb_in_kernel",
                                             "contact.reeb_pairs_to_one"}
    assert all(r.status == "PASS" for r in results)


def test_reeb_rejects_flat_kernel(rng):
    c = ContactStructure(KForm(1, 4, {(0,): "1"}),
                         ConstrainedManifold.unit_sphere(4))
    pts = c.manifold.sample(4, rng)
    with pytest.raises(SingularSystemError, match="kernel"):
        reeb_values(c, pts)


def test_angle_form_pairs_to_one_with_rotation(rng):
    theta = angle_form(4)
    t = rng.uniform(0, 2 * np.pi, size=9)
    r = rng.uniform(0.3, 2.0, size=9)
    pts = np.stack([r * np.cos(t), r * np.sin(t),
                    rng.normal(size=9), rng.normal(size=9)], axis=1)
    tangent = np.stack([-pts[:, 1], pts[:, 0],
                        np.zeros(9), np.zeros(9)], axis=1)
    assert np.max(np.abs(theta.evaluate(pts, [tangent]) - 1.0)) < 1e-12
    # closed away from the axis of the chosen pair
    d_theta = exterior_derivative(theta)
    u = rng.normal(size=(9, 4))
    v = rng.normal(size=(9, 4))
    assert np.max(np.abs(d_theta.evaluate(pts, [u, v]))) < 1e-10

    shifted = angle_form(4, first=2)
    assert set(shifted.coeffs) == {(2,), (3,)}


def test_contact_momentum_matches_declared(rng):
    scn = load_example("clifford_circle")
    derived = contact_momentum(scn.structure, scn.action)
    pts = scn.manifold.sample(12, rng)
    assert np.max(np.abs(derived.values(pts) - scn.momentum.values(pts))) < 1e-12


def test_contact_momentum_checks_ids(rng):
    scn = load_example("clifford_circle")
    pts = scn.manifold.sample(10, rng)
    results = contact_momentum_checks(scn.structure, scn.action, scn.momentum,
                                      pts, rng)
    assert {r.check_id for r in results} == {"contact.form_invariant",
                                             "contact.equivariance"}
    assert all(r.status == "PASS" for r in results)


@pytest.mark.parametrize("pairs", [2, 3])
def test_bridge_structure_and_power_identity(pairs, rng):
    bridge = lcs_from_contact(round_sphere_contact(pairs))
    assert bridge.structure.dim == 2 * pairs + 2
    pts = bridge.structure.manifold.sample(20, rng)
    circle = np.abs(np.sum(pts[:, :2] ** 2, axis=1) - 1.0)
    sphere = np.abs(np.sum(pts[:, 2:] ** 2, axis=1) - 1.0)
    assert max(np.max(circle), np.max(sphere)) < 1e-10

    for res in verify_lcs(bridge.structure, pts, rng):
        assert res.status == "PASS", res.check_id

    power = bridge_power_identity_check(bridge, pts, rng)
    assert power.check_id == "contact.bridge_power_identity"
    assert power.status == "PASS" and power.residual < 1e-9


def test_bridge_lift_carries_doubled_factor(rng):
    # this scenario doubles the contact factor itself; the lift keeps it
    scn = load_example("hopf_bridge_torus")
    assert scn.bridge is not None and scn.bridge.scale == 1.0
    pts = scn.manifold.sample(8, rng)
    lifted = scn.bridge.alpha_lift.covector_at(pts)
    round_lift = round_sphere_contact(2).alpha.shifted_into(scn.structure.dim, 2)
    assert np.max(np.abs(lifted - 2.0 * round_lift.covector_at(pts))) < 1e-12


def test_wrong_power_scaling_detected(rng):
    # scaling only the two-form breaks the power identity by 2^(k+1) vs 2
    bridge = lcs_from_contact(round_sphere_contact(2))
    from lcslab.contact import CircleBridge
    from lcslab.lcs import LcsStructure

    s = bridge.structure
    broken = CircleBridge(LcsStructure(s.omega.scaled(2.0), s.theta, s.manifold),
                          bridge.alpha_lift, bridge.contact, bridge.scale)
    pts = s.manifold.sample(10, rng)
    res = bridge_power_identity_check(broken, pts, rng)
    assert res.status == "FAIL" and res.residual > 0.1


def test_contact_stabilizer_abelian_is_everything():
    scn = load_example("clifford_circle")
    basis, flagged = contact_stabilizer(scn.action, [1.0])
    assert basis.shape == (1, 1) and not flagged


def test_foliation_rank_one_generic(rng):
    scn = load_example("clifford_circle")
    pts = sample_level_set(scn.structure.manifold, scn.momentum,
                           scn.xi_values[0], rng, 6)
    bases = contact_foliation_basis(scn.structure, scn.action,
                                    scn.xi_values[0], pts)
    assert all(b.shape == (4, 1) for b in bases)


def test_foliation_collapses_on_reeb_action(rng):
    # the generator IS the distinguished field at this level value, so the
    # combination field vanishes identically and the rank drops to zero;
    # the paired component is constant, so every point sits on the level
    scn = load_example("sphere_contact")
    pts = scn.manifold.sample(6, rng)
    assert np.max(np.abs(scn.momentum.values(pts) - 1.0)) < 1e-12
    bases = contact_foliation_basis(scn.structure, scn.action, [1.0], pts)
    assert all(b.shape == (4, 0) for b in bases)


def test_contact_quotient_verify_ids(rng):
    scn = load_example("clifford_circle")
    pts = sample_level_set(scn.structure.manifold, scn.momentum,
                           scn.xi_values[0], rng, 12)
    results = contact_quotient_verify(scn.structure, scn.action, scn.momentum,
                                      scn.xi_values[0], scn.witness, pts, rng)
    ids = [r.check_id for r in results]
    assert ids == ["contact.witness_maps_into_quotient",
                   "contact.projection_kills_foliation",
                   "contact.reduced_form_pullback",
                   "contact.reduced.volume"]
    assert all(r.status == "PASS" for r in results)


def test_bridge_reduction_routes_agree(rng):
    # reduce the product structure, or build the product of the reduced
    # contact structure: both must produce the same two-form
    scn = load_example("hopf_bridge_torus")
    reduced_contact = load_example("clifford_circle").witness.reduced
    pts = scn.witness.reduced.manifold.sample(12, rng)
    res = bridge_consistency_check(scn.witness.reduced, reduced_contact,
                                   pts, rng)
    assert res.check_id == "contact.bridge_reduction_consistent"
    assert res.status == "PASS"
