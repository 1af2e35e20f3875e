"""Twisted two-form structures: certification, duals, gauges, brackets, and
the least-squares vanishing probe."""

import numpy as np
import pytest

from lcslab.calculus import KForm, exterior_derivative, wedge
from lcslab.errors import SingularSystemError
from lcslab.expr import ScalarField
from lcslab.gallery import doubled_area_form, load_example
from lcslab.lcs import (
    ConformalGauge,
    LcsStructure,
    anti_lee_field,
    conformal_rescale,
    h0_vanishing_probe,
    omega_dual_values,
    twisted_poisson,
    verify_lcs,
)
from lcslab.manifold import ConstrainedManifold


def flat(dim=4):
    return LcsStructure(doubled_area_form(dim), KForm.zero(1, dim),
                        ConstrainedManifold.ambient(dim))


def test_verify_lcs_flat(rng):
    s = flat()
    pts = s.manifold.sample(20, rng)
    results = verify_lcs(s, pts, rng)
    ids = {r.check_id for r in results}
    assert ids == {"lcs.theta_closed", "lcs.defining_identity", "lcs.nondegenerate"}
    assert all(r.status == "PASS" for r in results)


def test_verify_lcs_rejects_degenerate(rng):
    dim = 4
    # dx1^dx2 alone is degenerate in R^4
    omega = wedge(KForm.coordinate_differential(0, dim),
                  KForm.coordinate_differential(1, dim))
    s = LcsStructure(omega, KForm.zero(1, dim), ConstrainedManifold.ambient(dim))
    pts = s.manifold.sample(10, rng)
    by_id = {r.check_id: r for r in verify_lcs(s, pts, rng)}
    assert by_id["lcs.nondegenerate"].status == "FAIL"


def test_verify_lcs_rejects_wrong_twist(rng):
    scn = load_example("cn_conformal")
    pts = scn.manifold.sample(10, rng)
    wrong = LcsStructure(scn.structure.omega, KForm.zero(1, 4), scn.manifold)
    by_id = {r.check_id: r for r in verify_lcs(wrong, pts, rng)}
    assert by_id["lcs.defining_identity"].status == "FAIL"
    assert by_id["lcs.defining_identity"].residual > 0.01


def test_omega_dual_solves_pairing(rng):
    scn = load_example("hopf")
    s = scn.structure
    pts = scn.manifold.sample(8, rng)
    covs = rng.normal(size=(8, 6))
    # project covectors onto the tangent coframe so a dual exists
    bases = s.manifold.tangent_basis(pts)
    covs = np.einsum("mnd,md->mn", bases, np.einsum("mn,mnd->md", covs, bases))
    duals = omega_dual_values(s, covs, pts)
    u = rng.normal(size=(8, 6))
    u = np.einsum("mnd,md->mn", bases, np.einsum("mn,mnd->md", u, bases))
    got = s.omega.evaluate(pts, [duals, u])
    want = np.sum(covs * u, axis=1)
    assert np.max(np.abs(got - want)) < 1e-9


def test_anti_lee_cn_conformal_closed_form(rng):
    scn = load_example("cn_conformal")
    pts = scn.manifold.sample(12, rng, radius=1.2)
    dual = anti_lee_field(scn.structure).evaluate(pts)
    f = ScalarField.from_source("(3*x1 + 2*x3) / 10", 4)
    want = np.exp(-f.evaluate(pts))[:, None] * np.array([0.0, 0.15, 0.0, 0.1])
    assert np.max(np.abs(dual - want)) < 1e-12


def test_anti_lee_pairs_to_zero_with_twist(rng):
    # theta(theta^omega) = 0 always, by antisymmetry
    for name in ("hopf", "cotangent_s1s3", "cn_conformal"):
        scn = load_example(name)
        pts = scn.manifold.sample(8, rng, radius=scn.sample_radius)
        dual = anti_lee_field(scn.structure).evaluate(pts)
        vals = scn.structure.theta.evaluate(pts, [dual])
        assert np.max(np.abs(vals)) < 1e-11, name


def test_conformal_rescale_shifts_twist(rng):
    s = flat()
    f = ScalarField.from_source("x1*x4 / 5", 4)
    rescaled = conformal_rescale(s, ConformalGauge(f))
    pts = s.manifold.sample(10, rng)
    u = rng.normal(size=(10, 4))
    v = rng.normal(size=(10, 4))
    want_omega = np.exp(f.evaluate(pts)) * s.omega.evaluate(pts, [u, v])
    assert np.max(np.abs(rescaled.omega.evaluate(pts, [u, v]) - want_omega)) < 1e-12
    df = exterior_derivative(KForm.from_scalar(f, 4))
    got_theta = rescaled.theta.evaluate(pts, [u])
    assert np.max(np.abs(got_theta - df.evaluate(pts, [u]))) < 1e-12
    # and the rescaled pair still certifies
    assert all(r.status == "PASS" for r in verify_lcs(rescaled, pts, rng))


def test_twisted_poisson_antisymmetric(rng):
    scn = load_example("cn_conformal")
    pts = scn.manifold.sample(10, rng, radius=1.2)
    f = "x1*x2"
    g = "x3 + x4^2"
    ab = twisted_poisson(scn.structure, f, g, pts)
    ba = twisted_poisson(scn.structure, g, f, pts)
    assert np.max(np.abs(ab + ba)) < 1e-11


def test_twisted_poisson_affine_frozen(rng):
    scn = load_example("affine_plane")
    pts = rng.normal(size=(20, 2))
    got = twisted_poisson(scn.structure, scn.momentum.rho[0],
                          scn.momentum.rho[1], pts)
    assert np.max(np.abs(got + pts[:, 1])) < 1e-12


def test_h0_probe_exact_gauge_hits_zero(rng):
    scn = load_example("cn_conformal")
    pts = scn.manifold.sample(60, rng, radius=1.2)
    f = ScalarField.from_source("(3*x1 + 2*x3) / 10", 4)
    floor, coeffs = h0_vanishing_probe(scn.structure, [f.exp()], pts)
    assert floor < 1e-12
    assert coeffs.shape == (1,)


def test_h0_probe_constant_floor_frozen(rng):
    # d_theta 1 = -theta, and |theta|^2 = (9 + 4)/100 everywhere
    scn = load_example("cn_conformal")
    pts = scn.manifold.sample(60, rng, radius=1.2)
    floor, _ = h0_vanishing_probe(scn.structure, ["1"], pts)
    assert abs(floor - 0.13) < 1e-12


def test_h0_probe_polynomial_span_stays_positive(rng):
    scn = load_example("cn_conformal")
    pts = scn.manifold.sample(60, rng, radius=1.2)
    floor, _ = h0_vanishing_probe(scn.structure, ["1", "x1", "x3"], pts)
    assert 1e-3 < floor < 0.13


def test_h0_probe_rejects_dependent_basis(rng):
    scn = load_example("cn_conformal")
    pts = scn.manifold.sample(30, rng, radius=1.2)
    with pytest.raises(SingularSystemError):
        h0_vanishing_probe(scn.structure, ["x1", "2*x1"], pts)
