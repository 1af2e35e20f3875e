"""Level sets, characteristic spaces, and the quotient witness machinery."""

import numpy as np
import pytest

from lcslab.errors import RankDeficiencyError
from lcslab.gallery import load_example
from lcslab.reduction import (algebra_identities_check, characteristic_basis,
                              characteristic_field, characteristic_span_check,
                              generator_pairings, leaf_invariance_check,
                              level_fields, level_manifold,
                              momentum_rank_margin, obstruction_check,
                              obstruction_values, project_to_level,
                              quotient_verify, rank_scan, regularity_check,
                              sample_level_set, stabilizer_subalgebra,
                              sweep_gauges, sweep_values)


def level_points(scn, rng, count=12, xi_index=0):
    return sample_level_set(scn.structure.manifold, scn.momentum,
                            scn.xi_values[xi_index], rng, count)


def test_level_fields_shift_by_value():
    scn = load_example("cn_standard")
    fields = level_fields(scn.momentum, [1.0])
    assert len(fields) == 1
    pts = np.array([[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 1.0, 1.0]])
    got = fields[0].evaluate(pts)
    assert np.allclose(got, [0.0, 3.0])


def test_level_manifold_stacks_constraints(rng):
    scn = load_example("cn_standard")
    lvl = level_manifold(scn.structure.manifold, scn.momentum, [1.0])
    assert lvl.ambient_dim == 4
    assert lvl.tangent_dim == 3
    pts = lvl.sample(8, rng)
    assert np.max(np.abs(np.sum(pts ** 2, axis=1) - 1.0)) < 1e-10


def test_project_to_level_converges(rng):
    scn = load_example("cn_standard")
    seeds = rng.normal(size=(15, 4)) * 1.5
    pts = project_to_level(scn.structure.manifold, scn.momentum, [1.0], seeds)
    res = np.abs(scn.momentum.values(pts) - 1.0)
    assert pts.shape == (15, 4)
    assert np.max(res) < 1e-10


def test_momentum_rank_margin_frozen(rng):
    # d|z|^2 = 2x has norm exactly 2 on the unit level, and the ambient
    # space is flat, so the margin is the closed-form value
    scn = load_example("cn_standard")
    pts = level_points(scn, rng)
    assert abs(momentum_rank_margin(scn.structure.manifold, scn.momentum, pts)
               - 2.0) < 1e-12


def test_sample_level_set_count_and_keep(rng):
    scn = load_example("cn_standard")
    pts = sample_level_set(scn.structure.manifold, scn.momentum, [1.0], rng,
                           25, keep=lambda p: p[:, 0] > 0.1)
    assert pts.shape == (25, 4)
    assert np.all(pts[:, 0] > 0.1)
    assert np.max(np.abs(np.sum(pts ** 2, axis=1) - 1.0)) < 1e-10


def test_sample_level_set_rejects_singular_level(rng):
    # |z|^2 = 0 is the origin, where the differential dies
    scn = load_example("cn_standard")
    with pytest.raises(RankDeficiencyError):
        sample_level_set(scn.structure.manifold, scn.momentum, [0.0], rng, 8)


@pytest.mark.parametrize("seed", [0, 1, 2, 7, 11])
def test_sample_level_set_survives_singular_paths(seed):
    # the second component x1*x2 degenerates on the line x2 = 0; starts whose
    # Newton path crosses it must be discarded, not abort the whole draw
    scn = load_example("affine_plane")
    rng = np.random.default_rng(seed)
    pts = level_points(scn, rng)
    assert np.max(np.abs(pts - np.array([2.0, 1.0]))) < 1e-7


def test_regularity_check_pass_and_fail(rng):
    scn = load_example("cn_standard")
    pts = level_points(scn, rng)
    res = regularity_check(scn.structure.manifold, scn.momentum, [1.0], pts)
    assert res.check_id == "reduction.regular"
    assert res.direction == "above"
    assert res.status == "PASS" and res.residual == pytest.approx(2.0)

    dead = regularity_check(scn.structure.manifold, scn.momentum, [0.0],
                            np.zeros((1, 4)))
    assert dead.status == "FAIL" and dead.residual == 0.0


def test_generator_pairings(rng):
    flat = load_example("cn_standard")
    pts = rng.normal(size=(6, 4))
    assert np.max(np.abs(generator_pairings(flat.structure, flat.action, pts))) == 0.0

    twisted = load_example("cn_conformal")
    vals = generator_pairings(twisted.structure, twisted.action, pts)
    assert vals.shape == (6, 1)
    assert np.max(np.abs(vals)) > 1e-3


def test_stabilizer_is_everything_for_abelian_untwisted(rng):
    scn = load_example("cn_standard")
    pts = level_points(scn, rng, count=1)
    stab, flagged = stabilizer_subalgebra(scn.structure, scn.action, [1.0], pts)
    assert stab.shape == (1, 1) and not flagged
    assert abs(abs(stab[0, 0]) - 1.0) < 1e-14


def test_obstruction_values(rng):
    # a single generator cannot produce the skew pairing at all
    cn = load_example("cn_standard")
    pts = level_points(cn, rng, count=6)
    assert np.max(obstruction_values(cn.structure, cn.action, [1.0], pts)) == 0.0
    res = obstruction_check(cn.structure, cn.action, [1.0], pts)
    assert res.check_id == "reduction.obstruction" and res.status == "PASS"

    # on the flat two-torus form the pairing values are the frozen constant 1
    torus = load_example("torus_obstruction")
    tpts = torus.manifold.sample(6, rng)
    vals = obstruction_values(torus.structure, torus.action,
                              torus.xi_values[0], tpts)
    assert np.max(np.abs(vals - 1.0)) < 1e-12


def test_characteristic_field_untwisted_is_generator(rng):
    scn = load_example("cn_standard")
    pts = level_points(scn, rng, count=8)
    psi = characteristic_field(scn.structure, scn.action, [1.0], [1.0])
    gen = scn.action.fundamental_field(0).evaluate(pts)
    assert np.max(np.abs(psi.evaluate(pts) - gen)) < 1e-13


def test_characteristic_field_adds_weighted_dual(rng):
    from lcslab.lcs import anti_lee_field

    scn = load_example("cn_conformal")
    pts = level_points(scn, rng, count=8)
    psi = characteristic_field(scn.structure, scn.action, [1.0], [2.0])
    gen = scn.action.fundamental_field(0).evaluate(pts)
    dual = anti_lee_field(scn.structure).evaluate(pts)
    assert np.max(np.abs(psi.evaluate(pts) - (2.0 * gen + 2.0 * dual))) < 1e-12


def test_characteristic_basis_entry(rng):
    scn = load_example("cn_standard")
    pts = level_points(scn, rng, count=1)
    entry = characteristic_basis(scn.structure, scn.action, scn.momentum,
                                 [1.0], pts[0])
    assert entry.rank == 1
    assert entry.basis.shape == (4, 1)
    assert entry.stabilizer.shape == (1, 1)
    assert entry.span_angle < 1e-10 and not entry.flagged


def test_characteristic_span_and_rank_on_twisted_level(rng):
    scn = load_example("cn_conformal")
    pts = level_points(scn, rng, count=6)
    results = characteristic_span_check(scn.structure, scn.action,
                                        scn.momentum, [1.0], pts)
    by_id = {r.check_id: r for r in results}
    assert set(by_id) == {"reduction.span_agreement",
                          "reduction.rank_matches_stabilizer"}
    assert by_id["reduction.span_agreement"].status == "PASS"
    assert by_id["reduction.rank_matches_stabilizer"].status == "PASS"

    scan, rank = rank_scan(scn.structure, scn.action, scn.momentum, [1.0], pts)
    assert scan.status == "PASS" and rank == 1
    assert "ranks [1]" in scan.notes


def test_leaf_momentum_constant(rng):
    scn = load_example("cn_standard")
    start = level_points(scn, rng, count=1)
    res = leaf_invariance_check(scn.structure, scn.action, scn.momentum,
                                [1.0], [1.0], start, time=0.8)
    assert res.check_id == "reduction.leaf_momentum_constant"
    assert res.status == "PASS"


def test_algebra_identities_stabilizer_and_full_basis(rng):
    scn = load_example("affine_plane")
    pts = level_points(scn, rng, count=8)
    results = algebra_identities_check(scn.structure, scn.action, scn.momentum,
                                       scn.xi_values[0], pts)
    by_id = {r.check_id: r for r in results}
    assert "reduction.combination_bracket" in by_id
    assert "reduction.level_kills_brackets" in by_id
    assert all(r.status == "PASS" for r in results)
    assert by_id["reduction.level_kills_brackets"].tolerance == 1e-12

    # explicit full basis exercises the bracket identity beyond the
    # stabilizer and skips the level check
    full = algebra_identities_check(scn.structure, scn.action, scn.momentum,
                                    scn.xi_values[0], pts, basis=np.eye(2))
    assert [r.check_id for r in full] == ["reduction.combination_bracket"]
    assert full[0].status == "PASS"


def test_quotient_verify_witness_ids(rng):
    scn = load_example("cn_standard")
    pts = level_points(scn, rng, count=20)
    keep = scn.witness_keep
    norms = np.sqrt(np.sum(pts[:, keep["block"]] ** 2, axis=1))
    pts = pts[norms >= keep["floor"]]
    assert pts.shape[0] >= 4
    results = quotient_verify(scn.structure, scn.action, scn.momentum, [1.0],
                              scn.witness, pts, rng)
    ids = [r.check_id for r in results]
    assert ids == ["reduction.witness_maps_into_quotient",
                   "reduction.projection_kills_foliation",
                   "reduction.reduced_form_pullback",
                   "reduction.reduced_twisting_pullback",
                   "reduction.reduced.theta_closed",
                   "reduction.reduced.defining_identity",
                   "reduction.reduced.nondegenerate"]
    assert all(r.status == "PASS" for r in results)


def test_quotient_verify_flags_wrong_scale(rng):
    from lcslab.lcs import LcsStructure
    from lcslab.reduction import QuotientWitness

    scn = load_example("cn_standard")
    pts = level_points(scn, rng, count=20)
    keep = scn.witness_keep
    norms = np.sqrt(np.sum(pts[:, keep["block"]] ** 2, axis=1))
    pts = pts[norms >= keep["floor"]]
    reduced = scn.witness.reduced
    wrong = QuotientWitness(scn.witness.projection,
                            LcsStructure(reduced.omega.scaled(1.5),
                                         reduced.theta, reduced.manifold),
                            scn.witness.gauge)
    results = quotient_verify(scn.structure, scn.action, scn.momentum, [1.0],
                              wrong, pts, rng)
    by_id = {r.check_id: r for r in results}
    assert by_id["reduction.reduced_form_pullback"].status == "FAIL"


def test_sweep_values_along_declared_path(rng):
    scn = load_example("cn_standard")
    results = sweep_values(scn.structure, scn.action, scn.momentum,
                           scn.xi_path, rng)
    ids = [r.check_id for r in results]
    assert ids[0] == "sweep.step_00.regular"
    assert ids[-1] == "sweep.path_rank_constant"
    assert len(ids) == 2 * len(scn.xi_path) + 1
    assert all(r.status == "PASS" for r in results)


def test_sweep_values_rejects_degenerate_parameter(rng):
    scn = load_example("cn_standard")
    with pytest.raises(RankDeficiencyError, match=r"rejected at parameter \[0\.0\]"):
        sweep_values(scn.structure, scn.action, scn.momentum,
                     [[1.0], [0.0]], rng)


def test_sweep_gauges_constant_rank(rng):
    scn = load_example("cn_conformal")
    results = sweep_gauges(scn.structure, scn.action, scn.momentum, [1.0],
                           ["0", "(x1 + x2)/5"], rng)
    ids = [r.check_id for r in results]
    assert ids[0] == "sweep.gauge_00.regular"
    assert ids[-1] == "sweep.path_rank_constant"
    assert all(r.status == "PASS" for r in results)
