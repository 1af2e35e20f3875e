"""Rank, angle, and quadrature helpers against hand-built matrices."""

import numpy as np
import pytest

from lcslab.errors import RankAmbiguityError, SingularSystemError
from lcslab.numerics import (
    circle_nodes,
    matrix_exp_series,
    null_space,
    principal_angles,
    solve_posed,
    span_distance,
    svd_rank,
)


def test_svd_rank_clean(rng):
    u, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    v, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    a = u[:, :2] @ np.diag([3.0, 1.0]) @ v[:2, :]
    rank, flagged, sv = svd_rank(a)
    assert rank == 2 and not flagged
    assert sv.shape == (4,)


def test_svd_rank_zero_matrix():
    rank, flagged, _ = svd_rank(np.zeros((3, 5)))
    assert rank == 0 and not flagged


def test_svd_rank_flags_ambiguous():
    # one singular value sitting right at the relative cut
    a = np.diag([1.0, 1e-8, 0.0])
    _, flagged, _ = svd_rank(a)
    assert flagged


def test_null_space_annihilates(rng):
    a = rng.normal(size=(2, 5))
    ns, flagged = null_space(a)
    assert ns.shape == (5, 3) and not flagged
    assert np.max(np.abs(a @ ns)) < 1e-12
    assert np.max(np.abs(ns.T @ ns - np.eye(3))) < 1e-12


def test_null_space_zero_matrix():
    ns, _ = null_space(np.zeros((2, 4)))
    assert ns.shape == (4, 4)
    assert np.max(np.abs(ns - np.eye(4))) == 0.0


def test_null_space_ambiguity_raises():
    a = np.diag([1.0, 1e-8, 0.0])
    with pytest.raises(RankAmbiguityError):
        null_space(a, require_unambiguous=True)


def test_principal_angles_known_rotation():
    phi = 0.3
    a = np.array([[1.0], [0.0], [0.0]])
    b = np.array([[np.cos(phi)], [np.sin(phi)], [0.0]])
    got = principal_angles(a, b)
    assert abs(got[0] - phi) < 1e-12


def test_principal_angles_tiny_angle_accuracy():
    # the sine route keeps accuracy where cosines saturate
    phi = 1e-9
    a = np.array([[1.0], [0.0]])
    b = np.array([[np.cos(phi)], [np.sin(phi)]])
    got = principal_angles(a, b)
    assert abs(got[0] - phi) < 1e-12


def test_principal_angles_plane_pair():
    a = np.eye(4)[:, :2]
    phi = 0.5
    b = np.array([[1.0, 0.0],
                  [0.0, np.cos(phi)],
                  [0.0, np.sin(phi)],
                  [0.0, 0.0]])
    got = np.sort(principal_angles(a, b))
    assert np.max(np.abs(got - np.array([0.0, phi]))) < 1e-12


def test_span_distance_mismatched_dims():
    assert span_distance(np.eye(3)[:, :1], np.eye(3)[:, :2]) == float("inf")
    assert span_distance(np.zeros((3, 0)), np.zeros((3, 0))) == 0.0


def test_matrix_exp_rotation():
    gen = np.array([[0.0, -1.0], [1.0, 0.0]])
    t = 0.8
    got = matrix_exp_series(t * gen)
    want = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    assert np.max(np.abs(got - want)) < 1e-12


def test_matrix_exp_diverges_visibly():
    with pytest.raises(SingularSystemError):
        matrix_exp_series(np.diag([200.0, 0.0]), max_terms=10)


def test_solve_posed(rng):
    a = rng.normal(size=(4, 4)) + 4 * np.eye(4)
    b = rng.normal(size=4)
    x = solve_posed(a, b)
    assert np.max(np.abs(a @ x - b)) < 1e-10
    with pytest.raises(SingularSystemError):
        solve_posed(np.array([[1.0, 1.0], [1.0, 1.0]]), np.ones(2))


def test_circle_nodes_average_trig():
    angles, weights = circle_nodes(32)
    assert abs(np.sum(weights) - 1.0) < 1e-15
    # trapezoid rule on the circle kills low harmonics exactly
    for k in (1, 2, 3):
        assert abs(np.sum(weights * np.exp(1j * k * angles))) < 1e-14
