"""Small dense linear algebra and quadrature helpers.

Rank decisions use a relative singular value threshold together with an
ambiguity band: if any singular value falls within a factor of the band
width of the cut, the decision is flagged so callers can surface it instead
of silently misclassifying a near-degenerate configuration.
"""

import numpy as np

from .errors import RankAmbiguityError, SingularSystemError

RANK_REL_TOL = 1e-8
AMBIGUITY_BAND = 10.0


def svd_rank(matrix, rel_tol: float = RANK_REL_TOL):
    """Returns (rank, flagged, singular_values)."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    sv = np.linalg.svd(a, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0, False, sv
    cut = rel_tol * sv[0]
    rank = int(np.sum(sv > cut))
    flagged = bool(np.any((sv > cut / AMBIGUITY_BAND) & (sv < cut * AMBIGUITY_BAND)))
    return rank, flagged, sv


def null_space(matrix, rel_tol: float = RANK_REL_TOL, require_unambiguous: bool = False):
    """Orthonormal basis (columns) of the kernel; returns (basis, flagged)."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    rows, cols = a.shape
    u, sv, vt = np.linalg.svd(a)
    if sv.size == 0 or sv[0] == 0.0:
        return np.eye(cols), False
    cut = rel_tol * sv[0]
    rank = int(np.sum(sv > cut))
    flagged = bool(np.any((sv > cut / AMBIGUITY_BAND) & (sv < cut * AMBIGUITY_BAND)))
    if require_unambiguous and flagged:
        raise RankAmbiguityError(
            f"singular values {sv} give no clean rank decision at tolerance {rel_tol}")
    return vt[rank:].T.copy(), flagged


def principal_angles(basis_a, basis_b) -> np.ndarray:
    """Principal angles between the column spans of two full-rank matrices.

    Cosines alone bottom out near sqrt(eps), so angles with cosine above
    1/sqrt(2) are recomputed through the sine of the residual block. Sorted
    singular values pair up because sine and cosine are monotone in the angle.
    """
    a = np.atleast_2d(np.asarray(basis_a, dtype=float))
    b = np.atleast_2d(np.asarray(basis_b, dtype=float))
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    cross = qa.T @ qb
    cosines = np.linalg.svd(cross, compute_uv=False)
    angles = np.arccos(np.clip(cosines, -1.0, 1.0))
    k = angles.shape[0]
    sines = np.linalg.svd(qb - qa @ cross, compute_uv=False)
    sines = np.sort(sines)[-k:][::-1]
    small = cosines > 0.7071067811865476
    angles[small] = np.arcsin(np.clip(sines[::-1][small], -1.0, 1.0))
    return angles


def span_distance(basis_a, basis_b) -> float:
    """Max principal angle; +inf when the spans have different dimensions."""
    a = np.atleast_2d(np.asarray(basis_a, dtype=float))
    b = np.atleast_2d(np.asarray(basis_b, dtype=float))
    if a.shape[1] != b.shape[1]:
        return float("inf")
    if a.shape[1] == 0:
        return 0.0
    return float(np.max(principal_angles(a, b)))


def matrix_exp_series(a, tol: float = 1e-12, max_terms: int = 60) -> np.ndarray:
    """Truncated exponential series, adequate for the tiny algebras used here."""
    a = np.asarray(a, dtype=float)
    out = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for n in range(1, max_terms):
        term = term @ a / n
        out = out + term
        if np.max(np.abs(term)) < tol:
            return out
    raise SingularSystemError("matrix exponential series did not settle")


def solve_posed(a, b, cond_limit: float = 1e12):
    """Solve a square system, rejecting ill-conditioned matrices."""
    a = np.asarray(a, dtype=float)
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] == 0.0 or sv[0] / sv[-1] > cond_limit:
        raise SingularSystemError(
            f"system is singular or ill-conditioned (cond ~ {sv[0] / max(sv[-1], 1e-300):.2e})")
    return np.linalg.solve(a, b)


def circle_nodes(count: int):
    """Trapezoid nodes and weights for averaging over a full circle."""
    angles = np.arange(count) * (2.0 * np.pi / count)
    weights = np.full(count, 1.0 / count)
    return angles, weights
