"""Constraint-defined submanifolds of ambient space.

A manifold is the joint zero set of scalar constraint fields. Tangent spaces
are kernels of the constraint Jacobian, computed by SVD; points are produced
by Gauss-Newton projection of ambient draws. The Jacobian must keep full row
rank on the working region.
"""

import numpy as np

from .errors import (DimensionMismatchError, EvaluationDomainError,
                     NonConvergenceError, RankDeficiencyError)
from .expr import as_field

CONSTRAINT_TOL = 1e-10
JACOBIAN_RANK_FLOOR = 1e-6


def _stacked_residuals(fields, pts):
    return np.stack([f.evaluate(pts) * np.ones(pts.shape[0]) for f in fields], axis=1)


def _guarded_residuals(fields, pts):
    """Residual rows plus a mask of rows where evaluation stayed in-domain."""
    try:
        return _stacked_residuals(fields, pts), np.ones(pts.shape[0], dtype=bool)
    except EvaluationDomainError:
        vals = np.zeros((pts.shape[0], len(fields)))
        ok = np.ones(pts.shape[0], dtype=bool)
        for i in range(pts.shape[0]):
            try:
                vals[i] = _stacked_residuals(fields, pts[i:i + 1])[0]
            except EvaluationDomainError:
                ok[i] = False
        return vals, ok


def gauss_newton_zero(fields, start, tol: float = 1e-13, accept_tol: float = CONSTRAINT_TOL,
                      max_iter: int = 50, rank_floor: float = 1e-10,
                      on_rank_loss: str = "raise"):
    """Drive the stacked fields to zero from each starting point.

    Minimum-norm Gauss-Newton update x <- x - J^T (J J^T)^{-1} r, with the
    step halved per point until the residual norm stops growing (full steps
    can overshoot into overflow when a constraint is an exponential). The
    target tolerance is deliberately below the acceptance tolerance so slow
    linear tails (a symptom of degenerating Jacobians) still land well
    inside it. Returns the projected points.

    A Newton path can cross a locus where the stacked Jacobian degenerates
    even though the target set itself is fine. With on_rank_loss="raise"
    (the default) the whole batch aborts there; with "drop" the offending
    starts are discarded and only survivors are returned, raising only when
    every start dies, which is the signature of a genuinely non-regular
    target rather than unlucky seeding.
    """
    pts = np.atleast_2d(np.asarray(start, dtype=float)).copy()
    fields = list(fields)
    if not fields:
        return pts
    drop = on_rank_loss == "drop"
    alive = np.ones(pts.shape[0], dtype=bool)
    for _ in range(max_iter):
        live = np.flatnonzero(alive)
        if live.size == 0:
            break
        res = _stacked_residuals(fields, pts[live])
        act = np.max(np.abs(res), axis=1) > tol
        if not np.any(act):
            break
        idx = live[act]
        sub = pts[idx]
        res = res[act]
        jac = np.stack([np.stack([f.partial(j).evaluate(sub)
                                  * np.ones(idx.size)
                                  for j in range(pts.shape[1])], axis=1)
                        for f in fields], axis=1)
        gram = np.einsum("mcj,mdj->mcd", jac, jac)
        sv = np.linalg.svd(gram, compute_uv=False)
        bad = sv[:, -1] <= rank_floor * np.maximum(sv[:, 0], 1.0)
        if np.any(bad):
            if not drop:
                raise RankDeficiencyError(
                    "constraint Jacobian lost row rank during projection")
            alive[idx[bad]] = False
            if np.all(bad):
                continue
            idx, sub = idx[~bad], sub[~bad]
            res, jac, gram = res[~bad], jac[~bad], gram[~bad]
        lam = np.linalg.solve(gram, res[:, :, None])[:, :, 0]
        step = np.einsum("mcj,mc->mj", jac, lam)
        norm_now = np.sqrt(np.sum(res ** 2, axis=1))
        scale = np.ones((sub.shape[0], 1))
        for _ in range(40):
            cand_res, in_domain = _guarded_residuals(fields, sub - scale * step)
            with np.errstate(over="ignore"):
                norms = np.sqrt(np.sum(cand_res ** 2, axis=1))
            good = in_domain & np.isfinite(norms) & (norms <= norm_now)
            if np.all(good):
                break
            scale[~good] *= 0.5
        pts[idx] = sub - scale * step
    if drop:
        if not np.any(alive):
            raise RankDeficiencyError(
                "every start lost row rank during projection; the target "
                "level looks non-regular")
        pts = pts[alive]
    res = np.abs(_stacked_residuals(fields, pts))
    if np.max(res) > accept_tol:
        if drop:
            settled = np.max(res, axis=1) <= accept_tol
            if np.any(settled):
                return pts[settled]
        raise NonConvergenceError(
            f"projection stalled at residual {float(np.max(res)):.3e} after {max_iter} steps")
    return pts


class ConstrainedManifold:
    """Zero set of constraint fields inside R^N."""

    __slots__ = ("ambient_dim", "constraints")

    def __init__(self, ambient_dim: int, constraints=()):
        self.ambient_dim = int(ambient_dim)
        self.constraints = tuple(as_field(c, ambient_dim) for c in constraints)

    @classmethod
    def ambient(cls, dim: int) -> "ConstrainedManifold":
        return cls(dim, ())

    @classmethod
    def unit_sphere(cls, dim: int, first: int = 0, last: int = None,
                    radius: float = 1.0) -> "ConstrainedManifold":
        """Sphere in the coordinate block [first, last); other coords free."""
        last = dim if last is None else last
        terms = " + ".join(f"x{i + 1}^2" for i in range(first, last))
        return cls(dim, (f"{terms} - {radius * radius}",))

    def __repr__(self):
        srcs = ", ".join(c.source() for c in self.constraints)
        return f"ConstrainedManifold(R^{self.ambient_dim}, [{srcs}])"

    @property
    def codim(self) -> int:
        return len(self.constraints)

    @property
    def tangent_dim(self) -> int:
        return self.ambient_dim - len(self.constraints)

    def product(self, other: "ConstrainedManifold") -> "ConstrainedManifold":
        """Block product: self's coordinates first, then other's."""
        dim = self.ambient_dim + other.ambient_dim
        cons = [c.shift_into(dim, 0) for c in self.constraints]
        cons += [c.shift_into(dim, self.ambient_dim) for c in other.constraints]
        return ConstrainedManifold(dim, cons)

    def constraint_values(self, points) -> np.ndarray:
        pts = self._check(points)
        if not self.constraints:
            return np.zeros((pts.shape[0], 0))
        return np.stack([c.evaluate(pts) * np.ones(pts.shape[0])
                         for c in self.constraints], axis=1)

    def constraint_jacobian(self, points) -> np.ndarray:
        pts = self._check(points)
        out = np.empty((pts.shape[0], len(self.constraints), self.ambient_dim))
        for c_index, c in enumerate(self.constraints):
            for j in range(self.ambient_dim):
                out[:, c_index, j] = c.partial(j).evaluate(pts) * np.ones(pts.shape[0])
        return out

    def contains(self, points, tol: float = CONSTRAINT_TOL) -> bool:
        vals = self.constraint_values(points)
        return bool(vals.size == 0 or np.max(np.abs(vals)) <= tol)

    def require_membership(self, points, tol: float = CONSTRAINT_TOL):
        vals = self.constraint_values(points)
        if vals.size and np.max(np.abs(vals)) > tol:
            worst = float(np.max(np.abs(vals)))
            raise EvaluationDomainError(
                f"points leave the constraint set (residual {worst:.3e} > {tol:.1e})")

    def jacobian_rank_margin(self, points) -> float:
        """Min singular value of the constraint Jacobian over the batch."""
        if not self.constraints:
            return float("inf")
        jac = self.constraint_jacobian(points)
        sv = np.linalg.svd(jac, compute_uv=False)
        return float(np.min(sv[:, -1]))

    def tangent_basis(self, points) -> np.ndarray:
        """Orthonormal tangent bases, shape (m, N, tangent_dim)."""
        pts = self._check(points)
        m = pts.shape[0]
        if not self.constraints:
            return np.broadcast_to(np.eye(self.ambient_dim),
                                   (m, self.ambient_dim, self.ambient_dim)).copy()
        jac = self.constraint_jacobian(pts)
        _, sv, vt = np.linalg.svd(jac)
        if np.min(sv[:, -1]) < JACOBIAN_RANK_FLOOR:
            raise RankDeficiencyError(
                f"constraint Jacobian rank margin {float(np.min(sv[:, -1])):.3e} "
                f"below {JACOBIAN_RANK_FLOOR:.1e}")
        basis = vt[:, len(self.constraints):, :]
        return np.transpose(basis, (0, 2, 1)).copy()

    def project(self, points) -> np.ndarray:
        return gauss_newton_zero(self.constraints, points)

    def sample(self, count: int, rng, radius: float = 1.5, keep=None,
               max_rounds: int = 60) -> np.ndarray:
        """Projected ambient Gaussian draws; keep is an optional mask predicate."""
        out = []
        have = 0
        for _ in range(max_rounds):
            draw = rng.normal(scale=radius, size=(max(count - have, 4), self.ambient_dim))
            try:
                pts = self.project(draw)
            except (NonConvergenceError, RankDeficiencyError):
                continue
            if keep is not None:
                mask = np.asarray(keep(pts), dtype=bool)
                pts = pts[mask]
            if pts.size:
                out.append(pts)
                have += pts.shape[0]
            if have >= count:
                break
        if have < count:
            raise NonConvergenceError(
                f"could not draw {count} samples (got {have}); "
                "widen the radius or relax the keep predicate")
        return np.concatenate(out, axis=0)[:count]

    def _check(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[-1] != self.ambient_dim:
            raise DimensionMismatchError(
                f"points have {pts.shape[-1]} coordinates, manifold sits in "
                f"R^{self.ambient_dim}")
        return pts
