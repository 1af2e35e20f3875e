"""Exterior calculus over ambient coordinates.

Differential forms are stored sparsely by strictly increasing multi-index
and evaluate on tangent vectors through the determinant pairing

    (dx_{i_1} ^ ... ^ dx_{i_k})(v_1, ..., v_k) = det [v_b[i_a]]_{a,b}

so a wedge of 1-forms satisfies (a^b)(u,v) = a(u)b(v) - a(v)b(u) with no
factorial weights.  Vector fields come in two kinds: expression-backed
(exact derivatives available) and evaluator-backed (values only, derivatives
by central differences).  The bracket convention is [X,Y] = (DY)X - (DX)Y.

Everything lives on flat R^N.  Constraint sets and tangency are handled one
level up; here a "tangent vector" is any ambient vector handed in by the
caller.
"""

import itertools
import math
import warnings

import numpy as np

from .errors import DegreeError, DimensionMismatchError
from .expr import ScalarField, as_field


def _as_points(points, dim):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != dim:
        raise DimensionMismatchError(
            f"points have {pts.shape[-1]} coordinates, expected {dim}")
    return pts


class VectorField:
    """Expression-backed field: one scalar component per ambient coordinate."""

    __slots__ = ("components", "dim")

    def __init__(self, components):
        comps = tuple(components)
        if not comps:
            raise DimensionMismatchError("a vector field needs at least one component")
        dim = comps[0].dim
        if len(comps) != dim or any(c.dim != dim for c in comps):
            raise DimensionMismatchError(
                f"need {dim} components over R^{dim}, got {len(comps)}")
        self.components = comps
        self.dim = dim

    @classmethod
    def from_sources(cls, sources, dim: int) -> "VectorField":
        return cls(tuple(as_field(s, dim) for s in sources))

    @classmethod
    def constant(cls, values) -> "VectorField":
        values = np.asarray(values, dtype=float)
        return cls(tuple(ScalarField.constant(float(v), len(values)) for v in values))

    @classmethod
    def zero(cls, dim: int) -> "VectorField":
        return cls(tuple(ScalarField.constant(0.0, dim) for _ in range(dim)))

    def __repr__(self):
        return f"VectorField([{', '.join(c.source() for c in self.components)}])"

    def evaluate(self, points, t: float = 0.0, s: float = 0.0) -> np.ndarray:
        pts = _as_points(points, self.dim)
        out = np.empty(pts.shape)
        for i, c in enumerate(self.components):
            out[:, i] = c.evaluate(pts, t=t, s=s)
        return out

    def jacobian_at(self, points, t: float = 0.0, s: float = 0.0) -> np.ndarray:
        """Exact Jacobian J[m, i, j] = d(component i)/dx_j at each point."""
        pts = _as_points(points, self.dim)
        out = np.empty(pts.shape[:1] + (self.dim, self.dim))
        for i, c in enumerate(self.components):
            for j in range(self.dim):
                out[:, i, j] = c.partial(j).evaluate(pts, t=t, s=s)
        return out

    def at_param(self, name: str, value: float) -> "VectorField":
        return VectorField(tuple(c.at_param(name, value) for c in self.components))

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatchError("vector fields live in different dimensions")
        return VectorField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatchError("vector fields live in different dimensions")
        return VectorField(tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self):
        return VectorField(tuple(-c for c in self.components))

    def scaled(self, factor) -> "VectorField":
        f = as_field(factor, self.dim)
        return VectorField(tuple(f * c for c in self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)


class NumericVectorField:
    """Evaluator-backed field for objects only known pointwise.

    Used for fields produced by linear solves at each point (duals of forms,
    Reeb solutions).  The evaluator must accept an (m, N) array and return an
    (m, N) array; it should extend smoothly off the constraint set in a small
    neighbourhood, since Jacobians are taken by central differences.
    """

    __slots__ = ("dim", "_evaluator", "fd_scale")

    def __init__(self, dim: int, evaluator, fd_scale: float = 1e-5):
        self.dim = int(dim)
        self._evaluator = evaluator
        self.fd_scale = float(fd_scale)

    def evaluate(self, points, t: float = 0.0, s: float = 0.0) -> np.ndarray:
        pts = _as_points(points, self.dim)
        out = np.asarray(self._evaluator(pts), dtype=float)
        if out.shape != pts.shape:
            raise DimensionMismatchError(
                f"evaluator returned shape {out.shape}, expected {pts.shape}")
        return out

    def jacobian_at(self, points, t: float = 0.0, s: float = 0.0) -> np.ndarray:
        pts = _as_points(points, self.dim)
        out = np.empty(pts.shape[:1] + (self.dim, self.dim))
        for j in range(self.dim):
            h = self.fd_scale * (1.0 + np.abs(pts[:, j]))
            up = pts.copy()
            dn = pts.copy()
            up[:, j] += h
            dn[:, j] -= h
            out[:, :, j] = (self.evaluate(up) - self.evaluate(dn)) / (2.0 * h)[:, None]
        return out


def bracket_values(x_field, y_field, points) -> np.ndarray:
    """[X,Y] = (DY)X - (DX)Y evaluated at points; works for either field kind."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    xv = x_field.evaluate(pts)
    yv = y_field.evaluate(pts)
    jx = x_field.jacobian_at(pts)
    jy = y_field.jacobian_at(pts)
    return np.einsum("mij,mj->mi", jy, xv) - np.einsum("mij,mj->mi", jx, yv)


# ---------------------------------------------------------------------------
# Multi-index bookkeeping

def _sort_with_sign(indices):
    """Sort a multi-index, tracking the permutation sign; None on repeats."""
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(idx)):
        if idx[i - 1] == idx[i]:
            return None, 0
    return tuple(idx), sign


def _accumulate(acc: dict, idx: tuple, term: ScalarField):
    if term.is_zero():
        return
    if idx in acc:
        acc[idx] = acc[idx] + term
    else:
        acc[idx] = term


class KForm:
    """Alternating k-form with sparse expression coefficients."""

    __slots__ = ("degree", "dim", "coeffs")

    def __init__(self, degree: int, dim: int, coeffs: dict):
        if degree < 0:
            raise DegreeError(f"negative degree {degree}")
        self.degree = int(degree)
        self.dim = int(dim)
        clean = {}
        for idx, field in coeffs.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != degree:
                raise DegreeError(f"multi-index {idx} has length {len(idx)}, degree is {degree}")
            if any(not 0 <= i < dim for i in idx):
                raise DimensionMismatchError(f"multi-index {idx} out of range for R^{dim}")
            if any(idx[i] >= idx[i + 1] for i in range(len(idx) - 1)):
                raise DegreeError(f"multi-index {idx} is not strictly increasing")
            field = as_field(field, dim)
            if not field.is_zero():
                clean[idx] = field
        self.coeffs = clean

    @classmethod
    def zero(cls, degree: int, dim: int) -> "KForm":
        return cls(degree, dim, {})

    @classmethod
    def from_scalar(cls, value, dim: int) -> "KForm":
        return cls(0, dim, {(): as_field(value, dim)})

    @classmethod
    def coordinate_differential(cls, index: int, dim: int) -> "KForm":
        """The constant 1-form dx_{index+1}."""
        return cls(1, dim, {(index,): ScalarField.constant(1.0, dim)})

    @classmethod
    def from_covector(cls, values) -> "KForm":
        values = np.asarray(values, dtype=float)
        dim = len(values)
        return cls(1, dim, {(i,): ScalarField.constant(float(v), dim)
                            for i, v in enumerate(values) if v != 0.0})

    def __repr__(self):
        inner = ", ".join(f"{idx}: {f.source()}" for idx, f in sorted(self.coeffs.items()))
        return f"KForm(degree={self.degree}, dim={self.dim}, {{{inner}}})"

    def shifted_into(self, dim: int, offset: int) -> "KForm":
        """The same form viewed in a larger ambient space, coordinates moved
        up by `offset` (used to place factor structures on a product)."""
        return KForm(self.degree, dim,
                     {tuple(i + offset for i in idx): f.shift_into(dim, offset)
                      for idx, f in self.coeffs.items()})

    def coefficient(self, idx) -> ScalarField:
        idx = tuple(int(i) for i in idx)
        return self.coeffs.get(idx, ScalarField.constant(0.0, self.dim))

    def is_zero(self) -> bool:
        return not self.coeffs

    def evaluate(self, points, vectors=(), t: float = 0.0, s: float = 0.0) -> np.ndarray:
        """Value at each point on one tuple of vectors (arrays of shape (m, N))."""
        pts = _as_points(points, self.dim)
        m = pts.shape[0]
        if len(vectors) != self.degree:
            raise DegreeError(
                f"degree-{self.degree} form applied to {len(vectors)} vectors")
        if self.degree == 0:
            return np.broadcast_to(
                np.asarray(self.coefficient(()).evaluate(pts, t=t, s=s)), (m,)).copy()
        vecs = [np.broadcast_to(np.atleast_2d(np.asarray(v, dtype=float)), pts.shape)
                for v in vectors]
        total = np.zeros(m)
        for idx, field in self.coeffs.items():
            cols = np.stack([v[:, list(idx)] for v in vecs], axis=-1)
            total += field.evaluate(pts, t=t, s=s) * np.linalg.det(cols)
        return total

    def at_point(self, point, t: float = 0.0, s: float = 0.0) -> np.ndarray:
        """Dense coefficient tensor entries at one point, keyed like coeffs."""
        pts = _as_points(point, self.dim)
        return {idx: float(f.evaluate(pts, t=t, s=s)[0]) for idx, f in self.coeffs.items()}

    def covector_at(self, points, t: float = 0.0, s: float = 0.0) -> np.ndarray:
        """Degree-1 forms as row vectors at each point."""
        if self.degree != 1:
            raise DegreeError("covector_at needs a 1-form")
        pts = _as_points(points, self.dim)
        out = np.zeros(pts.shape)
        for (i,), field in self.coeffs.items():
            out[:, i] = field.evaluate(pts, t=t, s=s)
        return out

    def matrix_at(self, points, t: float = 0.0, s: float = 0.0) -> np.ndarray:
        """Degree-2 forms as antisymmetric matrices W with W[i,j] = value on (e_i, e_j)."""
        if self.degree != 2:
            raise DegreeError("matrix_at needs a 2-form")
        pts = _as_points(points, self.dim)
        m = pts.shape[0]
        out = np.zeros((m, self.dim, self.dim))
        for (i, j), field in self.coeffs.items():
            vals = field.evaluate(pts, t=t, s=s)
            out[:, i, j] = vals
            out[:, j, i] = -vals
        return out

    def at_param(self, name: str, value: float) -> "KForm":
        return KForm(self.degree, self.dim,
                     {idx: f.at_param(name, value) for idx, f in self.coeffs.items()})

    def __add__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        if other.dim != self.dim or other.degree != self.degree:
            raise DimensionMismatchError("forms differ in degree or dimension")
        acc = dict(self.coeffs)
        for idx, f in other.coeffs.items():
            _accumulate(acc, idx, f)
        return KForm(self.degree, self.dim, acc)

    def __sub__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return self + other.scaled(-1.0)

    def __neg__(self):
        return self.scaled(-1.0)

    def scaled(self, factor) -> "KForm":
        f = as_field(factor, self.dim)
        return KForm(self.degree, self.dim,
                     {idx: f * c for idx, c in self.coeffs.items()})


def wedge(a: KForm, b: KForm) -> KForm:
    if a.dim != b.dim:
        raise DimensionMismatchError("wedge of forms over different ambient spaces")
    degree = a.degree + b.degree
    acc = {}
    for ia, fa in a.coeffs.items():
        for ib, fb in b.coeffs.items():
            merged, sign = _sort_with_sign(ia + ib)
            if merged is None:
                continue
            _accumulate(acc, merged, (fa * fb) if sign > 0 else -(fa * fb))
    return KForm(degree, a.dim, acc)


def wedge_all(*forms: KForm) -> KForm:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def wedge_power(a: KForm, n: int) -> KForm:
    out = KForm.from_scalar(1.0, a.dim)
    for _ in range(n):
        out = wedge(out, a)
    return out


def exterior_derivative(a: KForm) -> KForm:
    acc = {}
    for idx, f in a.coeffs.items():
        for j in range(a.dim):
            df = f.partial(j)
            if df.is_zero():
                continue
            merged, sign = _sort_with_sign((j,) + idx)
            if merged is None:
                continue
            _accumulate(acc, merged, df if sign > 0 else -df)
    return KForm(a.degree + 1, a.dim, acc)


def interior_product(x_field: VectorField, a: KForm) -> KForm:
    if a.degree == 0:
        raise DegreeError("interior product of a vector with a 0-form")
    if x_field.dim != a.dim:
        raise DimensionMismatchError("field and form live in different dimensions")
    acc = {}
    for idx, f in a.coeffs.items():
        for pos in range(len(idx)):
            comp = x_field.components[idx[pos]]
            if comp.is_zero():
                continue
            rest = idx[:pos] + idx[pos + 1:]
            term = f * comp
            _accumulate(acc, rest, term if pos % 2 == 0 else -term)
    return KForm(a.degree - 1, a.dim, acc)


def form_on_field(a: KForm, x_field: VectorField) -> ScalarField:
    """a(X) for a 1-form, as a scalar field."""
    if a.degree != 1:
        raise DegreeError("form_on_field needs a 1-form")
    return interior_product(x_field, a).coefficient(())


def lie_bracket(x_field: VectorField, y_field: VectorField) -> VectorField:
    if x_field.dim != y_field.dim:
        raise DimensionMismatchError("bracket of fields over different dimensions")
    comps = []
    for i in range(x_field.dim):
        acc = ScalarField.constant(0.0, x_field.dim)
        for j in range(x_field.dim):
            acc = acc + x_field.components[j] * y_field.components[i].partial(j)
            acc = acc - y_field.components[j] * x_field.components[i].partial(j)
        comps.append(acc)
    return VectorField(tuple(comps))


def lie_derivative(x_field: VectorField, a: KForm) -> KForm:
    """Component-formula Lie derivative L_X a = X(a_I) dx_I + a_I L_X(dx_I)."""
    if x_field.dim != a.dim:
        raise DimensionMismatchError("field and form live in different dimensions")
    acc = {}
    for idx, f in a.coeffs.items():
        directional = ScalarField.constant(0.0, a.dim)
        for j in range(a.dim):
            directional = directional + x_field.components[j] * f.partial(j)
        _accumulate(acc, idx, directional)
        for pos in range(len(idx)):
            comp = x_field.components[idx[pos]]
            for j in range(a.dim):
                dj = comp.partial(j)
                if dj.is_zero():
                    continue
                replaced, sign = _sort_with_sign(idx[:pos] + (j,) + idx[pos + 1:])
                if replaced is None:
                    continue
                term = f * dj
                _accumulate(acc, replaced, term if sign > 0 else -term)
    return KForm(a.degree, a.dim, acc)


def twisted_d(theta: KForm, a: KForm, check_points=None, tol: float = 1e-9) -> KForm:
    """d_theta a = da - theta ^ a for a closed twisting 1-form theta."""
    if theta.degree != 1:
        raise DegreeError("twisting form must have degree 1")
    if check_points is not None:
        dtheta = exterior_derivative(theta)
        worst = 0.0
        pts = _as_points(check_points, theta.dim)
        for idx, f in dtheta.coeffs.items():
            worst = max(worst, float(np.max(np.abs(f.evaluate(pts)))))
        if worst > tol:
            warnings.warn(f"twisting form is not closed at samples (residual {worst:.3e})",
                          stacklevel=2)
    return exterior_derivative(a) - wedge(theta, a)


def twisted_lie(theta: KForm, x_field: VectorField, a: KForm) -> KForm:
    """L^theta_X a = L_X a - theta(X) a."""
    return lie_derivative(x_field, a) - a.scaled(form_on_field(theta, x_field))


def twisted_lie_cartan(theta: KForm, x_field: VectorField, a: KForm) -> KForm:
    """Independent route: d_theta i_X a + i_X d_theta a."""
    if a.degree == 0:
        return interior_product(x_field, twisted_d(theta, a))
    return (twisted_d(theta, interior_product(x_field, a))
            + interior_product(x_field, twisted_d(theta, a)))


# ---------------------------------------------------------------------------
# Maps and transport

class DiffeoMap:
    """Smooth map between ambient spaces, components as scalar fields.

    A one-parameter family uses the symbol t in its components; apply and
    jacobian_at then take the parameter value.  Nothing checks injectivity;
    inverses are supplied explicitly where an operation needs one.
    """

    __slots__ = ("components", "source_dim", "target_dim")

    def __init__(self, components, source_dim: int):
        comps = tuple(components)
        if not comps:
            raise DimensionMismatchError("a map needs at least one component")
        for c in comps:
            if c.dim != source_dim:
                raise DimensionMismatchError(
                    f"component over R^{c.dim} in a map from R^{source_dim}")
        self.components = comps
        self.source_dim = int(source_dim)
        self.target_dim = len(comps)

    @classmethod
    def from_sources(cls, sources, source_dim: int) -> "DiffeoMap":
        return cls(tuple(as_field(s, source_dim) for s in sources), source_dim)

    @classmethod
    def identity(cls, dim: int) -> "DiffeoMap":
        return cls(tuple(ScalarField.from_source(f"x{i + 1}", dim) for i in range(dim)), dim)

    def __repr__(self):
        return f"DiffeoMap([{', '.join(c.source() for c in self.components)}])"

    def apply(self, points, t: float = 0.0, s: float = 0.0) -> np.ndarray:
        pts = _as_points(points, self.source_dim)
        out = np.empty((pts.shape[0], self.target_dim))
        for i, c in enumerate(self.components):
            out[:, i] = c.evaluate(pts, t=t, s=s)
        return out

    def jacobian_at(self, points, t: float = 0.0, s: float = 0.0) -> np.ndarray:
        pts = _as_points(points, self.source_dim)
        out = np.empty((pts.shape[0], self.target_dim, self.source_dim))
        for i, c in enumerate(self.components):
            for j in range(self.source_dim):
                out[:, i, j] = c.partial(j).evaluate(pts, t=t, s=s)
        return out

    def compose(self, inner: "DiffeoMap") -> "DiffeoMap":
        """self after inner, by exact substitution."""
        if inner.target_dim != self.source_dim:
            raise DimensionMismatchError(
                f"cannot compose: inner lands in R^{inner.target_dim}, "
                f"outer starts in R^{self.source_dim}")
        comps = tuple(c.compose(list(inner.components)) for c in self.components)
        return DiffeoMap(comps, inner.source_dim)

    def at_param(self, name: str, value: float) -> "DiffeoMap":
        return DiffeoMap(tuple(c.at_param(name, value) for c in self.components),
                         self.source_dim)

    def velocity_field(self, at: float = 0.0) -> VectorField:
        """t-derivative of the family at parameter value `at`, over the source.

        For a flow with self.apply(x, t=0) = x this is the generating field.
        """
        if self.target_dim != self.source_dim:
            raise DimensionMismatchError("velocity field needs a self-map family")
        comps = tuple(c.param_partial("t").at_param("t", at) for c in self.components)
        return VectorField(comps)


def pullback(phi: DiffeoMap, a: KForm) -> KForm:
    """phi^* a, exact: coefficients composed with phi and contracted with Dphi."""
    if a.dim != phi.target_dim:
        raise DimensionMismatchError(
            f"form over R^{a.dim} pulled back along a map into R^{phi.target_dim}")
    n = phi.source_dim
    k = a.degree
    comps = list(phi.components)
    if k == 0:
        return KForm(0, n, {(): a.coefficient(()).compose(comps)})
    jac = [[phi.components[i].partial(j) for j in range(n)] for i in range(phi.target_dim)]
    acc = {}
    for idx, f in a.coeffs.items():
        pulled = f.compose(comps)
        if pulled.is_zero():
            continue
        for out_idx in itertools.combinations(range(n), k):
            minor = _field_det([[jac[idx[r]][out_idx[c]] for c in range(k)]
                                for r in range(k)])
            if minor.is_zero():
                continue
            _accumulate(acc, out_idx, pulled * minor)
    return KForm(k, n, acc)


def _field_det(rows) -> ScalarField:
    """Determinant of a small matrix of scalar fields by permutation expansion."""
    k = len(rows)
    dim = rows[0][0].dim
    acc = ScalarField.constant(0.0, dim)
    for perm in itertools.permutations(range(k)):
        term = rows[0][perm[0]]
        for r in range(1, k):
            term = term * rows[r][perm[r]]
        acc = (acc + term) if _perm_sign(perm) > 0 else (acc - term)
    return acc


def _perm_sign(perm) -> int:
    _, sign = _sort_with_sign(perm)
    return sign


def pushforward_field(phi: DiffeoMap, x_field: VectorField, inverse: DiffeoMap) -> VectorField:
    """phi_* X as an expression field on the target, using the supplied inverse."""
    if x_field.dim != phi.source_dim:
        raise DimensionMismatchError("field does not live on the map's source")
    if inverse.source_dim != phi.target_dim or inverse.target_dim != phi.source_dim:
        raise DimensionMismatchError("inverse map dimensions do not match")
    inv_comps = list(inverse.components)
    comps = []
    for i in range(phi.target_dim):
        acc = ScalarField.constant(0.0, phi.source_dim)
        for j in range(phi.source_dim):
            dij = phi.components[i].partial(j)
            if dij.is_zero():
                continue
            acc = acc + dij * x_field.components[j]
        comps.append(acc.compose(inv_comps))
    return VectorField(tuple(comps))


def pushforward_at(phi: DiffeoMap, field, points, t: float = 0.0):
    """Pointwise transport: returns (phi(points), Dphi(points) X(points))."""
    pts = _as_points(points, phi.source_dim)
    values = field.evaluate(pts) if hasattr(field, "evaluate") else np.asarray(field, dtype=float)
    jac = phi.jacobian_at(pts, t=t)
    return phi.apply(pts, t=t), np.einsum("mij,mj->mi", jac, values)


# ---------------------------------------------------------------------------
# Flows: RK4 integration and the flow-based Lie derivative oracle

def rk4_flow(field, points, time: float, steps: int = None, max_step: float = 1e-3):
    """Integrate x' = X(x) for the given time; returns the endpoint batch."""
    pts = np.atleast_2d(np.asarray(points, dtype=float)).copy()
    if steps is None:
        steps = max(1, int(math.ceil(abs(time) / max_step)))
    h = time / steps
    for _ in range(steps):
        k1 = field.evaluate(pts)
        k2 = field.evaluate(pts + 0.5 * h * k1)
        k3 = field.evaluate(pts + 0.5 * h * k2)
        k4 = field.evaluate(pts + h * k3)
        pts = pts + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return pts


def flow_with_frame(field, points, vectors, time: float, steps: int = 8):
    """Flow points and transport frame vectors by the variational equation."""
    pts = np.atleast_2d(np.asarray(points, dtype=float)).copy()
    vecs = [np.broadcast_to(np.atleast_2d(np.asarray(v, dtype=float)), pts.shape).copy()
            for v in vectors]
    h = time / steps

    def rhs(x, vs):
        fx = field.evaluate(x)
        jx = field.jacobian_at(x)
        return fx, [np.einsum("mij,mj->mi", jx, v) for v in vs]

    for _ in range(steps):
        k1, l1 = rhs(pts, vecs)
        k2, l2 = rhs(pts + 0.5 * h * k1, [v + 0.5 * h * w for v, w in zip(vecs, l1)])
        k3, l3 = rhs(pts + 0.5 * h * k2, [v + 0.5 * h * w for v, w in zip(vecs, l2)])
        k4, l4 = rhs(pts + h * k3, [v + h * w for v, w in zip(vecs, l3)])
        pts = pts + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        vecs = [v + (h / 6.0) * (w1 + 2.0 * w2 + 2.0 * w3 + w4)
                for v, w1, w2, w3, w4 in zip(vecs, l1, l2, l3, l4)]
    return pts, vecs


def flow_lie_derivative(field, a: KForm, points, vectors, step: float = 1e-3):
    """Oracle (d/dt)|_0 of the flow pullback of a, by Richardson-extrapolated
    central differences on RK4 transport.  Returns (values, error_estimate)."""

    def pulled(tau):
        xs, vs = flow_with_frame(field, points, vectors, tau, steps=4)
        return a.evaluate(xs, vs)

    def central(h):
        return (pulled(h) - pulled(-h)) / (2.0 * h)

    d1 = central(step)
    d2 = central(step / 2.0)
    value = (4.0 * d2 - d1) / 3.0
    return value, float(np.max(np.abs(d2 - d1)))
