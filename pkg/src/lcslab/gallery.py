"""Built-in worked scenarios with frozen expected values.

Each entry packages a structure, an action, momentum data, regular values,
optional gauges, and (where a closed form exists) quotient witnesses, plus a
machine-readable table of expected checks. Values in the tables were frozen
from independent hand computations; the suite recomputes them from scratch.

Naming: scenario names describe the underlying space and the twist put on
it, check ids describe the property being tested.
"""

import numpy as np

from .action import GroupAction, LieAlgebraSpec, MomentumData
from .calculus import DiffeoMap, KForm, VectorField, twisted_d, wedge
from .contact import ContactStructure, ContactWitness, angle_form, lcs_from_contact
from .errors import UnknownScenarioError
from .expr import ScalarField
from .lcs import ConformalGauge, LcsStructure
from .lck import LckQuotientWitness, LckStructure, MatrixField
from .manifold import ConstrainedManifold
from .reduction import QuotientWitness


class ExpectedCheck:
    """One row of a scenario's acceptance table.

    value None means the named pipeline check must simply pass; otherwise
    the named probe is evaluated and compared against value at tolerance.
    """

    __slots__ = ("check_id", "value", "basis", "tol")

    def __init__(self, check_id: str, value, basis: str, tol: float):
        self.check_id = check_id
        self.value = value
        self.basis = basis
        self.tol = float(tol)

    def as_tuple(self):
        return (self.check_id, self.value, self.basis, self.tol)


class ExampleScenario:
    """A fully populated verification target."""

    __slots__ = (
        "name", "description", "kind", "structure", "aux_forms", "action",
        "momentum", "xi_values", "gauge", "xi_path", "gauge_path",
        "use_gauge_for_reduction", "witness", "lck", "lck_witness",
        "holomorphic_fields", "vaisman", "sasaki_metric", "bridge",
        "run_average", "expected", "probes", "extras", "sample_count",
        "sample_radius", "witness_keep", "tolerances",
    )

    def __init__(self, name, description, kind, structure, **kw):
        self.name = name
        self.description = description
        self.kind = kind
        self.structure = structure
        self.aux_forms = kw.pop("aux_forms", {})
        self.action = kw.pop("action", None)
        self.momentum = kw.pop("momentum", None)
        self.xi_values = tuple(np.atleast_1d(np.asarray(x, dtype=float))
                               for x in kw.pop("xi_values", ()))
        self.gauge = kw.pop("gauge", None)
        self.xi_path = tuple(np.atleast_1d(np.asarray(x, dtype=float))
                             for x in kw.pop("xi_path", ()))
        self.gauge_path = tuple(kw.pop("gauge_path", ()))
        self.use_gauge_for_reduction = bool(kw.pop("use_gauge_for_reduction", False))
        self.witness = kw.pop("witness", None)
        self.lck = kw.pop("lck", None)
        self.lck_witness = kw.pop("lck_witness", None)
        self.holomorphic_fields = kw.pop("holomorphic_fields", {})
        self.vaisman = bool(kw.pop("vaisman", False))
        self.sasaki_metric = kw.pop("sasaki_metric", None)
        self.bridge = kw.pop("bridge", None)
        self.run_average = bool(kw.pop("run_average", False))
        self.expected = tuple(kw.pop("expected", ()))
        self.probes = kw.pop("probes", {})
        self.extras = tuple(kw.pop("extras", ()))
        self.sample_count = int(kw.pop("sample_count", 24))
        self.sample_radius = float(kw.pop("sample_radius", 1.5))
        self.witness_keep = kw.pop("witness_keep", None)
        self.tolerances = dict(kw.pop("tolerances", {}))
        if kw:
            raise TypeError(f"unknown scenario fields {sorted(kw)}")

    @property
    def manifold(self):
        return self.structure.manifold

    @property
    def dim(self) -> int:
        return self.structure.manifold.ambient_dim


def _rotation_pair(i: int, j: int, speed: str = "t") -> tuple:
    a, b = f"x{i + 1}", f"x{j + 1}"
    return (f"{a}*cos({speed}) - {b}*sin({speed})",
            f"{a}*sin({speed}) + {b}*cos({speed})")


def _flow_sources(dim: int, blocks) -> list:
    """Identity sources with rotation blocks; blocks = [(i, j, speed)]."""
    out = [f"x{i + 1}" for i in range(dim)]
    for i, j, speed in blocks:
        out[i], out[j] = _rotation_pair(i, j, speed)
    return out


def circle_action(dim: int, blocks) -> GroupAction:
    flow = DiffeoMap.from_sources(_flow_sources(dim, blocks), dim)
    return GroupAction(LieAlgebraSpec.abelian(1), [flow], torus_rank=1)


# quaternion frame on the 3-sphere block starting at coordinate `base`
# (columns of unit quaternion multiplication by i, j, k)

def sphere_frame_vectors(dim: int, base: int):
    x = [f"x{base + k + 1}" for k in range(4)]
    zeros = ["0"] * dim

    def vec(c0, c1, c2, c3):
        comp = list(zeros)
        comp[base:base + 4] = [c0, c1, c2, c3]
        return VectorField.from_sources(comp, dim)

    r = vec(f"0 - {x[1]}", x[0], f"0 - {x[3]}", x[2])
    a = vec(f"0 - {x[2]}", x[3], x[0], f"0 - {x[1]}")
    b = vec(f"0 - {x[3]}", f"0 - {x[2]}", x[1], x[0])
    return r, a, b


def sphere_frame_covectors(dim: int, base: int):
    x = [f"x{base + k + 1}" for k in range(4)]

    def cov(c0, c1, c2, c3):
        return KForm(1, dim, {(base,): c0, (base + 1,): c1,
                              (base + 2,): c2, (base + 3,): c3})

    r = cov(f"0 - {x[1]}", x[0], f"0 - {x[3]}", x[2])
    a = cov(f"0 - {x[2]}", x[3], x[0], f"0 - {x[1]}")
    b = cov(f"0 - {x[3]}", f"0 - {x[2]}", x[1], x[0])
    return r, a, b


def circle_vector(dim: int, base: int = 0) -> VectorField:
    comp = ["0"] * dim
    comp[base] = f"0 - x{base + 2}"
    comp[base + 1] = f"x{base + 1}"
    return VectorField.from_sources(comp, dim)


def circle_covector(dim: int, base: int = 0) -> KForm:
    return KForm(1, dim, {(base,): f"0 - x{base + 2}", (base + 1,): f"x{base + 1}"})


def doubled_area_form(dim: int) -> KForm:
    """-2 sum dx^dy over consecutive coordinate pairs."""
    dx = [KForm.coordinate_differential(i, dim) for i in range(dim)]
    total = KForm.zero(2, dim)
    for i in range(0, dim, 2):
        total = total + wedge(dx[i], dx[i + 1])
    return total.scaled(-2.0)


def standard_primitive(dim: int, signs=None) -> KForm:
    """-sum sign_k (x dy - y dx) over pairs; its differential is the doubled
    area form when all signs are +1."""
    coeffs = {}
    for k, i in enumerate(range(0, dim, 2)):
        s = 1.0 if signs is None else float(signs[k])
        coeffs[(i,)] = f"{s} * x{i + 2}"
        coeffs[(i + 1,)] = f"0 - {s} * x{i + 1}"
    return KForm(1, dim, coeffs)


def sum_of_angular(dim: int, first: int, scale: float = 1.0) -> KForm:
    """scale * sum (x dy - y dx) over pairs from `first` to the end."""
    coeffs = {}
    for i in range(first, dim, 2):
        coeffs[(i,)] = f"0 - {scale} * x{i + 2}"
        coeffs[(i + 1,)] = f"{scale} * x{i + 1}"
    return KForm(1, dim, coeffs)


def flat_complex_structure(dim: int) -> MatrixField:
    j = np.zeros((dim, dim))
    for i in range(0, dim, 2):
        j[i + 1, i] = 1.0
        j[i, i + 1] = -1.0
    return MatrixField.constant(j)


# ---------------------------------------------------------------------------
# scenario builders


def _cn_standard() -> ExampleScenario:
    dim = 4
    omega = doubled_area_form(dim)
    theta = KForm.zero(1, dim)
    manifold = ConstrainedManifold.ambient(dim)
    s = LcsStructure(omega, theta, manifold)
    act = circle_action(dim, [(0, 1, "t"), (2, 3, "t")])
    mom = MomentumData.from_sources(["x1^2 + x2^2 + x3^2 + x4^2"], dim)

    pi = DiffeoMap.from_sources(
        ["(x1*x3 + x2*x4) / (x1^2 + x2^2)", "(x1*x4 - x2*x3) / (x1^2 + x2^2)"],
        dim)
    quotient = ConstrainedManifold.ambient(2)
    omega_red = wedge(KForm.coordinate_differential(0, 2),
                      KForm.coordinate_differential(1, 2)).scaled(
                          "-2 / (1 + x1^2 + x2^2)^2")
    reduced = LcsStructure(omega_red, KForm.zero(1, 2), quotient)
    witness = QuotientWitness(pi, reduced, 0.0)
    lck_witness = LckQuotientWitness(
        witness,
        MatrixField.constant([[0.0, -1.0], [1.0, 0.0]]),
        MatrixField.identity(2).scaled("2 / (1 + x1^2 + x2^2)^2"),
        vaisman=True)

    lck = LckStructure(s, flat_complex_structure(dim),
                       MatrixField.constant(2.0 * np.eye(dim)))

    def momentum_at_unit(scn, rng):
        return float(scn.momentum.values(np.array([[1.0, 0.0, 0.0, 0.0]]))[0, 0])

    def level_margin(scn, rng):
        from .reduction import momentum_rank_margin, project_to_level
        pts = project_to_level(scn.manifold, scn.momentum, scn.xi_values[0],
                               rng.normal(size=(8, dim)))
        return momentum_rank_margin(scn.manifold, scn.momentum, pts)

    def primitive_matches(scn, rng):
        from .calculus import exterior_derivative
        diff = exterior_derivative(scn.aux_forms["primitive"]) + scn.structure.omega.scaled(-1.0)
        pts = rng.normal(size=(40, dim))
        u = rng.normal(size=(40, dim))
        v = rng.normal(size=(40, dim))
        return float(np.max(np.abs(diff.evaluate(pts, [u, v]))))

    return ExampleScenario(
        "cn_standard",
        "flat complex plane pairs with the doubled area form and the "
        "diagonal circle rotation",
        "lcs", s,
        aux_forms={"primitive": standard_primitive(dim)},
        action=act, momentum=mom,
        xi_values=[np.array([1.0])],
        xi_path=[np.array([v]) for v in np.linspace(1.0, 2.0, 4)],
        witness=witness, lck=lck, lck_witness=lck_witness, vaisman=True,
        holomorphic_fields={},
        witness_keep={"block": [0, 1], "floor": 0.45},
        expected=[
            ExpectedCheck("probe.momentum_at_unit_point", 1.0,
                          "squared radius at a unit point", 1e-12),
            ExpectedCheck("probe.level_rank_margin", 2.0,
                          "gradient length of the squared radius on its "
                          "unit level", 1e-9),
            ExpectedCheck("probe.primitive_differential", 0.0,
                          "the declared primitive differentiates to the "
                          "two-form", 1e-12),
            ExpectedCheck("reduction.span_agreement", None,
                          "characteristic routes agree", 1e-8),
            ExpectedCheck("reduction.reduced_form_pullback", None,
                          "projective-line witness", 1e-8),
        ],
        probes={"momentum_at_unit_point": momentum_at_unit,
                "level_rank_margin": level_margin,
                "primitive_differential": primitive_matches},
        sample_count=24, sample_radius=1.2)


def _cn_conformal() -> ExampleScenario:
    dim = 4
    gauge = ScalarField.from_source("(3*x1 + 2*x3) / 10", dim)
    omega = doubled_area_form(dim).scaled(gauge.exp())
    theta = KForm(1, dim, {(0,): "3/10", (2,): "2/10"})
    manifold = ConstrainedManifold.ambient(dim)
    s = LcsStructure(omega, theta, manifold)
    base_act = circle_action(dim, [(0, 1, "t"), (2, 3, "t")])
    act = base_act.with_gauge_cocycles(ConformalGauge(gauge))
    mom = MomentumData(
        (ScalarField.from_source("x1^2 + x2^2 + x3^2 + x4^2", dim) * gauge.exp(),))

    def dual_direction(scn, rng):
        # the twisting dual must be exp(-f) times the frozen constant vector
        from .lcs import anti_lee_field
        pts = scn.manifold.sample(10, rng)
        dual = anti_lee_field(scn.structure).evaluate(pts)
        f_vals = gauge.evaluate(pts) * np.ones(pts.shape[0])
        frozen = np.array([0.0, 0.15, 0.0, 0.1])
        return float(np.max(np.abs(dual - np.exp(-f_vals)[:, None] * frozen)))

    return ExampleScenario(
        "cn_conformal",
        "the flat model rescaled by a linear gauge, with matching momentum "
        "rescale and genuinely nonzero cocycles",
        "lcs", s,
        action=act, momentum=mom, gauge=gauge,
        xi_values=[np.array([1.0])],
        run_average=True,
        expected=[
            ExpectedCheck("probe.twisting_dual_of_gauge", 0.0,
                          "dual of the gauge differential against the "
                          "frozen constant vector", 1e-10),
            ExpectedCheck("reduction.span_agreement", None,
                          "characteristic routes agree under the gauge", 1e-8),
            ExpectedCheck("momentum.cocycle_rate_1", None,
                          "cocycle rate matches the twisting pairing", 1e-9),
            ExpectedCheck("average.gauge_shift", None,
                          "averaged potential shifts by the cocycle", 1e-9),
        ],
        probes={"twisting_dual_of_gauge": dual_direction},
        sample_count=20, sample_radius=1.2)


def _blowup_action() -> ExampleScenario:
    dim = 6
    omega = doubled_area_form(dim)
    theta = KForm.zero(1, dim)
    manifold = ConstrainedManifold.ambient(dim)
    s = LcsStructure(omega, theta, manifold)
    # first complex line rotates backwards, the plane rotates forwards
    act = circle_action(dim, [(0, 1, "0 - t"), (2, 3, "t"), (4, 5, "t")])
    mom = MomentumData.from_sources(
        ["x3^2 + x4^2 + x5^2 + x6^2 - x1^2 - x2^2"], dim)

    def momentum_split(scn, rng):
        pts = rng.normal(size=(50, dim))
        vals = scn.momentum.values(pts)[:, 0]
        direct = (np.sum(pts[:, 2:] ** 2, axis=1) - np.sum(pts[:, :2] ** 2, axis=1))
        return float(np.max(np.abs(vals - direct)))

    return ExampleScenario(
        "blowup_action",
        "a line and a plane rotating against each other; the momentum is "
        "the signed difference of squared radii",
        "lcs", s,
        action=act, momentum=mom,
        xi_values=[np.array([1.0])],
        expected=[
            ExpectedCheck("probe.momentum_signed_split", 0.0,
                          "difference of squared block radii", 1e-12),
            ExpectedCheck("momentum.hamiltonian_1", None,
                          "twisted generator identity", 1e-9),
        ],
        probes={"momentum_signed_split": momentum_split},
        sample_count=20, sample_radius=1.2)


def _hopf_contact_factor(scale: float, pairs: int) -> ContactStructure:
    dim = 2 * pairs
    alpha = sum_of_angular(dim, 0, scale=scale)
    return ContactStructure(alpha, ConstrainedManifold.unit_sphere(dim))


def _hopf() -> ExampleScenario:
    bridge = lcs_from_contact(_hopf_contact_factor(1.0, 2), scale=1.0)
    s = bridge.structure
    dim = 6
    act = circle_action(dim, [(2, 3, "t"), (4, 5, "t")])
    mom = MomentumData.from_sources(["0 - 1"], dim)
    gauge = ScalarField.from_source("x3*x5 + x4*x6", dim)

    r_vec, a_vec, b_vec = sphere_frame_vectors(dim, 2)
    r_cov, a_cov, b_cov = sphere_frame_covectors(dim, 2)
    v_vec = circle_vector(dim)
    v_cov = circle_covector(dim)
    j = (MatrixField.outer(r_vec, v_cov).scaled(0.5)
         + MatrixField.outer(v_vec, r_cov).scaled(-2.0)
         + MatrixField.outer(a_vec, b_cov)
         + MatrixField.outer(b_vec, a_cov).scaled(-1.0))
    g = (MatrixField.covector_square(v_cov).scaled(0.5)
         + (MatrixField.covector_square(r_cov)
            + MatrixField.covector_square(a_cov)
            + MatrixField.covector_square(b_cov)).scaled(2.0))
    lck = LckStructure(s, j, g)

    def anti_lee_pairing(scn, rng):
        from .lcs import anti_lee_field
        pts = scn.manifold.sample(12, rng)
        dual = anti_lee_field(scn.structure).evaluate(pts)
        return float(np.max(np.abs(
            scn.bridge.alpha_lift.evaluate(pts, [dual]) - 1.0)))

    def anti_lee_is_frame_rotation(scn, rng):
        from .lcs import anti_lee_field
        pts = scn.manifold.sample(12, rng)
        dual = anti_lee_field(scn.structure).evaluate(pts)
        return float(np.max(np.abs(dual - r_vec.evaluate(pts))))

    def momentum_is_constant(scn, rng):
        pts = scn.manifold.sample(30, rng)
        return float(np.max(np.abs(scn.momentum.values(pts) + 1.0)))

    def gauge_dual_formula(scn, rng):
        # frozen closed form for the dual of the gauge differential
        from .lcs import omega_dual_values
        from .calculus import exterior_derivative
        pts = scn.manifold.sample(12, rng)
        df = exterior_derivative(KForm.from_scalar(gauge, dim))
        got = omega_dual_values(scn.structure, df.covector_at(pts), pts)
        coeff_a = (pts[:, 2] * pts[:, 3] - pts[:, 4] * pts[:, 5])
        coeff_b = -0.5 * (pts[:, 2]**2 - pts[:, 3]**2 - pts[:, 4]**2 + pts[:, 5]**2)
        want = (coeff_a[:, None] * a_vec.evaluate(pts)
                + coeff_b[:, None] * b_vec.evaluate(pts))
        return float(np.max(np.abs(got - want)))

    return ExampleScenario(
        "hopf",
        "circle times the quaternion sphere, twisted by the angle form; the "
        "diagonal rotation has constant momentum and reduction runs after a "
        "regularizing gauge",
        "lcs", s,
        action=act, momentum=mom, gauge=gauge,
        use_gauge_for_reduction=True,
        xi_values=[np.array([-1.0])],
        gauge_path=[gauge * t for t in (0.05, 0.1333, 0.2167, 0.3)],
        bridge=bridge,
        lck=lck, vaisman=True,
        holomorphic_fields={"metric_dual": v_vec.scaled(2.0),
                            "twisting_dual": r_vec},
        run_average=True,
        expected=[
            ExpectedCheck("probe.form_pairs_dual_to_one", 0.0,
                          "defining form on the twisting dual", 1e-9),
            ExpectedCheck("probe.twisting_dual_is_frame_field", 0.0,
                          "frozen frame formula for the dual", 1e-9),
            ExpectedCheck("probe.momentum_constant_minus_one", 0.0,
                          "constant momentum over samples", 1e-9),
            ExpectedCheck("probe.gauge_dual_closed_form", 0.0,
                          "frozen dual of the gauge differential", 1e-9),
            ExpectedCheck("contact.bridge_power_identity", None,
                          "square of the twisted differential", 1e-9),
            ExpectedCheck("lck.lee_rotation", None,
                          "metric dual rotates onto the twisting dual", 1e-9),
            ExpectedCheck("lck.lee_killing", None,
                          "metric dual moves the metric by zero", 1e-8),
        ],
        probes={"form_pairs_dual_to_one": anti_lee_pairing,
                "twisting_dual_is_frame_field": anti_lee_is_frame_rotation,
                "momentum_constant_minus_one": momentum_is_constant,
                "gauge_dual_closed_form": gauge_dual_formula},
        sample_count=20)


def _hopf_fibered() -> ExampleScenario:
    bridge = lcs_from_contact(_hopf_contact_factor(1.0, 3), scale=1.0)
    s = bridge.structure
    dim = 8
    act = circle_action(dim, [(2, 3, "t"), (4, 5, "t"), (6, 7, "t")])
    mom = MomentumData.from_sources(["0 - 1"], dim)
    norm = "(x3^2 + x4^2 + x5^2 + x6^2 + x7^2 + x8^2)"
    gauge = ScalarField.from_source(f"(x3*x5 + x4*x6) / {norm}", dim)

    def membership(scn, rng):
        from .action import rescaled_momentum
        from .reduction import sample_level_set
        mom_g = rescaled_momentum(scn.momentum, ConformalGauge(scn.gauge))
        pts = sample_level_set(scn.manifold, mom_g, scn.xi_values[0], rng, 10)
        return float(np.max(np.abs(pts[:, 2] * pts[:, 4] + pts[:, 3] * pts[:, 5])))

    return ExampleScenario(
        "hopf_fibered",
        "circle times the five-sphere with a fibered gauge pulled up from "
        "the projective quotient",
        "lcs", s,
        action=act, momentum=mom, gauge=gauge,
        use_gauge_for_reduction=True,
        xi_values=[np.array([-1.0])],
        bridge=bridge,
        expected=[
            ExpectedCheck("probe.level_is_orthogonality_locus", 0.0,
                          "gauge level matches the real pairing of the "
                          "first two complex coordinates", 1e-10),
            ExpectedCheck("contact.bridge_power_identity", None,
                          "cube of the twisted differential", 1e-9),
        ],
        probes={"level_is_orthogonality_locus": membership},
        sample_count=16)


def _sphere_contact() -> ExampleScenario:
    c = _hopf_contact_factor(2.0, 2)
    dim = 4
    act = circle_action(dim, [(0, 1, "t/2"), (2, 3, "t/2")])
    from .contact import contact_momentum
    mom = contact_momentum(c, act)

    def momentum_is_one(scn, rng):
        pts = scn.manifold.sample(30, rng)
        return float(np.max(np.abs(scn.momentum.values(pts) - 1.0)))

    return ExampleScenario(
        "sphere_contact",
        "the three-sphere with the doubled standard form; the distinguished "
        "flow itself acts, so the momentum is constant one",
        "contact", c,
        action=act, momentum=mom,
        # constant momentum: no regular value exists, so no level stage runs;
        # the foliation collapse at the constant value is checked as an extra
        xi_values=[],
        sasaki_metric=MatrixField.constant(4.0 * np.eye(dim)),
        extras=("reeb_foliation_collapse",),
        expected=[
            ExpectedCheck("probe.momentum_constant_one", 0.0,
                          "pairing of the form with its own flow", 1e-9),
            ExpectedCheck("contact.reeb_pairs_to_one", None,
                          "normalization of the distinguished field", 1e-9),
            ExpectedCheck("extra.reeb_foliation_rank_zero", None,
                          "acting by the distinguished flow leaves nothing "
                          "to quotient", 0.5),
            ExpectedCheck("sasaki.lee_killing", None,
                          "product certificate", 1e-8),
        ],
        probes={"momentum_constant_one": momentum_is_one},
        sample_count=20)


def _clifford_circle() -> ExampleScenario:
    c = _hopf_contact_factor(2.0, 2)
    dim = 4
    act = circle_action(dim, [(0, 1, "t")])
    from .contact import contact_momentum
    mom = contact_momentum(c, act)

    pi = DiffeoMap.from_sources(
        ["2*(x1*x3 - x2*x4)", "2*(x1*x4 + x2*x3)"], dim)
    reduced = ContactStructure(angle_form(2), ConstrainedManifold.unit_sphere(2))
    witness = ContactWitness(pi, reduced)

    def half_torus_level(scn, rng):
        from .reduction import sample_level_set
        pts = sample_level_set(scn.manifold, scn.momentum, scn.xi_values[0],
                               rng, 10)
        return float(np.max(np.abs(pts[:, 0]**2 + pts[:, 1]**2 - 0.5)))

    return ExampleScenario(
        "clifford_circle",
        "one complex coordinate of the three-sphere rotates alone; the unit "
        "level is the balanced torus and the quotient is a circle",
        "contact", c,
        action=act, momentum=mom,
        xi_values=[np.array([1.0])],
        witness=witness,
        expected=[
            ExpectedCheck("probe.level_is_balanced_torus", 0.0,
                          "level condition in block radii", 1e-9),
            ExpectedCheck("contact.reduced_form_pullback", None,
                          "circle witness", 1e-8),
        ],
        probes={"level_is_balanced_torus": half_torus_level},
        sample_count=16)


def _hopf_bridge_torus() -> ExampleScenario:
    bridge = lcs_from_contact(_hopf_contact_factor(2.0, 2), scale=1.0)
    s = bridge.structure
    dim = 6
    act = circle_action(dim, [(2, 3, "t")])
    alpha_lift = bridge.alpha_lift
    mom = MomentumData(
        (ScalarField.from_source("0 - 2*(x3^2 + x4^2)", dim),))

    pi = DiffeoMap.from_sources(
        ["x1", "x2", "2*(x3*x5 - x4*x6)", "2*(x3*x6 + x4*x5)"], dim)
    torus = ConstrainedManifold(4, ("x1^2 + x2^2 - 1", "x3^2 + x4^2 - 1"))
    theta_red = angle_form(4)
    alpha_red_lift = angle_form(4, first=2)
    omega_red = twisted_d(theta_red, alpha_red_lift)
    reduced = LcsStructure(omega_red, theta_red, torus)
    witness = QuotientWitness(pi, reduced, 0.0)

    r_vec, a_vec, b_vec = sphere_frame_vectors(dim, 2)
    r_cov, a_cov, b_cov = sphere_frame_covectors(dim, 2)
    v_vec = circle_vector(dim)
    v_cov = circle_covector(dim)
    j = (MatrixField.outer(r_vec, v_cov).scaled(0.5)
         + MatrixField.outer(v_vec, r_cov).scaled(-2.0)
         + MatrixField.outer(a_vec, b_cov)
         + MatrixField.outer(b_vec, a_cov).scaled(-1.0))
    g = (MatrixField.covector_square(v_cov)
         + (MatrixField.covector_square(r_cov)
            + MatrixField.covector_square(a_cov)
            + MatrixField.covector_square(b_cov)).scaled(4.0))
    lck = LckStructure(s, j, g)

    v1_vec = circle_vector(4)
    v1_cov = circle_covector(4)
    vq_vec = circle_vector(4, base=2)
    vq_cov = circle_covector(4, base=2)
    j_red = (MatrixField.outer(vq_vec, v1_cov)
             + MatrixField.outer(v1_vec, vq_cov).scaled(-1.0))
    g_red = (MatrixField.covector_square(v1_cov)
             + MatrixField.covector_square(vq_cov))
    lck_witness = LckQuotientWitness(witness, j_red, g_red, vaisman=True)

    def reeb_pushes_to_double_speed(scn, rng):
        from .reduction import sample_level_set
        pts = sample_level_set(scn.manifold, scn.momentum, scn.xi_values[0],
                               rng, 10)
        pushed = np.einsum("mij,mj->mi", pi.jacobian_at(pts),
                           r_vec.evaluate(pts))
        return float(np.max(np.abs(pushed - 2.0 * vq_vec.evaluate(pi.apply(pts)))))

    return ExampleScenario(
        "hopf_bridge_torus",
        "the circle bridge over the doubled sphere form, reduced along a "
        "single rotating coordinate onto a flat two-torus",
        "lcs", s,
        aux_forms={"lift": alpha_lift},
        action=act, momentum=mom,
        xi_values=[np.array([-1.0])],
        witness=witness, lck=lck, lck_witness=lck_witness, vaisman=True,
        holomorphic_fields={"metric_dual": v_vec},
        bridge=bridge,
        extras=("bridge_reduction_consistency",),
        expected=[
            ExpectedCheck("probe.frame_field_pushes_to_double_speed", 0.0,
                          "frozen pushforward of the sphere frame field",
                          1e-9),
            ExpectedCheck("reduction.reduced_form_pullback", None,
                          "torus witness", 1e-8),
            ExpectedCheck("contact.bridge_reduction_consistent", None,
                          "reducing the bridge equals bridging the "
                          "reduction", 1e-8),
            ExpectedCheck("lck.lee_field_projects", None,
                          "metric dual projects onto the reduced one", 1e-8),
        ],
        probes={"frame_field_pushes_to_double_speed": reeb_pushes_to_double_speed},
        sample_count=16)


def _cotangent_s1s3() -> ExampleScenario:
    dim = 10
    manifold = ConstrainedManifold(
        10, ("x1^2 + x2^2 - 1", "x3^2 + x4^2 + x5^2 + x6^2 - 1"))
    v_cov = circle_covector(dim)
    r_cov, a_cov, b_cov = sphere_frame_covectors(dim, 2)
    eta = (v_cov.scaled("x7") + r_cov.scaled("x8")
           + a_cov.scaled("x9") + b_cov.scaled("x10"))
    theta = angle_form(dim)
    omega = twisted_d(theta, eta)
    s = LcsStructure(omega, theta, manifold)

    flow = DiffeoMap.from_sources(
        _flow_sources(dim, [(2, 3, "t"), (4, 5, "t"), (8, 9, "2*t")]), dim)
    act = GroupAction(LieAlgebraSpec.abelian(1), [flow])
    mom = MomentumData.from_sources(["0 - x8"], dim)

    def mu_reads_frame_coefficient(scn, rng):
        pts = scn.manifold.sample(30, rng, radius=1.2)
        return float(np.max(np.abs(scn.momentum.values(pts)[:, 0] + pts[:, 7])))

    def dual_is_fiber_direction(scn, rng):
        # the dual of the twisting form translates the first fiber
        # coordinate: it pairs with the circle coframe coefficient, not
        # with the circle itself
        from .lcs import anti_lee_field
        pts = scn.manifold.sample(10, rng, radius=1.2)
        dual = anti_lee_field(scn.structure).evaluate(pts)
        want = np.zeros((pts.shape[0], dim))
        want[:, 6] = 1.0
        return float(np.max(np.abs(dual - want)))

    return ExampleScenario(
        "cotangent_s1s3",
        "trivialized covector bundle over circle times sphere: frame "
        "coefficients ride along, the last pair at doubled speed",
        "lcs", s,
        aux_forms={"tautological": eta},
        action=act, momentum=mom,
        xi_values=[np.array([-1.0]), np.array([0.0]), np.array([1.0])],
        extras=("covector_speed", "frame_rotation", "quotient_map_property"),
        expected=[
            ExpectedCheck("probe.momentum_reads_frame_coefficient", 0.0,
                          "minus the second frame coefficient", 1e-12),
            ExpectedCheck("probe.twisting_dual_is_fiber_direction", 0.0,
                          "unit field along the first fiber coordinate", 1e-9),
            ExpectedCheck("extra.covector_rotation_speed", None,
                          "coefficient pair rotates at twice the base "
                          "speed", 1e-9),
            ExpectedCheck("extra.frame_rotation_formula", None,
                          "finite rotations mix the last two frame fields "
                          "at doubled angle", 1e-8),
            ExpectedCheck("reduction.span_agreement", None,
                          "characteristic routes agree at every declared "
                          "level", 1e-8),
        ],
        probes={"momentum_reads_frame_coefficient": mu_reads_frame_coefficient,
                "twisting_dual_is_fiber_direction": dual_is_fiber_direction},
        sample_count=16, sample_radius=1.2)


def _affine_plane() -> ExampleScenario:
    dim = 2
    omega = wedge(KForm.coordinate_differential(0, 2),
                  KForm.coordinate_differential(1, 2))
    s = LcsStructure(omega, KForm.zero(1, dim), ConstrainedManifold.ambient(dim))
    c = np.zeros((2, 2, 2))
    c[0][1][0] = -1.0
    c[1][0][0] = 1.0
    alg = LieAlgebraSpec(c)
    shift = DiffeoMap.from_sources(["x1 + t", "x2"], dim)
    scale = DiffeoMap.from_sources(["x1*exp(t)", "x2*exp(0 - t)"], dim)
    act = GroupAction(alg, [shift, scale])
    mom = MomentumData.from_sources(["x2", "x1*x2"], dim)

    def adjoint_is_diagonal(scn, rng):
        g = scn.action.element_at(1, -1.0)
        ad = scn.action.adjoint_matrix(g)
        return float(np.max(np.abs(ad - np.diag([np.exp(-1.0), 1.0]))))

    def bracket_of_momenta(scn, rng):
        from .lcs import twisted_poisson
        pts = rng.normal(size=(20, dim))
        got = twisted_poisson(scn.structure, scn.momentum.rho[0],
                              scn.momentum.rho[1], pts)
        return float(np.max(np.abs(got + pts[:, 1])))

    return ExampleScenario(
        "affine_plane",
        "shift and squeeze of the plane: the smallest nonabelian algebra, "
        "acting with polynomial momenta",
        "lcs", s,
        action=act, momentum=mom,
        xi_values=[np.array([1.0, 2.0])],
        sample_count=12,
        extras=("full_algebra_brackets",),
        expected=[
            ExpectedCheck("probe.adjoint_of_squeeze", 0.0,
                          "frozen diagonal adjoint matrix", 1e-12),
            ExpectedCheck("probe.momentum_bracket", 0.0,
                          "frozen bracket value of the two momenta", 1e-9),
            ExpectedCheck("momentum.poisson_homomorphism", None,
                          "brackets of momenta follow the algebra", 1e-8),
            ExpectedCheck("extra.full_algebra_brackets", None,
                          "bracket identity over the whole algebra, not "
                          "just the stabilizer", 1e-8),
        ],
        probes={"adjoint_of_squeeze": adjoint_is_diagonal,
                "momentum_bracket": bracket_of_momenta})


def _torus_obstruction() -> ExampleScenario:
    dim = 4
    theta1 = angle_form(dim)
    theta2 = angle_form(dim, first=2)
    omega = wedge(theta1, theta2)
    manifold = ConstrainedManifold(
        4, ("x1^2 + x2^2 - 1", "x3^2 + x4^2 - 1"))
    s = LcsStructure(omega, theta1, manifold)
    alg = LieAlgebraSpec.abelian(2)
    f1 = DiffeoMap.from_sources(_flow_sources(dim, [(0, 1, "t")]), dim)
    f2 = DiffeoMap.from_sources(_flow_sources(dim, [(2, 3, "t")]), dim)
    act = GroupAction(alg, [f1, f2], torus_rank=2)

    return ExampleScenario(
        "torus_obstruction",
        "a flat two-torus acting on itself; the pairing obstruction blocks "
        "reduction at any value with a second component",
        "lcs", s,
        action=act,
        xi_values=[np.array([0.0, 1.0])],
        extras=("obstruction_is_blocking",),
        expected=[
            ExpectedCheck("extra.obstruction_nonzero", None,
                          "the obstruction stays away from zero", 0.5),
            ExpectedCheck("lcs.defining_identity", None,
                          "structure identity still holds", 1e-9),
        ],
        sample_count=16)


_BUILDERS = {
    "cn_standard": _cn_standard,
    "cn_conformal": _cn_conformal,
    "blowup_action": _blowup_action,
    "hopf": _hopf,
    "hopf_fibered": _hopf_fibered,
    "sphere_contact": _sphere_contact,
    "clifford_circle": _clifford_circle,
    "hopf_bridge_torus": _hopf_bridge_torus,
    "cotangent_s1s3": _cotangent_s1s3,
    "affine_plane": _affine_plane,
    "torus_obstruction": _torus_obstruction,
}


def registry_names():
    return sorted(_BUILDERS)


def load_example(name: str) -> ExampleScenario:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownScenarioError(
            f"unknown scenario {name!r}; known: {', '.join(registry_names())}")
    return builder()


def expected_checks(name: str):
    """Acceptance rows (check id, expected value, basis, tolerance)."""
    return [e.as_tuple() for e in load_example(name).expected]
