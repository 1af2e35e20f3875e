import numpy as np
from lcslab.calculus import DiffeoMap, KForm
from lcslab.manifold import ConstrainedManifold
from lcslab.lcs import verify_lcs
from lcslab.action import LieAlgebraSpec, GroupAction
from lcslab.contact import (
    ContactStructure, verify_contact, reeb_values, reeb_check, contact_momentum,
    contact_momentum_checks, contact_foliation_basis, ContactWitness,
    contact_quotient_verify, lcs_from_contact, bridge_power_identity_check,
    bridge_consistency_check, angle_form,
)
from lcslab.reduction import project_to_level, regularity_check

rng = np.random.default_rng(11)

sphere = ConstrainedManifold.unit_sphere(4)
alpha = KForm(1, 4, {(0,): "-2*x2", (1,): "2*x1", (2,): "-2*x4", (3,): "2*x3"})
c = ContactStructure(alpha, sphere)
print("half_rank (expect 1):", c.half_rank)

pts = sphere.sample(14, rng)
for r in verify_contact(c, pts):
    print(r)

reeb = reeb_values(c, pts)
expected = 0.5 * np.stack([-pts[:, 1], pts[:, 0], -pts[:, 3], pts[:, 2]], axis=1)
print("reeb vs R/2:", np.max(np.abs(reeb - expected)))
for r in reeb_check(c, pts, rng):
    print(r)

# single-factor rotation of the first complex coordinate
flow = DiffeoMap.from_sources(
    ["x1*cos(t) - x2*sin(t)", "x1*sin(t) + x2*cos(t)", "x3", "x4"], 4)
act = GroupAction(LieAlgebraSpec.abelian(1), [flow])
mom = contact_momentum(c, act)
probe = mom.values(pts)[:, 0] - 2.0 * (pts[:, 0]**2 + pts[:, 1]**2)
print("momentum is 2|z1|^2:", np.max(np.abs(probe)))
for r in contact_momentum_checks(c, act, mom, pts, rng):
    print(r)

# level mu = 1 (the half-and-half torus), xi = 1
xi = np.array([1.0])
lvl = project_to_level(sphere, mom, xi, rng.normal(size=(12, 4)))
print(regularity_check(sphere, mom, xi, lvl))
bases = contact_foliation_basis(c, act, xi, lvl)
x1 = act.fundamental_field(0).evaluate(lvl)
v_expected = x1 - reeb_values(c, lvl)
agree = max(np.min(np.linalg.norm(b / np.linalg.norm(b)
                                  - np.sign(b.T @ v_expected[i]) * v_expected[i]
                                  / np.linalg.norm(v_expected[i]), axis=0))
            for i, b in enumerate(bases))
print("foliation = X1 - reeb (direction match):", agree)

# quotient: the circle traced by twice the product of the complex coordinates
pi = DiffeoMap.from_sources(
    ["2*(x1*x3 - x2*x4)", "2*(x1*x4 + x2*x3)"], 4)
circle = ConstrainedManifold.unit_sphere(2)
c_red = ContactStructure(angle_form(2), circle)
witness = ContactWitness(pi, c_red)
for r in contact_quotient_verify(c, act, mom, xi, witness, lvl, rng):
    print(r)

# the circle bridge
bridge = lcs_from_contact(c)
prod_pts = bridge.structure.manifold.sample(12, rng)
for r in verify_lcs(bridge.structure, prod_pts, rng, prefix="bridge"):
    print(r)
print(bridge_power_identity_check(bridge, prod_pts, rng))

# bridging the reduced witness vs reducing the bridge
from lcslab.calculus import twisted_d
torus = ConstrainedManifold.unit_sphere(4, first=0, last=2).product(
    ConstrainedManifold.unit_sphere(2)) if False else None
torus = ConstrainedManifold(4, ("x1^2 + x2^2 - 1", "x3^2 + x4^2 - 1"))
theta_red = angle_form(4)
alpha_red_lift = angle_form(4, first=2)
omega_red = twisted_d(theta_red, alpha_red_lift)
from lcslab.lcs import LcsStructure
reduced_lcs = LcsStructure(omega_red, theta_red, torus)
t_pts = torus.sample(10, rng)
print(bridge_consistency_check(reduced_lcs, c_red, t_pts, rng))
# wrong sign must fail loudly
bad = LcsStructure(omega_red.scaled(-1.0), theta_red, torus)
r = bridge_consistency_check(bad, c_red, t_pts, rng)
print("negative control (expect FAIL, residual >= 0.1):", r)
