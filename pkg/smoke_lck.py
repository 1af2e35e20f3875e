import numpy as np
from lcslab.calculus import KForm, VectorField, twisted_d, wedge
from lcslab.contact import ContactStructure, angle_form
from lcslab.manifold import ConstrainedManifold
from lcslab.lcs import LcsStructure, anti_lee_field
from lcslab.lck import (
    MatrixField, LckStructure, lck_check, lee_fields, lee_checks,
    integrability_check, holomorphic_check, vaisman_check, sasaki_check,
    nijenhuis, projected_field,
)

rng = np.random.default_rng(23)

# flat model: block rotations, doubled metric, minus-two area forms
N = 4
dx = [KForm.coordinate_differential(i, N) for i in range(N)]
omega0 = (wedge(dx[0], dx[1]) + wedge(dx[2], dx[3])).scaled(-2.0)
flat = LcsStructure(omega0, KForm.zero(1, N), ConstrainedManifold.ambient(N))
j_flat = MatrixField.constant([[0, -1, 0, 0], [1, 0, 0, 0],
                               [0, 0, 0, -1], [0, 0, 1, 0]])
g_flat = MatrixField.constant(2.0 * np.eye(N))
l_flat = LckStructure(flat, j_flat, g_flat)
pts = rng.normal(size=(12, N))
for r in lck_check(l_flat, pts, rng, prefix="flat"):
    print(r)
sharp, dual = lee_fields(l_flat, pts)
print("flat lee (expect 0,0):", np.max(np.abs(sharp)), np.max(np.abs(dual)))
print(integrability_check(l_flat, pts, rng, prefix="flat"))
print(vaisman_check(l_flat, pts, rng, prefix="flat"))

# Hopf: circle times the quaternion sphere
M = ConstrainedManifold(6, ("x1^2 + x2^2 - 1", "x3^2 + x4^2 + x5^2 + x6^2 - 1"))
v_shp = KForm(1, 6, {(0,): "-x2", (1,): "x1"})
r_shp = KForm(1, 6, {(2,): "-x4", (3,): "x3", (4,): "-x6", (5,): "x5"})
a_shp = KForm(1, 6, {(2,): "-x5", (3,): "x6", (4,): "x3", (5,): "-x4"})
b_shp = KForm(1, 6, {(2,): "-x6", (3,): "-x5", (4,): "x4", (5,): "x3"})
v_vec = VectorField.from_sources(["-x2", "x1", "0", "0", "0", "0"], 6)
r_vec = VectorField.from_sources(["0", "0", "-x4", "x3", "-x6", "x5"], 6)
a_vec = VectorField.from_sources(["0", "0", "-x5", "x6", "x3", "-x4"], 6)
b_vec = VectorField.from_sources(["0", "0", "-x6", "-x5", "x4", "x3"], 6)
theta = angle_form(6)
alpha = r_shp
omega = twisted_d(theta, alpha)
s = LcsStructure(omega, theta, M)

j_hopf = (MatrixField.outer(r_vec, v_shp).scaled(0.5)
          + MatrixField.outer(v_vec, r_shp).scaled(-2.0)
          + MatrixField.outer(a_vec, b_shp)
          + MatrixField.outer(b_vec, a_shp).scaled(-1.0))
g_hopf = (MatrixField.covector_square(v_shp).scaled(0.5)
          + (MatrixField.covector_square(r_shp)
             + MatrixField.covector_square(a_shp)
             + MatrixField.covector_square(b_shp)).scaled(2.0))
l = LckStructure(s, j_hopf, g_hopf)
hp = M.sample(16, rng)
for r in lck_check(l, hp, rng, prefix="hopf"):
    print(r)
sharp, dual = lee_fields(l, hp)
print("theta_sharp vs 2V:", np.max(np.abs(sharp - 2.0 * v_vec.evaluate(hp))))
print("theta_omega vs R:", np.max(np.abs(dual - r_vec.evaluate(hp))))
for r in lee_checks(l, hp, rng, prefix="hopf"):
    print(r)
print(integrability_check(l, hp, rng, prefix="hopf"))
for r in holomorphic_check(l, v_vec.scaled(2.0), hp, rng, label="sharp", prefix="hopf"):
    print(r)
for r in holomorphic_check(l, r_vec, hp, rng, label="dual", prefix="hopf"):
    print(r)
print(vaisman_check(l, hp, rng, prefix="hopf"))

# negative controls
print("--- negatives ---")
g_bad = g_hopf + MatrixField.covector_square(a_shp).scaled("x3^2 + 1/2")
l_bad = LckStructure(s, j_hopf, g_bad)
bad = [r for r in lck_check(l_bad, hp, rng, prefix="neg") if not r.passed]
for r in bad:
    print(r)
l_pert = LckStructure(s, j_hopf, g_hopf.scaled("exp(x1)"))
print(vaisman_check(l_pert, hp, rng, prefix="neg"))
for r in holomorphic_check(l, a_vec, hp, rng, label="generic", prefix="neg"):
    print(r)

# Sasaki certificate for the normalized round sphere
sphere = ConstrainedManifold.unit_sphere(4)
alpha_c = KForm(1, 4, {(0,): "-2*x2", (1,): "2*x1", (2,): "-2*x4", (3,): "2*x3"})
c = ContactStructure(alpha_c, sphere)
g_c = MatrixField.constant(4.0 * np.eye(4))
for r in sasaki_check(c, g_c, 12, rng):
    print(r)
