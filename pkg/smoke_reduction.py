import numpy as np
from lcslab.expr import ScalarField
from lcslab.calculus import KForm, DiffeoMap, wedge
from lcslab.manifold import ConstrainedManifold
from lcslab.lcs import LcsStructure
from lcslab.action import LieAlgebraSpec, GroupAction, MomentumData
from lcslab.reduction import (
    project_to_level, sample_level_set, regularity_check, momentum_rank_margin,
    stabilizer_subalgebra, obstruction_values, characteristic_basis,
    characteristic_span_check, rank_scan, leaf_invariance_check,
    algebra_identities_check, QuotientWitness, quotient_verify, sweep_values,
)
from lcslab.errors import RankDeficiencyError

rng = np.random.default_rng(7)

# standard R^4 scenario: omega0 = -2(dx1^dx2 + dx3^dx4), theta = 0
N = 4
dx = [KForm.coordinate_differential(i, N) for i in range(N)]
omega = (wedge(dx[0], dx[1]) + wedge(dx[2], dx[3])).scaled(-2.0)
theta = KForm.zero(1, N)
M = ConstrainedManifold.ambient(N)
s = LcsStructure(omega, theta, M)

flow = DiffeoMap.from_sources(
    ["x1*cos(t) - x2*sin(t)", "x1*sin(t) + x2*cos(t)",
     "x3*cos(t) - x4*sin(t)", "x3*sin(t) + x4*cos(t)"], N)
vf = flow.velocity_field(0.0)
print("generator at e1:", vf.evaluate(np.array([[1.0, 0, 0, 0]])))  # want (0,1,0,0)

act = GroupAction(LieAlgebraSpec.abelian(1), [flow])
mom = MomentumData.from_sources(["x1^2 + x2^2 + x3^2 + x4^2"], N)
xi = np.array([1.0])

# projection to the unit sphere level
seeds = rng.normal(size=(12, N))
pts = project_to_level(M, mom, xi, seeds)
print("level residual:", np.max(np.abs(mom.values(pts) - 1.0)))
print("rank margin (expect 2):", momentum_rank_margin(M, mom, pts))
print(regularity_check(M, mom, xi, pts))

# xi = 0 must be rejected
try:
    project_to_level(M, mom, np.array([0.0]), seeds[:3])
    print("xi=0 NOT rejected (bad)")
except RankDeficiencyError as e:
    print("xi=0 rejected:", str(e)[:60])

# stabilizer of an abelian algebra is everything
stab, flagged = stabilizer_subalgebra(s, act, xi, pts[:1])
print("stabilizer dim (expect 1):", stab.shape[1], "flagged:", flagged)
print("obstruction (expect 0):", np.max(obstruction_values(s, act, xi, pts)))

entry = characteristic_basis(s, act, mom, xi, pts[0])
print("char rank (expect 1):", entry.rank, "angle:", entry.span_angle)
x1 = vf.evaluate(pts[:1])[0]
x1 /= np.linalg.norm(x1)
b = entry.basis[:, 0] / np.linalg.norm(entry.basis[:, 0])
print("basis vs X1 alignment (expect 1):", abs(x1 @ b))

for r in characteristic_span_check(s, act, mom, xi, pts):
    print(r)
scan, rank = rank_scan(s, act, mom, xi, pts)
print(scan, "rank:", rank)
print(leaf_invariance_check(s, act, mom, xi, [1.0], pts[:4], time=2.0))
for r in algebra_identities_check(s, act, mom, xi, pts):
    print(r)

# quotient witness: projective line chart via u + iv = conj(z1) z2 / |z1|^2
pts_safe = sample_level_set(M, mom, xi, rng, 10,
                            keep=lambda q: q[:, 0]**2 + q[:, 1]**2 > 0.2)
pi = DiffeoMap.from_sources(
    ["(x1*x3 + x2*x4) / (x1^2 + x2^2)", "(x1*x4 - x2*x3) / (x1^2 + x2^2)"], N)
du = KForm.coordinate_differential(0, 2)
dv = KForm.coordinate_differential(1, 2)
omega_red = wedge(du, dv).scaled("-2 / (1 + x1^2 + x2^2)^2")
witness = QuotientWitness(
    pi,
    LcsStructure(omega_red, KForm.zero(1, 2), ConstrainedManifold.ambient(2)),
    0.0)
for r in quotient_verify(s, act, mom, xi, witness, pts_safe, rng):
    print(r)

# sweep xi in [1, 2]
for r in sweep_values(s, act, mom, [np.array([v]) for v in np.linspace(1.0, 2.0, 4)],
                      rng, count=8):
    print(r)

# sweep hitting xi = 0 must name the parameter
try:
    sweep_values(s, act, mom, [np.array([1.0]), np.array([0.0])], rng, count=6)
    print("sweep NOT rejected (bad)")
except RankDeficiencyError as e:
    print("sweep rejected:", str(e)[:70])

# nonabelian fixture: affine motions of the line, [a1, a2] = -a1
N2 = 2
dxp = [KForm.coordinate_differential(i, N2) for i in range(N2)]
omega_p = wedge(dxp[0], dxp[1])
s_p = LcsStructure(omega_p, KForm.zero(1, N2), ConstrainedManifold.ambient(N2))
c = np.zeros((2, 2, 2))
c[0][1][0] = -1.0
c[1][0][0] = 1.0
alg = LieAlgebraSpec(c)
flow_shift = DiffeoMap.from_sources(["x1 + t", "x2"], N2)
flow_scale = DiffeoMap.from_sources(["x1*exp(t)", "x2*exp(-t)"], N2)
act_p = GroupAction(alg, [flow_shift, flow_scale])
pts_p = rng.normal(size=(5, N2))
stab_p, _ = stabilizer_subalgebra(s_p, act_p, np.array([1.0, 1.0]), pts_p[:1])
print("affine stabilizer dim at generic xi (expect 0):", stab_p.shape[1])
stab_p2, _ = stabilizer_subalgebra(s_p, act_p, np.array([0.0, 1.0]), pts_p[:1])
print("affine stabilizer dim at xi1=0 (expect 2):", stab_p2.shape[1])
