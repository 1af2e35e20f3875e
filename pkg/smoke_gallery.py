import numpy as np
from lcslab import gallery

rng = np.random.default_rng(11)
for name in gallery.registry_names():
    scn = gallery.load_example(name)
    print(f"== {name}: dim={scn.dim} kind={scn.kind} "
          f"xi={[list(x) for x in scn.xi_values]}")
    for pname, probe in scn.probes.items():
        val = probe(scn, np.random.default_rng(3))
        print(f"   probe {pname}: {val:.3e}")
    for row in gallery.expected_checks(name):
        print(f"   expect {row[0]} -> {row[1]} tol {row[3]:.1e}")

try:
    gallery.load_example("nope")
except Exception as e:
    print("unknown ->", type(e).__name__, e)
