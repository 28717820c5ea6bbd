"""Central p-fold averages and the separation grids they generate.

At a root of unity the product of a monodromy entry over the p points
q^k lambda is a multiple of the identity with a closed-form scalar; the
zeros of the B-average fix the joint spectrum of the separate variables.
"""

import numpy as np

from sgsov import average_operator, baxter_coeffs, compute_grids, f_function, make_params
from sgsov.yang_baxter import monodromy

rng = np.random.default_rng(2)
params = make_params(N=3, p=3, p_prime=2,
                     kappa=rng.uniform(0.5, 2, 3), xi=rng.uniform(0.5, 2, 3))
avg = compute_grids(params)
coeffs = baxter_coeffs(params)

big = 1.4 - 0.8j
print(f"closed forms at Lambda = {big}:")
print(f"  F      = {complex(avg.f(big)):.6f}")
print(f"  A_avg  = {complex(avg.cal_a(big)):.6f}   (even in Lambda)")
print(f"  B_avg  = {complex(avg.cal_b(big)):.6f}   (odd in Lambda)")

avg_b = average_operator(lambda x: monodromy(params, x).B, big, params)
target = complex(avg.cal_b(big))
dev = np.linalg.norm(avg_b - target * np.eye(params.dim)) / abs(target)
print(f"\np-fold operator average of B vs closed-form scalar: "
      f"deviation {dev:.3e} on dim {params.dim}")

mu = 0.9 + 0.3j
mono = monodromy(params, mu)
comm = np.linalg.norm(avg_b @ mono.A - mono.A @ avg_b) / np.linalg.norm(avg_b @ mono.A)
print(f"centrality: |[B_avg, A(mu)]| / |B_avg A(mu)| = {comm:.3e}")

lam = 1.1 * np.exp(0.4j)
prod = np.prod(coeffs.a(params.q ** np.arange(1, params.p + 1) * lam))
closed = complex(f_function(params, lam ** params.p))
print(f"\nproduct of the TQ coefficient a over q^k lambda vs F(lambda^p): "
      f"relative gap {abs(prod - closed) / abs(closed):.3e}")

print("\nzeros of the B-average (one per +- pair, arg in [0, pi)):")
for n, z in enumerate(avg.Z, start=1):
    print(f"  Z_{n} = {z:.6f}, |B_avg(Z)| / |A_avg(Z)| = "
          f"{abs(avg.cal_b(z)) / abs(avg.cal_a(z)):.2e}")

print("\nseparation grids y_n(k) = y_n0 q^k (p-th roots of the zeros):")
for n in range(params.N):
    pts = ", ".join(f"{y:.4f}" for y in avg.grids[n])
    print(f"  variable {n + 1}: {pts}")
print("grid closure max |y^p - Z|:",
      f"{np.max(np.abs(avg.grids ** params.p - avg.Z[:, None])):.2e}")

pool = avg.all_points(negated=True)
diffs = np.abs(pool[:, None] - pool[None, :])
np.fill_diagonal(diffs, np.inf)
print(f"genericity: min relative separation of the +-grid pool = "
      f"{diffs.min() / np.max(np.abs(pool)):.3e}")
