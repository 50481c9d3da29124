"""
The diagonal upper bound
========================

rel(A) is the smallest product of diagonal entries of a diagonal D with D >= A.
It bounds the permanent from above and is computed here by a barrier method.
"""

import math

import numpy as np

from psdperm import admit_hermitian_psd, per_psd_log, random_psd, rel_solve
from psdperm.linalg import lambda_min

A = admit_hermitian_psd([[2, 1], [1, 2]])
sol = rel_solve(A)

# the optimal diagonal is 3*I, so rel = 9 while per = 5
print("D* =", sol.D)
print("rel =", sol.rel, " per =", math.exp(per_psd_log(A).log))
print("lambda_min(D* - A) =", lambda_min(np.diag(sol.D) - A))

# path following: mu shrinks geometrically, a few Newton steps per stage
for stage in sol.stages[:5]:
    print(f"mu={stage.mu:.2e}  newton={stage.newton_steps}  objective={stage.objective:.9f}")
print("...", len(sol.stages), "stages total")

# on random inputs the relaxation always sits above the permanent
rng = np.random.default_rng(1)
for n in (4, 8, 12):
    B = random_psd(n, n // 2, rng)
    print(f"n={n:2d}  log rel={rel_solve(B).log_rel:8.4f}  log per={per_psd_log(B).log:8.4f}")
