"""
Exact permanents, three ways
============================

Three independent exact methods agree on small matrices; for PSD inputs the
log-domain wrapper keeps products of large diagonals from overflowing.
"""

import math

import numpy as np

from psdperm import per_naive, per_psd_log, per_rank1, per_ryser, per_tensor, random_psd

rng = np.random.default_rng(0)

# a random complex 4x4 matrix: permanents are generally complex
M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
print("naive :", per_naive(M))
print("ryser :", per_ryser(M))
print("tensor:", per_tensor(M))

# all-ones matrix: every permutation contributes 1
print("per(J_6) =", per_ryser(np.ones((6, 6))).real, "= 6! =", math.factorial(6))

# PSD permanents are nonnegative and come back as logs
A = random_psd(12, 5, rng)
p = per_psd_log(A)
print("log per(A) for a rank-5 12x12 PSD matrix:", p.log)

# scaling A by 1000 shifts the log by n * ln(1000) without overflow
print("shift after 1000x scaling:", per_psd_log(1000 * A).log - p.log, "vs", 12 * math.log(1000))

# rank one matrices have a closed form n! prod |v_i|^2
v = rng.standard_normal(8)
print("rank-1 closed form:", per_rank1(v).log, " ryser:", math.log(per_ryser(np.outer(v, v)).real))
