"""
How tight is the sandwich?
==========================

Projections built from random unit vectors have rel(A) = 1 and a small
permanent. The n-th root of rel/per measures how far the upper bound is from
the truth; it can never exceed e^(gamma+1).
"""

import math

from psdperm import ExperimentConfig, emit_report, ratio_experiment, sphere_ensemble, tight_instance
from psdperm.tightness import RATIO_LIMIT
from psdperm.certificates import f_sup_estimate

# the spread of an ensemble is summarized by f in [e^-gamma, 1]
for d in (1, 2, 4, 8):
    U = sphere_ensemble(d, 40, seed=d)
    print(f"d={d}: f_sup estimate {f_sup_estimate(U, seed=d):.4f}")

# a single row by hand
inst = tight_instance(sphere_ensemble(2, 10, seed=0))
print("A is a projection:", abs(inst.A @ inst.A - inst.A).max() < 1e-8)

# the experiment grid, printed as a table
rows = ratio_experiment(ExperimentConfig(d_list=(1, 2, 3), n_list=(8, 12), seeds=(0, 1)))
print(emit_report(rows, "text").decode())
print("(12^12/12!)^(1/12) =", math.exp((12 * math.log(12) - math.lgamma(13)) / 12))
print("upper limit e^(gamma+1) =", RATIO_LIMIT)
