"""Exact rational sweep over random (1,1) curvature blocks.

Constant holomorphic sectional curvature is compared against the pair of
conditions W^- = 0 and *rho = r, with Gaussian rational arithmetic so there is
no tolerance involved.
"""

import sys

from curvlab.algebra_oracle import balas_sweep, theorem3_equivalence_sweep

n = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
eq = theorem3_equivalence_sweep(n, seed=0, grid=True)
bal = balas_sweep(n, seed=0)
print(f"equivalence: {eq.agree_count}/{n} random blocks agree, grid of {eq.grid_size}, "
      f"{len(eq.disagree_examples)} disagreements")
print(f"coefficient form: {bal.agree_count}/{n} agree, {len(bal.disagree_examples)} disagreements")
