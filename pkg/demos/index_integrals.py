"""Signature and Euler characteristic from the Levi-Civita and Hermitian curvatures.

The two connections give different densities but the same integrals.
"""

from curvlab.chern_weil import index_report
from curvlab.models import builtin_model

print(f"{'model':8s} {'sigma(LC)':>12s} {'sigma(Herm)':>12s} {'chi(LC)':>12s} {'chi(Herm)':>12s}  rule")
for name in ("torus", "kt", "cp2", "s2xs2"):
    rep = index_report(builtin_model(name))
    vals = (rep.sigma_from_LC, rep.sigma_from_hermitian, rep.chi_from_LC, rep.chi_from_hermitian)
    print(f"{name:8s} " + " ".join(f"{x:12.6f}" for x in vals) + f"  {rep.rule}")
