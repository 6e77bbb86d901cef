"""Walk through the Kodaira-Thurston nilmanifold: a symplectic, non-Kaehler example.

Prints the Riemannian blocks, the Hermitian Ricci forms, the size of the
intrinsic torsion and the holomorphic sectional curvature spread at one point.
"""

import numpy as np

from curvlab.connections import beta_tensor, curvature_data
from curvlab.decomposition import decompose_riemann, ricci_forms
from curvlab.hsc import constancy_test, hsc, sample_directions
from curvlab.models import builtin_model

model = builtin_model("kt")
data = curvature_data(model, model.center())
blocks = decompose_riemann(data.Rg)
forms = ricci_forms(data.Rn)
beta = beta_tensor(data.gp)

print("KT at the chart centre")
print(f"  s_g            = {float(blocks.s_g):+.6f}")
for name, val in blocks.norms().items():
    label = f"|{name}|^2"
    print(f"  {label:15s}= {float(val):.6f}")
print(f"  |A|^2          = {float(data.gp.norm2()):.6f}   (torsion of the structure)")
print(f"  s_C, s_H       = {float(forms.s_C):+.6f}, {float(forms.s_H):+.6f}")
print(f"  |*rho - r|     = {float(forms.duality_residual()):.6f}")
print(f"  beta~          = {float(beta.beta_tilde):+.6f}   (-|A|^2/2 = {-0.5 * float(data.gp.norm2()):+.6f})")

H = hsc(data.Rn, sample_directions(512))
print(f"\nHSC over 512 directions: min {H.min():+.4f}, max {H.max():+.4f}")
verdict = constancy_test(data.Rn)
print(f"constant: {verdict.is_constant} (residual {verdict.residual:.3f})")
