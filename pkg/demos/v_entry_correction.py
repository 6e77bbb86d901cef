"""The (1,1) entry v of the Hermitian curvature and the scalar curvature.

The simple relation v = s_g/12 holds when W^- vanishes in the eta1 direction
(CP^2, the ball, flat space) but not in general.  The identity that holds on
every model here is v = s_g/12 - W^-(eta1, eta1)/2.
"""

from curvlab.connections import curvature_data
from curvlab.decomposition import decompose_riemann
from curvlab.models import builtin_model

print(f"{'model':7s} {'v':>10s} {'s_g/12':>10s} {'W-(e1,e1)':>10s} {'|v-s_g/12|':>11s} {'corrected':>10s}")
for name in ("torus", "cp2", "ball", "kt", "s2xs2"):
    model = builtin_model(name)
    data = curvature_data(model, model.center())
    blocks = decompose_riemann(data.Rg)
    v = float(data.Rn.block11[2, 1].real)
    s12 = float(blocks.s_g) / 12
    w = float(blocks.W_minus[0, 0])
    print(f"{name:7s} {v:+10.6f} {s12:+10.6f} {w:+10.6f} {abs(v - s12):11.2e} {abs(v - s12 + w / 2):10.2e}")
