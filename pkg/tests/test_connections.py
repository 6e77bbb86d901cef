import numpy as np
import pytest

from curvlab import tensor_core as tc
from curvlab.connections import (
    ConnectionCoeffs,
    beta_tensor,
    christoffel,
    curvature_data,
    gauge_potential,
    hermitian_curvature,
    metric_residual,
    riemann_curvature,
    riemann_symmetry_residuals,
)
from curvlab.decomposition import decompose_riemann
from curvlab.expr import eval_value
from curvlab.geometry import build_point_structure
from curvlab.models import METRIC_KEYS, STANDARD_J, ManifoldModel, builtin_model

SUB11 = [0, 3, 4, 5]


def _model(g, name="test"):
    gs = {k: ("1" if k[1] == k[2] else "0") for k in METRIC_KEYS}
    gs.update(g)
    return ManifoldModel(name, (-2.0,) * 4, (2.0,) * 4, (False,) * 4, gs, dict(STANDARD_J), builtin=False)


def _conformal(u):
    e = f"exp(2*({u}))"
    return _model({"g11": e, "g22": e, "g33": e, "g44": e})


def fd_riemann(model, p, h=1e-3):
    """Coordinate R_ijkl from nested central differences of the metric values only."""

    def metric(q):
        return np.array([[float(eval_value(model.g_exprs[i][j], q)) for j in range(4)] for i in range(4)])

    def dmetric(q):
        out = np.zeros((4, 4, 4))
        for m in range(4):
            e = np.zeros(4)
            e[m] = h
            out[m] = (metric(q + e) - metric(q - e)) / (2 * h)
        return out

    def gamma(q):
        ginv = np.linalg.inv(metric(q))
        dg = dmetric(q)
        C = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
        return np.einsum("kl,lij->kij", ginv, C)

    G = gamma(p)
    dG = np.zeros((4, 4, 4, 4))
    for m in range(4):
        e = np.zeros(4)
        e[m] = h
        dG[m] = (gamma(p + e) - gamma(p - e)) / (2 * h)
    Rup = (
        np.einsum("imjk->mijk", dG) - np.einsum("jmik->mijk", dG)
        + np.einsum("mil,ljk->mijk", G, G) - np.einsum("mjl,lik->mijk", G, G)
    )
    return np.einsum("mijk,ml->ijkl", Rup, metric(p))


def test_flat_torus_everything_vanishes(models):
    data = curvature_data(models["torus"], models["torus"].sample_points(5))
    for arr in (data.lc.gamma, data.gp.A, data.Rg.tensor, data.Rn.tensor, data.beta.tensor):
        assert np.abs(arr).max() == 0


def test_conformal_christoffels_u_equals_x1():
    lc = christoffel(_conformal("x1"), np.array([0.3, 0.1, -0.2, 0.5]))
    expected = np.zeros((4, 4, 4))
    # Gamma^k_ij = delta_ki du_j + delta_kj du_i - delta_ij du^k with du = dx1
    expected[0, 0, 0] = 1
    for j in (1, 2, 3):
        expected[0, j, j] = -1
        expected[j, 0, j] = expected[j, j, 0] = 1
    np.testing.assert_allclose(lc.gamma, expected, atol=1e-14)


def test_cp2_christoffels_vanish_at_origin():
    lc = christoffel(builtin_model("cp2", 1.0), np.zeros(4))
    np.testing.assert_allclose(lc.gamma, 0, atol=1e-15)


def test_riemann_matches_finite_difference_oracle():
    m = _model({"g11": "2 + sin(x1*x2)", "g22": "2 + sin(x1*x2)", "g33": "exp(x1 - x4)", "g44": "exp(x1 - x4)",
                "g13": "0.1*x2", "g24": "0.1*x2", "g14": "0.1*x3", "g23": "-0.1*x3"})
    p = np.array([0.3, -0.2, 0.4, 0.1])
    R = riemann_curvature(m, p)
    np.testing.assert_allclose(R.coordinate_tensor, fd_riemann(m, p), atol=2e-6)
    for res in riemann_symmetry_residuals(R.tensor).values():
        assert res < 1e-12


def test_s2xs2_sectional_curvatures(models):
    R = riemann_curvature(models["s2xs2"], models["s2xs2"].sample_points(4, seed=2)).tensor
    np.testing.assert_allclose(R[:, 0, 1, 1, 0], 1.0, atol=1e-12)
    np.testing.assert_allclose(R[:, 2, 3, 3, 2], 1.0, atol=1e-12)
    for a, b in ((0, 2), (0, 3), (1, 2), (1, 3)):
        np.testing.assert_allclose(R[:, a, b, b, a], 0.0, atol=1e-12)


def test_cp2_scalar_curvature_homogeneous():
    for k in (1.0, 4.0):
        model = builtin_model("cp2", k)
        s = decompose_riemann(riemann_curvature(model, model.sample_points(10, seed=3))).s_g
        assert np.ptp(s) <= 1e-8 * abs(s).max()
        assert s[0] == pytest.approx(6 * k, rel=1e-10)


@pytest.mark.parametrize("name", ["cp2", "ball", "s2xs2"])
def test_kahler_models_have_zero_gauge_potential(name, models):
    data = curvature_data(models[name], models[name].sample_points(10, seed=4))
    assert np.abs(data.gp.A).max() < 1e-12
    np.testing.assert_allclose(data.Rn.tensor, data.Rg.tensor, atol=1e-10)
    assert np.abs(data.beta.tensor).max() < 1e-20


def test_kt_gauge_potential_is_large(models):
    gp = gauge_potential(models["kt"], models["kt"].sample_points(50, seed=5))
    assert np.sqrt(gp.norm2()).min() > 0.1


def test_gauge_potential_is_antilinear(models):
    ps = build_point_structure(models["kt"], models["kt"].sample_points(8, seed=6))
    A = gauge_potential(ps).frame
    J = tc.J_FRAME
    AJ = np.einsum("...abk,kc->...abc", A, J)
    JA = np.einsum("bk,...akc->...abc", J, A)
    np.testing.assert_allclose(AJ, -JA, atol=1e-14)
    A_JX = np.einsum("ka,...kbc->...abc", J, A)
    np.testing.assert_allclose(A_JX, -JA, atol=1e-14)


def test_hermitian_connection_preserves_g_and_J(models):
    model = builtin_model("kt")
    ps = build_point_structure(model, model.sample_points(6, seed=7))
    lc = christoffel(ps)
    gp = gauge_potential(ps, lc=lc)
    omega = lc.gamma + np.einsum("...ikj->...kij", gp.A)
    assert metric_residual(ps, ConnectionCoeffs(omega, None, "hermitian")).max() < 1e-13
    DJ = ps.dJ + np.einsum("...kim,...mj->...ikj", omega, ps.J) - np.einsum("...km,...mij->...ikj", ps.J, omega)
    assert np.abs(DJ).max() < 1e-13
    # Levi-Civita is not J-parallel here
    DJ_lc = ps.dJ + np.einsum("...kim,...mj->...ikj", lc.gamma, ps.J) - np.einsum("...km,...mij->...ikj", ps.J, lc.gamma)
    assert np.abs(DJ_lc).max() > 0.1


def test_kt_hermitian_minus_riemann_is_minus_beta_on_11(models):
    data = curvature_data(models["kt"], models["kt"].sample_points(20, seed=8))
    diff = tc.operator_matrix(data.Rn.tensor - data.Rg.tensor)
    beta = data.beta.matrix
    assert np.abs(diff - data.Rn.matrix + data.Rg.matrix).max() < 1e-14
    assert np.abs((diff + beta)[..., SUB11, :][..., SUB11]).max() < 1e-9
    assert np.abs(diff).max() > 0.05


def test_beta_examples(models):
    kt = curvature_data(models["kt"], models["kt"].sample_points(50, seed=9))
    beta = beta_tensor(kt.gp)
    A2 = kt.gp.norm2()
    np.testing.assert_allclose(beta.beta_tilde, -0.5 * A2, atol=1e-10)
    np.testing.assert_allclose(np.sum(beta.beta0**2, axis=-1), 0.25 * A2**2, atol=1e-10)
    assert beta.outside_cf_column().max() < 1e-14
    zero = curvature_data(models["cp2"], np.zeros((1, 4)))
    assert np.abs(beta_tensor(zero.gp).tensor).max() == 0


def test_gauge_norm_independent_of_frame_choice(models):
    model = models["kt"]
    p = model.sample_points(3, seed=10)
    theta = 0.7
    seed = np.eye(4)
    seed[:, 0] = [np.cos(theta), 0.2, np.sin(theta), -0.4]
    a = curvature_data(model, p)
    b = curvature_data(model, p, seed=seed)
    assert np.abs(a.ps.frame - b.ps.frame).max() > 0.1
    np.testing.assert_allclose(a.gp.norm2(), b.gp.norm2(), atol=1e-14)
    np.testing.assert_allclose(
        decompose_riemann(a.Rg).norms()["W_plus"], decompose_riemann(b.Rg).norms()["W_plus"], atol=1e-13
    )


def test_hermitian_curvature_direct_call_matches_bundle(models):
    p = models["kt"].sample_points(2, seed=11)
    np.testing.assert_allclose(hermitian_curvature(models["kt"], p).tensor, curvature_data(models["kt"], p).Rn.tensor)
    single = curvature_data(models["kt"], p).at(1)
    np.testing.assert_allclose(single.Rn.tensor, curvature_data(models["kt"], p[1]).Rn.tensor, atol=1e-15)
