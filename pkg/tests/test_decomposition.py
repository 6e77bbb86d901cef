import numpy as np
import pytest

from curvlab import tensor_core as tc
from curvlab.connections import CurvatureOperator, curvature_data
from curvlab.decomposition import (
    decompose_riemann,
    full_hermitian_blocks,
    hermitian_block_entries,
    ricci_forms,
    ricci_tensor,
    tracefree_ricci,
)
from curvlab.errors import ConstraintViolationError
from curvlab.models import METRIC_KEYS, STANDARD_J, ManifoldModel, builtin_model


def sphere_times_plane():
    """Round S^2 (stereographic) times flat R^2: Kaehler, not Einstein."""
    g = {k: ("1" if k[1] == k[2] else "0") for k in METRIC_KEYS}
    g["g11"] = g["g22"] = "4/(1 + x1^2 + x2^2)^2"
    return ManifoldModel("s2xr2", (-2.0,) * 4, (2.0,) * 4, (False,) * 4, g, dict(STANDARD_J), builtin=False)


def kulkarni_nomizu(h, k):
    return (
        np.einsum("...ad,...bc->...abcd", h, k) + np.einsum("...bc,...ad->...abcd", h, k)
        - np.einsum("...ac,...bd->...abcd", h, k) - np.einsum("...bd,...ac->...abcd", h, k)
    )


def weyl_oracle(R):
    """Weyl tensor of a frame curvature tensor with ``R(X,Y,Y,X)`` = sectional curvature."""
    ric = np.einsum("...abca->...bc", R)
    s = np.trace(ric, axis1=-2, axis2=-1)
    g = np.broadcast_to(np.eye(4), ric.shape)
    P = 0.5 * (ric - (s / 6.0)[..., None, None] * g)
    return R - kulkarni_nomizu(P, g)


def pts(model, n=10, seed=0):
    return model.sample_points(n, seed=seed)


def test_flat_torus_blocks_vanish(models):
    data = curvature_data(models["torus"], pts(models["torus"]))
    blocks = decompose_riemann(data.Rg)
    assert np.abs(blocks.matrix).max() == 0
    assert all(np.abs(v).max() == 0 for v in blocks.norms().values())
    forms = ricci_forms(data.Rn)
    assert np.abs(forms.rho_coeffs).max() == 0 and np.abs(forms.r_coeffs).max() == 0
    e = hermitian_block_entries(data.at(0).Rn)
    assert all(getattr(e, f) == 0 for f in e.__dataclass_fields__)


@pytest.mark.parametrize("name", ["torus", "cp2", "ball", "kt", "s2xs2"])
def test_weyl_blocks_match_kulkarni_nomizu_oracle(name, models):
    data = curvature_data(models[name], pts(models[name], 8, seed=1))
    blocks = decompose_riemann(data.Rg)
    Wm = -tc.operator_matrix(weyl_oracle(data.Rg.tensor))
    np.testing.assert_allclose(blocks.W_plus, Wm[..., tc.PLUS, tc.PLUS], atol=1e-12)
    np.testing.assert_allclose(blocks.W_minus, Wm[..., tc.MINUS, tc.MINUS], atol=1e-12)
    np.testing.assert_allclose(Wm[..., tc.PLUS, tc.MINUS], 0, atol=1e-12)
    # |R0|^2 = 1/4 |r0|^2, and s_g from the Ricci trace
    r0 = tracefree_ricci(data.Rg)
    np.testing.assert_allclose(blocks.norms()["R0"], 0.25 * np.sum(r0**2, axis=(-1, -2)), atol=1e-12)
    np.testing.assert_allclose(blocks.s_g, np.trace(ricci_tensor(data.Rg), axis1=-2, axis2=-1), atol=1e-12)


def test_blocks_reassemble(models):
    data = curvature_data(models["kt"], pts(models["kt"]))
    blocks = decompose_riemann(data.Rg)
    np.testing.assert_allclose(blocks.reassemble(), blocks.matrix, atol=1e-14)
    np.testing.assert_allclose(blocks.reassemble_refined(), blocks.matrix[..., tc.PLUS, :], atol=1e-14)
    np.testing.assert_allclose(np.trace(blocks.W_plus, axis1=-2, axis2=-1), 0, atol=1e-14)
    np.testing.assert_allclose(blocks.W_minus, np.swapaxes(blocks.W_minus, -1, -2), atol=1e-14)


def test_cp2_blocks():
    for k in (1.0, 4.0):
        model = builtin_model("cp2", k)
        blocks = decompose_riemann(curvature_data(model, pts(model)).Rg)
        n = blocks.norms()
        assert n["W_minus"].max() < 1e-16 and n["R0"].max() < 1e-16
        assert blocks.s_g.min() > 0 and np.ptp(blocks.s_g) < 1e-10 * k


def test_kt_blocks(models):
    blocks = decompose_riemann(curvature_data(models["kt"], pts(models["kt"])).Rg)
    np.testing.assert_allclose(blocks.s_g, -0.5, atol=1e-13)
    assert np.sqrt(blocks.norms()["R0"]).min() > 0.1
    np.testing.assert_allclose(blocks.norms()["W_plus"], 1 / 6, atol=1e-13)
    np.testing.assert_allclose(blocks.norms()["W_minus"], 1 / 6, atol=1e-13)


def test_rejects_non_curvature_input(rng):
    T = rng.normal(size=(4, 4, 4, 4))
    with pytest.raises(ConstraintViolationError):
        decompose_riemann(CurvatureOperator(T, "riemannian"))


@pytest.mark.parametrize("factory", [lambda: builtin_model("cp2", 4.0), lambda: builtin_model("s2xs2"), sphere_times_plane])
def test_kahler_ricci_forms_are_ricci_form(factory):
    model = factory()
    data = curvature_data(model, pts(model, 6, seed=2))
    forms = ricci_forms(data.Rn)
    ric = ricci_tensor(data.Rg)
    classical = np.einsum("ca,...cb->...ab", tc.J_FRAME, ric)  # Ric(J e_a, e_b)
    np.testing.assert_allclose(forms.rho, classical, atol=1e-10)
    np.testing.assert_allclose(forms.r, classical, atol=1e-10)
    np.testing.assert_allclose(forms.s_C, 0.5 * np.trace(ric, axis1=-2, axis2=-1), atol=1e-10)


def test_duality_of_ricci_forms():
    cp2 = builtin_model("cp2")
    assert ricci_forms(curvature_data(cp2, pts(cp2)).Rn).duality_residual().max() < 1e-9
    # S^2 x R^2 is Kaehler with W^- != 0: *rho != r
    m = sphere_times_plane()
    assert ricci_forms(curvature_data(m, pts(m)).Rn).duality_residual().min() > 0.1


def test_kt_star_scalar_pipeline(models):
    data = curvature_data(models["kt"], pts(models["kt"], 20))
    blocks = decompose_riemann(data.Rg)
    forms = ricci_forms(data.Rn)
    np.testing.assert_allclose(4 * forms.s_C - blocks.s_g, blocks.s_star, atol=1e-9)
    np.testing.assert_allclose(forms.s_H, 2 * forms.s_C)


def test_cp2_block_entries_pattern():
    for k in (1.0, 4.0):
        model = builtin_model("cp2", k)
        data = curvature_data(model, pts(model, 5, seed=3))
        for i in range(5):
            e = hermitian_block_entries(data.at(i).Rn, tol=1e-9)
            assert e.k == pytest.approx(k, rel=1e-10) and e.l == pytest.approx(k, rel=1e-10)
            assert e.u + 2 * e.v.real + e.w == pytest.approx(2 * k, rel=1e-10)
            assert abs(e.a) < 1e-10 and abs(e.b) < 1e-10 and abs(e.x) < 1e-10
            assert max(e.holk1_conditions().values()) < 1e-10
            assert max(e.selfdual_conditions().values()) < 1e-10
            assert max(e.dual_conditions().values()) < 1e-10


def test_block_entries_structural_constraint_enforced():
    bad = CurvatureOperator(tc.tensor_from_block11(tc.BlockMatrix11(a=1.0).matrix()), "hermitian")
    with pytest.raises(ConstraintViolationError):
        hermitian_block_entries(bad, tol=1e-9)
    e = hermitian_block_entries(bad)
    assert e.structural_residuals()["a+b-a'-b'"] == pytest.approx(1.0)


def test_kt_v_equals_scalar_over_twelve(models):
    # stated example: v = s_g/12 on KT; the computed v is -1/8 while s_g/12 = -1/24
    data = curvature_data(models["kt"], pts(models["kt"], 5, seed=4))
    s_g = decompose_riemann(data.Rg).s_g
    for i in range(5):
        e = hermitian_block_entries(data.at(i).Rn, tol=1e-9)
        assert abs(e.v - s_g[i] / 12) < 1e-10


@pytest.mark.parametrize("name", ["torus", "cp2", "ball", "kt", "s2xs2"])
def test_v_identity_with_weyl_correction(name, models):
    data = curvature_data(models[name], pts(models[name], 10, seed=5))
    blocks = decompose_riemann(data.Rg)
    v = data.Rn.block11[..., 2, 1]
    np.testing.assert_allclose(v.imag, 0, atol=1e-12)
    np.testing.assert_allclose(v.real, blocks.s_g / 12 - 0.5 * blocks.W_minus[..., 0, 0], atol=1e-12)


def test_kt_v_hand_value(models):
    # Nil^3 x S^1 with a Milnor frame: v = -1/8, s_g = -1/2, W^-(eta1, eta1) = 1/6
    data = curvature_data(models["kt"], models["kt"].center())
    blocks = decompose_riemann(data.Rg)
    assert data.Rn.block11[2, 1].real == pytest.approx(-1 / 8, abs=1e-14)
    assert blocks.s_g == pytest.approx(-1 / 2, abs=1e-14)
    assert blocks.W_minus[0, 0] == pytest.approx(1 / 6, abs=1e-14)


def test_full_hermitian_blocks():
    for model in (builtin_model("cp2", 1.0), builtin_model("ball", -4.0), builtin_model("torus")):
        data = curvature_data(model, pts(model, 5, seed=6))
        blocks = decompose_riemann(data.Rg)
        check = full_hermitian_blocks(data.Rn, blocks, data.beta)
        assert check.residual.max() < 1e-10
        assert np.abs(blocks.R_F).max() < 1e-12
    forms = ricci_forms(curvature_data(builtin_model("ball", -4.0), np.zeros(4)).Rn)
    assert forms.s_C < 0
