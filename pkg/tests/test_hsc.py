import numpy as np
import pytest

from curvlab import tensor_core as tc
from curvlab.algebra_oracle import check_holk1, random_constrained_block
from curvlab.connections import CurvatureOperator, curvature_data
from curvlab.decomposition import decompose_riemann, hermitian_block_entries, ricci_forms
from curvlab.errors import PreconditionError
from curvlab.hsc import (
    constancy_test,
    hsc,
    hsc_real,
    kahler_criteria,
    sample_directions,
    theorem3_check,
)
from curvlab.models import builtin_model

ALL_CONDITIONS = ("x=0", "l=k", "a'=-a", "b=-a", "trace 2k")


def point_data(model, seed=0):
    return curvature_data(model, model.sample_points(1, seed=seed)).at(0)


def coordinate_hsc(data, X_chart):
    """Oracle: -R(X, JX, X, JX)/g(X, X)^2 from the chart-coordinate tensor."""
    R = data.Rn.coordinate_tensor
    JX = data.ps.J @ X_chart
    n = X_chart @ data.ps.g @ X_chart
    return -np.einsum("abcd,a,b,c,d->", R, X_chart, JX, X_chart, JX) / n**2


def test_flat_torus_hsc_zero(models):
    d = point_data(models["torus"])
    assert np.abs(hsc(d.Rn, sample_directions(64))).max() == 0
    v = constancy_test(d.Rn)
    assert (v.is_constant, v.k_estimate, v.residual, v.matrix_conditions_met) == (True, 0.0, 0.0, True)


@pytest.mark.parametrize("name,k", [("cp2", 1.0), ("cp2", 4.0), ("ball", -1.0), ("ball", -4.0)])
def test_constant_hsc_models(name, k, rng):
    model = builtin_model(name, k)
    data = curvature_data(model, model.sample_points(100, seed=1))
    Z = rng.normal(size=(100, 2)) + 1j * rng.normal(size=(100, 2))
    H = np.array([hsc(data.at(i).Rn, Z[i]) for i in range(100)])
    np.testing.assert_allclose(H, k, rtol=1e-8)
    v = constancy_test(data.at(0).Rn)
    assert v.is_constant and v.matrix_conditions_met and v.routes_agree
    assert v.k_estimate == pytest.approx(k, rel=1e-10) and v.residual < 1e-8


def test_hsc_is_scale_invariant_and_matches_real_form(models, rng):
    d = point_data(models["kt"], seed=2)
    for _ in range(20):
        X = rng.normal(size=4)
        X /= np.linalg.norm(X)
        Z = np.array([X[0] + 1j * X[1], X[2] + 1j * X[3]])
        # conversion factor between the complex and real forms is exactly 1
        assert hsc(d.Rn, Z) == pytest.approx(float(hsc_real(d.Rn, X)), abs=1e-14)
        assert hsc(d.Rn, (2 - 3j) * Z) == pytest.approx(hsc(d.Rn, Z), abs=1e-14)


def test_hsc_matches_coordinate_oracle(models, rng):
    for name in ("kt", "cp2", "s2xs2"):
        d = point_data(models[name], seed=3)
        for _ in range(5):
            X_chart = rng.normal(size=4)
            X_frame = d.ps.coframe @ X_chart
            X_frame /= np.linalg.norm(X_frame)
            assert float(hsc_real(d.Rn, X_frame)) == pytest.approx(coordinate_hsc(d, X_chart), abs=1e-12)


def test_hsc_frame_covariance(models, rng):
    model = models["kt"]
    p = model.sample_points(1, seed=4)
    seed = np.eye(4)
    seed[:, 0] = [0.3, -0.8, 0.5, 0.1]
    a = curvature_data(model, p).at(0)
    b = curvature_data(model, p, seed=seed).at(0)
    for _ in range(10):
        X = rng.normal(size=4)
        xa, xb = a.ps.coframe @ X, b.ps.coframe @ X
        ha = float(hsc_real(a.Rn, xa / np.linalg.norm(xa)))
        hb = float(hsc_real(b.Rn, xb / np.linalg.norm(xb)))
        assert ha == pytest.approx(hb, abs=1e-13)


def test_hsc_rejects_zero_direction(models):
    with pytest.raises(PreconditionError):
        hsc(point_data(models["kt"]).Rn, [0, 0])
    with pytest.raises(PreconditionError):
        constancy_test(point_data(models["kt"]).Rn, n_samples=8)


def test_kt_not_constant(models):
    data = curvature_data(models["kt"], models["kt"].sample_points(10, seed=5))
    for i in range(10):
        v = constancy_test(data.at(i).Rn)
        assert not v.is_constant and not v.matrix_conditions_met
        assert v.residual > 0.1


def test_sample_directions_unit_and_deterministic():
    Z = sample_directions(128)
    np.testing.assert_allclose(np.sum(np.abs(Z) ** 2, axis=1), 1, atol=1e-14)
    np.testing.assert_array_equal(Z, sample_directions(128))
    assert not np.array_equal(Z, sample_directions(128, seed=1))


def _block_operator(block):
    return CurvatureOperator(tc.tensor_from_block11(tc.BlockMatrix11(**block.as_complex_kwargs()).matrix()), "hermitian")


def test_routes_agree_on_oracle_blocks():
    seen = {True: 0, False: 0}
    for i in range(50):
        block = random_constrained_block(1000 + i, impose=ALL_CONDITIONS if i % 5 == 0 else None)
        op = _block_operator(block)
        v = constancy_test(op, tol=1e-9)
        exact = check_holk1(block)
        assert v.is_constant == exact, (i, block)
        assert v.matrix_conditions_met == exact
        seen[exact] += 1
    assert seen[True] >= 10 and seen[False] >= 10


def test_theorem3_records(models):
    for name, expect in (("cp2", True), ("ball", True), ("torus", True), ("kt", False)):
        model = models[name]
        data = curvature_data(model, model.sample_points(5, seed=6))
        wminus = np.sqrt(decompose_riemann(data.Rg).norms()["W_minus"])
        dual = ricci_forms(data.Rn).duality_residual()
        for i in range(5):
            rec = theorem3_check(constancy_test(data.at(i).Rn), wminus[i], dual[i])
            assert rec.agree
            assert rec.lhs.is_constant == expect and rec.rhs == expect
        if name == "kt":
            assert dual.min() > 1e-3


def test_perturbed_cp2_with_anti_self_dual_weyl():
    d = point_data(builtin_model("cp2", 1.0), seed=7)
    M = d.Rn.matrix.copy()
    bump = 1e-3 * np.diag([1.0, -0.5, -0.5])
    M[tc.MINUS, tc.MINUS] += bump
    op = CurvatureOperator(tc.tensor_from_operator(M), "hermitian")
    v = constancy_test(op)
    assert not v.matrix_conditions_met and not v.is_constant
    assert v.matrix_residual > 1e-4


def test_kahler_criteria():
    for name, k in (("cp2", 1.0), ("cp2", 4.0), ("ball", -1.0), ("torus", None)):
        model = builtin_model(name, k)
        d = point_data(model, seed=8)
        blocks = decompose_riemann(d.Rg)
        e = hermitian_block_entries(d.Rn)
        kk = model.hsc
        crit = kahler_criteria(e, kk, blocks.R_F, d.beta.beta0)
        assert abs(crit.gap) < 1e-12 * max(1, abs(kk))
        assert crit.RF_vs_beta0_residual < 1e-12
        if name == "torus":
            assert crit.v == 0 and crit.k == 0
