"""Levi-Civita and canonical Hermitian connections and their curvature.

Conventions (chart components, batch axes first):

* ``gamma[..., k, i, j] = Gamma^k_ij`` with ``D_i d_j = Gamma^k_ij d_k``;
  ``dgamma[..., m, k, i, j] = d_m Gamma^k_ij``.
* ``A[..., i, k, j] = (A_{d_i})^k_j`` where ``A_X = -1/2 J (D_X J)``.
* ``R(X, Y, Z, W) = g([nabla_X, nabla_Y] Z - nabla_[X,Y] Z, W)``.

Curvature tensors are returned in the adapted orthonormal frame
``(e1, Je1, e2, Je2)``, where all block decompositions are carried out.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import tensor_core as tc
from .geometry import PointStructure, build_point_structure


def _ps(model_or_ps, points=None):
    if isinstance(model_or_ps, PointStructure):
        return model_or_ps
    return build_point_structure(model_or_ps, points)


@dataclass(frozen=True)
class ConnectionCoeffs:
    gamma: np.ndarray
    dgamma: np.ndarray
    flavor: str = "levi-civita"


@dataclass(frozen=True)
class GaugePotential:
    A: np.ndarray
    dA: np.ndarray
    frame: np.ndarray
    """``frame[..., a, b, c] = (A_{e_a})^b_c`` in the adapted orthonormal frame."""

    def norm2(self):
        """``|A|^2 = 1/2 sum_a tr(A_{e_a}^T A_{e_a})``."""
        return 0.5 * np.einsum("...abc,...abc->...", self.frame, self.frame)


@dataclass(frozen=True)
class CurvatureOperator:
    tensor: np.ndarray
    """``R_abcd`` in the adapted orthonormal frame."""
    flavor: str
    coordinate_tensor: Optional[np.ndarray] = None

    @property
    def matrix(self):
        """6x6 matrix of ``R`` on Lambda^2 in :data:`tensor_core.LAMBDA_BASIS` (rows: first pair)."""
        return tc.operator_matrix(self.tensor)

    @property
    def block11(self):
        """Complex 4x4 matrix on ``(z_11, z_12, z_21, z_22)`` (both pairs)."""
        B = tc.BIVECTORS_11
        return 0.25 * np.einsum("...abcd,Pab,Qcd->...PQ", self.tensor, B, B, optimize=True)

    def coordinate_matrix(self):
        """6x6 matrix ``R(d_i ^ d_j, d_k ^ d_l)`` over coordinate pairs ``i<j``, ``k<l``."""
        if self.coordinate_tensor is None:
            raise ValueError("no coordinate tensor attached")
        idx = np.array(tc.PAIRS)
        T = self.coordinate_tensor
        return T[..., idx[:, 0], idx[:, 1], :, :][..., idx[:, 0], idx[:, 1]]


def christoffel(model_or_ps, points=None) -> ConnectionCoeffs:
    """Levi-Civita symbols and their first derivatives from the metric jets."""
    ps = _ps(model_or_ps, points)
    ginv = np.linalg.inv(ps.g)
    dginv = -np.einsum("...ka,...mab,...bl->...mkl", ginv, ps.dg, ginv, optimize=True)
    dg, d2g = ps.dg, ps.d2g
    # first kind, C[l, i, j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    C = 0.5 * (np.einsum("...ijl->...lij", dg) + np.einsum("...jil->...lij", dg) - dg)
    dC = 0.5 * (
        np.einsum("...mijl->...mlij", d2g) + np.einsum("...mjil->...mlij", d2g) - d2g
    )
    gamma = np.einsum("...kl,...lij->...kij", ginv, C)
    dgamma = np.einsum("...mkl,...lij->...mkij", dginv, C) + np.einsum("...kl,...mlij->...mkij", ginv, dC)
    return ConnectionCoeffs(gamma, dgamma)


def _covariant_dJ(ps, lc):
    """``DJ[i, k, j] = (D_i J)^k_j`` and its first derivatives ``dDJ[n, i, k, j]``."""
    G, dG = lc.gamma, lc.dgamma
    J, dJ, d2J = ps.J, ps.dJ, ps.d2J
    DJ = dJ + np.einsum("...kim,...mj->...ikj", G, J) - np.einsum("...km,...mij->...ikj", J, G)
    dDJ = (
        d2J
        + np.einsum("...nkim,...mj->...nikj", dG, J)
        + np.einsum("...kim,...nmj->...nikj", G, dJ)
        - np.einsum("...nkm,...mij->...nikj", dJ, G)
        - np.einsum("...km,...nmij->...nikj", J, dG)
    )
    return DJ, dDJ


def gauge_potential(model_or_ps, points=None, lc=None) -> GaugePotential:
    """``A = nabla - D^g = -1/2 J (D^g J)`` with first derivatives."""
    ps = _ps(model_or_ps, points)
    lc = christoffel(ps) if lc is None else lc
    DJ, dDJ = _covariant_dJ(ps, lc)
    A = -0.5 * np.einsum("...km,...imj->...ikj", ps.J, DJ)
    dA = -0.5 * (
        np.einsum("...nkm,...imj->...nikj", ps.dJ, DJ) + np.einsum("...km,...nimj->...nikj", ps.J, dDJ)
    )
    frame = np.einsum("...ia,...bk,...ikj,...jc->...abc", ps.frame, ps.coframe, A, ps.frame, optimize=True)
    return GaugePotential(A, dA, frame)


def curvature_from_coefficients(ps, omega, domega):
    """Coordinate ``R_ijkl`` of the connection ``nabla_i d_j = omega^k_ij d_k``."""
    Rup = (
        np.einsum("...imjk->...mijk", domega)
        - np.einsum("...jmik->...mijk", domega)
        + np.einsum("...mil,...ljk->...mijk", omega, omega)
        - np.einsum("...mjl,...lik->...mijk", omega, omega)
    )
    return np.einsum("...mijk,...ml->...ijkl", Rup, ps.g)


def riemann_curvature(model_or_ps, points=None, lc=None) -> CurvatureOperator:
    ps = _ps(model_or_ps, points)
    lc = christoffel(ps) if lc is None else lc
    R = curvature_from_coefficients(ps, lc.gamma, lc.dgamma)
    return CurvatureOperator(ps.to_frame(R, "dddd"), "riemannian", R)


def hermitian_curvature(model_or_ps, points=None, lc=None, gp=None) -> CurvatureOperator:
    """Curvature of the canonical Hermitian connection, from ``Gamma + A`` directly."""
    ps = _ps(model_or_ps, points)
    lc = christoffel(ps) if lc is None else lc
    gp = gauge_potential(ps, lc=lc) if gp is None else gp
    omega = lc.gamma + np.einsum("...ikj->...kij", gp.A)
    domega = lc.dgamma + np.einsum("...nikj->...nkij", gp.dA)
    R = curvature_from_coefficients(ps, omega, domega)
    return CurvatureOperator(ps.to_frame(R, "dddd"), "hermitian", R)


@dataclass(frozen=True)
class BetaTensor:
    tensor: np.ndarray
    """``beta_abcd = g([A_a, A_b] e_c, e_d)`` in the adapted frame."""

    @property
    def matrix(self):
        return tc.operator_matrix(self.tensor)

    @property
    def beta_tilde(self):
        """Coefficient of ``g`` on the ``CF x CF`` entry."""
        return self.matrix[..., tc.CF, tc.CF]

    @property
    def beta0(self):
        """``beta`` on ``Lambda_0^{1,1} x CF`` as a real 3-vector (rows eta1..eta3)."""
        return self.matrix[..., tc.MINUS, tc.CF]

    def outside_cf_column(self):
        """Max-abs of all entries away from the ``CF`` column (zero in dimension 4)."""
        m = self.matrix.copy()
        m[..., :, tc.CF] = 0.0
        return np.abs(m).max(axis=(-1, -2))


def beta_tensor(gp: GaugePotential) -> BetaTensor:
    A = gp.frame
    comm = np.einsum("...adk,...bkc->...abdc", A, A) - np.einsum("...bdk,...akc->...abdc", A, A)
    # comm[a, b, d, c] = ([A_a, A_b])^d_c ; lower d with the identity metric
    return BetaTensor(np.einsum("...abdc->...abcd", comm))


def riemann_symmetry_residuals(R):
    """Max-abs residuals of antisymmetry, pair symmetry and the first Bianchi identity."""
    anti = np.abs(R + np.swapaxes(R, -4, -3)).max(axis=(-1, -2, -3, -4))
    anti2 = np.abs(R + np.swapaxes(R, -2, -1)).max(axis=(-1, -2, -3, -4))
    pair = np.abs(R - np.einsum("...abcd->...cdab", R)).max(axis=(-1, -2, -3, -4))
    bianchi = R + np.einsum("...abcd->...bcad", R) + np.einsum("...abcd->...cabd", R)
    return {
        "antisymmetry": np.maximum(anti, anti2),
        "pair_symmetry": pair,
        "bianchi": np.abs(bianchi).max(axis=(-1, -2, -3, -4)),
    }


def metric_residual(ps, conn: ConnectionCoeffs):
    """Max-abs of ``nabla g`` for chart coefficients ``gamma``."""
    G = conn.gamma
    Dg = ps.dg - np.einsum("...kmi,...kj->...mij", G, ps.g) - np.einsum("...kmj,...ik->...mij", G, ps.g)
    return np.abs(Dg).max(axis=(-1, -2, -3))


@dataclass(frozen=True)
class CurvatureData:
    """Everything computed once per (batch of) point(s)."""

    ps: PointStructure
    lc: ConnectionCoeffs
    gp: GaugePotential
    Rg: CurvatureOperator
    Rn: CurvatureOperator

    @property
    def beta(self):
        return beta_tensor(self.gp)

    def at(self, i):
        """Single-point slice of a 1-d batch."""
        ps = PointStructure(*(np.asarray(getattr(self.ps, f))[i] for f in self.ps.__dataclass_fields__))
        return CurvatureData(
            ps,
            ConnectionCoeffs(self.lc.gamma[i], self.lc.dgamma[i], self.lc.flavor),
            GaugePotential(self.gp.A[i], self.gp.dA[i], self.gp.frame[i]),
            CurvatureOperator(self.Rg.tensor[i], self.Rg.flavor, self.Rg.coordinate_tensor[i]),
            CurvatureOperator(self.Rn.tensor[i], self.Rn.flavor, self.Rn.coordinate_tensor[i]),
        )


def curvature_data(model_or_ps, points=None, seed=None) -> CurvatureData:
    """Levi-Civita and Hermitian curvature (plus intermediates) at ``points``."""
    if isinstance(model_or_ps, PointStructure):
        ps = model_or_ps
    else:
        ps = build_point_structure(model_or_ps, points, seed=seed)
    lc = christoffel(ps)
    gp = gauge_potential(ps, lc=lc)
    return CurvatureData(ps, lc, gp, riemann_curvature(ps, lc=lc), hermitian_curvature(ps, lc=lc, gp=gp))
