"""Pontrjagin and Pfaffian densities, integrals over closed models, index checks.

``-R`` of a metric connection is a 6x6 matrix ``M`` on Lambda^2 in the basis
:data:`tensor_core.LAMBDA_BASIS`, rows indexed by the form slot (first
pair).  With ``M = [[M++, M+-], [M-+, M--]]``

    p1 = (|M++|^2 + |M+-|^2 - |M-+|^2 - |M--|^2) / (4 pi^2)
    Pf = (|M++|^2 - |M+-|^2 - |M-+|^2 + |M--|^2) / (8 pi^2)

as coefficients of ``vol_g`` for the orientation of ``J``.  Norms are
``tr(f^T g)``, so ``|I|^2 = 3`` on a 3x3 block.  For Levi-Civita this reduces
to ``(|W+|^2 - |W-|^2) / 4pi^2`` and
``(|W+|^2 + |W-|^2 + s^2/24 - 2|R0|^2) / 8pi^2``.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import tensor_core as tc
from .connections import CurvatureOperator, curvature_data
from .decomposition import RiemannBlocks, decompose_riemann
from .errors import PreconditionError
from .geometry import volume_density
from .hsc import DEFAULT_SAMPLES, DIRECTION_SEED, constancy_test

FOUR_PI2 = 4.0 * math.pi**2
EIGHT_PI2 = 8.0 * math.pi**2
DEFAULT_QUAD_ORDER = 16
CHUNK = 4096


def _n2(x):
    return np.sum(x * x, axis=(-1, -2))


@dataclass(frozen=True)
class CWDensity:
    p1_density: np.ndarray
    pf_density: np.ndarray
    block_norms: dict
    """``R_sd_plus = |M++|^2``, ``R_sd_minus = |M+-|^2``, ``R_asd_plus = |M-+|^2``, ``R_asd_minus = |M--|^2``."""


def cw_density(R: CurvatureOperator, ps=None) -> CWDensity:
    """Pontrjagin and Pfaffian densities of a metric connection's curvature.

    ``ps`` is accepted for symmetry with the other per-point operations;
    the densities only need the frame tensor.
    """
    M = -R.matrix
    P, N = tc.PLUS, tc.MINUS
    norms = {
        "R_sd_plus": _n2(M[..., P, P]),
        "R_sd_minus": _n2(M[..., P, N]),
        "R_asd_plus": _n2(M[..., N, P]),
        "R_asd_minus": _n2(M[..., N, N]),
    }
    sp, sm, ap, am = norms.values()
    return CWDensity(
        p1_density=(sp + sm - ap - am) / FOUR_PI2,
        pf_density=(sp - sm - ap + am) / EIGHT_PI2,
        block_norms=norms,
    )


def levi_civita_closed_forms(blocks: RiemannBlocks):
    """``(p1, Pf)`` of the Levi-Civita connection from the Weyl/Ricci blocks."""
    n = blocks.norms()
    p1 = (n["W_plus"] - n["W_minus"]) / FOUR_PI2
    pf = (n["W_plus"] + n["W_minus"] + blocks.s_g**2 / 24.0 - 2.0 * n["R0"]) / EIGHT_PI2
    return p1, pf


def hermitian_closed_forms(blocks: RiemannBlocks, s_C):
    """``(p1, Pf)`` of the Hermitian connection when ``-R^nabla`` has the constant-HSC block pattern."""
    n = blocks.norms()
    s_g = blocks.s_g
    p1 = (s_C**2 / 4.0 + n["W_F_plus"] + n["R00"] - s_g**2 / 48.0) / FOUR_PI2
    pf = (s_C**2 / 4.0 + n["W_F_plus"] + s_g**2 / 48.0 - 2.0 * n["R_F"] - n["R00"]) / EIGHT_PI2
    return p1, pf


def index_densities(data):
    """Columns ``(p1_LC, p1_H, Pf_LC, Pf_H)`` for a batch of :class:`CurvatureData`."""
    lc = cw_density(data.Rg)
    h = cw_density(data.Rn)
    return np.stack([lc.p1_density, h.p1_density, lc.pf_density, h.pf_density], axis=-1)


@dataclass(frozen=True)
class Integral:
    value: np.ndarray
    error: np.ndarray
    rule: str
    n_nodes: int


def _threads(threads):
    if threads is None:
        threads = int(os.environ.get("CURVLAB_THREADS", "1") or 1)
    return max(1, int(threads))


def _fsum_columns(terms):
    terms = np.asarray(terms, dtype=float)
    if terms.ndim == 1:
        return np.array(math.fsum(terms))
    return np.array([math.fsum(terms[:, j]) for j in range(terms.shape[1])])


def _gauss_box(model, order):
    lo = np.asarray(model.lower, dtype=float)
    hi = np.asarray(model.upper, dtype=float)
    x, w = np.polynomial.legendre.leggauss(order)
    nodes = [0.5 * (h - l) * x + 0.5 * (h + l) for l, h in zip(lo, hi)]
    weights = [0.5 * (h - l) * w for l, h in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*nodes, indexing="ij"), axis=-1).reshape(-1, 4)
    wgrid = np.einsum("a,b,c,d->abcd", *weights).reshape(-1)
    return grid, wgrid


def _weighted_terms(model, density_fn, points, weights, threads):
    def work(sl):
        data = curvature_data(model, points[sl])
        dens = np.asarray(density_fn(data), dtype=float)
        vol = volume_density(data.ps)
        w = weights[sl] * vol
        return dens * (w[:, None] if dens.ndim == 2 else w)

    slices = [slice(i, min(i + CHUNK, len(points))) for i in range(0, len(points), CHUNK)]
    n = _threads(threads)
    if n == 1 or len(slices) == 1:
        parts = [work(s) for s in slices]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            parts = list(pool.map(work, slices))  # map keeps input order
    return np.concatenate(parts, axis=0)


def _check_closed(model):
    if not model.closed:
        raise PreconditionError(f"model {model.name!r} is not closed; integrals over it are undefined")


def integrate_closed(model, density_fn, quad_order=DEFAULT_QUAD_ORDER, threads=None, force_quadrature=False) -> Integral:
    """``int_M density vol_g`` over a closed model.

    ``density_fn`` maps a batch :class:`CurvatureData` to densities of shape
    ``(n,)`` or ``(n, m)``.  Homogeneous models with a known volume use the
    density at the chart centre times the volume; otherwise a tensor-product
    Gauss-Legendre rule of order ``quad_order`` on the fundamental domain is
    used, with the error estimated against the rule of half the order.
    """
    _check_closed(model)
    if model.homogeneous and model.volume is not None and not force_quadrature:
        data = curvature_data(model, np.asarray(model.center())[None, :])
        dens = np.asarray(density_fn(data), dtype=float)[0]
        value = dens * float(model.volume)
        return Integral(value, np.zeros_like(value), "homogeneous: density x volume", 1)
    if quad_order < 2:
        raise PreconditionError("quad_order must be at least 2")
    if not all(model.periodic):
        raise PreconditionError(f"model {model.name!r}: quadrature needs a periodic fundamental domain")
    pts, w = _gauss_box(model, quad_order)
    fine = _fsum_columns(_weighted_terms(model, density_fn, pts, w, threads))
    pts2, w2 = _gauss_box(model, max(1, quad_order // 2))
    coarse = _fsum_columns(_weighted_terms(model, density_fn, pts2, w2, threads))
    return Integral(fine, np.abs(fine - coarse), f"gauss-legendre {quad_order}^4", len(pts))


@dataclass(frozen=True)
class IndexReport:
    model: str
    sigma_from_LC: float
    sigma_from_hermitian: float
    chi_from_LC: float
    chi_from_hermitian: float
    known_sigma: Optional[int]
    known_chi: Optional[int]
    rule: str
    quadrature_error: float
    residuals: dict = field(default_factory=dict)

    def passed(self, cross_tol=1e-6, known_tol=1e-3):
        ok = self.residuals["sigma_cross"] <= cross_tol and self.residuals["chi_cross"] <= cross_tol
        for key in ("sigma_known", "chi_known"):
            if key in self.residuals:
                ok = ok and self.residuals[key] <= known_tol
        return bool(ok)


def index_report(model, quad_order=DEFAULT_QUAD_ORDER, threads=None) -> IndexReport:
    """Signature and Euler characteristic from both connections."""
    res = integrate_closed(model, index_densities, quad_order=quad_order, threads=threads)
    p1_lc, p1_h, pf_lc, pf_h = (float(v) for v in res.value)
    sig_lc, sig_h = p1_lc / 3.0, p1_h / 3.0
    residuals = {"sigma_cross": abs(sig_lc - sig_h), "chi_cross": abs(pf_lc - pf_h)}
    if model.known_sigma is not None:
        residuals["sigma_known"] = max(abs(sig_lc - model.known_sigma), abs(sig_h - model.known_sigma))
    if model.known_chi is not None:
        residuals["chi_known"] = max(abs(pf_lc - model.known_chi), abs(pf_h - model.known_chi))
    return IndexReport(
        model=model.name,
        sigma_from_LC=sig_lc,
        sigma_from_hermitian=sig_h,
        chi_from_LC=pf_lc,
        chi_from_hermitian=pf_h,
        known_sigma=model.known_sigma,
        known_chi=model.known_chi,
        rule=res.rule,
        quadrature_error=float(np.max(res.error)),
        residuals=residuals,
    )


def constant_hsc_integrands(data, k):
    """Pointwise integrands of the constant-HSC identities for a batch.

    Columns: Chern-Weil balance (should integrate to 0), the ``chi``
    integrand, the ``3 sigma / 2`` integrand and the ``3 sigma - chi``
    integrand, all as coefficients of ``vol_g``.
    """
    blocks = decompose_riemann(data.Rg)
    n = blocks.norms()
    v = np.real(data.Rn.block11[..., 2, 1])
    wf, w00, r00 = n["W_F_plus"], n["W00_plus"], n["R00"]
    balance = wf + w00 + 4.0 * (5 * k - 7 * v) * (k - 2 * v) - r00
    chi = -(w00 + 60 * v**2 - 72 * k * v + 18 * k**2) / EIGHT_PI2
    sigma32 = (2 * wf + w00 + 6 * (2 * k - 3 * v) ** 2) / EIGHT_PI2
    nice1 = (wf + 3 * r00 + 6 * k * (k - 2 * v)) / EIGHT_PI2
    return np.stack([balance, chi, sigma32, nice1], axis=-1)


@dataclass(frozen=True)
class ConstantHSCIdentities:
    k: float
    chern_weil_balance: float
    chi_residual: float
    sigma_residual: float
    nice1_residual: float
    three_sigma_minus_chi: float
    sigma_integrand_min: float
    nice1_integrand_max: float
    index: IndexReport

    @property
    def residuals(self):
        return {
            "chern_weil_balance": abs(self.chern_weil_balance),
            "chi": self.chi_residual,
            "sigma": self.sigma_residual,
            "nice1": self.nice1_residual,
        }


def verify_global_constancy(model, points, n_samples=DEFAULT_SAMPLES, tol=1e-8, seed=DIRECTION_SEED):
    """Run the constancy test at every point and return the common ``k``.

    Raises :class:`PreconditionError` unless ``H`` is constant at each point
    with the same value everywhere.
    """
    data = curvature_data(model, points)
    ks = []
    for i in range(len(points)):
        verdict = constancy_test(data.at(i).Rn, n_samples=n_samples, tol=tol, seed=seed)
        if not verdict.is_constant:
            raise PreconditionError(
                f"holomorphic sectional curvature is not constant at {points[i]} (spread {verdict.residual:.3e})"
            )
        ks.append(verdict.k_estimate)
    k = float(np.median(ks))
    if max(abs(x - k) for x in ks) > tol * max(1.0, abs(k)):
        raise PreconditionError("holomorphic sectional curvature is pointwise but not globally constant")
    return k, data


def constant_hsc_identities(
    model, n_points=8, n_samples=DEFAULT_SAMPLES, tol=1e-8, seed=0, quad_order=DEFAULT_QUAD_ORDER, threads=None
) -> ConstantHSCIdentities:
    """Check the integral identities satisfied by closed almost Kaehler models of constant HSC."""
    _check_closed(model)
    pts = np.vstack([np.asarray(model.center())[None, :], model.sample_points(n_points, seed=seed)])
    k, data = verify_global_constancy(model, pts, n_samples=n_samples, tol=tol)
    pointwise = constant_hsc_integrands(data, k)
    integ = integrate_closed(model, lambda d: constant_hsc_integrands(d, k), quad_order=quad_order, threads=threads)
    balance, chi, sigma32, nice1 = (float(x) for x in integ.value)
    idx = index_report(model, quad_order=quad_order, threads=threads)
    three_sigma_minus_chi = 3.0 * idx.sigma_from_LC - idx.chi_from_LC
    return ConstantHSCIdentities(
        k=k,
        chern_weil_balance=balance,
        chi_residual=abs(chi - idx.chi_from_LC),
        sigma_residual=abs(sigma32 - 1.5 * idx.sigma_from_LC),
        nice1_residual=abs(nice1 - three_sigma_minus_chi),
        three_sigma_minus_chi=three_sigma_minus_chi,
        sigma_integrand_min=float(pointwise[:, 2].min()),
        nice1_integrand_max=float(np.abs(pointwise[:, 3]).max()),
        index=idx,
    )

