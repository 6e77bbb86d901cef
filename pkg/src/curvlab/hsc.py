"""Holomorphic sectional curvature of the Hermitian connection.

For ``Z = x z1 + y z2`` in the unitary frame

    H(Z) = R(Z, Zbar, Z, Zbar) / h(Z, Z)^2.

For a unit real vector ``X`` and ``Z = (X - iJX)/sqrt2`` one has
``Z ^ Zbar = i X ^ JX`` and ``h(Z, Z) = 1``, hence
``H(Z) = -R(X, JX, X, JX)`` with conversion factor exactly 1.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from . import tensor_core as tc
from .connections import CurvatureOperator
from .decomposition import HermitianBlockEntries, hermitian_block_entries
from .errors import PreconditionError

DEFAULT_SAMPLES = 256
DIRECTION_SEED = 20240901


def direction_vectors(directions):
    """Frame components of ``Z = x z1 + y z2`` for ``directions[..., :] = (x, y)``."""
    return np.einsum("...z,za->...a", np.asarray(directions, dtype=complex), tc.Z_VECTORS)


def hsc(Rn: CurvatureOperator, Z):
    """``H(Z)`` for one direction ``Z = (x, y)`` or an array of them (shape ``(..., 2)``).

    ``Rn`` must be a single-point operator.
    """
    Z = np.asarray(Z, dtype=complex)
    h = np.sum(np.abs(Z) ** 2, axis=-1)
    if np.any(h == 0):
        raise PreconditionError("holomorphic sectional curvature needs a nonzero direction")
    V = direction_vectors(Z)
    num = np.einsum("abcd,...a,...b,...c,...d->...", Rn.tensor, V, V.conj(), V, V.conj(), optimize=True)
    return num.real / h**2


def hsc_real(Rn: CurvatureOperator, X):
    """``-R(X, JX, X, JX)`` for a unit real frame vector ``X``."""
    X = np.asarray(X, dtype=float)
    JX = X @ tc.J_FRAME.T
    return -np.einsum("abcd,...a,...b,...c,...d->...", Rn.tensor, X, JX, X, JX, optimize=True)


@lru_cache(maxsize=8)
def _sample_directions(n, seed):
    u = qmc.Halton(d=4, scramble=True, seed=seed).random(n)
    g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g[:, 0] + 1j * g[:, 1], g[:, 2] + 1j * g[:, 3]


def sample_directions(n=DEFAULT_SAMPLES, seed=DIRECTION_SEED):
    """Deterministic quasi-random unit directions on the 3-sphere of ``C^2``, shape ``(n, 2)``."""
    x, y = _sample_directions(int(n), int(seed))
    return np.stack([x, y], axis=-1)


@dataclass(frozen=True)
class ConstancyVerdict:
    is_constant: bool
    k_estimate: float
    residual: float
    matrix_conditions_met: bool
    matrix_residual: float

    @property
    def routes_agree(self):
        return self.is_constant == self.matrix_conditions_met


def _scaled(tol, k):
    return tol * max(1.0, abs(k))


def constancy_test(Rn: CurvatureOperator, n_samples=DEFAULT_SAMPLES, tol=1e-8, seed=DIRECTION_SEED):
    """Decide whether ``H`` is constant at the point, by sampling and by the matrix conditions.

    Route (i) samples ``H`` on quasi-random unit directions and compares the
    spread to ``tol * max(1, |k|)``; route (ii) checks
    ``x = 0, a' = -a, a = -b, k = l, u + 2v + w = 2k`` on the block entries.
    """
    if n_samples < 32:
        raise PreconditionError("constancy_test needs n_samples >= 32")
    H = hsc(Rn, sample_directions(n_samples, seed))
    k = float(np.median(H))
    residual = float(np.max(np.abs(H - k)))
    entries = hermitian_block_entries(Rn)
    mres = max(entries.holk1_conditions().values())
    return ConstancyVerdict(
        is_constant=residual <= _scaled(tol, k),
        k_estimate=k,
        residual=residual,
        matrix_conditions_met=mres <= _scaled(tol, entries.k),
        matrix_residual=float(mres),
    )


@dataclass(frozen=True)
class Theorem3Record:
    lhs: ConstancyVerdict
    w_minus_norm: float
    duality_residual: float
    tol: float

    @property
    def rhs(self):
        return self.w_minus_norm <= self.tol and self.duality_residual <= self.tol

    @property
    def agree(self):
        return self.lhs.is_constant == self.rhs


def theorem3_check(verdict: ConstancyVerdict, w_minus_norm, duality_residual, tol=1e-8):
    """Pair the constancy verdict with the self-duality and ``*rho = r`` residuals."""
    scale = max(1.0, abs(verdict.k_estimate))
    return Theorem3Record(verdict, float(w_minus_norm), float(duality_residual), tol * scale)


@dataclass(frozen=True)
class KahlerCriteria:
    v: float
    k: float
    gap: float
    RF_vs_beta0_residual: float
    RF_norm2: float
    beta0_norm2: float


def kahler_criteria(entries: HermitianBlockEntries, k, R_F, beta0):
    """``v``, the gap ``k/2 - v`` and ``|R_F + 1/2 beta0^T|`` at a constant-HSC point."""
    R_F = np.asarray(R_F, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    v = float(entries.v.real)
    return KahlerCriteria(
        v=v,
        k=float(k),
        gap=float(k) / 2.0 - v,
        RF_vs_beta0_residual=float(np.linalg.norm(R_F + 0.5 * beta0)),
        RF_norm2=float(R_F @ R_F),
        beta0_norm2=float(beta0 @ beta0),
    )
