"""Block decompositions and scalar invariants of the two curvature tensors.

Blocks are read off ``-R`` as a bilinear form on Lambda^2 in the orthonormal
basis :data:`tensor_core.LAMBDA_BASIS` ``(omega0 = F/sqrt2, omega1, omega2,
eta1, eta2, eta3)``: the first row/column is ``CF``, then the real part of
``Lambda^{2,0} + Lambda^{0,2}``, then ``Lambda^- = Lambda_0^{1,1}``.
Off-diagonal blocks such as ``W_F^+``, ``R_F`` and ``R_00`` are stored as
real matrices in this basis; their norms agree with the complex ones.
"""

from dataclasses import dataclass

import numpy as np

from . import tensor_core as tc
from .connections import BetaTensor, CurvatureOperator
from .errors import ConstraintViolationError

SYMMETRY_TOL = 1e-10


def _n2(x, axes):
    return np.sum(np.abs(x) ** 2, axis=axes)


@dataclass(frozen=True)
class RiemannBlocks:
    matrix: np.ndarray
    """``-R^g`` as a 6x6 matrix."""
    W_plus: np.ndarray
    W_minus: np.ndarray
    s_g: np.ndarray
    R0: np.ndarray
    """Lambda^+ -> Lambda^- block (rows Lambda^+)."""
    W_F_plus: np.ndarray
    W00_plus: np.ndarray
    c: np.ndarray
    d: np.ndarray
    R_F: np.ndarray
    R00: np.ndarray

    @property
    def s_star(self):
        return 4.0 * self.d

    def norms(self):
        return {
            "W_plus": _n2(self.W_plus, (-1, -2)),
            "W_minus": _n2(self.W_minus, (-1, -2)),
            "R0": _n2(self.R0, (-1, -2)),
            "W_F_plus": _n2(self.W_F_plus, -1),
            "W00_plus": _n2(self.W00_plus, (-1, -2)),
            "R_F": _n2(self.R_F, -1),
            "R00": _n2(self.R00, (-1, -2)),
        }

    def reassemble(self):
        """Rebuild ``-R^g`` from the coarse blocks (``W^+-``, ``s_g``, ``R0``)."""
        eye = np.eye(3)
        s = np.expand_dims(self.s_g / 12.0, (-1, -2))
        top = np.concatenate([self.W_plus + s * eye, self.R0], axis=-1)
        bottom = np.concatenate([np.swapaxes(self.R0, -1, -2), self.W_minus + s * eye], axis=-1)
        return np.concatenate([top, bottom], axis=-2)

    def reassemble_refined(self):
        """Rebuild the Lambda^+ rows from ``d, W_F^+, W00^+, c, R_F, R00``."""
        shape = self.d.shape
        M = np.zeros(shape + (3, 6))
        M[..., 0, 0] = self.d
        M[..., 0, 1:3] = self.W_F_plus
        M[..., 1:3, 0] = self.W_F_plus
        M[..., 1:3, 1:3] = self.W00_plus + np.expand_dims(self.c / 2.0, (-1, -2)) * np.eye(2)
        M[..., 0, 3:] = self.R_F
        M[..., 1:3, 3:] = self.R00
        return M


def decompose_riemann(Rg: CurvatureOperator, check=True) -> RiemannBlocks:
    """Split ``-R^g`` into Weyl, scalar and Ricci blocks, refined by the U(2) splitting."""
    if check:
        from .connections import riemann_symmetry_residuals

        scale = max(1.0, float(np.abs(Rg.tensor).max()))
        for name, res in riemann_symmetry_residuals(Rg.tensor).items():
            if np.max(res) > SYMMETRY_TOL * scale:
                raise ConstraintViolationError(
                    f"input is not a Riemannian curvature tensor: {name} residual {np.max(res):.3e}"
                )
    M = -Rg.matrix
    M = 0.5 * (M + np.swapaxes(M, -1, -2))
    P, N = tc.PLUS, tc.MINUS
    trace_p = np.trace(M[..., P, P], axis1=-2, axis2=-1)
    s_g = 4.0 * trace_p
    eye = np.eye(3)
    s = np.expand_dims(s_g / 12.0, (-1, -2))
    d = M[..., 0, 0]
    c = np.trace(M[..., 1:3, 1:3], axis1=-2, axis2=-1)
    return RiemannBlocks(
        matrix=M,
        W_plus=M[..., P, P] - s * eye,
        W_minus=M[..., N, N] - s * eye,
        s_g=s_g,
        R0=M[..., P, N],
        W_F_plus=M[..., 0, 1:3],
        W00_plus=M[..., 1:3, 1:3] - np.expand_dims(c / 2.0, (-1, -2)) * np.eye(2),
        c=c,
        d=d,
        R_F=M[..., 0, N],
        R00=M[..., 1:3, N],
    )


def ricci_tensor(Rg: CurvatureOperator):
    """``Ric(e_b, e_c) = sum_a R(e_a, e_b, e_c, e_a)`` in the adapted frame."""
    return np.einsum("...abca->...bc", Rg.tensor)


def tracefree_ricci(Rg: CurvatureOperator):
    ric = ricci_tensor(Rg)
    s = np.trace(ric, axis1=-2, axis2=-1)
    return ric - np.expand_dims(s / 4.0, (-1, -2)) * np.eye(4)


@dataclass(frozen=True)
class RicciForms:
    rho_coeffs: np.ndarray
    """``rho = sum rho_coeffs[P] z^P`` over ``P = (11, 12, 21, 22)``."""
    r_coeffs: np.ndarray
    s_C: np.ndarray

    @property
    def s_H(self):
        return 2.0 * self.s_C

    @property
    def rho(self):
        """``rho`` as a real two-form in the adapted frame (antisymmetric array)."""
        return np.real(np.einsum("...P,Pab->...ab", self.rho_coeffs, tc.FORMS_11))

    @property
    def r(self):
        return np.real(np.einsum("...P,Pab->...ab", self.r_coeffs, tc.FORMS_11))

    def trace(self, form):
        """``Lambda(f) = <f, F>``."""
        return tc.inner(form, tc.F_FRAME)

    def duality_residual(self):
        """``|*rho - r|``."""
        return np.sqrt(tc.norm2(tc.hodge_star(self.rho) - self.r))


_DIAG = (0, 3)  # positions of z_{11bar}, z_{22bar}


def ricci_forms(Rn: CurvatureOperator) -> RicciForms:
    """Both traces of the Hermitian curvature in the unitary frame."""
    M = Rn.block11
    rho = 1j * (M[..., :, 0] + M[..., :, 3])
    r = 1j * (M[..., 0, :] + M[..., 3, :])
    s_C = np.real(M[..., 0, 0] + M[..., 0, 3] + M[..., 3, 0] + M[..., 3, 3])
    return RicciForms(rho, r, s_C)


@dataclass(frozen=True)
class HermitianBlockEntries:
    k: float
    l: float
    u: float
    w: float
    a: complex
    a_prime: complex
    b: complex
    b_prime: complex
    v: complex
    x: complex

    def as_block(self):
        return tc.BlockMatrix11(**{f: getattr(self, f) for f in self.__dataclass_fields__})

    def structural_residuals(self, s_g=None):
        out = {"a+b-a'-b'": abs(self.a + self.b - self.a_prime - self.b_prime), "Im v": abs(self.v.imag)}
        if s_g is not None:
            out["v-s_g/12"] = abs(self.v - s_g / 12.0)
        return out

    def selfdual_conditions(self):
        """Residuals of ``x = 0, a = b', u + 2v + w = k + l`` (self-duality read-off)."""
        return {
            "x": abs(self.x),
            "a-b'": abs(self.a - self.b_prime),
            "u+2v+w-k-l": abs(self.u + 2 * self.v.real + self.w - self.k - self.l),
        }

    def holk1_conditions(self):
        """Residuals of ``x = 0, a' = -a, a = -b, k = l, u + 2v + w = 2k``."""
        return {
            "x": abs(self.x),
            "a'+a": abs(self.a_prime + self.a),
            "a+b": abs(self.a + self.b),
            "k-l": abs(self.k - self.l),
            "u+2v+w-2k": abs(self.u + 2 * self.v.real + self.w - 2 * self.k),
        }

    def dual_conditions(self):
        """Residuals of ``k = l, a' + b = -(a + b')`` (``*rho = r``)."""
        return {"k-l": abs(self.k - self.l), "a'+b+a+b'": abs(self.a_prime + self.b + self.a + self.b_prime)}


def hermitian_block_entries(Rn: CurvatureOperator, tol=None) -> HermitianBlockEntries:
    """Named entries of ``R^nabla`` restricted to ``Lambda^{1,1} x Lambda^{1,1}`` (single point).

    With ``tol`` given, raises :class:`ConstraintViolationError` if
    ``a + b = a' + b'`` fails or ``v`` is not real, which signals an
    upstream conventions bug.  ``v - s_g/12`` is reported by
    :meth:`HermitianBlockEntries.structural_residuals` but not enforced: it equals
    ``-1/2 W^-(eta1, eta1)`` and so vanishes only where that entry does.
    """
    M = np.asarray(Rn.block11)
    if M.ndim != 2:
        raise ValueError("hermitian_block_entries works on a single point")
    e = HermitianBlockEntries(
        k=float(M[0, 0].real),
        l=float(M[3, 3].real),
        u=float(M[3, 0].real),
        w=float(M[0, 3].real),
        a=complex(M[0, 2]),
        a_prime=complex(M[2, 0]),
        b=complex(M[2, 3]),
        b_prime=complex(M[3, 2]),
        v=complex(M[2, 1]),
        x=complex(M[2, 2]),
    )
    if tol is not None:
        scale = max(1.0, float(np.abs(M).max()))
        res = e.structural_residuals()
        bad = {k: r for k, r in res.items() if r > tol * scale}
        if bad:
            raise ConstraintViolationError(f"curvature entries violate structural identities: {bad}")
    return e


@dataclass(frozen=True)
class FullHermitianCheck:
    residual: float
    parts: dict


def full_hermitian_blocks(Rn: CurvatureOperator, blocks: RiemannBlocks, beta: BetaTensor = None):
    """Compare ``-R^nabla`` with the block pattern expected under constant HSC.

    Expected, in the order ``(CF, Lambda^{2,0+0,2}, Lambda_0^{1,1})`` for
    rows (first pair) and columns: the middle column vanishes, the ``CF``
    row is ``(s_C/2, 0, R_F)``, the middle row is ``(W_F^+, 0, R_00)`` and
    the last row is ``(-R_F^T, 0, s_g/12 g)``.  Only meaningful at points of
    pointwise constant HSC on almost Kaehler structures.
    """
    M = -Rn.matrix
    forms = ricci_forms(Rn)
    s = np.expand_dims(blocks.s_g / 12.0, (-1, -2))
    parts = {
        "middle_column": np.abs(M[..., :, tc.L20]).max(axis=(-1, -2)),
        "CF_CF": np.abs(M[..., 0, 0] - forms.s_C / 2.0),
        "CF_row": np.abs(M[..., 0, tc.MINUS] - blocks.R_F).max(axis=-1),
        "W_F_entry": np.abs(M[..., tc.L20, 0] - blocks.W_F_plus).max(axis=-1),
        "R00_entry": np.abs(M[..., tc.L20, tc.MINUS] - blocks.R00).max(axis=(-1, -2)),
        "minus_CF": np.abs(M[..., tc.MINUS, 0] + blocks.R_F).max(axis=-1),
        "minus_minus": np.abs(M[..., tc.MINUS, tc.MINUS] - s * np.eye(3)).max(axis=(-1, -2)),
    }
    if beta is not None:
        parts["beta_outside_CF"] = beta.outside_cf_column()
    worst = np.max(np.stack([np.asarray(v, dtype=float) for v in parts.values()]), axis=0)
    return FullHermitianCheck(worst, parts)
