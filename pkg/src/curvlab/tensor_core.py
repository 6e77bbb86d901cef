"""Exterior algebra of an oriented 4-dimensional inner-product space.

Two-forms are stored as antisymmetric ``(..., 4, 4)`` arrays ``f[i, j]``;
:func:`from_components` / :func:`components` convert to and from the six
independent entries ``f_{ij}, i<j``.  The inner product is
``<f, h> = 1/2 f_ij h^ij``, so ``e^1 ^ e^2`` has unit norm and the
fundamental form of a Hermitian structure has squared norm 2.

Everything frame-related assumes the adapted orthonormal frame
``(e1, Je1, e2, Je2)`` with ``J e1 = Je1``; in it the metric is the
identity and ``F = e^{01} + e^{23}`` (0-based indices).
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMetricError

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
SQRT2 = np.sqrt(2.0)


def _levi_civita():
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        eps[perm] = np.linalg.det(np.eye(4)[list(perm)])
    return eps


LEVI_CIVITA = _levi_civita()


def from_components(c):
    """Antisymmetric array from the six components ``(f01, f02, f03, f12, f13, f23)``."""
    c = np.asarray(c)
    f = np.zeros(c.shape[:-1] + (4, 4), dtype=c.dtype)
    for n, (i, j) in enumerate(PAIRS):
        f[..., i, j] = c[..., n]
        f[..., j, i] = -c[..., n]
    return f


def components(f):
    f = np.asarray(f)
    return np.stack([f[..., i, j] for i, j in PAIRS], axis=-1)


def wedge(a, b):
    """Wedge product of two 1-forms as an antisymmetric array ``a_i b_j - a_j b_i``."""
    a, b = np.asarray(a), np.asarray(b)
    return a[..., :, None] * b[..., None, :] - a[..., None, :] * b[..., :, None]


def _check_metric(metric):
    try:
        np.linalg.cholesky(metric)
    except np.linalg.LinAlgError:
        raise DegenerateMetricError("metric is singular or not positive definite") from None


def inverse_metric(metric):
    metric = np.asarray(metric, dtype=float)
    _check_metric(metric)
    return np.linalg.inv(metric)


def inner(f, h, metric=None):
    """``<f, h> = 1/2 f_ij h^ij``; bilinear (no conjugation) for complex input."""
    if metric is None:
        return 0.5 * np.einsum("...ij,...ij->...", f, h)
    ginv = inverse_metric(metric)
    return 0.5 * np.einsum("...ij,...ia,...jb,...ab->...", f, ginv, ginv, h, optimize=True)


def norm2(f, metric=None):
    """Squared norm; Hermitian (``<f, conj f>``) for complex forms."""
    return np.real(inner(f, np.conj(f), metric))


def hodge_star(f, metric=None, orientation=1):
    """Hodge star of the two-form ``f``.

    ``orientation`` is the sign of the chosen volume form relative to
    ``dx1^dx2^dx3^dx4``.  With ``metric=None`` the components are taken in
    an oriented orthonormal frame.
    """
    f = np.asarray(f)
    if metric is None:
        up, scale = f, 1.0
    else:
        metric = np.asarray(metric, dtype=float)
        ginv = inverse_metric(metric)
        up = np.einsum("...ia,...jb,...ab->...ij", ginv, ginv, f, optimize=True)
        scale = np.sqrt(np.linalg.det(metric))
    scale = orientation * np.asarray(scale)
    return 0.5 * np.expand_dims(scale, (-1, -2)) * np.einsum("...ij,ijkl->...kl", up, LEVI_CIVITA)


def split_sd_asd(f, metric=None, orientation=1):
    """Return ``(f+, f-)`` with ``*f+ = f+`` and ``*f- = -f-``."""
    star = hodge_star(f, metric, orientation)
    return 0.5 * (f + star), 0.5 * (f - star)


# -- adapted frame bases ----------------------------------------------------------

def _form(pairs):
    c = np.zeros(6)
    for (i, j), coeff in pairs:
        c[PAIRS.index((i, j))] = coeff
    return from_components(c)


F_FRAME = _form([((0, 1), 1.0), ((2, 3), 1.0)])
J_FRAME = np.array([[0.0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
"""Matrix of J in the adapted frame: column ``j`` holds ``J e_j``."""

# Orthonormal basis of Lambda^2: first F/sqrt2, then a basis of the real
# part of Lambda^{2,0}+Lambda^{0,2}, then Lambda^- (= real Lambda_0^{1,1}).
LAMBDA_BASIS = np.array(
    [
        _form([((0, 1), 1), ((2, 3), 1)]) / SQRT2,
        _form([((0, 2), 1), ((1, 3), -1)]) / SQRT2,
        _form([((0, 3), 1), ((1, 2), 1)]) / SQRT2,
        _form([((0, 1), 1), ((2, 3), -1)]) / SQRT2,
        _form([((0, 2), 1), ((1, 3), 1)]) / SQRT2,
        _form([((0, 3), 1), ((1, 2), -1)]) / SQRT2,
    ]
)
"""Rows ``omega0, omega1, omega2`` span Lambda^+, ``eta1..eta3`` span Lambda^-."""

PLUS = slice(0, 3)
MINUS = slice(3, 6)
CF = 0
L20 = slice(1, 3)

# Unitary frame of T^{1,0}: z_a = (e_a - i J e_a)/sqrt2, as frame components.
Z_VECTORS = np.array([[1, -1j, 0, 0], [0, 0, 1, -1j]]) / SQRT2
Z_COVECTORS = np.array([[1, 1j, 0, 0], [0, 0, 1, 1j]]) / SQRT2
"""Dual coframe ``z^a`` with ``z^a(z_b) = delta``."""

BIVECTORS_11 = np.array(
    [wedge(Z_VECTORS[a], np.conj(Z_VECTORS[b])) for a, b in ((0, 0), (0, 1), (1, 0), (1, 1))]
)
"""Complex bivectors ``z_{1 1bar}, z_{1 2bar}, z_{2 1bar}, z_{2 2bar}``."""

FORMS_11 = np.array(
    [wedge(Z_COVECTORS[a], np.conj(Z_COVECTORS[b])) for a, b in ((0, 0), (0, 1), (1, 0), (1, 1))]
)
"""Complex two-forms ``z^{1 1bar}, z^{1 2bar}, z^{2 1bar}, z^{2 2bar}``."""

# Orthonormal basis of Lambda^{1,1} (complex bilinear inner product) as
# combinations of (z_{11}, z_{12}, z_{21}, z_{22}); column n is vector n.
ONB_CHANGE = np.array(
    [
        [1j / SQRT2, 0, 0, 1j / SQRT2],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [1j / SQRT2, 0, 0, -1j / SQRT2],
    ]
)
ONB_SIGNATURE = np.diag([1.0, 0, 0, 1.0]) + np.array(
    [[0, 0, 0, 0], [0, 0, -1, 0], [0, -1, 0, 0], [0, 0, 0, 0]]
)


def bilinear(R, B, C):
    """Evaluate a 4-tensor ``R_abcd`` on bivectors ``B, C`` (antisymmetric arrays)."""
    return 0.25 * np.einsum("...abcd,ab,cd->...", R, B, C, optimize=True)


def operator_matrix(R, basis=LAMBDA_BASIS):
    """Matrix ``M[A, B] = R(basis_A, basis_B)`` of ``R`` viewed as a bilinear form on Lambda^2."""
    return 0.25 * np.einsum("...abcd,Aab,Bcd->...AB", R, basis, basis, optimize=True)


def tensor_from_operator(M, basis=LAMBDA_BASIS):
    """Inverse of :func:`operator_matrix` for an orthonormal real basis."""
    return np.einsum("...AB,Aab,Bcd->...abcd", M, basis, basis, optimize=True)


@dataclass(frozen=True)
class BlockMatrix11:
    """Named entries of a bilinear form on Lambda^{1,1} in the basis
    ``(z_{11bar}, z_{12bar}, z_{21bar}, z_{22bar})``::

        [[k,        conj(a),  a, w      ],
         [conj(a'), conj(x),  conj(v), conj(b)],
         [a',       v,        x, b      ],
         [u,        conj(b'), b', l     ]]

    ``k, l, u, w`` are real; the pattern is the one forced by the form
    being the complexification of a real tensor.
    """

    k: float = 0.0
    l: float = 0.0
    u: float = 0.0
    w: float = 0.0
    a: complex = 0j
    a_prime: complex = 0j
    b: complex = 0j
    b_prime: complex = 0j
    v: complex = 0j
    x: complex = 0j

    def matrix(self):
        c = np.conj
        return np.array(
            [
                [self.k, c(self.a), self.a, self.w],
                [c(self.a_prime), c(self.x), c(self.v), c(self.b)],
                [self.a_prime, self.v, self.x, self.b],
                [self.u, c(self.b_prime), self.b_prime, self.l],
            ],
            dtype=complex,
        )

    @classmethod
    def from_matrix(cls, m):
        """Read the named entries back; raises if ``m`` breaks the reality pattern."""
        m = np.asarray(m, dtype=complex)
        block = cls(
            k=m[0, 0].real,
            l=m[3, 3].real,
            u=m[3, 0].real,
            w=m[0, 3].real,
            a=m[0, 2],
            a_prime=m[2, 0],
            b=m[2, 3],
            b_prime=m[3, 2],
            v=m[2, 1],
            x=m[2, 2],
        )
        scale = max(1.0, np.abs(m).max())
        if np.abs(block.matrix() - m).max() > 1e-9 * scale:
            raise ValueError("matrix does not have the reality pattern of a real tensor")
        return block


def change_basis_11(m):
    """Express a bilinear form on Lambda^{1,1} in the orthonormal basis

    ``(i/sqrt2 (z11 + z22), z12, z21, i/sqrt2 (z11 - z22))``.

    Accepts a :class:`BlockMatrix11` or a raw 4x4 matrix.
    """
    if isinstance(m, BlockMatrix11):
        m = m.matrix()
    return ONB_CHANGE.T @ np.asarray(m, dtype=complex) @ ONB_CHANGE


def change_basis_11_inverse(m):
    inv = np.linalg.inv(ONB_CHANGE)
    return inv.T @ np.asarray(m, dtype=complex) @ inv


def fundamental_form(metric, J):
    """``F = g(J., .)`` as an antisymmetric array ``F_ij = g_kj J^k_i``."""
    return np.einsum("...kj,...ki->...ij", metric, J)


_SUB11 = [0, 3, 4, 5]  # omega0, eta1..eta3 span the real (1,1)-forms
_C11 = 0.5 * np.einsum("Pab,Aab->PA", BIVECTORS_11, LAMBDA_BASIS[_SUB11])


def tensor_from_block11(m):
    """Real frame tensor whose ``Lambda^{1,1} x Lambda^{1,1}`` block is ``m`` and which vanishes elsewhere.

    Accepts a :class:`BlockMatrix11` or a complex 4x4 matrix with its
    reality pattern.
    """
    if isinstance(m, BlockMatrix11):
        m = m.matrix()
    cinv = np.linalg.inv(_C11)
    sub = cinv @ np.asarray(m, dtype=complex) @ cinv.T
    if np.abs(sub.imag).max() > 1e-9 * max(1.0, np.abs(sub).max()):
        raise ValueError("block does not come from a real tensor")
    N = np.zeros((6, 6))
    N[np.ix_(_SUB11, _SUB11)] = sub.real
    return tensor_from_operator(N)
