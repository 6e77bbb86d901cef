"""Pointwise almost Hermitian structure on a chart.

All functions accept a single point of shape ``(4,)`` or a batch of shape
``S + (4,)``; arrays in :class:`PointStructure` carry the batch shape as
leading axes.  Derivative axes come before tensor axes: ``dg[..., m, i, j]``
is ``d_m g_ij`` and ``d2g[..., m, n, i, j]`` is ``d_m d_n g_ij``.  ``J[i, j]``
is ``J^i_j``, so column ``j`` holds ``J(d/dx_j)``.
"""

from dataclasses import dataclass

import numpy as np

from . import tensor_core as tc
from .errors import AxiomViolationError, DegenerateMetricError
from .expr import eval_jet2
from .jets import stack

RANK_TOL = 1e-10


@dataclass(frozen=True)
class PointStructure:
    p: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    d2g: np.ndarray
    J: np.ndarray
    dJ: np.ndarray
    d2J: np.ndarray
    F: np.ndarray
    orientation_sign: np.ndarray
    frame: np.ndarray
    """Columns are ``e1, Je1, e2, Je2`` in chart components."""
    coframe: np.ndarray
    """Inverse of ``frame``; row ``a`` is the dual covector ``e^a``."""

    @property
    def batch_shape(self):
        return self.g.shape[:-2]

    @property
    def unitary_frame(self):
        """``(z1, z2)`` as complex chart vectors, shape ``S + (2, 4)``."""
        return np.einsum("...ia,za->...zi", self.frame, tc.Z_VECTORS)

    @property
    def real_frame(self):
        return np.moveaxis(self.frame, -1, -2)

    def to_frame(self, T, kinds):
        """Express a coordinate tensor in the adapted frame.

        ``kinds`` is a string of ``'d'`` (covariant slot) and ``'u'``
        (contravariant slot), one per trailing tensor axis of ``T``.
        """
        out = T
        nb = len(self.batch_shape)
        for pos, kind in enumerate(kinds):
            axis = nb + pos
            mat = self.frame if kind == "d" else np.swapaxes(self.coframe, -1, -2)
            out = np.moveaxis(out, axis, -1)
            out = np.einsum("...i,...ia->...a", out, _expand(mat, out.ndim - 1 - nb))
            out = np.moveaxis(out, -1, axis)
        return out


def _expand(mat, extra):
    """Insert ``extra`` singleton axes after the batch axes of a ``(..., 4, 4)`` array."""
    idx = (Ellipsis,) + (None,) * extra + (slice(None), slice(None))
    return mat[idx]


def evaluate_fields(model, points):
    """Jets of the metric and almost complex structure fields of ``model``."""
    points = np.asarray(points, dtype=float)
    cache = {}

    def jet(e):
        key = id(e)
        if key not in cache:
            cache[key] = eval_jet2(e, points)
        return cache[key]

    g = stack([[jet(model.g_exprs[i][j]) for j in range(4)] for i in range(4)])
    J = stack([[jet(model.J_exprs[i][j]) for j in range(4)] for i in range(4)])
    return g, J


def axiom_residuals(g, J):
    """Max-abs residuals of ``g - g^T``, ``J^2 + 1`` and ``g(J., J.) - g``."""
    eye = np.eye(4)
    sym = np.abs(g - np.swapaxes(g, -1, -2)).max(axis=(-1, -2))
    jsq = np.abs(J @ J + eye).max(axis=(-1, -2))
    orth = np.abs(np.swapaxes(J, -1, -2) @ g @ J - g).max(axis=(-1, -2))
    return sym, jsq, orth


def adapted_unitary_frame(g, J, seed=None, rank_tol=RANK_TOL):
    """Adapted orthonormal frame ``(e1, Je1, e2, Je2)`` as matrix columns.

    Gram-Schmidt on ``(s1, J s1, s2, J s2, ...)`` where ``s_i`` are the
    columns of ``seed`` (default: coordinate vectors), keeping the first
    four independent vectors.  The unitary frame is then
    ``z_a = (e_a - i J e_a)/sqrt2`` (see :attr:`PointStructure.unitary_frame`).
    """
    g = np.asarray(g, dtype=float)
    J = np.asarray(J, dtype=float)
    shape = g.shape[:-2]
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise DegenerateMetricError("metric is singular or not positive definite") from None
    seed = np.eye(4) if seed is None else np.asarray(seed, dtype=float)
    frame = np.zeros(shape + (4, 4))
    found = np.zeros(shape, dtype=int)

    def ip(a, b):
        return np.einsum("...i,...ij,...j->...", a, g, b, optimize=True)

    for c in range(4):
        v = np.broadcast_to(seed[:, c], shape + (4,)).copy()
        for slot in range(4):
            basis = frame[..., :, slot]
            active = (found * 2 > slot)[..., None]
            v = v - np.where(active, ip(v, basis)[..., None] * basis, 0.0)
        n = np.sqrt(np.maximum(ip(v, v), 0.0))
        take = (n > rank_tol) & (found < 2)
        if np.any(take):
            e = np.where(take[..., None], v / np.where(n > 0, n, 1.0)[..., None], 0.0)
            je = np.einsum("...ij,...j->...i", J, e)
            for k in range(2):
                sel = take & (found == k)
                frame[..., :, 2 * k] = np.where(sel[..., None], e, frame[..., :, 2 * k])
                frame[..., :, 2 * k + 1] = np.where(sel[..., None], je, frame[..., :, 2 * k + 1])
            found = found + take
    if np.any(found < 2):
        raise DegenerateMetricError("could not complete an adapted frame")
    return frame


def build_point_structure(model, points, seed=None, tol=None):
    """Evaluate ``model`` at ``points`` and assemble the almost Hermitian data.

    Raises :class:`AxiomViolationError` when ``J^2 = -1`` or the
    compatibility ``g(J., J.) = g`` fails beyond the model's tolerance.
    """
    points = np.asarray(points, dtype=float)
    tol = model.axiom_tol if tol is None else tol
    (g, dg, d2g), (J, dJ, d2J) = evaluate_fields(model, points)
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise DegenerateMetricError(f"metric of model {model.name!r} is degenerate") from None
    for name, res in zip(("metric symmetry", "J^2 = -1", "g(J., J.) = g"), axiom_residuals(g, J)):
        worst = float(np.max(res))
        if worst > tol:
            idx = np.unravel_index(int(np.argmax(res)), np.shape(res)) if np.ndim(res) else ()
            where = points[idx] if points.ndim > 1 else points
            raise AxiomViolationError(
                f"model {model.name!r}: axiom {name!r} violated, residual {worst:.3e} "
                f"at point {np.array2string(where, precision=6)}",
                residual=worst,
                point=where,
            )
    frame = adapted_unitary_frame(g, J, seed=seed)
    coframe = np.linalg.inv(frame)
    return PointStructure(
        p=points,
        g=g,
        dg=dg,
        d2g=d2g,
        J=J,
        dJ=dJ,
        d2J=d2J,
        F=tc.fundamental_form(g, J),
        orientation_sign=np.sign(np.linalg.det(frame)),
        frame=frame,
        coframe=coframe,
    )


def exterior_derivative_F(ps):
    """Components ``(dF)_{mij}`` computed from the jets of ``F = g(J., .)``."""
    dF = np.einsum("...mkj,...ki->...mij", ps.dg, ps.J) + np.einsum("...kj,...mki->...mij", ps.g, ps.dJ)
    return dF + np.einsum("...mij->...ijm", dF) + np.einsum("...mij->...jmi", dF)


def almost_kahler_residual(model_or_ps, points=None):
    """``|dF|`` (metric norm of the 3-form) at the point(s)."""
    ps = model_or_ps if points is None else build_point_structure(model_or_ps, points)
    dF = exterior_derivative_F(ps)
    ginv = np.linalg.inv(ps.g)
    n2 = np.einsum("...mij,...ma,...ib,...jc,...abc->...", dF, ginv, ginv, ginv, dF, optimize=True) / 6.0
    return np.sqrt(np.maximum(n2, 0.0))


def volume_density(ps):
    return np.sqrt(np.linalg.det(ps.g))

