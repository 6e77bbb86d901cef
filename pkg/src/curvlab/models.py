"""Built-in model manifolds and user-defined charts.

Every model, built-in or not, is described by expression strings in the
field grammar of :mod:`curvlab.expr`; derivatives always come from jets.

User model files are INI-style (``configparser``)::

    [model]
    name = my-torus
    closed = true              ; optional, default false
    homogeneous = true         ; optional, default false
    known_chi = 0              ; optional
    known_sigma = 0            ; optional
    volume = 1.0               ; optional closed-form volume

    [domain]
    lower = 0 0 0 0
    upper = 1 1 1 1
    periodic = true true true true   ; optional, default all false

    [metric]                   ; all ten entries g11 g12 ... g44 (i <= j)
    g11 = 1
    ...

    [complex_structure]        ; all sixteen entries J11 ... J44
    J21 = 1                    ; J_ij = J^i_j: J(d/dx_j) = sum_i J_ij d/dx_i
    ...

Unknown sections or keys are rejected.
"""

import configparser
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import AxiomViolationError, CurvlabError, ModelFormatError, PreconditionError
from .expr import ExpressionSyntaxError, parse_field
from .geometry import axiom_residuals, evaluate_fields

BUILTIN_TOL = 1e-12
USER_TOL = 1e-8

METRIC_KEYS = tuple(f"g{i}{j}" for i in range(1, 5) for j in range(i, 5))
J_KEYS = tuple(f"J{i}{j}" for i in range(1, 5) for j in range(1, 5))


@dataclass(frozen=True)
class ManifoldModel:
    name: str
    lower: tuple
    upper: tuple
    periodic: tuple
    g_sources: dict
    """Ten metric entries keyed ``g11, g12, ..., g44`` (upper triangle)."""
    J_sources: dict
    """Sixteen entries ``J11 .. J44`` with ``J_ij = J^i_j``."""
    homogeneous: bool = False
    closed: bool = False
    known_chi: Optional[int] = None
    known_sigma: Optional[int] = None
    volume: Optional[float] = None
    builtin: bool = True
    ball_radius: Optional[float] = None
    """If set, the domain is the open ball of this radius (inside the box)."""
    hsc: Optional[float] = None
    """Nominal constant holomorphic sectional curvature, when the model has one."""
    g_exprs: tuple = field(init=False, repr=False, compare=False)
    J_exprs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        try:
            gp = {k: parse_field(v) for k, v in self.g_sources.items()}
            jp = {k: parse_field(v) for k, v in self.J_sources.items()}
        except ExpressionSyntaxError as exc:
            raise ModelFormatError(f"model {self.name!r}: {exc}") from exc
        g = tuple(tuple(gp[f"g{min(i, j) + 1}{max(i, j) + 1}"] for j in range(4)) for i in range(4))
        J = tuple(tuple(jp[f"J{i + 1}{j + 1}"] for j in range(4)) for i in range(4))
        object.__setattr__(self, "g_exprs", g)
        object.__setattr__(self, "J_exprs", J)
        if self.closed and not self.homogeneous and self.volume is None:
            if not all(self.periodic):
                raise ModelFormatError(
                    f"model {self.name!r}: a closed non-homogeneous model needs a periodic "
                    "fundamental domain for quadrature"
                )

    @property
    def axiom_tol(self):
        return BUILTIN_TOL if self.builtin else USER_TOL

    @property
    def periods(self):
        return tuple(u - l if p else None for l, u, p in zip(self.lower, self.upper, self.periodic))

    def contains(self, points):
        pts = np.asarray(points, dtype=float)
        inside = np.all((pts >= np.array(self.lower)) & (pts <= np.array(self.upper)), axis=-1)
        if self.ball_radius is not None:
            inside &= np.linalg.norm(pts, axis=-1) < self.ball_radius
        return inside

    def sample_points(self, n, seed=0, margin=0.1):
        """``n`` reproducible random points, kept ``margin`` (relative) away from the boundary."""
        rng = np.random.default_rng(seed)
        lo, hi = self.sampling_box()
        if self.ball_radius is not None:
            d = rng.normal(size=(n, 4))
            d /= np.linalg.norm(d, axis=1, keepdims=True)
            r = self.ball_radius * (1 - margin) * rng.random(n) ** 0.25
            return d * r[:, None]
        width = hi - lo
        return lo + width * (margin + (1 - 2 * margin) * rng.random((n, 4)))

    def sampling_box(self, extent=2.0):
        """Finite box used for sampling; infinite bounds are clipped to ``+-extent``."""
        lo, hi = np.array(self.lower, dtype=float), np.array(self.upper, dtype=float)
        return np.where(np.isfinite(lo), lo, -extent), np.where(np.isfinite(hi), hi, extent)

    def center(self):
        if self.ball_radius is not None:
            return np.zeros(4)
        lo, hi = self.sampling_box()
        return 0.5 * (lo + hi)


def _identity_metric():
    return {k: ("1" if k[1] == k[2] else "0") for k in METRIC_KEYS}


def _J_from_matrix(rows):
    """J sources from a 4x4 nested list of expression strings (row i, column j = J^i_j)."""
    return {f"J{i + 1}{j + 1}": rows[i][j] for i in range(4) for j in range(4)}


STANDARD_J = _J_from_matrix(
    [["0", "-1", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "0", "-1"], ["0", "0", "1", "0"]]
)
"""``J d1 = d2, J d3 = d4``: complex coordinates ``z1 = x1 + i x2, z2 = x3 + i x4``."""


def _lit(c):
    return repr(float(c))


def model_flat_torus():
    return ManifoldModel(
        name="torus",
        lower=(0.0,) * 4,
        upper=(1.0,) * 4,
        periodic=(True,) * 4,
        g_sources=_identity_metric(),
        J_sources=STANDARD_J,
        homogeneous=True,
        closed=True,
        known_chi=0,
        known_sigma=0,
        volume=1.0,
        hsc=0.0,
    )


def _kahler_potential_metric(scale, sign):
    """Metric ``scale * d dbar (-sign * log(1 - sign |z|^2))`` in real coordinates.

    ``sign = -1`` gives Fubini-Study on the affine chart, ``sign = +1`` the
    Bergman metric on the unit ball.  Writing the Hermitian matrix as
    ``S + iT`` in ``(z1, z2)`` the real metric has
    ``g(x_a, x_b) = g(y_a, y_b) = S_ab``, ``g(x_a, y_b) = T_ab``.
    """
    c = _lit(scale)
    s = "+" if sign > 0 else "-"
    q = "(1 - x1^2 - x2^2 - x3^2 - x4^2)" if sign > 0 else "(1 + x1^2 + x2^2 + x3^2 + x4^2)"
    den = f"{q}^2"
    re12 = "(x1*x3 + x2*x4)"
    im12 = "(x1*x4 - x2*x3)"
    g = {k: "0" for k in METRIC_KEYS}
    g["g11"] = g["g22"] = f"{c}*({q} {s} x1^2 {s} x2^2)/{den}"
    g["g33"] = g["g44"] = f"{c}*({q} {s} x3^2 {s} x4^2)/{den}"
    g["g13"] = g["g24"] = f"{s}{c}*{re12}/{den}"
    g["g14"] = f"{s}{c}*{im12}/{den}"
    g["g23"] = f"{'-' if sign > 0 else '+'}{c}*{im12}/{den}"
    return g


def model_cp2_fubini_study(k=1.0):
    """``CP^2`` on the affine chart, Fubini-Study metric with Hermitian HSC ``k``.

    The unscaled potential ``log(1 + |z|^2)`` has holomorphic sectional
    curvature 4, so the metric is multiplied by ``4/k``; the volume is then
    ``(4/k)^2 * pi^2/2``.
    """
    if not k > 0:
        raise PreconditionError("Fubini-Study model needs k > 0")
    scale = 4.0 / k
    return ManifoldModel(
        name=f"cp2(k={k:g})",
        lower=(-np.inf,) * 4,
        upper=(np.inf,) * 4,
        periodic=(False,) * 4,
        g_sources=_kahler_potential_metric(scale, -1),
        J_sources=STANDARD_J,
        homogeneous=True,
        closed=True,
        known_chi=3,
        known_sigma=1,
        volume=scale**2 * np.pi**2 / 2,
        hsc=float(k),
    )


def model_complex_hyperbolic_ball(k=-1.0):
    """Unit ball in ``C^2`` with the Bergman metric scaled to Hermitian HSC ``k < 0``."""
    if not k < 0:
        raise PreconditionError("complex hyperbolic model needs k < 0")
    return ManifoldModel(
        name=f"ball(k={k:g})",
        lower=(-1.0,) * 4,
        upper=(1.0,) * 4,
        periodic=(False,) * 4,
        g_sources=_kahler_potential_metric(-4.0 / k, 1),
        J_sources=STANDARD_J,
        homogeneous=True,
        closed=False,
        ball_radius=1.0,
        hsc=float(k),
    )


def model_kodaira_thurston():
    """Kodaira-Thurston nilmanifold with its invariant almost Kaehler structure.

    Coframe ``e1 = dx1, e2 = dx2, e3 = dx3 - x1 dx4, e4 = dx4``, metric
    ``sum e_i^2``, ``J: E1 -> E2, E3 -> E4`` on the dual frame
    ``E1 = d1, E2 = d2, E3 = d3, E4 = d4 + x1 d3``, and
    ``F = e1^e2 + e3^e4``, which is closed because ``de3 = -e1^e4``.
    """
    g = {k: "0" for k in METRIC_KEYS}
    g.update(g11="1", g22="1", g33="1", g34="-x1", g44="1 + x1^2")
    J = _J_from_matrix(
        [
            ["0", "-1", "0", "0"],
            ["1", "0", "0", "0"],
            ["0", "0", "x1", "-(1 + x1^2)"],
            ["0", "0", "1", "-x1"],
        ]
    )
    return ManifoldModel(
        name="kt",
        lower=(0.0,) * 4,
        upper=(1.0,) * 4,
        periodic=(True,) * 4,
        g_sources=g,
        J_sources=J,
        homogeneous=True,
        closed=True,
        known_chi=0,
        known_sigma=0,
        volume=1.0,
    )


def model_s2_product(radius=1.0):
    """``S^2 x S^2`` (round, equal radii) in stereographic coordinates on each factor.

    Kaehler, homogeneous, closed with ``chi = 4`` and ``sigma = 0``; used as
    an independent check of the index normalisations.  Not of constant
    holomorphic sectional curvature.
    """
    c = _lit(4.0 * radius**2)
    g = {k: "0" for k in METRIC_KEYS}
    g["g11"] = g["g22"] = f"{c}/(1 + x1^2 + x2^2)^2"
    g["g33"] = g["g44"] = f"{c}/(1 + x3^2 + x4^2)^2"
    return ManifoldModel(
        name=f"s2xs2(r={radius:g})",
        lower=(-np.inf,) * 4,
        upper=(np.inf,) * 4,
        periodic=(False,) * 4,
        g_sources=g,
        J_sources=STANDARD_J,
        homogeneous=True,
        closed=True,
        known_chi=4,
        known_sigma=0,
        volume=(4 * np.pi * radius**2) ** 2,
    )


BUILTIN = {
    "torus": lambda k=None: model_flat_torus(),
    "cp2": lambda k=None: model_cp2_fubini_study(1.0 if k is None else k),
    "ball": lambda k=None: model_complex_hyperbolic_ball(-1.0 if k is None else k),
    "kt": lambda k=None: model_kodaira_thurston(),
    "s2xs2": lambda k=None: model_s2_product(),
}


def builtin_model(name, k=None):
    try:
        return BUILTIN[name](k)
    except KeyError:
        raise CurvlabError(f"unknown model {name!r}; choose from {sorted(BUILTIN)}") from None


# -- user models ---------------------------------------------------------------------

_SECTIONS = {
    "model": {"name", "closed", "homogeneous", "known_chi", "known_sigma", "volume"},
    "domain": {"lower", "upper", "periodic"},
    "metric": set(METRIC_KEYS),
    "complex_structure": set(J_KEYS),
}


def _parser():
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str  # keys are case sensitive (g11 vs J11)
    return cp


def parse_user_model(text, source="<string>"):
    """Parse the INI text of a user model (no axiom validation)."""
    cp = _parser()
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ModelFormatError(f"{source}: {exc}") from exc
    unknown = set(cp.sections()) - set(_SECTIONS)
    if unknown:
        raise ModelFormatError(f"{source}: unknown section(s) {sorted(unknown)}")
    for sec, allowed in _SECTIONS.items():
        if sec not in cp:
            raise ModelFormatError(f"{source}: missing section [{sec}]")
        extra = set(cp[sec]) - allowed
        if extra:
            raise ModelFormatError(f"{source}: unknown key(s) {sorted(extra)} in [{sec}]")
    for sec, keys in (("metric", METRIC_KEYS), ("complex_structure", J_KEYS)):
        missing = [k for k in keys if k not in cp[sec]]
        if missing:
            raise ModelFormatError(f"{source}: missing key(s) {missing} in [{sec}]")

    m, d = cp["model"], cp["domain"]

    def floats(key, sec=d):
        try:
            vals = tuple(float(t) for t in sec[key].split())
        except ValueError as exc:
            raise ModelFormatError(f"{source}: bad number in {key!r}: {exc}") from None
        if len(vals) != 4:
            raise ModelFormatError(f"{source}: {key!r} needs four values")
        return vals

    def flag(sec, key, default=False):
        try:
            return sec.getboolean(key, fallback=default)
        except ValueError as exc:
            raise ModelFormatError(f"{source}: {exc}") from None

    def opt_int(key):
        return int(m[key]) if key in m else None

    if "periodic" in d:
        periodic = tuple(configparser.ConfigParser.BOOLEAN_STATES.get(t.lower()) for t in d["periodic"].split())
        if len(periodic) != 4 or None in periodic:
            raise ModelFormatError(f"{source}: 'periodic' needs four booleans")
    else:
        periodic = (False,) * 4
    return ManifoldModel(
        name=m.get("name", Path(source).stem),
        lower=floats("lower"),
        upper=floats("upper"),
        periodic=periodic,
        g_sources={k: cp["metric"][k] for k in METRIC_KEYS},
        J_sources={k: cp["complex_structure"][k] for k in J_KEYS},
        homogeneous=flag(m, "homogeneous"),
        closed=flag(m, "closed"),
        known_chi=opt_int("known_chi"),
        known_sigma=opt_int("known_sigma"),
        volume=float(m["volume"]) if "volume" in m else None,
        builtin=False,
    )


def probe_points(model, per_axis=3, margin=0.1):
    """Interior grid used for axiom validation of user models."""
    lo, hi = model.sampling_box()
    axes = [np.linspace(l + margin * (h - l), h - margin * (h - l), per_axis) for l, h in zip(lo, hi)]
    return np.array(list(itertools.product(*axes)))


def validate_model(model, points=None):
    """Check the almost Hermitian axioms at ``points`` (default: probe grid).

    Raises :class:`AxiomViolationError` naming the worst offending point.
    """
    points = probe_points(model) if points is None else np.asarray(points, dtype=float)
    (g, _, _), (J, _, _) = evaluate_fields(model, points)
    names = ("metric symmetry", "J^2 = -1", "g(J., J.) = g")
    for name, res in zip(names, axiom_residuals(g, J)):
        i = int(np.argmax(res))
        if res[i] > model.axiom_tol:
            raise AxiomViolationError(
                f"model {model.name!r}: axiom {name!r} violated, residual {res[i]:.3e} "
                f"at probe point {np.array2string(points[i], precision=6)}",
                residual=float(res[i]),
                point=points[i],
            )
    eig = np.linalg.eigvalsh(0.5 * (g + np.swapaxes(g, -1, -2)))
    i = int(np.argmin(eig[:, 0]))
    if eig[i, 0] <= 0:
        raise AxiomViolationError(
            f"model {model.name!r}: metric not positive definite at probe point "
            f"{np.array2string(points[i], precision=6)}",
            residual=float(eig[i, 0]),
            point=points[i],
        )
    return model


def load_user_model(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    return validate_model(parse_user_model(text, source=str(path)))
