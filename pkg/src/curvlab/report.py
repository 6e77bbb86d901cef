"""Run configuration and per-point curvature reports with JSON/CSV encoding."""

import csv
import io
import json
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from .chern_weil import DEFAULT_QUAD_ORDER
from .connections import beta_tensor, curvature_data, metric_residual, riemann_symmetry_residuals
from .decomposition import decompose_riemann, hermitian_block_entries, ricci_forms
from .errors import CurvlabError, PreconditionError
from .geometry import almost_kahler_residual
from .hsc import DEFAULT_SAMPLES, DIRECTION_SEED, constancy_test, kahler_criteria, theorem3_check
from .models import builtin_model, load_user_model

SCHEMA_VERSION = 1
STRUCTURAL_TOL = 1e-9


@dataclass(frozen=True)
class RunConfig:
    """Options shared by all commands.  Defaults are the documented ones."""

    model: str = "cp2"
    user: Optional[str] = None
    k: Optional[float] = None
    points: Optional[str] = None
    """``None`` (chart centre), an integer count of random points, or ``"x1,x2,x3,x4;..."``."""
    n_samples: int = DEFAULT_SAMPLES
    tol: float = 1e-8
    quad_order: int = DEFAULT_QUAD_ORDER
    seed: int = 0
    format: str = "json"
    threads: Optional[int] = None
    n: int = 10000
    grid: bool = False

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise CurvlabError(f"unknown output format {self.format!r}; use json or csv")
        if self.n_samples < 32:
            raise CurvlabError("n_samples must be at least 32")
        if self.quad_order < 2:
            raise CurvlabError("quad_order must be at least 2")
        if self.tol <= 0:
            raise CurvlabError("tol must be positive")

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise CurvlabError(f"unknown configuration key(s): {sorted(unknown)}")
        return cls(**d)

    @property
    def thread_count(self):
        if self.threads is not None:
            return max(1, int(self.threads))
        env = os.environ.get("CURVLAB_THREADS")
        try:
            return max(1, int(env)) if env else 1
        except ValueError:
            raise CurvlabError(f"CURVLAB_THREADS must be an integer, got {env!r}") from None

    def load_model(self):
        if self.user:
            return load_user_model(self.user)
        return builtin_model(self.model, self.k)

    def resolve_points(self, model):
        if self.points is None:
            pts = np.asarray(model.center(), dtype=float)[None, :]
        elif re.fullmatch(r"\s*\d+\s*", str(self.points)):
            pts = model.sample_points(int(self.points), seed=self.seed)
        else:
            try:
                pts = np.array(
                    [[float(t) for t in chunk.split(",")] for chunk in str(self.points).split(";") if chunk.strip()]
                )
            except ValueError as exc:
                raise CurvlabError(f"cannot parse points {self.points!r}: {exc}") from None
            if pts.ndim != 2 or pts.shape[1] != 4:
                raise CurvlabError("each point needs four coordinates")
        outside = ~model.contains(pts)
        if np.any(outside):
            raise CurvlabError(f"point {pts[np.argmax(outside)].tolist()} is outside the domain of {model.name!r}")
        return pts


@dataclass(frozen=True)
class CurvatureReport:
    schema_version: int
    model: str
    x1: float
    x2: float
    x3: float
    x4: float
    tol: float
    axiom_tol: float
    n_samples: int
    # Riemannian blocks
    s_g: float
    s_star: float
    c: float
    d: float
    W_plus_norm2: float
    W_minus_norm2: float
    R0_norm2: float
    W_F_plus_norm2: float
    W00_plus_norm2: float
    R_F_norm2: float
    R00_norm2: float
    # Ricci forms
    s_C: float
    s_H: float
    duality_residual: float
    # Hermitian block entries
    k: float
    l: float
    u: float
    w: float
    a_re: float
    a_im: float
    a_prime_re: float
    a_prime_im: float
    b_re: float
    b_im: float
    b_prime_re: float
    b_prime_im: float
    v_re: float
    v_im: float
    x_re: float
    x_im: float
    # gauge potential
    A_norm2: float
    beta_tilde: float
    beta0_norm2: float
    dF_norm: float
    # holomorphic sectional curvature
    hsc_constant: bool
    hsc_k: float
    hsc_residual: float
    hsc_matrix_conditions: bool
    hsc_matrix_residual: float
    theorem3_rhs: bool
    theorem3_agree: bool
    # Kaehler criteria
    kahler_gap: float
    RF_vs_beta0_residual: float
    # structural invariants
    ab_residual: float
    v_vs_s_g_residual: float
    """``|v - s_g/12|``; nonzero wherever ``W^-(eta1, eta1)`` is."""
    v_identity_residual: float
    """``|v - s_g/12 + 1/2 W^-(eta1, eta1)|``."""
    riemann_symmetry_residual: float
    hermitian_metric_residual: float
    structural_ok: bool

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        kw = {}
        for f in fields(cls):
            if f.name not in d:
                raise CurvlabError(f"report is missing field {f.name!r}")
            kw[f.name] = _coerce(f.type, d[f.name])
        extra = set(d) - set(kw)
        if extra:
            raise CurvlabError(f"unknown report field(s) {sorted(extra)}")
        return cls(**kw)


def _coerce(typ, value):
    name = typ if isinstance(typ, str) else typ.__name__
    if name == "bool":
        if isinstance(value, str):
            return value == "true"
        return bool(value)
    if name == "int":
        return int(value)
    if name == "float":
        return float(value)
    return str(value)


def analyze_points(model, points, config: RunConfig):
    """One :class:`CurvatureReport` per point, in input order."""
    points = np.asarray(points, dtype=float)
    data = curvature_data(model, points)
    blocks = decompose_riemann(data.Rg)
    forms = ricci_forms(data.Rn)
    beta = beta_tensor(data.gp)
    A2 = data.gp.norm2()
    dF = almost_kahler_residual(data.ps)
    sym = riemann_symmetry_residuals(data.Rg.tensor)
    sym_worst = np.max(np.stack(list(sym.values())), axis=0)
    metric_res = metric_residual(
        data.ps, type(data.lc)(data.lc.gamma + np.einsum("...ikj->...kij", data.gp.A), data.lc.dgamma, "hermitian")
    )
    norms = blocks.norms()
    duality = forms.duality_residual()

    def one(i):
        cd = data.at(i)
        entries = hermitian_block_entries(cd.Rn)
        verdict = constancy_test(cd.Rn, n_samples=config.n_samples, tol=config.tol, seed=DIRECTION_SEED)
        t3 = theorem3_check(verdict, np.sqrt(norms["W_minus"][i]), duality[i], tol=config.tol)
        kc = kahler_criteria(entries, verdict.k_estimate, blocks.R_F[i], beta.beta0[i])
        lem = entries.structural_residuals(float(blocks.s_g[i]))
        v_identity = abs(entries.v.real - blocks.s_g[i] / 12.0 + 0.5 * blocks.W_minus[i, 0, 0])
        scale = max(1.0, float(np.abs(cd.Rn.tensor).max()))
        structural = (
            lem["a+b-a'-b'"] <= STRUCTURAL_TOL * scale
            and lem["Im v"] <= STRUCTURAL_TOL * scale
            and v_identity <= STRUCTURAL_TOL * scale
            and sym_worst[i] <= STRUCTURAL_TOL * scale
            and metric_res[i] <= STRUCTURAL_TOL * scale
        )
        p = points[i]
        return CurvatureReport(
            schema_version=SCHEMA_VERSION,
            model=model.name,
            x1=float(p[0]), x2=float(p[1]), x3=float(p[2]), x4=float(p[3]),
            tol=config.tol,
            axiom_tol=model.axiom_tol,
            n_samples=config.n_samples,
            s_g=float(blocks.s_g[i]),
            s_star=float(blocks.s_star[i]),
            c=float(blocks.c[i]),
            d=float(blocks.d[i]),
            W_plus_norm2=float(norms["W_plus"][i]),
            W_minus_norm2=float(norms["W_minus"][i]),
            R0_norm2=float(norms["R0"][i]),
            W_F_plus_norm2=float(norms["W_F_plus"][i]),
            W00_plus_norm2=float(norms["W00_plus"][i]),
            R_F_norm2=float(norms["R_F"][i]),
            R00_norm2=float(norms["R00"][i]),
            s_C=float(forms.s_C[i]),
            s_H=float(forms.s_H[i]),
            duality_residual=float(duality[i]),
            k=entries.k, l=entries.l, u=entries.u, w=entries.w,
            a_re=entries.a.real, a_im=entries.a.imag,
            a_prime_re=entries.a_prime.real, a_prime_im=entries.a_prime.imag,
            b_re=entries.b.real, b_im=entries.b.imag,
            b_prime_re=entries.b_prime.real, b_prime_im=entries.b_prime.imag,
            v_re=entries.v.real, v_im=entries.v.imag,
            x_re=entries.x.real, x_im=entries.x.imag,
            A_norm2=float(A2[i]),
            beta_tilde=float(beta.beta_tilde[i]),
            beta0_norm2=float(np.sum(beta.beta0[i] ** 2)),
            dF_norm=float(dF[i]),
            hsc_constant=bool(verdict.is_constant),
            hsc_k=verdict.k_estimate,
            hsc_residual=verdict.residual,
            hsc_matrix_conditions=bool(verdict.matrix_conditions_met),
            hsc_matrix_residual=verdict.matrix_residual,
            theorem3_rhs=bool(t3.rhs),
            theorem3_agree=bool(t3.agree),
            kahler_gap=kc.gap,
            RF_vs_beta0_residual=kc.RF_vs_beta0_residual,
            ab_residual=float(lem["a+b-a'-b'"]),
            v_vs_s_g_residual=float(lem["v-s_g/12"]),
            v_identity_residual=float(v_identity),
            riemann_symmetry_residual=float(sym_worst[i]),
            hermitian_metric_residual=float(metric_res[i]),
            structural_ok=bool(structural),
        )

    n = config.thread_count
    idx = range(len(points))
    if n == 1 or len(points) == 1:
        return [one(i) for i in idx]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(one, idx))


# -- encoding -------------------------------------------------------------------------

def _encode_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def encode_records(records, fmt):
    """Serialize a list of flat dicts as newline-delimited JSON or CSV with a header."""
    if fmt == "json":
        return "".join(json.dumps(r, allow_nan=True) + "\n" for r in records)
    if fmt == "csv":
        if not records:
            return ""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = list(records[0])
        writer.writerow(header)
        for r in records:
            if list(r) != header:
                raise PreconditionError("CSV output needs records with identical fields")
            writer.writerow([_encode_value(r[h]) for h in header])
        return buf.getvalue()
    raise CurvlabError(f"unknown output format {fmt!r}")


_INT = re.compile(r"[-+]?\d+")
_FLOAT = re.compile(r"[-+]?(\d+\.\d*([eE][-+]?\d+)?|\d+[eE][-+]?\d+|inf|nan)")


def _decode_value(s):
    """CSV cell back to the scalar :func:`_encode_value` wrote."""
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    if _INT.fullmatch(s):
        return int(s)
    if _FLOAT.fullmatch(s):
        return float(s)
    return s


def decode_records(text, fmt):
    """Inverse of :func:`encode_records`; CSV cells are typed back to bool/int/float/str."""
    if fmt == "json":
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return []
    header = rows[0]
    return [{h: _decode_value(c) for h, c in zip(header, row)} for row in rows[1:]]


def encode_reports(reports, fmt):
    return encode_records([r.to_dict() for r in reports], fmt)


def decode_reports(text, fmt):
    return [CurvatureReport.from_dict(d) for d in decode_records(text, fmt)]


def flatten(obj, prefix=""):
    """Flat ``{name: scalar}`` view of a dataclass with nested dicts (for index/verify output)."""
    d = asdict(obj) if hasattr(obj, "__dataclass_fields__") else dict(obj)
    out = {}
    for key, val in d.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            out.update(flatten(val, prefix=f"{name}."))
        elif isinstance(val, (np.floating, np.integer)):
            out[name] = val.item()
        else:
            out[name] = val
    return out
