"""Per-model verification table used by ``curvlab verify``."""

from dataclasses import dataclass, replace

import numpy as np

from .chern_weil import constant_hsc_identities, index_report
from .connections import beta_tensor, curvature_data, riemann_symmetry_residuals
from .decomposition import decompose_riemann, ricci_forms
from .geometry import almost_kahler_residual
from .hsc import DIRECTION_SEED, constancy_test, theorem3_check

DEFAULT_VERIFY_POINTS = 50
AK_TOL = 1e-10


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def as_record(self, model):
        return {
            "model": model,
            "check": self.name,
            "passed": self.passed,
            "value": float(self.value),
            "threshold": float(self.threshold),
            "detail": self.detail,
        }


def _le(name, value, threshold, detail=""):
    value = float(value)
    return Check(name, bool(value <= threshold), value, threshold, detail)


def _ge(name, value, threshold, detail=""):
    value = float(value)
    return Check(name, bool(value >= threshold), value, threshold, detail)


def _count_points(config):
    if config.points is not None:
        return config
    return replace(config, points=str(DEFAULT_VERIFY_POINTS))


def verify_model(model, config):
    """Run every check that applies to ``model``; returns a list of :class:`Check`."""
    config = _count_points(config)
    pts = config.resolve_points(model)
    data = curvature_data(model, pts)
    tol = config.tol
    checks = []

    sym = riemann_symmetry_residuals(data.Rg.tensor)
    checks.append(_le("riemann symmetries", max(float(np.max(r)) for r in sym.values()), 1e-10))

    blocks = decompose_riemann(data.Rg)
    forms = ricci_forms(data.Rn)
    B = data.Rn.block11
    a, ap, b, bp, v = B[:, 0, 2], B[:, 2, 0], B[:, 2, 3], B[:, 3, 2], B[:, 2, 1]
    checks.append(_le("a+b=a'+b'", np.abs(a + b - ap - bp).max(), 1e-9))
    checks.append(_le("v=s_g/12", np.abs(v - blocks.s_g / 12.0).max(), 1e-9,
                      "stated form; differs from v by -W^-(eta1,eta1)/2"))
    checks.append(_le("v=s_g/12-W^-(eta1,eta1)/2",
                      np.abs(v.real - blocks.s_g / 12.0 + 0.5 * blocks.W_minus[:, 0, 0]).max(), 1e-9))

    dF = almost_kahler_residual(data.ps)
    almost_kahler = bool(np.max(dF) <= AK_TOL)
    A2 = data.gp.norm2()
    if almost_kahler:
        beta = beta_tensor(data.gp)
        s_H = forms.s_H
        checks.append(_le("gap (s*-s_H)/4=|A|^2/2", np.abs((blocks.s_star - s_H) / 4.0 - 0.5 * A2).max(), 1e-10))
        checks.append(_le("beta~=-|A|^2/2", np.abs(beta.beta_tilde + 0.5 * A2).max(), 1e-10))
        checks.append(_le("|beta0|^2=|A|^4/4", np.abs(np.sum(beta.beta0**2, axis=-1) - 0.25 * A2**2).max(), 1e-10))
        checks.append(_le("s*=4s_C-s_g", np.abs(blocks.s_star - 4 * forms.s_C + blocks.s_g).max(), 1e-9))

    wminus = np.sqrt(blocks.norms()["W_minus"])
    duality = forms.duality_residual()
    verdicts = []
    agree = routes = True
    for i in range(len(pts)):
        verdict = constancy_test(data.at(i).Rn, n_samples=config.n_samples, tol=tol, seed=DIRECTION_SEED)
        verdicts.append(verdict)
        routes &= verdict.routes_agree
        if almost_kahler:
            agree &= theorem3_check(verdict, wminus[i], duality[i], tol=tol).agree
    checks.append(Check("constancy routes agree", bool(routes), float(not routes), 0.0))
    if almost_kahler:
        checks.append(Check("H constant <=> W-=0 and *rho=r", bool(agree), float(not agree), 0.0))

    if model.hsc is not None:
        k = float(model.hsc)
        rel = max(abs(vd.residual) / max(1.0, abs(k)) for vd in verdicts)
        checks.append(_le("H constant (rel)", rel, tol))
        checks.append(_le("H = nominal k (rel)", max(abs(vd.k_estimate - k) for vd in verdicts) / max(1.0, abs(k)), tol))
        checks.append(_le("|W^-|", wminus.max(), tol))
        checks.append(_le("|*rho - r|", duality.max(), tol))
        vr = v.real
        scale = 1e-7 * max(1.0, k * k)
        checks.append(_le("s_C=4k-2v", np.abs(forms.s_C - (4 * k - 2 * vr)).max(), scale))
        checks.append(_le("s_g=12v", np.abs(blocks.s_g - 12 * vr).max(), scale))
        checks.append(_le("s*=16k-20v", np.abs(blocks.s_star - (16 * k - 20 * vr)).max(), scale))
        checks.append(_le("|R_F|^2=(k-2v)^2", np.abs(blocks.norms()["R_F"] - (k - 2 * vr) ** 2).max(), scale))

    if model.homogeneous:
        spread = 0.0
        for arr in (blocks.s_g, forms.s_C, A2, blocks.norms()["W_plus"], blocks.norms()["W_minus"]):
            arr = np.asarray(arr)
            spread = max(spread, float(np.ptp(arr)) / max(1.0, float(np.abs(arr).max())))
        checks.append(_le("homogeneous invariants agree (rel)", spread, 1e-8))

    if model.closed:
        idx = index_report(model, quad_order=config.quad_order, threads=config.thread_count)
        checks.append(_le("sigma cross-connection", idx.residuals["sigma_cross"], 1e-6))
        checks.append(_le("chi cross-connection", idx.residuals["chi_cross"], 1e-6))
        for key, name in (("sigma_known", "sigma = known"), ("chi_known", "chi = known")):
            if key in idx.residuals:
                checks.append(_le(name, idx.residuals[key], 1e-3))
        if model.hsc is not None:
            ident = constant_hsc_identities(model, seed=config.seed, quad_order=config.quad_order,
                                            tol=tol, n_samples=config.n_samples, threads=config.thread_count)
            for name, res in ident.residuals.items():
                checks.append(_le(f"constant-HSC identity {name}", res, 1e-5))
            checks.append(_ge("sigma integrand >= 0", ident.sigma_integrand_min, -1e-12))
            if float(np.max(A2)) <= AK_TOL:
                checks.append(_le("3 sigma - chi = 0 (Kaehler)", abs(ident.three_sigma_minus_chi), 1e-3))
    return checks

