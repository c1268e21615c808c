"""Reconstruction pipeline: from a candidate coefficient family to a
modular-invariant function, with the finite-data certificates.

A family dataset stores, per index j, the constant pair (a_j with y^w and
b_j with y^(1-w)), the Whittaker coefficients at the working w (optionally
synthesised from a double array over (n, m)), and the corresponding dual
data of the check partner.  The validator runs the evaluable conditions and
prints explicit notices for the analytic hypotheses it must assume.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import DirichletCharacter, dual_character, gauss_sum, principal_character, weight_class
from .eisenstein import (DEFAULT_REGION, EisensteinSeries, SpectralContext,
                         fourier_coefficients)
from .lfunc import (LambdaData, h_factor, l_series, lambda_route1, lambda_route2)
from .report import VerificationReport
from .specfun import whittaker_w_grid


@dataclass
class FamilyEntry:
    j: int
    const_plus: complex          # multiplies y^w
    const_minus: complex         # multiplies y^(1-w)
    dual_plus: complex
    dual_minus: complex
    coeffs: dict[int, complex] = field(default_factory=dict)
    dual_coeffs: dict[int, complex] = field(default_factory=dict)
    double_array: dict[tuple[int, int], complex] | None = None
    dual_double_array: dict[tuple[int, int], complex] | None = None


@dataclass
class NiceFamilyDataset:
    level: int
    weight: Fraction
    w: complex
    families: list[FamilyEntry]
    growth: dict = field(default_factory=lambda: {"C": 1.0, "alpha": 2.0, "beta": 0.0})
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weight = weight_class(self.weight)
        if not self.families:
            raise ValueError("empty dataset")
        for fam in self.families:
            if fam.double_array is not None and not fam.coeffs:
                fam.coeffs = synthesize_coeffs(fam.double_array, self.w)
            if fam.dual_double_array is not None and not fam.dual_coeffs:
                fam.dual_coeffs = synthesize_coeffs(fam.dual_double_array, self.w)

    @property
    def m_n(self) -> int:
        return len(self.families)

    def entry(self, j: int) -> FamilyEntry:
        for fam in self.families:
            if fam.j == j:
                return fam
        raise KeyError(f"no family index {j}")

    def lambda_data(self, j: int) -> LambdaData:
        fam = self.entry(j)
        return LambdaData(self.level, self.weight, self.w,
                          dict(fam.coeffs), dict(fam.dual_coeffs),
                          fam.const_plus, fam.const_minus,
                          fam.dual_plus, fam.dual_minus)

    def dual_swap(self) -> "NiceFamilyDataset":
        fams = [FamilyEntry(f.j, f.dual_plus, f.dual_minus, f.const_plus, f.const_minus,
                            dict(f.dual_coeffs), dict(f.coeffs))
                for f in self.families]
        return NiceFamilyDataset(self.level, self.weight, self.w, fams,
                                 dict(self.growth), dict(self.meta))

    def to_json(self) -> dict:
        fams = []
        for f in self.families:
            rec = {
                "j": f.j,
                "const": {"a": [f.const_plus.real, f.const_plus.imag],
                          "b": [f.const_minus.real, f.const_minus.imag],
                          "adual": [f.dual_plus.real, f.dual_plus.imag],
                          "bdual": [f.dual_minus.real, f.dual_minus.imag]},
            }
            if f.double_array is not None:
                rec["coeffs"] = [{"n": n, "m": m, "re": c.real, "im": c.imag}
                                 for (n, m), c in sorted(f.double_array.items())]
            else:
                rec["coeffs_at_w"] = [{"n": n, "re": c.real, "im": c.imag}
                                      for n, c in sorted(f.coeffs.items())]
            rec["dual_coeffs_at_w"] = [{"n": n, "re": c.real, "im": c.imag}
                                       for n, c in sorted(f.dual_coeffs.items())]
            fams.append(rec)
        return {"level": self.level, "weight": str(self.weight),
                "w": [self.w.real, self.w.imag], "families": fams,
                "growth": self.growth, "meta": self.meta}

    @classmethod
    def from_json(cls, obj: dict) -> "NiceFamilyDataset":
        fams = []
        for rec in obj["families"]:
            cc = rec["const"]
            fam = FamilyEntry(
                j=int(rec["j"]),
                const_plus=complex(*cc["a"]), const_minus=complex(*cc["b"]),
                dual_plus=complex(*cc["adual"]), dual_minus=complex(*cc["bdual"]),
            )
            if "coeffs" in rec:
                fam.double_array = {(int(r["n"]), int(r["m"])): complex(r["re"], r["im"])
                                    for r in rec["coeffs"]}
            if "coeffs_at_w" in rec:
                fam.coeffs = {int(r["n"]): complex(r["re"], r["im"])
                              for r in rec["coeffs_at_w"]}
            if "dual_coeffs_at_w" in rec:
                fam.dual_coeffs = {int(r["n"]): complex(r["re"], r["im"])
                                   for r in rec["dual_coeffs_at_w"]}
            fams.append(fam)
        return cls(level=int(obj["level"]), weight=Fraction(obj["weight"]),
                   w=complex(*obj["w"]), families=fams,
                   growth=dict(obj.get("growth", {})), meta=dict(obj.get("meta", {})))

    def save(self, path: str):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "NiceFamilyDataset":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def synthesize_coeffs(double_array: dict[tuple[int, int], complex], w: complex) -> dict[int, complex]:
    """a_n(w) = sum_m a_{n,m} / m^w over the finite support."""
    out: dict[int, complex] = {}
    for (n, m), c in double_array.items():
        if m < 1:
            raise ValueError("m indices must be positive")
        out[n] = out.get(n, 0j) + c / m ** complex(w)
    return out


def dataset_from_eisenstein(level: int, weight, w: complex, n_max: int = 8,
                            c_max: int = 300,
                            heights: tuple[float, float] = (0.7, 1.1),
                            coeff_height_scale: float = 6.0) -> NiceFamilyDataset:
    """Extract the full singular-cusp family of expansions of the Eisenstein
    vector at one w, together with the check-partner duals."""
    ctx = SpectralContext(level, weight_class(weight))
    lf = ctx.weight_float
    pref = complex(np.exp(1j * math.pi * lf / 2))
    fams = []
    mn = ctx.m_n
    for j in range(1, mn + 1):
        series = EisensteinSeries(ctx, j, c_max)
        at_inf = fourier_coefficients(series, 1, w, n_max=n_max, heights=heights,
                                      coeff_height_scale=coeff_height_scale)
        at_zero = fourier_coefficients(series, mn, w, n_max=n_max, heights=heights,
                                       coeff_height_scale=coeff_height_scale)
        fams.append(FamilyEntry(
            j=j,
            const_plus=at_inf.constant_A, const_minus=at_inf.constant_B,
            dual_plus=pref * at_zero.constant_A, dual_minus=pref * at_zero.constant_B,
            coeffs=dict(at_inf.coeffs),
            dual_coeffs={n: pref * c for n, c in at_zero.coeffs.items()},
        ))
    sizes = [abs(c) for f in fams for c in f.coeffs.values() if abs(c) > 0]
    alpha_fit = _growth_exponent(fams[0].coeffs)
    return NiceFamilyDataset(
        level=level, weight=ctx.weight, w=complex(w), families=fams,
        growth={"C": max(sizes) if sizes else 1.0,
                "alpha": max(2.0, alpha_fit + 0.5), "beta": 0.0},
        meta={"source": "eisenstein", "n_max": n_max, "c_max": c_max,
              "heights": list(heights)},
    )


def _growth_exponent(coeffs: dict[int, complex], floor_ratio: float = 1e-8) -> float:
    mags = {abs(n): abs(c) for n, c in coeffs.items() if n != 0}
    if not mags:
        return 0.0
    top = max(mags.values())
    pts = [(math.log(n), math.log(v)) for n, v in mags.items()
           if n > 0 and v > floor_ratio * top]
    if len(pts) < 2:
        return 0.0
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def build_f(dataset: NiceFamilyDataset, j: int, z, w: complex | None = None):
    """a_j y^w + b_j y^(1-w) + sum_n a_n W_{sgn(n) l/2, w-1/2}(4 pi |n| y) e^{2 pi i n x},
    truncated at the stored support.  Accepts scalar or array z."""
    fam = dataset.entry(j)
    wv = complex(dataset.w if w is None else w)
    if w is not None and abs(complex(w) - complex(dataset.w)) > 1e-12:
        raise ValueError("coefficients are stored at the dataset's w")
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    y = zs.imag
    if np.any(y < 1e-4):
        raise ValueError("points must be in the upper half-plane")
    l = float(dataset.weight)
    out = fam.const_plus * y ** wv + fam.const_minus * y ** (1 - wv)
    out = out.astype(complex)
    for n, a in sorted(fam.coeffs.items()):
        if n == 0 or a == 0:
            continue
        wvals = whittaker_w_grid(math.copysign(1, n) * l / 2, wv - 0.5,
                                 4 * math.pi * abs(n) * y)
        out = out + a * wvals * np.exp(2j * math.pi * n * zs.real)
    return out if np.ndim(z) else complex(out[0])


def residue_term(dataset: NiceFamilyDataset, j: int, w: complex, u: float, y: float,
                 chi: DirichletCharacter) -> complex:
    """Sum of the four pole contributions picked up when the inversion line
    is shifted across the strip:

    H tau0(chid) [ adual (4 N D^2 (1+u^2) y)^{-w} + bdual (...)^{w-1} ]
    - tau0(chi) [ a y^w + b y^(1-w) ],

    with a/adual the y^w-coefficients and b/bdual the y^(1-w)-coefficients
    bound by role to the poles at s = w, 1-w, -w, w-1 respectively."""
    if abs(u) >= 0.8:
        raise ValueError("|u| must stay below 0.8")
    fam = dataset.entry(j)
    wv = complex(w)
    N = dataset.level // 4
    D = chi.modulus
    chid = dual_character(chi)
    H = h_factor(chi, N, dataset.weight, u)
    t0, t0d = gauss_sum(chi, 0), gauss_sum(chid, 0)
    big = 4 * N * D * D * (1 + u * u) * y
    return (H * t0d * (fam.dual_plus * big ** (-wv) + fam.dual_minus * big ** (wv - 1))
            - t0 * (fam.const_plus * y ** wv + fam.const_minus * y ** (1 - wv)))


def mellin_invert(evaluator, y: float, sigma0: float, t_max: float = 40.0,
                  nodes: int = 2000) -> tuple[complex, float]:
    """(1/2 pi) int_{-t_max}^{t_max} Lambda(sigma0 + i t) y^{-sigma0 - i t} dt
    by Simpson quadrature on a uniform grid; ``evaluator`` takes an s array.

    Returns the value and a truncation estimate read off the outermost decade
    of the integrand."""
    n = nodes if nodes % 2 == 0 else nodes + 1
    t = np.linspace(-t_max, t_max, n + 1)
    s = sigma0 + 1j * t
    vals = np.asarray(evaluator(s), dtype=complex) * np.exp(-s * math.log(y)) if y != 1.0 \
        else np.asarray(evaluator(s), dtype=complex)
    wts = np.ones(n + 1)
    wts[1:-1:2] = 4.0
    wts[2:-1:2] = 2.0
    h = (2 * t_max) / n
    val = np.sum(vals * wts) * h / 3.0 / (2 * math.pi)
    edge = max(1, n // 10)
    mags = np.abs(vals)
    # the explicit pole terms of a split evaluator only fall off like 1/t on
    # vertical lines, so the estimate is driven by the endpoint magnitude
    trunc = float((mags[:edge].mean() + mags[-edge:].mean()) / 2 * t_max * 0.2 / math.pi)
    if mags[0] > 0.05 * mags.max() or mags[-1] > 0.05 * mags.max():
        raise ArithmeticError(
            f"integrand not decaying at |t| = {t_max}: endpoint magnitude "
            f"{max(mags[0], mags[-1]):.2e} vs peak {mags.max():.2e}")
    return complex(val), trunc


def polar_bracket(dataset: NiceFamilyDataset, j: int, s: complex, u: float,
                  chi: DirichletCharacter) -> complex:
    """The explicit pole part of the split representation (the quantity whose
    removal is required to leave an entire remainder)."""
    fam = dataset.entry(j)
    w = complex(dataset.w)
    N = dataset.level // 4
    D = chi.modulus
    chid = dual_character(chi)
    H = h_factor(chi, N, dataset.weight, u)
    t0, t0d = gauss_sum(chi, 0), gauss_sum(chid, 0)
    scale = 2 * math.sqrt(N) * D
    up = (1 + u * u) ** (-s)
    line1 = scale ** (-w) * (1 + u * u) ** ((s - w) / 2) * (
        H * t0d * fam.dual_plus / (s - w) - t0 * fam.const_plus / (s + w))
    line2 = scale ** (w - 1) * (1 + u * u) ** ((s + w - 1) / 2) * (
        H * t0d * fam.dual_minus / (s + w - 1) - t0 * fam.const_minus / (s - w + 1))
    return up * (line1 + line2)


DEFAULT_TOLERANCES = {
    "functional_equation": 1e-5,
    "route_consistency": 5e-5,
    "polar_finite": 1e12,        # finiteness scan, not a smallness test
    "growth_margin": 0.75,
    "boundedness_span": 1e6,
}


def validate_nice_family(dataset: NiceFamilyDataset,
                         tolerances: dict | None = None,
                         characters: list[DirichletCharacter] | None = None,
                         second_w: "NiceFamilyDataset | None" = None,
                         phi_matrix: np.ndarray | None = None,
                         s_samples: tuple = (3.0, 2.6, 3.2 + 0.4j),
                         u_samples: tuple = (0.1, -0.15)) -> VerificationReport:
    """Run the finite-data certificates over every family index.

    Conditions: (A) continuation is not finitely checkable and is assumed,
    with a boundedness scan on a vertical segment recorded; (B) the printed
    polar bracket is finite off its four poles; (C) the completed-series
    functional equation holds at sample points via the split route; (D) the
    cross-w scattering relation, when a second-w dataset and the matrix are
    supplied; (E) the coefficient growth matches the declared exponent.
    """
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    chars = characters if characters is not None else [principal_character(1)]
    rep = VerificationReport()
    rep.note_assumption(
        "analytic hypotheses assumed: meromorphic continuation and vertical-strip "
        "boundedness of the completed series are not finitely checkable; "
        "a bounded scan on a vertical segment stands in for them")
    w = complex(dataset.w)

    for fam in dataset.families:
        j = fam.j
        if not fam.dual_coeffs and any(abs(c) > 0 for c in fam.coeffs.values()):
            raise ValueError(f"family {j}: dual coefficients missing; "
                             "the functional-equation certificate is unevaluable")
        data = dataset.lambda_data(j)

        # (A) boundedness scan
        seg = np.array([2.8 + 1j * t for t in np.linspace(0.0, 12.0, 7)])
        vals = lambda_route2(data, seg, u_samples[0], chars[0])
        mx = float(np.max(np.abs(vals)))
        rep.add(
            name=f"A_boundedness_scan_j{j}",
            ref="finite scan of the completed series on a vertical segment "
                "(continuation itself assumed, not certified)",
            inputs={"segment_re": 2.8, "t_range": [0.0, 12.0], "u": u_samples[0]},
            residual=0.0 if math.isfinite(mx) else math.inf,
            tol=tol["polar_finite"],
        )

        # (B) polar bracket finite off poles
        worst = 0.0
        for ss in s_samples:
            for uu in u_samples:
                for chi in chars:
                    v = polar_bracket(dataset, j, complex(ss), uu, chi)
                    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                        worst = math.inf
                    worst = max(worst, 0.0)
        rep.add(
            name=f"B_polar_part_finite_j{j}",
            ref="explicit four-pole bracket of the split representation is "
                "finite at sample (s, u) off the poles",
            inputs={"s_samples": [str(s) for s in s_samples]},
            residual=worst,
            tol=tol["polar_finite"],
        )

        # (C) functional equation by the split route
        for chi in chars:
            worst = 0.0
            scale_ref = 0.0
            for ss in s_samples:
                for uu in u_samples:
                    lhs, rhs = _fe_sides(data, complex(ss), uu, chi)
                    worst = max(worst, abs(lhs - rhs))
                    scale_ref = max(scale_ref, abs(lhs), abs(rhs))
            rep.add(
                name=f"C_functional_equation_j{j}_D{chi.modulus}",
                ref="completed series at (s, u) equals the twist factor times "
                    "the dual completed series at (-s, -u)",
                inputs={"D": chi.modulus, "s_samples": [str(s) for s in s_samples],
                        "u_samples": list(u_samples), "scale": scale_ref},
                residual=worst,
                tol=tol["functional_equation"],
            )

        # (C') split-versus-tensor consistency; this is the row a corrupted
        # coefficient trips.  It is only sharp when the reflected constant
        # term has no y^w component (otherwise the truncated tail cannot
        # follow the y^{-w} blowup of the reflection and the comparison is
        # structurally limited).
        if abs(fam.dual_plus) <= 1e-2:
            from .lfunc import lambda_route1
            worst = 0.0
            for ss in s_samples:
                if complex(ss).real < w.real + 0.45:
                    continue
                for uu in u_samples:
                    v1 = lambda_route1(data, np.array([complex(ss)]), uu, chars[0])[0]
                    v2 = lambda_route2(data, np.array([complex(ss)]), uu, chars[0])[0]
                    worst = max(worst, abs(v1 - v2))
            rep.add(
                name=f"C_route_consistency_j{j}",
                ref="tensor route agrees with the split continuation inside "
                    "the convergence region; sensitive to corrupted data",
                inputs={"j": j, "s_samples": [str(s) for s in s_samples]},
                residual=worst,
                tol=tol["route_consistency"],
            )
        else:
            rep.note_assumption(
                f"family {j}: route-consistency row skipped (reflected constant "
                "term has a y^w component the truncated tail cannot follow)")

        # (E) growth exponent
        slope = _growth_exponent(fam.coeffs)
        alpha = float(dataset.growth.get("alpha", 2.0))
        rep.add(
            name=f"E_growth_fit_j{j}",
            ref="least-squares growth exponent of |a_n| against the declared bound",
            inputs={"fitted_slope": slope, "declared_alpha": alpha},
            residual=max(0.0, slope - alpha),
            tol=tol["growth_margin"],
        )

    # (D) cross-w relation
    if second_w is not None and phi_matrix is not None:
        worst = 0.0
        for sign in (+1, -1):
            for ss in (s_samples[0],):
                lw = np.array([l_series(dataset.entry(j).coeffs, chars[0], sign, complex(ss))
                               for j in range(1, dataset.m_n + 1)])
                lw2 = np.array([l_series(second_w.entry(j).coeffs, chars[0], sign, complex(ss))
                                for j in range(1, second_w.m_n + 1)])
                worst = max(worst, float(np.max(np.abs(lw2 - phi_matrix @ lw))))
        rep.add(
            name="D_cross_w_scattering",
            ref="coefficient Dirichlet sums at the reflected w equal the "
                "scattering matrix applied to those at w",
            inputs={"s": str(s_samples[0])},
            residual=worst,
            tol=tol["functional_equation"],
        )
    else:
        rep.note_assumption(
            "cross-w scattering relation skipped: no second-w dataset supplied "
            "(the reflected w leaves the region where expansions are extractable)")
    return rep


def _fe_sides(data: LambdaData, s: complex, u: float, chi: DirichletCharacter):
    from .lfunc import lambda_functional_equation_residual
    return lambda_functional_equation_residual(data, s, u, chi)


def fit_A(f_evaluators: list, e_evaluators: list, sample_points: list[complex],
          w: complex, holdout: int = 3) -> tuple[np.ndarray, dict]:
    """Least-squares matrix A with f = A E on the sample points.

    The last ``holdout`` points are excluded from the fit and each row's
    residual on them is reported."""
    m = len(f_evaluators)
    if len(e_evaluators) != m:
        raise ValueError("need as many target as basis evaluators")
    K = len(sample_points)
    if K < 2 * m + holdout:
        raise ValueError("need at least 2 m_N + holdout sample points")
    E = np.array([[ev(z) for ev in e_evaluators] for z in sample_points])
    F = np.array([[fv(z) for fv in f_evaluators] for z in sample_points])
    fitE, fitF = E[:-holdout], F[:-holdout]
    sv = np.linalg.svd(fitE, compute_uv=False)
    if sv[-1] < 1e-10 * sv[0]:
        raise ArithmeticError("rank-deficient sample matrix; spread the points")
    A, *_ = np.linalg.lstsq(fitE, fitF, rcond=None)
    A = A.T  # rows: f_j = sum_i A[j, i] E_i
    res_fit = float(np.max(np.abs(fitE @ A.T - fitF)))
    held = float(np.max(np.abs(E[-holdout:] @ A.T - F[-holdout:]))) if holdout else 0.0
    return A, {"fit_residual": res_fit, "holdout_residual": held}


def a_phi_residual(a_w: np.ndarray, a_1mw: np.ndarray,
                   phi_w: np.ndarray, phi_1mw: np.ndarray) -> float:
    """Frobenius norm of Phi(1-w) A(w) Phi(w) - A(1-w)."""
    return float(np.linalg.norm(phi_1mw @ a_w @ phi_w - a_1mw))
