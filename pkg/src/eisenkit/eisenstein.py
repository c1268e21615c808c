"""Cusp Eisenstein series at half-integral weight: truncated evaluation,
Fourier extraction at cusp pairs, and scattering entries.

The series at the singular cusp a_i, slashed to the cusp a_j, is evaluated as

    (E_i | sigma_j)(z) = sum over cosets  P(gamma) * j(B, z)^{-1} Im(B z)^w,
    B = sigma_i^{-1} gamma sigma_j,
    P(gamma) = nu(gamma)^{-1} r(sigma_i^{-1}, gamma)^{-1} r(sigma_i^{-1} gamma, sigma_j)^{-1},

with all phases principal.  The summand is constant on left cosets of the
cusp stabiliser (this fails for the naive variant that phases gamma alone,
which is why the composite matrix carries the phase).  Enumeration is keyed
by bottom rows of the integer matrix A_i^{-1} gamma A_j inside a window
adapted to the requested evaluation region; systems are cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, cached_property
from math import gcd

import numpy as np

from .arith import weight_class
from .automorphy import MultiplierSystem, _branch_index, j_factor
from .modgroup import Cusp, ModularMatrix, ScalingMatrix, cusps, scaling_matrix, singular_cusps
from .specfun import whittaker_w_grid


@dataclass(frozen=True)
class SpectralContext:
    """Level, weight class and the induced multiplier and singular-cusp data."""
    level: int
    weight: Fraction

    def __post_init__(self):
        if self.level % 4 != 0 or self.level <= 0:
            raise ValueError("level must be a positive multiple of 4")
        object.__setattr__(self, "weight", weight_class(self.weight))

    @cached_property
    def multiplier(self) -> MultiplierSystem:
        return MultiplierSystem(self.level, self.weight)

    @cached_property
    def all_cusps(self) -> tuple[Cusp, ...]:
        return cusps(self.level)

    @cached_property
    def singular(self) -> tuple[Cusp, ...]:
        return singular_cusps(self.level)

    @property
    def m_n(self) -> int:
        return len(self.singular)

    def scaling(self, i: int) -> ScalingMatrix:
        return scaling_matrix(self.singular[i - 1], self.level)

    @property
    def weight_float(self) -> float:
        return float(self.weight)


# region key: (x_lo, x_hi, pad); pad is the absolute half-width of the
# d-window beyond the geometric centre, which controls the d-tail error.
DEFAULT_REGION = (-3.5, 3.5, 64)


@dataclass
class CosetSystem:
    s_cz: float           # B21 = s_cz * c~,  B22 = s_d * d~
    s_d: float
    ct: np.ndarray        # per-coset integer keys (as float for vector ops)
    dt: np.ndarray
    phase: np.ndarray     # P(gamma), complex
    gammas: list[ModularMatrix] = field(repr=False)

    def __len__(self):
        return len(self.ct)


def _valid_completions(level: int, A_i: ModularMatrix, A_j_inv: ModularMatrix,
                       h_i: int, ct: int, dt: int) -> list[ModularMatrix]:
    """All stabiliser-inequivalent gamma = A_i (x, y; ct, dt) A_j^{-1} in
    Gamma0(level) for the given bottom row; at most a few per key."""
    if ct == 0:
        raise ValueError("ct = 0 handled separately")
    x0 = pow(dt % ct, -1, ct) if ct > 1 else 0
    out = []
    seen = set()
    for t in range(level * h_i):
        x = x0 + t * ct
        y = (x * dt - 1) // ct
        C = ModularMatrix(x, y, ct, dt)
        g = A_i @ C @ A_j_inv
        if g.c % level == 0:
            key = t % h_i
            if key not in seen:
                seen.add(key)
                out.append(g)
    return out


@lru_cache(maxsize=32)
def _coset_system(level: int, weight: Fraction, i: int, j: int, c_max: int,
                  region: tuple) -> CosetSystem:
    ctx = SpectralContext(level, weight)
    nu = ctx.multiplier
    sig_i, sig_j = ctx.scaling(i), ctx.scaling(j)
    A_i, A_j = sig_i.completion, sig_j.completion
    h_i, h_j = sig_i.width, sig_j.width
    A_j_inv = A_j.inv()
    x_lo, x_hi, pad = region
    s_cz = math.sqrt(h_i * h_j)
    s_d = math.sqrt(h_i / h_j)
    sig_i_inv = sig_i.inv_array()
    sig_j_arr = sig_j.as_array()

    cts, dts, phases, gammas = [], [], [], []

    def push(g: ModularMatrix, ct: int, dt: int):
        p = 1.0 / nu(g)
        p /= _r_phase(sig_i_inv, g.as_array(), ctx.weight_float)
        p /= _r_phase(sig_i_inv @ g.as_array(), sig_j_arr, ctx.weight_float)
        cts.append(ct)
        dts.append(dt)
        phases.append(p)
        gammas.append(g)

    # c~ = 0 class: only when the two cusps coincide (the identity coset)
    if i == j:
        push((A_i @ A_j_inv), 0, 1)

    ct_max = int(c_max / s_cz + 1e-9)
    for ct in range(1, ct_max + 1):
        d_lo = int(math.floor(-h_j * ct * x_hi - pad))
        d_hi = int(math.ceil(-h_j * ct * x_lo + pad))
        for dt in range(d_lo, d_hi + 1):
            if gcd(ct, dt) != 1:
                continue
            for g in _valid_completions(level, A_i, A_j_inv, h_i, ct, dt):
                push(g, ct, dt)
    return CosetSystem(
        s_cz=s_cz, s_d=s_d,
        ct=np.array(cts, dtype=float),
        dt=np.array(dts, dtype=float),
        phase=np.array(phases, dtype=complex),
        gammas=gammas,
    )


def _r_phase(M, N, l: float) -> complex:
    return np.exp(2j * math.pi * l * _branch_index(M, N, 0.37 + 1.11j))


def eval_pair(ctx: SpectralContext, i: int, j: int, z, w: complex,
              c_max: int = 200, region: tuple = DEFAULT_REGION) -> complex | np.ndarray:
    """(E_i | sigma_j)(z) truncated at |lower-left of sigma_i^-1 gamma sigma_j| <= c_max.

    ``z`` may be a scalar or an array of upper half-plane points inside the
    declared region.  Both cusp indices are 1-based positions in the
    singular-cusp list.
    """
    if not (1 <= i <= ctx.m_n and 1 <= j <= ctx.m_n):
        raise ValueError("cusp index out of the singular range")
    sysd = _coset_system(ctx.level, ctx.weight, i, j, c_max, region)
    zs = np.asarray(z, dtype=complex)
    scalar = zs.ndim == 0
    zs = np.atleast_1d(zs)
    if np.any(zs.imag <= 0):
        raise ValueError("evaluation points must lie in the upper half-plane")
    zeta = (sysd.s_cz * sysd.ct)[:, None] * zs[None, :] + (sysd.s_d * sysd.dt)[:, None]
    l = ctx.weight_float
    terms = (sysd.phase[:, None]
             * np.exp(-1j * l * np.angle(zeta))
             * np.exp(w * np.log(zs.imag[None, :] / np.abs(zeta) ** 2)))
    out = np.sum(terms, axis=0)
    return complex(out[0]) if scalar else out


def tail_estimate(level: int, w: complex, c_max: int, y: float) -> float:
    """Crude upper estimate of the coset-sum truncation, O(c_max^(1-2 Re w))."""
    rw = w.real if isinstance(w, complex) else float(w)
    beta = math.gamma(0.5) * math.gamma(rw - 0.5) / math.gamma(rw)
    return (beta / level) * y ** (1.0 - rw) * c_max ** (2.0 - 2.0 * rw) / (2.0 * rw - 2.0)


@dataclass(frozen=True)
class EisensteinSeries:
    context: SpectralContext
    cusp_index: int = 1
    c_max: int = 200

    def __post_init__(self):
        if not (1 <= self.cusp_index <= self.context.m_n):
            raise ValueError("series defined only at singular cusps")

    def eval(self, z, w: complex, region: tuple = DEFAULT_REGION):
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(zs.imag < 1e-4):
            raise ValueError("evaluation too close to the real axis")
        if isinstance(w, complex) and w.real < 1.0 or (not isinstance(w, complex) and w < 1.0):
            raise ValueError("need Re(w) > 1 for the convergent series")
        return eval_pair(self.context, self.cusp_index, 1, z, w,
                         c_max=self.c_max, region=region)

    def eval_at_cusp(self, j: int, z, w: complex, region: tuple = DEFAULT_REGION):
        return eval_pair(self.context, self.cusp_index, j, z, w,
                         c_max=self.c_max, region=region)

    def tail(self, w: complex, y: float) -> float:
        return tail_estimate(self.context.level, w, self.c_max, y)


@dataclass
class FourierExpansion:
    """Whittaker-normalised expansion data of E_i | sigma_j at a fixed w.

    constant term:  A y^w + B y^(1-w);
    n-th term:      coeffs[n] * W_{sgn(n) l/2, w-1/2}(4 pi |n| y) e^{2 pi i n x}.
    """
    level: int
    weight: Fraction
    i: int
    j: int
    w: complex
    constant_A: complex
    constant_B: complex
    coeffs: dict[int, complex]
    heights: list[float]
    meta: dict

    @property
    def n_max(self) -> int:
        return max((abs(n) for n in self.coeffs), default=0)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "weight": str(self.weight),
            "i": self.i,
            "j": self.j,
            "w": [self.w.real, self.w.imag],
            "A": [self.constant_A.real, self.constant_A.imag],
            "B": [self.constant_B.real, self.constant_B.imag],
            "coeffs": [{"n": n, "re": c.real, "im": c.imag}
                       for n, c in sorted(self.coeffs.items())],
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FourierExpansion":
        return cls(
            level=obj["level"], weight=Fraction(obj["weight"]),
            i=obj["i"], j=obj["j"],
            w=complex(*obj["w"]),
            constant_A=complex(*obj["A"]), constant_B=complex(*obj["B"]),
            coeffs={int(r["n"]): complex(r["re"], r["im"]) for r in obj["coeffs"]},
            heights=list(obj["meta"].get("heights", [])),
            meta=obj["meta"],
        )


def fourier_coefficients(series: EisensteinSeries, j: int, w: complex,
                         n_max: int = 8,
                         heights: tuple[float, float] = (0.7, 1.1),
                         x_samples: int | None = None,
                         coeff_height_scale: float = 6.0,
                         region: tuple = DEFAULT_REGION) -> FourierExpansion:
    """Extract the expansion of E_i | sigma_j by x-integration on uniform grids.

    The two ``heights`` determine the constant pair through a 2x2 solve; the
    n-th coefficient is read off at its own height, chosen so the Whittaker
    factor being divided out is neither negligible nor dominant.  Cross-height
    agreement of the result is recorded in the metadata.
    """
    if len(heights) < 2:
        raise ValueError("need two heights for the constant pair")
    y1, y2 = heights[0], heights[1]
    if abs(y1 - y2) < 1e-3:
        raise ValueError("ill-conditioned height pair")
    if min(y1, y2) < 0.3:
        raise ValueError("constant-pair heights must be >= 0.3")
    ctx = series.context
    l = ctx.weight_float
    X = x_samples or max(64, 8 * n_max)
    xs = np.arange(X) / X

    def line_coeffs(y: float) -> np.ndarray:
        vals = series.eval_at_cusp(j, xs + 1j * y, w, region=region)
        return np.fft.fft(vals) / X  # index n holds the e^{2 pi i n x} coefficient

    c1, c2 = line_coeffs(y1), line_coeffs(y2)
    det = y1**w * y2 ** (1 - w) - y2**w * y1 ** (1 - w)
    A = (c1[0] * y2 ** (1 - w) - c2[0] * y1 ** (1 - w)) / det
    B = (c2[0] * y1**w - c1[0] * y2**w) / det

    coeffs: dict[int, complex] = {}
    consistency: dict[int, float] = {}
    wf = complex(w)
    for n in range(1, n_max + 1):
        yn = min(max(coeff_height_scale / (4 * math.pi * n), 0.02), max(y1, y2))
        yn2 = yn * 1.35
        got = {}
        for yy in (yn, yn2):
            line = line_coeffs(yy)
            wp = whittaker_w_grid(l / 2, wf - 0.5, np.array([4 * math.pi * n * yy]))[0]
            wm = whittaker_w_grid(-l / 2, wf - 0.5, np.array([4 * math.pi * n * yy]))[0]
            got[yy] = (line[n] / wp, line[-n % X] / wm)
        coeffs[n] = got[yn][0]
        coeffs[-n] = got[yn][1]
        consistency[n] = max(abs(got[yn][0] - got[yn2][0]),
                             abs(got[yn][1] - got[yn2][1]))
    return FourierExpansion(
        level=ctx.level, weight=ctx.weight, i=series.cusp_index, j=j, w=wf,
        constant_A=complex(A), constant_B=complex(B), coeffs=coeffs,
        heights=[y1, y2],
        meta={
            "c_max": series.c_max,
            "heights": [y1, y2],
            "x_samples": X,
            "tail_estimate": series.tail(wf, min(y1, y2)),
            "cross_height_consistency": {str(n): v for n, v in sorted(consistency.items())},
        },
    )


def scattering_entry(level: int, weight, i: int, j: int, w: complex,
                     c_max: int = 200,
                     heights: tuple[float, float] = (0.7, 1.1)) -> complex:
    """p_ij(w): the y^(1-w) component of the constant term of E_i | sigma_j."""
    ctx = SpectralContext(level, weight_class(weight))
    series = EisensteinSeries(ctx, i, c_max)
    exp = fourier_coefficients(series, j, w, n_max=1, heights=heights)
    return exp.constant_B


def scattering_matrix(level: int, weight, w: complex, c_max: int = 200,
                      heights: tuple[float, float] = (0.7, 1.1)) -> np.ndarray:
    ctx = SpectralContext(level, weight_class(weight))
    m = ctx.m_n
    phi = np.zeros((m, m), dtype=complex)
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            phi[i - 1, j - 1] = scattering_entry(level, weight, i, j, w,
                                                 c_max=c_max, heights=heights)
    return phi


def laplacian_residual(f, z: complex, w: complex, l: float, h: float = 1e-3) -> float:
    """Relative defect of the weight-l Laplacian eigenvalue equation at z.

    Delta_l = -y^2 (dxx + dyy) + i l y dx applied by central differences.
    """
    x, y = z.real, z.imag
    fz = f(z)
    fxp, fxm = f(z + h), f(z - h)
    fyp, fym = f(z + 1j * h), f(z - 1j * h)
    dxx = (fxp - 2 * fz + fxm) / h**2
    dyy = (fyp - 2 * fz + fym) / h**2
    dx = (fxp - fxm) / (2 * h)
    lap = -(y**2) * (dxx + dyy) + 1j * l * y * dx
    return abs(lap - w * (1 - w) * fz) / max(1e-300, abs(fz))
