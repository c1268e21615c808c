"""Character twists, the check involution, and completed series two ways.

A finite Whittaker-normalised expansion (coefficients a_n plus a constant
pair) is completed along the ray (i+u)y into

    Lambda(s) = int_0^inf (twisted value - twisted constant term) y^s dy/y,

computable either через the Gamma-hypergeometric tensor applied to the
coefficient Dirichlet sums (route "c-tensor"), or by quadrature of the
split representation whose two half-line integrals converge for every s
(route "mellin-quadrature").  The split route is the continuation: it is
what the functional-equation checks evaluate at reflected arguments.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .arith import DirichletCharacter, dual_character, epsilon_factor, gauss_sum, kronecker, weight_class
from .automorphy import j_factor, mobius
from .eisenstein import FourierExpansion
from .modgroup import fricke_array
from .specfun import gamma, gamma_vec, half_power, hyp2f1, hyp2f1_vec, mellin_filon, whittaker_w_grid


@dataclass(frozen=True)
class TwistedExpansion:
    """Coefficientwise twist: n-th coefficient tau_n(chi) a_n, constant pair
    scaled by tau_0(chi)."""
    base: FourierExpansion
    character: DirichletCharacter

    def __post_init__(self):
        D = self.character.modulus
        if math.gcd(D, self.base.level) != 1:
            raise ValueError("twisting modulus must be coprime to the level")

    @property
    def tau0(self) -> complex:
        return gauss_sum(self.character, 0)

    def coeff(self, n: int) -> complex:
        return gauss_sum(self.character, n) * self.base.coeffs.get(n, 0j)

    def coeffs(self) -> dict[int, complex]:
        return {n: self.coeff(n) for n in self.base.coeffs}

    def constant_pair(self) -> tuple[complex, complex]:
        t0 = self.tau0
        return t0 * self.base.constant_A, t0 * self.base.constant_B


def twist(expansion: FourierExpansion, chi: DirichletCharacter) -> TwistedExpansion:
    return TwistedExpansion(expansion, chi)


def twist_evaluator(f: Callable[[complex], complex],
                    chi: DirichletCharacter) -> Callable[[complex], complex]:
    """The finite sum of translate values sum_m chi(m) f(z + m/D)."""
    D = chi.modulus
    if D == 1:
        return f
    units = sorted(chi.turns)

    def g(z: complex) -> complex:
        return sum(chi(m) * f(z + m / D) for m in units)

    return g


def check_function(f: Callable[[complex], complex], level: int, l) -> Callable[[complex], complex]:
    """e^{i pi l / 2} f | W_level: an involution satisfying g(iy) = f(i/(level y))."""
    lf = float(weight_class(l))
    W = fricke_array(level)
    pref = cmath.exp(1j * math.pi * lf / 2)

    def g(z: complex) -> complex:
        return pref * f(mobius(W, z)) / j_factor(W, z, lf)

    return g


def h_factor(chi: DirichletCharacter, N: int, l, u: float) -> complex:
    """conj(chi(-4N)) (4N/D) eps_D ((1+iu)/(1-iu))^{l/2}."""
    if abs(u) >= 0.8:
        raise ValueError("|u| must stay below 0.8")
    D = chi.modulus
    if D % 2 == 0 or math.gcd(D, 4 * N) != 1:
        raise ValueError("twisting modulus must be odd and coprime to 4N")
    lf = float(weight_class(l))
    val = chi(-4 * N).conjugate() if D > 1 else 1.0
    val *= kronecker(4 * N, D)
    val *= epsilon_factor(D, l)
    val *= half_power((1 + 1j * u) / (1 - 1j * u), lf)
    return val


def l_series(coeffs: dict[int, complex], chi: DirichletCharacter, sign: int, s) -> complex | np.ndarray:
    """sum over sign*n > 0 of tau_n(chi) a_n / |n|^s on the stored range."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    total = np.zeros_like(s_arr)
    for n, a in coeffs.items():
        if n * sign <= 0:
            continue
        total = total + gauss_sum(chi, n) * a * np.exp(-s_arr * math.log(abs(n)))
    return total if np.ndim(s) else complex(total[0])


def c_tensor(s, w: complex, u: float, l) -> tuple:
    """Row pair turning (L+, L-) into the completed series.

    Gamma(w+s) Gamma(s-w+1) / (4 pi)^s times
    ( F(s-w+1, s+w; s+1-l/2; (1+iu)/2) / Gamma(s+1-l/2),
      F(s-w+1, s+w; s+1+l/2; (1-iu)/2) / Gamma(s+1+l/2) ).
    """
    if abs(u) >= 0.8:
        raise ValueError("|u| must stay below 0.8")
    lf = float(weight_class(l))
    if np.ndim(s):
        s_arr = np.asarray(s, dtype=complex)
        front = gamma_vec(w + s_arr) * gamma_vec(s_arr - w + 1) * np.exp(-s_arr * math.log(4 * math.pi))
        cp = front * hyp2f1_vec(s_arr - w + 1, s_arr + w, s_arr + 1 - lf / 2, (1 + 1j * u) / 2) \
            / gamma_vec(s_arr + 1 - lf / 2)
        cm = front * hyp2f1_vec(s_arr - w + 1, s_arr + w, s_arr + 1 + lf / 2, (1 - 1j * u) / 2) \
            / gamma_vec(s_arr + 1 + lf / 2)
        return cp, cm
    sc = complex(s)
    front = gamma(w + sc) * gamma(sc - w + 1) / (4 * math.pi) ** sc
    cp = front * hyp2f1(sc - w + 1, sc + w, sc + 1 - lf / 2, (1 + 1j * u) / 2) / gamma(sc + 1 - lf / 2)
    cm = front * hyp2f1(sc - w + 1, sc + w, sc + 1 + lf / 2, (1 - 1j * u) / 2) / gamma(sc + 1 + lf / 2)
    return cp, cm


@dataclass(frozen=True)
class LambdaData:
    """Everything the completed series needs about one index j of a family.

    const_plus / const_minus are the y^w and y^(1-w) constant coefficients of
    the undualised function; dual_plus / dual_minus those of its check
    partner (whose own expansion already carries the e^{i pi l/2} of the
    check normalisation).
    """
    level: int
    weight: Fraction
    w: complex
    coeffs: dict[int, complex]
    dual_coeffs: dict[int, complex]
    const_plus: complex
    const_minus: complex
    dual_plus: complex
    dual_minus: complex

    @property
    def n_big(self) -> int:
        return self.level // 4

    def dual(self) -> "LambdaData":
        return LambdaData(self.level, self.weight, self.w,
                          dict(self.dual_coeffs), dict(self.coeffs),
                          self.dual_plus, self.dual_minus,
                          self.const_plus, self.const_minus)


@dataclass(frozen=True)
class CompletedLValue:
    s: complex
    w: complex
    u: float
    character: DirichletCharacter
    value: complex
    route: str


def lambda_route1(data: LambdaData, s, u: float, chi: DirichletCharacter):
    """c-tensor route: c(s, w, u) . (L+, L-)^T on the stored coefficients."""
    cp, cm = c_tensor(s, data.w, u, data.weight)
    return cp * l_series(data.coeffs, chi, +1, s) + cm * l_series(data.coeffs, chi, -1, s)


def _ray_values(coeffs: dict[int, complex], chi: DirichletCharacter, l: float,
                w: complex, u: float, yhat) -> np.ndarray:
    """sum_n tau_n(chi) a_n W_{sgn(n) l/2, w-1/2}(4 pi |n| yhat) e^{2 pi i n u yhat}."""
    out = np.zeros(len(yhat), dtype=complex)
    for n, a in sorted(coeffs.items()):
        if n == 0:
            continue
        tau = gauss_sum(chi, n)
        if tau == 0 or a == 0:
            continue
        wv = whittaker_w_grid(math.copysign(1, n) * l / 2, complex(w) - 0.5,
                              4 * math.pi * abs(n) * yhat)
        out = out + tau * a * wv * np.exp(2j * math.pi * n * u * yhat)
    return out


def lambda_direct(data: LambdaData, s, u: float, chi: DirichletCharacter,
                  n_nodes: int = 4001, y_bottom: float = 2e-5, y_top: float = 12.0):
    """Quadrature of the defining integral int_0^inf F((i+u)y) y^s dy/y on a
    log grid, term content truncated at the stored support.

    Converges only while Re(s) > Re(w) - 1 (the integrand behaves like
    y^{s-w} at the origin); outside that region use the split route.
    Vectorised over s.
    """
    w = complex(data.w)
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s_arr.real <= w.real - 1 + 0.25):
        raise ValueError("defining integral needs Re(s) > Re(w) - 1; use the split route")
    if abs(u) >= 0.8:
        raise ValueError("|u| must stay below 0.8")
    if math.gcd(chi.modulus, data.level) != 1:
        raise ValueError("twisting modulus must be coprime to the level")
    l = float(data.weight)
    v1 = math.log(y_top / y_bottom)
    n = n_nodes if n_nodes % 2 == 1 else n_nodes + 1
    h = v1 / (n - 1)
    y = y_bottom * np.exp(np.arange(n) * h)
    f = _ray_values(data.coeffs, chi, l, w, u, y)
    out = (y_bottom ** s_arr) * mellin_filon(f, 0.0, h, s_arr)
    return out if np.ndim(s) else complex(out[0])


def lambda_route2(data: LambdaData, s, u: float, chi: DirichletCharacter,
                  n_nodes: int = 2001, y_top: float = 12.0):
    """Split-representation route, valid for every s off the four poles.

    scale^(-s) [ I1 + I2 + polar ] with scale = 2 sqrt(N) D,
    I1 the upper Mellin integral of the twisted tail along the ray,
    I2 its check-partner reflection, and polar the four explicit pole terms.
    This is the continuation used by the functional-equation machinery.
    Vectorised over s.
    """
    if abs(u) >= 0.8:
        raise ValueError("|u| must stay below 0.8")
    D = chi.modulus
    N = data.n_big
    if math.gcd(D, data.level) != 1:
        raise ValueError("twisting modulus must be coprime to the level")
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    w = complex(data.w)
    l = float(data.weight)
    chid = dual_character(chi)
    scale = 2.0 * math.sqrt(N) * D
    y0 = 1.0 / math.sqrt(1.0 + u * u)
    H = h_factor(chi, N, data.weight, u)
    t0, t0d = gauss_sum(chi, 0), gauss_sum(chid, 0)

    # log grid y = y0 e^v up to y_top * scale (integrands die with e^{-2 pi y/scale})
    v1 = math.log(y_top * scale / y0)
    n = n_nodes if n_nodes % 2 == 1 else n_nodes + 1
    h = v1 / (n - 1)
    v = np.arange(n) * h
    y = y0 * np.exp(v)
    yhat = y / scale

    f_up = _ray_values(data.coeffs, chi, l, w, u, yhat)
    # the reflection carries the ray (i+u) to (i-u): the check partner is
    # integrated at -u (its completed series appears at (-s, -u))
    f_dn = _ray_values(data.dual_coeffs, chid, l, w, -u, yhat)
    # I1 = int f_up y^s dy/y ; I2 = H (u^2+1)^{-s} int f_dn y^{-s} dy/y
    i1 = (y0 ** s_arr) * mellin_filon(f_up, 0.0, h, s_arr)
    i2 = H * (1 + u * u) ** (-s_arr) * (y0 ** (-s_arr)) * mellin_filon(f_dn, 0.0, h, -s_arr)

    up = (1 + u * u) ** (-s_arr)
    line1 = scale ** (-w) * (1 + u * u) ** ((s_arr - w) / 2) * (
        H * t0d * data.dual_plus / (s_arr - w) - t0 * data.const_plus / (s_arr + w))
    line2 = scale ** (w - 1) * (1 + u * u) ** ((s_arr + w - 1) / 2) * (
        H * t0d * data.dual_minus / (s_arr + w - 1) - t0 * data.const_minus / (s_arr - w + 1))
    polar = up * (line1 + line2)

    out = scale ** (-s_arr) * (i1 + i2 + polar)
    return out if np.ndim(s) else complex(out[0])


def lambda_completed(data: LambdaData, s, u: float, chi: DirichletCharacter,
                     route: str = "c-tensor") -> CompletedLValue:
    if route == "c-tensor":
        val = lambda_route1(data, s, u, chi)
    elif route == "mellin-quadrature":
        val = lambda_direct(data, s, u, chi)
    else:
        raise ValueError(f"unknown route {route!r}")
    return CompletedLValue(s=complex(s), w=complex(data.w), u=u,
                           character=chi, value=complex(val), route=route)


def lambda_functional_equation_residual(data: LambdaData, s: complex, u: float,
                                        chi: DirichletCharacter) -> tuple[complex, complex]:
    """Both sides of Lambda(s, w, u, chi) = H (4ND^2)^{-s} (1+u^2)^{-s}
    Lambda-check(-s, w, -u, chi-check), evaluated by the split route."""
    D = chi.modulus
    N = data.n_big
    chid = dual_character(chi)
    lhs = lambda_route2(data, s, u, chi)
    rhs_core = lambda_route2(data.dual(), -s, -u, chid)
    H = h_factor(chi, N, data.weight, u)
    rhs = H * (4 * N * D * D) ** (-complex(s)) * (1 + u * u) ** (-complex(s)) * rhs_core
    return complex(lhs), complex(rhs)
