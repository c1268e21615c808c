"""Complex special functions: Gamma, Gauss 2F1, Whittaker W, half powers.

All branch choices are principal (arg in (-pi, pi]).  The Whittaker function
is evaluated along two independent routes: a double-exponential quadrature of
the classical integral representation (with the decaying exponential e^{-u};
the growing variant sometimes seen in print diverges and is treated as an
erratum), and a confluent-second-solution construction used as the
cross-check oracle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class PoleError(ValueError):
    pass


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class PrecisionBudget:
    target: float = 1e-10
    max_terms: int = 4000
    max_nodes: int = 4096

    def __post_init__(self):
        if self.target <= 2.3e-16:
            raise ValueError("target below machine epsilon")
        if self.max_terms <= 0 or self.max_nodes <= 0:
            raise ValueError("caps must be positive")


DEFAULT_BUDGET = PrecisionBudget()

# Lanczos coefficients, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(z: complex) -> complex:
    """Gamma(z) by a fixed-coefficient rational approximation plus reflection."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise PoleError(f"gamma pole at {z}")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return math.pi / (cmath.sin(math.pi * z) * gamma(1.0 - z))
    z -= 1.0
    x = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def half_power(base: complex, l: float) -> complex:
    """Principal branch of base^(l/2)."""
    base = complex(base)
    if base == 0:
        raise DomainError("half_power of zero base")
    return cmath.exp(0.5 * l * (math.log(abs(base)) + 1j * cmath.phase(base)))


HYP2F1_RADIUS = 0.8


def hyp2f1(a: complex, b: complex, c: complex, z: complex,
           budget: PrecisionBudget = DEFAULT_BUDGET) -> complex:
    """Gauss hypergeometric series, capped at |z| <= 0.8 by contract.

    The only arguments needed downstream are (1 +- i u)/2 with |u| < 0.8,
    so no continuation transformations are implemented.
    """
    z = complex(z)
    if abs(z) > HYP2F1_RADIUS + 1e-12:
        raise DomainError(f"|z| = {abs(z):.3f} outside the series domain (<= {HYP2F1_RADIUS})")
    c = complex(c)
    if c.imag == 0.0 and c.real <= 0.0 and c.real == int(c.real):
        raise PoleError(f"third parameter {c} is a non-positive integer")
    total = term = 1.0 + 0j
    k = 0
    az = abs(z)
    while k < budget.max_terms:
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        k += 1
        # once the term ratio is below |z| + margin the tail is geometric
        if abs(term) <= 0.25 * budget.target * max(1.0, abs(total)):
            ratio = abs((a + k) * (b + k) / ((c + k) * (k + 1))) * az
            if ratio < 0.95:
                tail = abs(term) * ratio / (1.0 - ratio)
                if tail <= budget.target * max(1.0, abs(total)):
                    return total
    raise DomainError("2F1 series did not meet the tail target within max_terms")


# ---------------------------------------------------------------------------
# double-exponential quadrature on (0, inf)

@lru_cache(maxsize=8)
def _exp_sinh_nodes(h: float, tmin: float = -3.9, tmax: float = 5.3):
    t = np.arange(tmin, tmax + h / 2, h)
    u = np.exp(t - np.exp(-t))
    w = h * u * (1.0 + np.exp(-t))
    return u, w


def quad_zero_inf(f, target: float = 1e-12):
    """Integrate f over (0, inf) on exp-sinh grids, refining until stable.

    Returns (value, error_estimate).  Suited to integrands with integrable
    endpoint behaviour at 0 and (super)exponential decay at infinity.
    """
    prev = None
    val = 0j
    for h in (0.25, 0.125, 0.0625, 0.03125):
        u, w = _exp_sinh_nodes(h)
        val = np.sum(f(u) * w)
        if prev is not None and abs(val - prev) <= target * max(1.0, abs(val)):
            return val, abs(val - prev)
        prev = val
    return val, abs(val - prev)


# ---------------------------------------------------------------------------
# Whittaker W

def _whittaker_integral_raw(a: complex, b: complex, z) -> complex | np.ndarray:
    """Quadrature of e^{-z/2} z^a / Gamma(b-a+1/2) * int_0^inf u^{b-a-1/2} (1+u/z)^{a+b-1/2} e^{-u} du.

    Valid for Re(b - a + 1/2) > 0; z real positive (scalar or array).
    """
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(zs <= 0):
        raise DomainError("integral route needs z > 0")
    p = b - a - 0.5
    q = a + b - 0.5
    u, wts = _exp_sinh_nodes(0.0625)
    # (nodes,) x (z,) broadcast; all bases are positive reals
    lu = np.log(u)
    base = 1.0 + u[:, None] / zs[None, :]
    integ = np.exp(p * lu[:, None] - u[:, None] + q * np.log(base))
    vals = np.tensordot(wts, integ, axes=(0, 0))
    front = np.exp(-zs / 2.0 + a * np.log(zs)) / gamma(b - a + 0.5)
    out = front * vals
    return out if np.ndim(z) else complex(out[0])


def whittaker_w(a: complex, b: complex, z: float,
                budget: PrecisionBudget = DEFAULT_BUDGET,
                route: str = "integral") -> complex:
    """W_{a,b}(z) for real z > 0.

    route="integral": double-exponential quadrature of the classical
    representation, using the W_{a,b} = W_{a,-b} symmetry as a fallback when
    the convergence condition Re(b - a + 1/2) > 0 fails for b but holds
    for -b.  route="series": independent confluent construction (mpmath),
    kept as the second leg of the two-route agreement checks.
    """
    if z <= 0:
        raise DomainError("whittaker_w needs z > 0")
    a = complex(a)
    b = complex(b)
    if route == "series":
        import mpmath
        return complex(mpmath.whitw(a, b, z))
    if route != "integral":
        raise ValueError(f"unknown route {route!r}")
    if (b - a + 0.5).real > 0:
        return _whittaker_integral_raw(a, b, z)
    if (-b - a + 0.5).real > 0:
        return _whittaker_integral_raw(a, -b, z)
    raise DomainError("integral route convergence condition fails for both +-b")


def whittaker_w_grid(a: complex, b: complex, zs: np.ndarray) -> np.ndarray:
    """Vectorised integral-route W_{a,b} over an array of positive reals."""
    a = complex(a)
    b = complex(b)
    if (b - a + 0.5).real <= 0:
        if (-b - a + 0.5).real <= 0:
            raise DomainError("integral route convergence condition fails for both +-b")
        b = -b
    return np.asarray(_whittaker_integral_raw(a, b, np.asarray(zs, dtype=float)))


@lru_cache(maxsize=65536)
def whittaker_w_cached(a: complex, b: complex, z: float) -> complex:
    return whittaker_w(a, b, z)


# ---------------------------------------------------------------------------
# vector variants over arrays of the argument/parameters (same formulas)

def gamma_vec(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    refl = z.real < 0.5
    zz = np.where(refl, 1.0 - z, z) - 1.0
    x = np.full_like(zz, _LANCZOS[0])
    for i, c in enumerate(_LANCZOS[1:], start=1):
        x = x + c / (zz + i)
    t = zz + _LANCZOS_G + 0.5
    g = math.sqrt(2.0 * math.pi) * t ** (zz + 0.5) * np.exp(-t) * x
    out[~refl] = g[~refl]
    if np.any(refl):
        out[refl] = math.pi / (np.sin(math.pi * z[refl]) * g[refl])
    return out


def hyp2f1_vec(a, b, c, z: complex, n_terms: int = 400,
               target: float = 1e-12) -> np.ndarray:
    """Series 2F1 with array parameters and a fixed scalar z, |z| <= 0.8."""
    if abs(z) > HYP2F1_RADIUS + 1e-12:
        raise DomainError("|z| outside the series domain")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    total = np.ones(np.broadcast(a, b, c).shape, dtype=complex)
    term = np.ones_like(total)
    for k in range(n_terms):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total = total + term
        if k > 4 and np.max(np.abs(term)) <= target * max(1.0, float(np.max(np.abs(total)))):
            return total
    raise DomainError("vector 2F1 did not converge within n_terms")


# ---------------------------------------------------------------------------
# oscillatory Mellin quadrature (composite quadratic Filon)

def mellin_filon(p: np.ndarray, v0: float, h: float, s) -> np.ndarray:
    """integral of p(v) e^{s v} dv over the uniform grid v0 + k h, vectorised
    over s.  p must have an odd number of samples; each node pair is fitted
    by a quadratic, and the exponential moments are integrated exactly, so
    the accuracy does not degrade as |Im s| grows.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    p = np.asarray(p, dtype=complex)
    n = len(p)
    if n % 2 != 1 or n < 3:
        raise ValueError("need an odd number of samples >= 3")
    beta = s * h
    if np.max(np.abs(beta)) > 0.8:
        raise ValueError("grid too coarse for this s range")
    m0, m1, m2 = _osc_moments(beta)
    w0 = (m2 - 3 * m1 + 2 * m0) / 2
    w1 = -(m2 - 2 * m1)
    w2 = (m2 - m1) / 2
    mseg = np.arange((n - 1) // 2)
    ebase = np.exp(np.outer(s, v0 + 2 * h * mseg))
    seg = (np.outer(w0, p[0:-2:2]) + np.outer(w1, p[1::2]) + np.outer(w2, p[2::2]))
    return h * np.sum(ebase * seg, axis=1)


def _osc_moments(beta: np.ndarray):
    """int_0^2 tau^k e^{beta tau} dtau for k = 0, 1, 2 by series in beta."""
    outs = []
    for k in range(3):
        tot = np.zeros_like(beta)
        coef = np.ones_like(beta)
        for m in range(40):
            tot = tot + coef * (2.0 ** (k + m + 1)) / (k + m + 1)
            coef = coef * beta / (m + 1)
        outs.append(tot)
    return outs
