"""Gamma0(4N) combinatorics: membership, cusps, scaling matrices, cosets.

Cusp representatives are normalised to p/q with q > 0 dividing the level
(infinity is the q = level class and is displayed as such), ordered with
infinity first, zero last, and the middle cusps by smallest q then smallest
non-negative p.  Widths are found by direct search over translations rather
than a closed formula, which keeps the stabiliser conjugation property an
exact integer statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from .arith import euler_phi, kronecker


@dataclass(frozen=True)
class ModularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant must be 1: {self}")

    def __matmul__(self, o: "ModularMatrix") -> "ModularMatrix":
        return ModularMatrix(
            self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d,
        )

    def inv(self) -> "ModularMatrix":
        return ModularMatrix(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "ModularMatrix":
        return ModularMatrix(-self.a, -self.b, -self.c, -self.d)

    def in_gamma0(self, level: int) -> bool:
        return self.c % level == 0

    def apply(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def rows(self):
        return (self.a, self.b), (self.c, self.d)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)


IDENTITY = ModularMatrix(1, 0, 0, 1)
T = ModularMatrix(1, 1, 0, 1)
S = ModularMatrix(0, -1, 1, 0)


def _egcd(a: int, b: int):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def completion_matrix(p: int, q: int) -> ModularMatrix:
    """Deterministic A in SL2(Z) with A(inf) = p/q (A = I for infinity)."""
    if q == 0:
        return IDENTITY
    if p == 0:
        return ModularMatrix(0, -1, 1, 0)
    g, x, y = _egcd(p, q)
    if g != 1:
        raise ValueError(f"{p}/{q} not in lowest terms")
    # p*x + q*y = 1  ->  A = (p, -y; q, x); shift the free column to minimise |b|
    b0, d0 = -y, x
    k = round(Fraction(b0, p))
    return ModularMatrix(p, b0 - k * p, q, d0 - k * q)


@dataclass(frozen=True)
class Cusp:
    p: int              # infinity is (1, 0)
    q: int
    index: int          # position in the fixed full-cusp ordering, 1-based
    singular: bool
    width: int
    level: int

    @property
    def is_infinity(self) -> bool:
        return self.q == 0

    @property
    def is_zero(self) -> bool:
        return (self.p, self.q) == (0, 1)

    def label(self) -> str:
        if self.is_infinity:
            return "inf"
        if self.q == 1:
            return str(self.p)
        return f"{self.p}/{self.q}"

    def completion(self) -> ModularMatrix:
        return completion_matrix(self.p, self.q)

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "index": self.index,
                "singular": self.singular, "width": self.width}


def _width(p: int, q: int, level: int) -> int:
    A = completion_matrix(p, q)
    Ainv = A.inv()
    for h in range(1, level + 1):
        g = A @ ModularMatrix(1, h, 0, 1) @ Ainv
        if g.c % level == 0:
            return h
    raise ArithmeticError("width search failed")


def stabilizer_generator(cusp: Cusp) -> ModularMatrix:
    """The positive-translation generator of the cusp stabiliser in Gamma0(level)."""
    A = cusp.completion()
    return A @ ModularMatrix(1, cusp.width, 0, 1) @ A.inv()


def _nu_theta_restricted(m: ModularMatrix) -> complex:
    # weight-1/2 theta multiplier; the singular flag is conjugation invariant,
    # so one weight class decides it for both.
    v = complex(kronecker(m.c, m.d))
    if m.d % 4 == 3:
        v *= -1j
    return v


@lru_cache(maxsize=None)
def cusps(level: int) -> tuple[Cusp, ...]:
    """Complete inequivalent cusp list for Gamma0(level), level = 4N."""
    if level % 4 != 0 or level <= 0:
        raise ValueError(f"level must be a positive multiple of 4, got {level}")
    raw: list[tuple[int, int]] = []
    for q in sorted(d for d in range(1, level + 1) if level % d == 0):
        m = gcd(q, level // q)
        for p0 in range(m):
            if gcd(p0, m) != 1:
                continue
            p = next(p0 + k * m for k in range(q + m + 2) if gcd(p0 + k * m, q) == 1)
            raw.append((p, q))
    # order: infinity (q = level class) first, zero (0/1) last, middle by (q, p)
    inf_rep = next(r for r in raw if r[1] == level)
    zero_rep = (0, 1)
    middle = sorted((r for r in raw if r != inf_rep and r != zero_rep),
                    key=lambda r: (r[1], r[0]))
    ordered = [(1, 0)] + middle + [zero_rep]
    out = []
    for idx, (p, q) in enumerate(ordered, start=1):
        pq = (1, 0) if q == 0 else (p, q)
        h = _width(*pq, level) if q != 0 else 1
        A = completion_matrix(*pq)
        gamma_a = A @ ModularMatrix(1, h, 0, 1) @ A.inv()
        assert gamma_a.in_gamma0(level)
        singular = abs(_nu_theta_restricted(gamma_a) - 1) < 1e-12
        out.append(Cusp(pq[0], pq[1], idx, singular, h, level))
    expected = sum(euler_phi(gcd(d, level // d)) for d in range(1, level + 1) if level % d == 0)
    assert len(out) == expected
    return tuple(out)


def singular_cusps(level: int) -> tuple[Cusp, ...]:
    return tuple(c for c in cusps(level) if c.singular)


def reduce_cusp(p: int, q: int, level: int) -> tuple[int, int]:
    """Canonical (p, q) with q | level for the Gamma0(level)-class of p/q."""
    if q == 0:
        return (1, 0)
    if q < 0:
        p, q = -p, -q
    g0 = gcd(abs(p), q)
    p, q = p // g0, q // g0
    g = gcd(q, level)
    if g == level:
        return (1, 0)
    # build gamma in Gamma0(level) sending (p; q) to (p'; g): its bottom row
    # (level*mu, delta) must satisfy level*mu*p + delta*q = g
    n_over = level // g
    gg, x0, y0 = _egcd(n_over * p, q // g)
    assert gg == 1
    for t in range(0, 4 * level + 2):
        for tt in (t, -t):
            mu = x0 + tt * (q // g)
            delta = y0 - tt * (n_over * p)
            if gcd(level * mu, delta) != 1:
                continue
            _, alpha, beta = _egcd(delta, -level * mu)
            gamma_ = ModularMatrix(alpha, beta, level * mu, delta)
            assert gamma_.c * p + gamma_.d * q == g
            pp = alpha * p + beta * q
            m = gcd(g, level // g)
            pp_mod = pp % m if m > 1 else 0
            # coprime-to-g representative of the class pp mod m
            p_canon = next(pp_mod + k * m for k in range(g + m + 2)
                           if gcd(pp_mod + k * m, g) == 1)
            return (p_canon, g)
    raise ArithmeticError("cusp reduction failed")


def cusps_equivalent(p1: int, q1: int, p2: int, q2: int, level: int) -> bool:
    return reduce_cusp(p1, q1, level) == reduce_cusp(p2, q2, level)


def find_cusp(level: int, p: int, q: int) -> Cusp:
    """The listed cusp equivalent to p/q."""
    target = reduce_cusp(p, q, level)
    for c in cusps(level):
        rep = (1, 0) if c.is_infinity else (c.p, c.q)
        canon = (1, 0) if c.is_infinity else reduce_cusp(*rep, level)
        if canon == target:
            return c
    raise ValueError(f"no cusp class found for {p}/{q} at level {level}")


@dataclass(frozen=True)
class ScalingMatrix:
    """sigma_a = A diag(sqrt(h), 1/sqrt(h)): maps infinity to the cusp and
    conjugates its stabiliser to the unit translation, exactly."""
    cusp: Cusp
    completion: ModularMatrix

    @property
    def width(self) -> int:
        return self.cusp.width

    def as_array(self) -> np.ndarray:
        s = np.sqrt(float(self.width))
        A = self.completion.as_array()
        return A @ np.diag([s, 1.0 / s])

    def inv_array(self) -> np.ndarray:
        s = np.sqrt(float(self.width))
        Ai = self.completion.inv().as_array()
        return np.diag([1.0 / s, s]) @ Ai

    def conjugate_exact(self, g: ModularMatrix) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """sigma^{-1} g sigma as exact rationals (entries of A^{-1} g A scaled by h)."""
        C = self.completion.inv() @ g @ self.completion
        h = self.width
        return (Fraction(C.a), Fraction(C.b, h), Fraction(C.c * h), Fraction(C.d))


def scaling_matrix(cusp: Cusp, level: int) -> ScalingMatrix:
    if cusp.level != level:
        raise ValueError("cusp does not belong to this level")
    if cusp.is_infinity:
        return ScalingMatrix(cusp, IDENTITY)
    if cusp.is_zero:
        # completion (0, -1; 1, 0) with width = level gives the Fricke matrix
        return ScalingMatrix(cusp, ModularMatrix(0, -1, 1, 0))
    return ScalingMatrix(cusp, cusp.completion())


def fricke_array(level: int) -> np.ndarray:
    r = np.sqrt(float(level))
    return np.array([[0.0, -1.0 / r], [r, 0.0]])


def coset_reps(level: int, cusp: Cusp, c_max: int) -> list[ModularMatrix]:
    """Stabiliser-inequivalent representatives gamma of Gamma_a \\ Gamma0(level)
    whose sigma_a^{-1} gamma has lower-left entry of absolute value <= c_max,
    folded under right translation (one representative per d mod c class).
    """
    if c_max < 0:
        raise ValueError("c_max must be >= 0")
    sig = scaling_matrix(cusp, level)
    A = sig.completion
    h = sig.width
    sqrt_h = np.sqrt(float(h))
    out: list[ModularMatrix] = []
    seen: set[tuple] = set()

    def push(g: ModularMatrix):
        # canonical coset key: bottom row of A^{-1} g with sign fold,
        # plus the top-left residue mod (c~ * h) that separates completion classes
        M = A.inv() @ g
        ct, dt = M.c, M.d
        x = M.a
        if ct < 0 or (ct == 0 and dt < 0):
            ct, dt, x = -ct, -dt, -x
        key = (ct, dt, x % (ct * h) if ct else 0)
        if key in seen:
            return
        seen.add(key)
        out.append(g)

    # the c~ = 0 class is +-A T^y, which lies in Gamma0(level) only at infinity
    if cusp.is_infinity:
        push(IDENTITY)
    ctmax = int(np.floor(c_max / sqrt_h + 1e-9))
    for ct in range(1, ctmax + 1):
        for dt in range(ct):
            if gcd(ct, dt) != 1:
                continue
            # completions M = (x, y; ct, dt): x = x0 + t*ct, membership is on gamma = A M
            g0, x0, y0 = _egcd(dt, -ct)
            if g0 != 1:
                continue
            for t in range(level * h):
                x = x0 + t * ct
                y = (x * dt - 1) // ct if ct else y0
                if x * dt - y * ct != 1:
                    continue
                g = A @ ModularMatrix(x, y, ct, dt)
                if g.in_gamma0(level):
                    push(g)
    return out


def left_equivalent(g1: ModularMatrix, g2: ModularMatrix, cusp: Cusp) -> bool:
    """True when g1 and g2 lie in the same left coset of the cusp stabiliser."""
    delta = g1 @ g2.inv()
    A = cusp.completion() if not cusp.is_zero else ModularMatrix(0, -1, 1, 0)
    C = A.inv() @ delta @ A
    for M in (C, -C):
        if M.c == 0 and M.a == 1 and M.d == 1 and M.b % cusp.width == 0:
            return True
    return False


def generators(level: int, height: int) -> list[ModularMatrix]:
    """The invariance test family: unit translation plus matrices
    (t, m; level*r, D) of determinant one with D odd, D <= height.

    r is kept at 1: it only rescales the lower-left entry, while the odd
    bottom-right residue D is the direction the invariance checks must
    sweep, and small entries keep the mapped points inside the region where
    truncated expansions represent the functions being compared.
    """
    out = [T]
    seen = {(T.a, T.b, T.c, T.d)}
    c = level
    for D in range(1, height + 1, 2):
        if gcd(D, c) != 1:
            continue
        t = pow(D, -1, c) if c > 1 else 1
        m = (D * t - 1) // c
        g = ModularMatrix(t, m, c, D)
        key = (g.a, g.b, g.c, g.d)
        if key not in seen:
            seen.add(key)
            out.append(g)
    return out
