"""Exact integer and Dirichlet character arithmetic.

Characters mod D are stored as explicit tables of exact roots of unity,
each value recorded as a fraction of a full turn, so products, Gauss sums
and orthogonality relations stay exact until the final rounding to a
complex float.  D stays small at desk scale (< 10^3), so table-based
construction via per-prime-power generators is both simple and fast.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), with the standard extensions at 2, -1, 0."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    if n < 0:
        return (-1 if a < 0 else 1) * kronecker(a, -n)
    res = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            res = -res
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        a, n = n, a  # reciprocity step; both odd positive here
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a %= n
    return res if n == 1 else 0


def _factorize(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n: int) -> int:
    out = 1
    for p, e in _factorize(n):
        out *= (p - 1) * p ** (e - 1)
    return out


def _primitive_root(q: int, phi: int) -> int:
    # q an odd prime power; brute force is fine at desk scale
    fac = [p for p, _ in _factorize(phi)]
    for g in range(2, q):
        if gcd(g, q) != 1:
            continue
        if all(pow(g, phi // p, q) != 1 for p in fac):
            return g
    raise ArithmeticError(f"no primitive root mod {q}")


@lru_cache(maxsize=None)
def _unit_group_generators(D: int) -> tuple[tuple[int, int], ...]:
    """Generators of (Z/DZ)^x as CRT lifts, returned as (generator, order) pairs."""
    if D == 1:
        return ()
    gens: list[tuple[int, int]] = []
    fac = _factorize(D)
    for p, e in fac:
        q = p**e
        rest = D // q
        def lift(g: int) -> int:
            # g mod q, 1 mod rest
            if rest == 1:
                return g % D
            inv = pow(q, -1, rest)
            return (g + q * ((1 - g) * inv % rest)) % D
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                gens.append((lift(3), 2))
            else:
                gens.append((lift(q - 1), 2))          # the sign part
                gens.append((lift(5), 2 ** (e - 2)))   # the 5-part
        else:
            phi = (p - 1) * p ** (e - 1)
            gens.append((lift(_primitive_root(q, phi)), phi))
    return tuple(gens)


@lru_cache(maxsize=None)
def _unit_logs(D: int) -> dict[int, tuple[int, ...]]:
    """Discrete logs of every unit mod D on the generator system."""
    gens = _unit_group_generators(D)
    logs = {1 % D: tuple(0 for _ in gens)}
    # breadth-first products of generator powers
    units = [1 % D]
    for idx, (g, order) in enumerate(gens):
        new_units = []
        for u in units:
            x = u
            vec = logs[u]
            for k in range(1, order):
                x = x * g % D
                nv = vec[:idx] + (k,) + vec[idx + 1:]
                logs[x] = nv
                new_units.append(x)
        units.extend(new_units)
    return logs


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod D held as a table of exact turn fractions.

    ``turns[r]`` is t with chi(r) = exp(2*pi*i*t), defined exactly on the
    units mod D.  The modulus-1 character is the empty-table convention
    chi == 1 on every integer.
    """

    modulus: int
    turns: dict[int, Fraction] = field(compare=False)
    _key: tuple = field(init=False, compare=True, repr=False, default=None)

    def __post_init__(self):
        D = self.modulus
        if D < 1:
            raise ValueError("modulus must be >= 1")
        if D > 1:
            units = sorted(self.turns)
            if len(units) != euler_phi(D) or any(gcd(u, D) != 1 for u in units):
                raise ValueError("character table must cover exactly the units mod D")
            norm = {u: Fraction(t) % 1 for u, t in self.turns.items()}
            object.__setattr__(self, "turns", norm)
            if norm[1 % D] != 0:
                raise ValueError("chi(1) must be 1")
        object.__setattr__(
            self, "_key",
            (D, tuple(sorted((self.turns or {}).items()))),
        )

    def __hash__(self):
        return hash(self._key)

    def turn(self, n: int) -> Fraction | None:
        """Exact turn of chi(n), or None when gcd(n, D) > 1."""
        D = self.modulus
        if D == 1:
            return Fraction(0)
        n %= D
        if gcd(n, D) != 1:
            return None
        return self.turns[n]

    def __call__(self, n: int) -> complex:
        t = self.turn(n)
        if t is None:
            return 0j
        return _unit(t)

    @cached_property
    def is_principal(self) -> bool:
        return all(t == 0 for t in self.turns.values())

    @cached_property
    def conductor(self) -> int:
        """Smallest f | D such that chi factors through the units mod f."""
        D = self.modulus
        if D == 1:
            return 1
        for f in sorted(d for d in range(1, D + 1) if D % d == 0):
            if all(self.turns[a % D] == 0
                   for a in range(1, D + 1, f)
                   if gcd(a, D) == 1):
                return f
        return D

    @cached_property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.modulus != self.modulus:
            raise ValueError("pointwise product needs equal moduli")
        return DirichletCharacter(
            self.modulus,
            {u: self.turns[u] + other.turns[u] for u in self.turns},
        )

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, {u: -t for u, t in self.turns.items()})

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "values": [[u, t.numerator, t.denominator]
                       for u, t in sorted(self.turns.items())],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DirichletCharacter":
        return cls(obj["modulus"],
                   {int(u): Fraction(int(p), int(q)) for u, p, q in obj["values"]})


def _unit(turn: Fraction) -> complex:
    t = turn % 1
    # exact values on the axes keep the common cases clean
    if t == 0:
        return 1 + 0j
    if t == Fraction(1, 2):
        return -1 + 0j
    if t == Fraction(1, 4):
        return 1j
    if t == Fraction(3, 4):
        return -1j
    return cmath.exp(2j * cmath.pi * float(t))


def principal_character(D: int) -> DirichletCharacter:
    if D == 1:
        return DirichletCharacter(1, {})
    return DirichletCharacter(D, {u: Fraction(0) for u in _unit_logs(D)})


def enumerate_characters(D: int) -> list[DirichletCharacter]:
    """All phi(D) characters mod D, principal first, in a deterministic order."""
    if D < 1:
        raise ValueError("D must be >= 1")
    if D == 1:
        return [DirichletCharacter(1, {})]
    gens = _unit_group_generators(D)
    logs = _unit_logs(D)
    chars = []
    # exponent vector k_i on generator i of order n_i gives turn sum k_i x_i / n_i
    def rec(vec):
        if len(vec) == len(gens):
            table = {}
            for u, xs in logs.items():
                t = Fraction(0)
                for k, (_, order), x in zip(vec, gens, xs):
                    t += Fraction(k * x, order)
                table[u] = t % 1
            chars.append(DirichletCharacter(D, table))
            return
        _, order = gens[len(vec)]
        for k in range(order):
            rec(vec + (k,))
    rec(())
    chars.sort(key=lambda c: tuple(c.turns[u] for u in sorted(c.turns)))
    return chars


@dataclass(frozen=True)
class GaussSumValue:
    character: DirichletCharacter
    shift: int
    value: complex


def gauss_sum(chi: DirichletCharacter, n: int = 1) -> complex:
    """tau_n(chi) = sum over units m mod D of chi(m) e^{2 pi i m n / D}."""
    D = chi.modulus
    if D == 1:
        return 1 + 0j
    total = 0j
    for m, t in chi.turns.items():
        total += _unit(t + Fraction(m * n, D))
    return total


def epsilon_factor(D: int, l) -> complex:
    """The quartic sign attached to an odd twisting modulus D at weight class l."""
    if D % 2 == 0:
        raise ValueError("even modulus has no epsilon factor here")
    lc = weight_class(l)
    if D % 4 == 1:
        return 1 + 0j
    return -1j if lc == Fraction(1, 2) else 1j


def weight_class(l) -> Fraction:
    """Reduce a half-integral weight to its class mod 2, one of 1/2 or 3/2."""
    lf = Fraction(l).limit_denominator(64) if not isinstance(l, Fraction) else l
    if lf.denominator != 2:
        raise ValueError(f"weight must be half-integral, got {l}")
    lc = lf % 2
    if lc not in (Fraction(1, 2), Fraction(3, 2)):
        raise ValueError(f"weight class must be 1/2 or 3/2 mod 2, got {lc}")
    return lc


def dual_character(chi: DirichletCharacter) -> DirichletCharacter:
    """The twist partner r -> (r/D) * conj(chi(r)); an involution on odd moduli."""
    D = chi.modulus
    if D % 2 == 0:
        raise ValueError("dual character needs odd modulus")
    if D == 1:
        return chi
    table = {}
    for u, t in chi.turns.items():
        k = kronecker(u, D)
        table[u] = (-t + (Fraction(0) if k == 1 else Fraction(1, 2))) % 1
    return DirichletCharacter(D, table)
