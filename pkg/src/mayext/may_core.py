"""Trigraded F_p algebra underlying the first May term at an odd prime.

For p odd and q = 2(p-1) the algebra is

    E(h[i,j] : i > 0, j >= 0)  (x)  P(b[i,j] : i > 0, j >= 0)  (x)  P(a[i] : i >= 0)

with tridegrees (filtration s, internal degree t, weight u)

    h[i,j]: (1, 2(p^i - 1)p^j,     2i - 1)
    b[i,j]: (2, 2(p^i - 1)p^(j+1), p(2i - 1))
    a[i]:   (1, 2p^i - 1,          2i + 1)

Monomials keep their factors in a fixed canonical order: a's by index,
then h's lexicographically, then b's lexicographically.  Commutation
signs use stem parity ((t - s) mod 2): the h's are odd, the a's and b's
even.  Filtration parity would make the a's odd as well, and that
convention is not compatible with the degree-(1,0,-1) differential
squaring to zero, so it is not used anywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Union


class MayextError(Exception):
    """Base for all package errors."""


class InvalidParams(MayextError):
    """A parameter is outside the domain an operation supports."""


class ParseError(MayextError):
    """Input text does not conform to the expected grammar."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeContext:
    """An odd prime p together with q = 2(p - 1)."""

    p: int
    q: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 3 or not _is_prime(self.p):
            raise InvalidParams(f"p must be an odd prime, got {self.p!r}")
        object.__setattr__(self, "q", 2 * (self.p - 1))


class TriDegree(NamedTuple):
    s: int
    t: int
    u: int

    def __add__(self, other):
        return TriDegree(self.s + other[0], self.t + other[1], self.u + other[2])

    def text(self) -> str:
        return f"({self.s},{self.t},{self.u})"


KIND_A, KIND_H, KIND_B = 0, 1, 2
_KIND_LETTER = {KIND_A: "a", KIND_H: "h", KIND_B: "b"}


@dataclass(frozen=True, order=True)
class Generator:
    """A single algebra generator; ordering is the canonical factor order."""

    kind: int
    i: int
    j: int = 0

    def __post_init__(self):
        if self.kind not in (KIND_A, KIND_H, KIND_B):
            raise InvalidParams(f"unknown generator kind {self.kind!r}")
        if self.kind == KIND_A:
            if self.i < 0 or self.j != 0:
                raise InvalidParams(f"a[i] needs i >= 0, got i={self.i}, j={self.j}")
        else:
            if self.i < 1 or self.j < 0:
                raise InvalidParams(
                    f"{_KIND_LETTER[self.kind]}[i,j] needs i >= 1, j >= 0, "
                    f"got i={self.i}, j={self.j}"
                )

    @property
    def is_odd(self) -> bool:
        return self.kind == KIND_H

    def tridegree(self, ctx: PrimeContext) -> TriDegree:
        p = ctx.p
        if self.kind == KIND_A:
            return TriDegree(1, 2 * p**self.i - 1, 2 * self.i + 1)
        if self.kind == KIND_H:
            return TriDegree(1, 2 * (p**self.i - 1) * p**self.j, 2 * self.i - 1)
        return TriDegree(2, 2 * (p**self.i - 1) * p ** (self.j + 1), p * (2 * self.i - 1))

    def text(self) -> str:
        if self.kind == KIND_A:
            return f"a{self.i}"
        return f"{_KIND_LETTER[self.kind]}[{self.i},{self.j}]"


def a(i: int) -> Generator:
    return Generator(KIND_A, i)


def h(i: int, j: int) -> Generator:
    return Generator(KIND_H, i, j)


def b(i: int, j: int) -> Generator:
    return Generator(KIND_B, i, j)


Factors = tuple  # tuple[tuple[Generator, int], ...] in canonical order


@dataclass(frozen=True)
class Monomial:
    """A scalar multiple of a product of generator powers in canonical order."""

    factors: Factors
    coeff: int = 1

    @staticmethod
    def build(pairs: Iterable[tuple[Generator, int]], coeff: int = 1) -> "Monomial":
        merged: dict[Generator, int] = {}
        for g, e in pairs:
            if e < 0:
                raise InvalidParams(f"negative exponent on {g.text()}")
            if e:
                merged[g] = merged.get(g, 0) + e
        for g, e in merged.items():
            if g.is_odd and e > 1:
                raise InvalidParams(f"{g.text()} is exterior; exponent {e} is not allowed")
        factors = tuple(sorted(merged.items(), key=lambda fe: fe[0]))
        return Monomial(factors, coeff)

    @staticmethod
    def one(coeff: int = 1) -> "Monomial":
        return Monomial((), coeff)

    @property
    def key(self) -> Factors:
        return self.factors

    def tridegree(self, ctx: PrimeContext) -> TriDegree:
        total = TriDegree(0, 0, 0)
        for g, e in self.factors:
            d = g.tridegree(ctx)
            total = total + TriDegree(d.s * e, d.t * e, d.u * e)
        return total

    @property
    def odd_part(self) -> tuple[Generator, ...]:
        return tuple(g for g, _ in self.factors if g.is_odd)

    @property
    def parity(self) -> int:
        return len(self.odd_part) & 1

    def scaled(self, c: int) -> "Monomial":
        return Monomial(self.factors, self.coeff * c)

    def text(self) -> str:
        parts = []
        if self.coeff != 1 or not self.factors:
            parts.append(str(self.coeff))
        for g, e in self.factors:
            parts.append(g.text() if e == 1 else f"{g.text()}^{e}")
        return " ".join(parts)


class Element:
    """A finite F_p linear combination of canonical monomials."""

    __slots__ = ("p", "_terms")

    def __init__(self, p: int, terms: dict[Factors, int] | None = None):
        self.p = p
        self._terms: dict[Factors, int] = {}
        if terms:
            for key, c in terms.items():
                c %= p
                if c:
                    self._terms[key] = c

    @staticmethod
    def zero(ctx: PrimeContext) -> "Element":
        return Element(ctx.p)

    @staticmethod
    def from_monomials(ctx: PrimeContext, monomials: Iterable[Monomial]) -> "Element":
        out = Element(ctx.p)
        for m in monomials:
            out._add_term(m.factors, m.coeff)
        return out

    def _add_term(self, key: Factors, coeff: int) -> None:
        c = (self._terms.get(key, 0) + coeff) % self.p
        if c:
            self._terms[key] = c
        else:
            self._terms.pop(key, None)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def monomials(self) -> Iterator[Monomial]:
        for key in sorted(self._terms):
            yield Monomial(key, self._terms[key])

    def coefficient(self, key: Factors) -> int:
        return self._terms.get(key, 0)

    def keys(self) -> Iterator[Factors]:
        return iter(self._terms)

    def __add__(self, other: "Element") -> "Element":
        if self.p != other.p:
            raise InvalidParams("cannot add elements over different primes")
        out = Element(self.p, dict(self._terms))
        for key, c in other._terms.items():
            out._add_term(key, c)
        return out

    def scaled(self, c: int) -> "Element":
        return Element(self.p, {key: v * c for key, v in self._terms.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Element)
            and self.p == other.p
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.p, tuple(sorted(self._terms.items()))))

    def tridegree(self, ctx: PrimeContext) -> TriDegree | None:
        degrees = {Monomial(key).tridegree(ctx) for key in self._terms}
        if len(degrees) != 1:
            return None
        return degrees.pop()

    def text(self) -> str:
        if self.is_zero:
            return "0"
        return " + ".join(m.text() for m in self.monomials())

    def __repr__(self):
        return f"Element({self.text()})"


MulOperand = Union[Generator, Monomial, Element]


def _as_element(x: MulOperand, ctx: PrimeContext) -> Element:
    if isinstance(x, Element):
        if x.p != ctx.p:
            raise InvalidParams("element prime does not match context")
        return x
    if isinstance(x, Generator):
        x = Monomial.build([(x, 1)])
    if isinstance(x, Monomial):
        return Element.from_monomials(ctx, [x])
    raise InvalidParams(f"cannot interpret {x!r} as an algebra element")


def tridegree(x: MulOperand, ctx: PrimeContext) -> TriDegree:
    """Tridegree of a generator, monomial, or homogeneous element."""
    if isinstance(x, Generator):
        return x.tridegree(ctx)
    if isinstance(x, Monomial):
        return x.tridegree(ctx)
    if isinstance(x, Element):
        d = x.tridegree(ctx)
        if d is None:
            raise InvalidParams("element is not homogeneous")
        return d
    raise InvalidParams(f"cannot take the tridegree of {x!r}")


def _mul_monomial(m1: Monomial, m2: Monomial, p: int) -> Monomial | None:
    odd1 = m1.odd_part
    odd2 = m2.odd_part
    if odd1 and odd2 and set(odd1) & set(odd2):
        return None
    inversions = 0
    for g2 in odd2:
        inversions += sum(1 for g1 in odd1 if g1 > g2)
    coeff = m1.coeff * m2.coeff * (-1) ** (inversions & 1) % p
    if coeff == 0:
        return None
    merged: dict[Generator, int] = dict(m1.factors)
    for g, e in m2.factors:
        merged[g] = merged.get(g, 0) + e
    factors = tuple(sorted(merged.items(), key=lambda fe: fe[0]))
    return Monomial(factors, coeff)


def multiply(x: MulOperand, y: MulOperand, ctx: PrimeContext) -> Element:
    """Product in the algebra; the sign counts transpositions of odd factors."""
    ex = _as_element(x, ctx)
    ey = _as_element(y, ctx)
    out = Element(ctx.p)
    for k1, c1 in ex._terms.items():
        m1 = Monomial(k1, c1)
        for k2, c2 in ey._terms.items():
            m = _mul_monomial(m1, Monomial(k2, c2), ctx.p)
            if m is not None:
                out._add_term(m.factors, m.coeff)
    return out


def product(factors: Iterable[MulOperand], ctx: PrimeContext) -> Element:
    out = _as_element(Monomial.one(), ctx)
    for f in factors:
        out = multiply(out, f, ctx)
    return out


def generators_bounded(ctx: PrimeContext, t_max: int) -> list[Generator]:
    """All generators of internal degree <= t_max, in canonical order."""
    p = ctx.p
    gens: list[Generator] = []
    i = 0
    while 2 * p**i - 1 <= t_max:
        gens.append(a(i))
        i += 1
    for kind, shift in ((KIND_H, 0), (KIND_B, 1)):
        i = 1
        while 2 * (p**i - 1) * p**shift <= t_max:
            j = 0
            while 2 * (p**i - 1) * p ** (j + shift) <= t_max:
                gens.append(Generator(kind, i, j))
                j += 1
            i += 1
    return sorted(gens)


def enumerate_basis(
    ctx: PrimeContext, s: int, t: int, _reverse: bool = False
) -> list[Monomial]:
    """All canonical basis monomials of bidegree (s, t), any weight.

    Exponent multisets are enumerated by depth-first search over the
    bounded generator list with exact residual pruning on both the
    remaining filtration and the remaining internal degree.
    """
    if s < 0 or t < 0:
        return []
    if s == 0:
        return [Monomial.one()] if t == 0 else []
    if t < s:
        return []
    gens = generators_bounded(ctx, t)
    if _reverse:
        gens = list(reversed(gens))
    degrees = [g.tridegree(ctx) for g in gens]
    n = len(gens)
    # max_rate[k] = max over gens[k:] of 2 * t_g / s_g, exact since s_g in {1, 2}
    max_rate = [0] * (n + 1)
    for k in range(n - 1, -1, -1):
        rate = 2 * degrees[k].t // degrees[k].s
        max_rate[k] = max(rate, max_rate[k + 1])

    found: list[Factors] = []
    stack: list[tuple[Generator, int]] = []

    def walk(k: int, s_rem: int, t_rem: int) -> None:
        if s_rem == 0:
            if t_rem == 0:
                found.append(tuple(stack))
            return
        if k == n or t_rem < s_rem or 2 * t_rem > s_rem * max_rate[k]:
            return
        g, d = gens[k], degrees[k]
        e_max = min(s_rem // d.s, t_rem // d.t)
        if g.is_odd:
            e_max = min(e_max, 1)
        for e in range(e_max + 1):
            if e:
                stack.append((g, e))
            walk(k + 1, s_rem - e * d.s, t_rem - e * d.t)
            if e:
                stack.pop()

    walk(0, s, t)
    monomials = [Monomial.build(fs) for fs in found]
    monomials.sort(key=lambda m: m.factors)
    return monomials


def degree_residue(g: MulOperand, ctx: PrimeContext, modulus: int) -> int:
    """Internal degree of g reduced mod modulus."""
    if modulus < 1:
        raise InvalidParams(f"modulus must be >= 1, got {modulus}")
    return tridegree(g, ctx).t % modulus


_TOKEN = re.compile(
    r"\s*(?:(?P<int>-?\d+)"
    r"|(?P<a>a(?P<ai>\d+))"
    r"|(?P<hb>[hb])\[(?P<i>\d+),(?P<j>\d+)\])"
    r"(?:\^(?P<exp>\d+))?\s*"
)


def parse_monomial(text: str, ctx: PrimeContext) -> Monomial:
    """Parse the text form, e.g. ``2 a0^2 h[1,0] b[1,3]``."""
    pos = 0
    coeff = 1
    saw_coeff = False
    pairs: list[tuple[Generator, int]] = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"bad monomial syntax near {text[pos:pos+12]!r}", column=pos)
        if m.group("int") is not None:
            if saw_coeff or pairs:
                raise ParseError("coefficient must come first", column=pos)
            if m.group("exp") is not None:
                raise ParseError("coefficient cannot carry an exponent", column=pos)
            coeff = int(m.group("int"))
            saw_coeff = True
        else:
            exp = int(m.group("exp")) if m.group("exp") else 1
            if m.group("a"):
                gen = a(int(m.group("ai")))
            else:
                kind = KIND_H if m.group("hb") == "h" else KIND_B
                gen = Generator(kind, int(m.group("i")), int(m.group("j")))
            pairs.append((gen, exp))
        pos = m.end()
    try:
        mono = Monomial.build(pairs, coeff % ctx.p)
    except InvalidParams as exc:
        raise ParseError(str(exc)) from exc
    if mono.coeff == 0:
        raise ParseError("coefficient is zero mod p")
    return mono


def parse_element(text: str, ctx: PrimeContext) -> Element:
    text = text.strip()
    if text == "0":
        return Element.zero(ctx)
    return Element.from_monomials(
        ctx, (parse_monomial(part, ctx) for part in text.split("+"))
    )
