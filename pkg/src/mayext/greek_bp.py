"""Degree-admissibility combinatorics for Greek-letter families.

Indexes are solved against internal-degree equations with exact integer
arithmetic; nothing here touches the trigraded complex except through
the named-class table used by the dictionary lookups.

Beta admissibility for beta[a,s,b,c] (the class beta_{ap^s/b,c+1} of
internal degree a p^s (p+1) q - b q) requires b >= 1, c >= 0, a >= 1
prime to p, and

    (i)   a = 1  implies  b <= p^s
    (ii)  p^c | b  and  b <= B(s-c)
    (iii) p^(c+1) | b  implies  b > B(s-c-1)

with B(k) = p^k + p^(k-1) - 1 for k >= 1, B(0) = 1, B(k<0) = 0.  The
strict flag switches (i) to the verbatim bound b <= s, which rejects
part of the standard second-periodicity lists; it exists only so the
discrepancy stays visible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .adams_certify import NamedClass, resolve_named
from .may_core import InvalidParams, MayextError, ParseError, PrimeContext


class NoDictionaryEntry(MayextError):
    """The index matches no pattern in the correspondence table."""


class UnknownFamily(MayextError):
    """No stem formula is registered under that family name."""


@dataclass(frozen=True)
class BetaIndex:
    a: int
    s: int
    b: int
    c: int = 0

    def __post_init__(self):
        if self.a < 1 or self.s < 0 or self.b < 1 or self.c < 0:
            raise InvalidParams(f"bad beta index {self!r}")

    def degree(self, ctx: PrimeContext) -> int:
        p, q = ctx.p, ctx.q
        return self.a * p**self.s * (p + 1) * q - self.b * q

    def text(self) -> str:
        return f"beta[{self.a},{self.s},{self.b},{self.c}]"


@dataclass(frozen=True)
class GammaIndex:
    t: int
    b: int
    c: int = 1

    def __post_init__(self):
        if self.t < 1 or self.b < 1 or self.c < 0:
            raise InvalidParams(f"bad gamma index {self!r}")

    def degree(self, ctx: PrimeContext) -> int:
        p, q = ctx.p, ctx.q
        return self.t * (p**2 + p + 1) * q - self.b * (p + 1) * q - self.c * q

    def text(self) -> str:
        return f"gamma[{self.t},{self.b},{self.c}]"


@dataclass(frozen=True)
class AlphaIndex:
    t: int
    n: int

    def __post_init__(self):
        if self.t < 1 or self.n < 0:
            raise InvalidParams(f"bad alpha index {self!r}")

    @property
    def denominator(self) -> int:
        return self.n + 1

    def degree(self, ctx: PrimeContext) -> int:
        return self.t * ctx.p**self.n * ctx.q

    def text(self) -> str:
        return f"alpha[{self.t},{self.n}]"


def _bound(p: int, k: int) -> int:
    if k < 0:
        return 0
    if k == 0:
        return 1
    return p**k + p ** (k - 1) - 1


def beta_admissible(ctx: PrimeContext, idx: BetaIndex, strict: bool = False) -> bool:
    p = ctx.p
    if idx.a % p == 0:
        return False
    if idx.a == 1:
        cap = idx.s if strict else p**idx.s
        if idx.b > cap:
            return False
    if idx.b % p**idx.c:
        return False
    if idx.b > _bound(p, idx.s - idx.c):
        return False
    if idx.b % p ** (idx.c + 1) == 0 and idx.b <= _bound(p, idx.s - idx.c - 1):
        return False
    return True


def enumerate_beta(
    ctx: PrimeContext, t_internal: int, strict: bool = False
) -> list[BetaIndex]:
    """All admissible beta indexes of the given internal degree."""
    p, q = ctx.p, ctx.q
    if t_internal <= 0 or t_internal % q:
        return []
    d = t_internal // q
    out = []
    s = 0
    while True:
        base = p**s * (p + 1)
        bmax = _bound(p, s)
        if base > d + bmax:
            break
        a_lo = -((-(d + 1)) // base)
        a_hi = (d + bmax) // base
        for a in range(a_lo, a_hi + 1):
            if a % p == 0:
                continue
            b = a * base - d
            for c in range(s + 1):
                idx = BetaIndex(a, s, b, c)
                if beta_admissible(ctx, idx, strict=strict):
                    out.append(idx)
        s += 1
    return sorted(out, key=lambda i: (i.s, i.a, i.b, i.c))


def alpha_generators(ctx: PrimeContext, t_internal: int) -> list[AlphaIndex]:
    """The alpha index of the given internal degree (at most one exists)."""
    if t_internal <= 0 or t_internal % ctx.q:
        return []
    m = t_internal // ctx.q
    n = 0
    while m % ctx.p == 0:
        m //= ctx.p
        n += 1
    return [AlphaIndex(m, n)]


@dataclass(frozen=True)
class BPGen:
    """One additive generator of a BP-side Ext group.

    kind "v2": v2^e.  kind "v1c1": v1^v1exp c1~[a,s].  kind "v2h":
    v2^e h_i (e = 0 renders as the bare h_i).  kind "w2": v2^e w2,
    where w2 carries degree (p+1)^2 q.  kind "c2": c2[a,s], whose
    degree is only pinned for a = 1.
    """

    kind: str
    e: int = 0
    v1exp: int = 0
    a: int = 0
    s: int = 0
    i: int = 0

    def degree(self, ctx: PrimeContext) -> int | None:
        p, q = ctx.p, ctx.q
        if self.kind == "v2":
            return self.e * (p + 1) * q
        if self.kind == "v1c1":
            return self.v1exp * q + self.a * p**self.s * (p + 1) * q
        if self.kind == "v2h":
            return self.e * (p + 1) * q + p**self.i * q
        if self.kind == "w2":
            return self.e * (p + 1) * q + (p + 1) ** 2 * q
        if self.kind == "c2":
            if self.a != 1:
                return None
            return self.a * p**self.s * (p**2 + p + 1) * q - p**self.s * (p + 1) * q
        raise InvalidParams(f"unknown generator kind {self.kind!r}")

    @property
    def degree_uncertain(self) -> bool:
        return self.kind == "c2" and self.a != 1

    def text(self) -> str:
        if self.kind == "v2":
            return f"v2^{self.e}"
        if self.kind == "v1c1":
            return f"v1^{self.v1exp} c1~[{self.a},{self.s}]"
        if self.kind == "v2h":
            return f"h{self.i}" if self.e == 0 else f"v2^{self.e} h{self.i}"
        if self.kind == "w2":
            return "w2" if self.e == 0 else f"v2^{self.e} w2"
        return f"c2[{self.a},{self.s}]"


def _q1(p: int, a: int, s: int) -> int:
    if a == 1:
        return p**s
    if s >= 1:
        return p**s + p ** (s - 1) - 1
    return 1


def enumerate_ext0_KR(
    ctx: PrimeContext, t_internal: int, n: int, t: int
) -> list[BPGen]:
    """Generators of the degree-t_internal part of the Ext^0 column.

    Solves v1exp * q + a p^s (p+1) q = t p^n (p+1) q subject to the
    v1-exponent window for the height-n truncation: p^s | v1exp,
    v1exp <= p^n - 1, and v1exp >= p^n - 1 - q1 (t = 1) respectively
    v1exp >= p^n - q1 (t >= 2), plus the pure power v2^(t p^n).
    """
    p, q = ctx.p, ctx.q
    if n < 1 or t < 1 or t % p == 0:
        raise InvalidParams(f"need n >= 1 and t >= 1 prime to p, got n={n}, t={t}")
    if t_internal != t * p**n * (p + 1) * q:
        raise InvalidParams(
            f"degree mismatch: t_internal={t_internal} is not t*p^n*(p+1)*q"
        )
    out = [BPGen("v2", e=t * p**n)]
    for d in range(1, (p**n - 1) // (p + 1) + 1):
        val = t * p**n - d
        s = 0
        while val % p == 0:
            val //= p
            s += 1
        a = val
        b = d * (p + 1)
        if b % p**s:
            raise AssertionError("v1 exponent lost p-divisibility")
        lb = p**n - 1 - _q1(p, a, s) if t == 1 else p**n - _q1(p, a, s)
        if max(lb, 1) <= b <= p**n - 1:
            out.append(BPGen("v1c1", v1exp=b, a=a, s=s))
    return out


def enumerate_ext1_BPK(ctx: PrimeContext, n: int) -> list[BPGen]:
    """Generators of the first Ext column of the height-2 quotient in
    internal degree p^n q: one torsion class and a v2-power ladder."""
    p, q = ctx.p, ctx.q
    if n < 2:
        raise InvalidParams(f"need n >= 2, got n={n}")
    out = []
    k = 0
    while n - 2 * k >= 0:
        e = (p ** (2 * k) - 1) // (p + 1) * p ** (n - 2 * k)
        gen = BPGen("v2h", e=e, i=n - 2 * k)
        if gen.degree(ctx) != p**n * q:
            raise AssertionError(f"{gen.text()} misses degree p^{n}q")
        out.append(gen)
        k += 1
    c2 = BPGen("c2", a=1, s=n - 2)
    if c2.degree(ctx) != p**n * q:
        raise AssertionError("torsion generator misses degree p^nq")
    out.append(c2)
    return out


def _p_power_exponent(p: int, value: int) -> int | None:
    if value < 1:
        return None
    k = 0
    while value % p == 0:
        value //= p
        k += 1
    return k if value == 1 else None


def thom_image(ctx: PrimeContext, idx) -> NamedClass:
    """Image of a BP-side index in the named-class table, if the index
    matches a dictionary pattern; degree equality is re-checked."""
    p = ctx.p
    if isinstance(idx, BetaIndex):
        if idx.c == 0 and idx.a == 1 and idx.s >= 1:
            if idx.b == p**idx.s - 1:
                cls = resolve_named("h0h", {"n": idx.s + 1}, ctx)
                _check_degrees(ctx, idx, cls)
                return cls
            if idx.b == p**idx.s:
                cls = resolve_named("b", {"n": idx.s}, ctx)
                _check_degrees(ctx, idx, cls)
                return cls
        raise NoDictionaryEntry(f"{idx.text()} matches no dictionary pattern")
    if isinstance(idx, GammaIndex):
        k = _p_power_exponent(p, idx.t)
        m_exp = _p_power_exponent(p, idx.c + 1)
        if (
            k is not None
            and k >= 1
            and m_exp is not None
            and idx.b == p**k - p**m_exp
        ):
            cls = resolve_named("h0hh", {"n": k + 2, "m": m_exp + 1}, ctx)
            _check_degrees(ctx, idx, cls)
            return cls
        raise NoDictionaryEntry(f"{idx.text()} matches no dictionary pattern")
    raise NoDictionaryEntry(f"no dictionary for {type(idx).__name__} indices")


def _check_degrees(ctx: PrimeContext, idx, cls: NamedClass) -> None:
    if idx.degree(ctx) != cls.t:
        raise AssertionError(
            f"dictionary degree mismatch: {idx.text()} -> {cls.text()}"
        )


_STEMS = {
    "h0h": ("n",),
    "h0b": ("n",),
    "h0hh": ("n", "m"),
    "h0hb": ("n", "m"),
    "gamma_tilde": ("s",),
    "beta_tilde": ("s",),
    "alpha": ("t", "n"),
    "h0g": ("n",),
    "h0l": ("n",),
    "h0k": ("n",),
    "h0l_prime": ("n",),
}


def stem_of(ctx: PrimeContext, family: str, params: dict) -> int:
    """Stem (homotopy degree) of one family member, by closed formula."""
    p, q = ctx.p, ctx.q
    params = dict(params or {})

    def need(*keys):
        missing = [k for k in keys if k not in params]
        if missing:
            raise InvalidParams(f"{family} needs parameters {missing}")
        return [params[k] for k in keys]

    if family == "beta":
        if "a" in params:
            a, s, bb, _c = need("a", "s", "b", "c")
            return a * p**s * (p + 1) * q - bb * q - 2
        t, n, s = need("t", "n", "s")
        return t * p**n * (p + 1) * q - s * q - 2
    if family == "gamma":
        if "t" in params:
            t, bb, c = need("t", "b", "c")
            return t * (p**2 + p + 1) * q - bb * (p + 1) * q - c * q - 3
        n, s = need("n", "s")
        return p ** (n + 2) * q + (p**n - s) * (p + 1) * q - q - 3
    if family not in _STEMS:
        raise UnknownFamily(f"no stem formula for {family!r}")
    if family == "h0h":
        (n,) = need("n")
        return p**n * q + q - 2
    if family == "h0b":
        (n,) = need("n")
        return p**n * q + q - 3
    if family == "h0hh":
        n, m = need("n", "m")
        return p**n * q + p**m * q + q - 3
    if family == "h0hb":
        n, m = need("n", "m")
        return p**n * q + p**m * q + q - 4
    if family == "gamma_tilde":
        (s,) = need("s")
        return s * p**2 * q + (s - 1) * p * q + (s - 2) * q - 3
    if family == "beta_tilde":
        (s,) = need("s")
        return s * p * q + (s - 1) * q - 2
    if family == "alpha":
        t, n = need("t", "n")
        return t * p**n * q - 1
    if family == "h0g":
        (n,) = need("n")
        return p ** (n + 1) * q + 2 * p**n * q + q - 3
    if family == "h0l":
        (n,) = need("n")
        return p ** (n + 1) * q + 2 * p**n * q + q - 4
    if family == "h0k":
        (n,) = need("n")
        return 2 * p ** (n + 1) * q + p**n * q + q - 3
    if family == "h0l_prime":
        (n,) = need("n")
        return 2 * p ** (n + 1) * q + p**n * q + q - 4
    raise UnknownFamily(f"no stem formula for {family!r}")


_INDEX_RE = re.compile(r"^(beta|gamma|alpha)\[([0-9,\s]+)\]$")


def parse_index(text: str):
    """Parse beta[a,s,b,c], gamma[t,b,c], or alpha[t,n] text forms."""
    m = _INDEX_RE.match(text.strip())
    if not m:
        raise ParseError(f"bad index syntax: {text!r}")
    name = m.group(1)
    try:
        nums = [int(x) for x in m.group(2).split(",")]
    except ValueError as exc:
        raise ParseError(f"bad index numbers in {text!r}") from exc
    shapes = {"beta": 4, "gamma": 3, "alpha": 2}
    if len(nums) != shapes[name]:
        raise ParseError(f"{name} index takes {shapes[name]} integers")
    try:
        if name == "beta":
            return BetaIndex(*nums)
        if name == "gamma":
            return GammaIndex(*nums)
        return AlphaIndex(*nums)
    except InvalidParams as exc:
        raise ParseError(str(exc)) from exc
