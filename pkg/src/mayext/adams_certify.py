"""Vanishing and dimension certificates with named-class bookkeeping.

A bidegree is certified zero when its first term is already empty
(E1Empty) or when every weight block dies at the second term (E2Zero).
A surviving dimension is only certified exact when both neighbor
bidegrees (s-1, t) and (s+1, t) vanish at the second term, summed over
all weights; that collapse test deliberately ignores the weight grading
of higher differentials, so it can only under-certify, never overstate.
Everything else is an upper bound.

Differential-window reports follow the (r, r-1) bidegree convention: a
class at (s, t) can hit (s+r, t+r-1) and can be hit from (s-r, t-r+1),
the latter being vacuous once r exceeds s.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .may_core import (
    Element,
    Generator,
    InvalidParams,
    MayextError,
    Monomial,
    PrimeContext,
    multiply,
    product,
    tridegree,
    a,
    b,
    h,
)
from .may_diff import (
    E2Report,
    cell_homology,
    d1,
    e2_at,
    reduce_vector,
)

E1_EMPTY = "E1Empty"
E2_ZERO = "E2Zero"
DIM_CERTIFIED = "DimCertified"
UPPER_BOUND = "UpperBound"


class UnknownName(MayextError):
    """No class with that name is in the table."""


class ParamsOutOfRange(MayextError):
    """The class exists but not for these parameter values."""


class InvalidRange(MayextError):
    """A differential-window range is malformed."""


class MissingRepresentative(MayextError):
    """The class is known by bidegree only; no cocycle is available."""


@dataclass
class Certificate:
    s: int
    t: int
    verdict: str
    dim: int
    e1_total: int
    e2_total: int
    report: E2Report | None = None

    @property
    def certified_zero(self) -> bool:
        return self.verdict in (E1_EMPTY, E2_ZERO)

    @property
    def certified_exact(self) -> bool:
        return self.certified_zero or self.verdict == DIM_CERTIFIED

    def serialize(self) -> dict:
        out = {
            "s": self.s,
            "t": self.t,
            "verdict": self.verdict,
            "dim": self.dim,
            "e1": self.e1_total,
            "e2": self.e2_total,
        }
        if self.report is not None and self.e2_total:
            out["basis"] = [
                rep.text()
                for blk in self.report.weights.values()
                for rep in blk.representatives
            ]
        return out


def certify_ext_vanishing(
    ctx: PrimeContext, s: int, t: int, cache: dict | None = None
) -> Certificate:
    """Certificate for the cohomology group at (s, t), zero side only."""
    report = e2_at(ctx, s, t, cache=cache)
    if report.e1_total == 0:
        return Certificate(s, t, E1_EMPTY, 0, 0, 0, report)
    if report.e2_total == 0:
        return Certificate(s, t, E2_ZERO, 0, report.e1_total, 0, report)
    return Certificate(
        s, t, UPPER_BOUND, report.e2_total, report.e1_total, report.e2_total, report
    )


def certify_ext_dim(
    ctx: PrimeContext, s: int, t: int, cache: dict | None = None
) -> Certificate:
    """Like certify_ext_vanishing, upgrading to an exact dimension when
    both neighbor bidegrees die at the second term."""
    cert = certify_ext_vanishing(ctx, s, t, cache=cache)
    if cert.certified_zero or cert.e2_total == 0:
        return cert
    above = e2_at(ctx, s + 1, t, cache=cache).e2_total
    below = e2_at(ctx, s - 1, t, cache=cache).e2_total if s >= 1 else 0
    if above == 0 and below == 0:
        cert.verdict = DIM_CERTIFIED
    return cert


@dataclass
class NamedClass:
    name: str
    params: dict
    s: int
    t: int
    rep: Element | None = None
    conjectural: bool = False
    differential: dict | None = None

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.s, self.t)

    _PARAM_ORDER = ("n", "m", "s", "t", "a", "b", "c")

    def text(self) -> str:
        if not self.params:
            return self.name
        def slot(key: str):
            order = NamedClass._PARAM_ORDER
            return (order.index(key), "") if key in order else (len(order), key)
        args = ",".join(str(self.params[k]) for k in sorted(self.params, key=slot))
        return f"{self.name}[{args}]"


def _need(params: dict, *keys: str) -> list[int]:
    out = []
    for key in keys:
        if key not in params:
            raise ParamsOutOfRange(f"missing parameter {key!r}")
        val = params[key]
        if not isinstance(val, int):
            raise ParamsOutOfRange(f"parameter {key!r} must be an integer")
        out.append(val)
    return out


def _rep_element(ctx: PrimeContext, *factors) -> Element:
    return product(factors, ctx)


def resolve_named(name: str, params: dict, ctx: PrimeContext) -> NamedClass:
    """Bidegree, representative, and metadata for a standing class name."""
    p, q = ctx.p, ctx.q
    params = dict(params or {})

    if name == "a0":
        return NamedClass(name, {}, 1, 1, _rep_element(ctx, a(0)))
    if name == "alpha2_tilde":
        return NamedClass(name, {}, 2, 2 * q + 1, _rep_element(ctx, a(1), h(1, 0)))
    if name == "g0":
        return NamedClass(
            name,
            {},
            2,
            p * q + 2 * q,
            _rep_element(ctx, h(2, 0), h(1, 0)),
            differential={
                "r": 2,
                "target": (4, p * q + 2 * q + 1),
                "value": "b[1,0] alpha2_tilde",
            },
        )
    if name == "h":
        (n,) = _need(params, "n")
        if n < 0:
            raise ParamsOutOfRange("h[n] needs n >= 0")
        diff = None
        if n >= 1:
            diff = {"r": 2, "target": (3, p**n * q + 1), "value": f"a0 b[1,{n-1}]"}
        return NamedClass(
            name, {"n": n}, 1, p**n * q, _rep_element(ctx, h(1, n)), differential=diff
        )
    if name == "b":
        (n,) = _need(params, "n")
        if n < 0:
            raise ParamsOutOfRange("b[n] needs n >= 0")
        diff = None
        if n >= 1:
            r = 2 * p - 1
            diff = {
                "r": r,
                "target": (2 + r, p ** (n + 1) * q + r - 1),
                "value": f"h[1,0] b[1,{n-1}]^{p}",
            }
        return NamedClass(
            name,
            {"n": n},
            2,
            p ** (n + 1) * q,
            _rep_element(ctx, b(1, n)),
            differential=diff,
        )
    if name == "gamma_tilde":
        (s,) = _need(params, "s")
        if not 3 <= s < p:
            raise ParamsOutOfRange(f"gamma_tilde[s] needs 3 <= s < p, got s={s}")
        t = s * p**2 * q + (s - 1) * p * q + (s - 2) * q + s - 3
        rep = _rep_element(ctx, h(2, 1), h(1, 2), h(3, 0), *([a(3)] * (s - 3)))
        cls = NamedClass(name, {"s": s}, s, t, rep)
        got = tridegree(rep, ctx)
        if (got.s, got.t) != (s, t):
            raise AssertionError(f"gamma_tilde[{s}] degree mismatch: {got}")
        return cls
    if name == "h0h":
        (n,) = _need(params, "n")
        if n < 1:
            raise ParamsOutOfRange("h0h[n] needs n >= 1")
        return NamedClass(
            name, {"n": n}, 2, p**n * q + q, _rep_element(ctx, h(1, 0), h(1, n))
        )
    if name == "h0b":
        (n,) = _need(params, "n")
        if n < 1:
            raise ParamsOutOfRange("h0b[n] needs n >= 1")
        return NamedClass(
            name, {"n": n}, 3, p**n * q + q, _rep_element(ctx, h(1, 0), b(1, n - 1))
        )
    if name == "h0hh":
        n, m = _need(params, "n", "m")
        if not (m >= 1 and n >= m + 2):
            raise ParamsOutOfRange("h0hh[n,m] needs n >= m + 2, m >= 1")
        return NamedClass(
            name,
            {"n": n, "m": m},
            3,
            p**n * q + p**m * q + q,
            _rep_element(ctx, h(1, 0), h(1, n), h(1, m)),
        )
    if name == "h0hb":
        n, m = _need(params, "n", "m")
        if not (m >= 1 and n >= m + 2):
            raise ParamsOutOfRange("h0hb[n,m] needs n >= m + 2, m >= 1")
        rep = _rep_element(ctx, h(1, 0), h(1, n), b(1, m - 1)) + _rep_element(
            ctx, h(1, 0), h(1, m), b(1, n - 1)
        ).scaled(-1)
        return NamedClass(name, {"n": n, "m": m}, 4, p**n * q + p**m * q + q, rep)

    two_family = {
        "g": (2, lambda n: p ** (n + 1) * q + 2 * p**n * q, "l"),
        "k": (2, lambda n: 2 * p ** (n + 1) * q + p**n * q, "l_prime"),
        "l": (3, lambda n: p ** (n + 1) * q + 2 * p**n * q, None),
        "l_prime": (3, lambda n: 2 * p ** (n + 1) * q + p**n * q, None),
        "h0g": (3, lambda n: p ** (n + 1) * q + 2 * p**n * q + q, None),
        "h0l": (4, lambda n: p ** (n + 1) * q + 2 * p**n * q + q, None),
        "h0k": (3, lambda n: 2 * p ** (n + 1) * q + p**n * q + q, None),
        "h0l_prime": (4, lambda n: 2 * p ** (n + 1) * q + p**n * q + q, None),
    }
    if name in two_family:
        (n,) = _need(params, "n")
        if n < 0:
            raise ParamsOutOfRange(f"{name}[n] needs n >= 0")
        s_deg, t_of, partner = two_family[name]
        rep = None
        diff = None
        conjectural = n >= 3 or name in ("h0g", "h0l", "h0k", "h0l_prime")
        if name == "g" and n == 0:
            rep = _rep_element(ctx, h(2, 0), h(1, 0))
            conjectural = False
        if partner and n >= 3:
            diff = {
                "r": 2,
                "target": (s_deg + 2, t_of(n) + 1),
                "value": f"a0 {partner}[{n}]",
            }
        return NamedClass(
            name, {"n": n}, s_deg, t_of(n), rep, conjectural=conjectural, differential=diff
        )
    if name == "beta_tilde":
        (s,) = _need(params, "s")
        if s < 2:
            raise ParamsOutOfRange("beta_tilde[s] needs s >= 2")
        return NamedClass(
            name, {"s": s}, s, s * p * q + (s - 1) * q + s - 2, None, conjectural=True
        )
    raise UnknownName(f"no class named {name!r}")


@dataclass
class WindowRow:
    r: int
    target_bidegree: tuple[int, int]
    target: Certificate
    source_bidegree: tuple[int, int] | None
    source: Certificate | None

    def serialize(self) -> dict:
        return {
            "r": self.r,
            "target": {"bidegree": list(self.target_bidegree), **self.target.serialize()},
            "source": (
                {"bidegree": list(self.source_bidegree), **self.source.serialize()}
                if self.source is not None
                else {"vacuous": True}
            ),
        }


@dataclass
class WindowReport:
    s: int
    t: int
    r_min: int
    r_max: int
    rows: list[WindowRow] = field(default_factory=list)

    @property
    def targets_all_zero(self) -> bool:
        return all(row.target.certified_zero for row in self.rows)

    @property
    def sources_all_zero(self) -> bool:
        return all(
            row.source.certified_zero for row in self.rows if row.source is not None
        )

    @property
    def permanent_cycle_up_to(self) -> int:
        """Largest r <= r_max with every target in [r_min, r] certified zero."""
        out = self.r_min - 1
        for row in self.rows:
            if not row.target.certified_zero:
                break
            out = row.r
        return out

    @property
    def not_boundary(self) -> str:
        """'full' needs every real source zero and the window to reach r = s."""
        if self.s < self.r_min:
            return "full"
        if not self.sources_all_zero:
            return "no"
        return "full" if self.r_max >= self.s else "partial"

    def serialize(self) -> dict:
        return {
            "s": self.s,
            "t": self.t,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "permanent_cycle_up_to": self.permanent_cycle_up_to,
            "not_boundary": self.not_boundary,
            "rows": [row.serialize() for row in self.rows],
        }


def adams_dr_window(
    ctx: PrimeContext,
    bidegree: tuple[int, int],
    r_min: int,
    r_max: int,
    cache: dict | None = None,
) -> WindowReport:
    """Vanishing certificates for every d_r target and source in a range."""
    s, t = bidegree
    if s < 0 or t < 0:
        raise InvalidParams(f"bidegree out of range: ({s},{t})")
    if r_min < 2 or r_max < r_min:
        raise InvalidRange(f"need 2 <= r_min <= r_max, got [{r_min},{r_max}]")
    report = WindowReport(s, t, r_min, r_max)
    for r in range(r_min, r_max + 1):
        target = certify_ext_vanishing(ctx, s + r, t + r - 1, cache=cache)
        if r <= s and t - r + 1 >= 0:
            src_bidegree = (s - r, t - r + 1)
            source = certify_ext_vanishing(ctx, *src_bidegree, cache=cache)
        else:
            src_bidegree, source = None, None
        report.rows.append(WindowRow(r, (s + r, t + r - 1), target, src_bidegree, source))
    return report


def product_nonzero_at_e2(
    ctx: PrimeContext, classes: list, cache: dict | None = None
) -> dict:
    """Multiply representatives and reduce mod boundaries in their bidegree.

    A nonzero answer means the product survives to the second term; it is
    a statement about the second term, not yet about the abutment.
    """
    if not classes:
        raise InvalidParams("empty product")
    reps = []
    conjectural = False
    for cls in classes:
        if isinstance(cls, NamedClass):
            conjectural = conjectural or cls.conjectural
            if cls.rep is None:
                raise MissingRepresentative(
                    f"{cls.text()} has a bidegree but no representative"
                )
            reps.append(cls.rep)
        else:
            reps.append(cls)
    prod = product(reps, ctx)
    expected_s = expected_t = 0
    for cls in classes:
        if isinstance(cls, NamedClass):
            expected_s, expected_t = expected_s + cls.s, expected_t + cls.t
        else:
            td = tridegree(cls, ctx)
            expected_s, expected_t = expected_s + td.s, expected_t + td.t
    expected = (expected_s, expected_t)
    if prod.is_zero:
        return {
            "nonzero": False,
            "bidegree": expected,
            "reduced": prod,
            "conjectural": conjectural,
        }
    if not d1(prod, ctx).is_zero:
        raise AssertionError("product of cocycles failed to be a cocycle")
    s, t = expected
    cell = cell_homology(ctx, s, t, cache=cache)
    p = ctx.p
    by_weight: dict[int, list[Monomial]] = {}
    for mono in prod.monomials():
        by_weight.setdefault(mono.tridegree(ctx).u, []).append(mono)
    reduced = Element.zero(ctx)
    for u, monos in sorted(by_weight.items()):
        blk = cell.block(u)
        if blk is None:
            raise AssertionError(f"product term has no block at ({s},{t},{u})")
        vec = [0] * blk.e1_dim
        for mono in monos:
            vec[blk.index[mono.factors]] = mono.coeff
        vec = reduce_vector(vec, blk.boundary_ech, blk.boundary_pivots, p)
        for c, m in zip(vec, blk.monomials):
            if c:
                reduced = reduced + Element(p, {m.factors: c})
    return {
        "nonzero": not reduced.is_zero,
        "bidegree": expected,
        "reduced": reduced,
        "conjectural": conjectural,
    }
