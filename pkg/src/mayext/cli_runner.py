"""Command line front end: cached sessions, claim checking, and charts.

A Session owns one prime and reuses work at two levels: an in-process
memo shared by every homology computation, and an optional on-disk
cache of serialized second-term reports keyed by (module, p, s, t,
schema_version).  Disk records embed their own key, so a corrupt file
or a digest collision degrades to a recomputation with a warning on
stderr, never to wrong data.

Claims are JSON dicts with a "kind", a prime "p", kind-specific
parameters, and an "expect" value.  Any numeric parameter may be an
arithmetic expression in p and q, evaluated per claim.  A claim result
is one of: pass, fail (the computed value provably differs),
uncertified (the machinery can neither certify nor refute, e.g. an
interval that merely contains the expected dimension), error, or
skipped-conjectural.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import click

from .adams_certify import (
    DIM_CERTIFIED,
    E1_EMPTY,
    E2_ZERO,
    UPPER_BOUND,
    Certificate,
    InvalidRange,
    WindowReport,
    WindowRow,
    product_nonzero_at_e2,
    resolve_named,
)
from .greek_bp import (
    BetaIndex,
    NoDictionaryEntry,
    alpha_generators,
    beta_admissible,
    enumerate_beta,
    enumerate_ext0_KR,
    enumerate_ext1_BPK,
    parse_index,
    stem_of,
    thom_image,
)
from .les_dims import _COLUMNS, ext_dims, sphere_table, window_for
from .may_core import (
    InvalidParams,
    MayextError,
    ParseError,
    PrimeContext,
    enumerate_basis,
    parse_element,
    parse_monomial,
)
from .may_diff import SCHEMA_VERSION, E2Report, WeightBlock, d1, e2_at


# ---------------------------------------------------------------------------
# expression evaluation


class _ExprParser:
    """Recursive-descent arithmetic over integers, p, and q.

    expr := term (('+'|'-') term)*;  term := factor ('*' factor)*;
    factor := atom ('^' factor)?  with right-associative '^'.
    """

    def __init__(self, text: str, variables: dict[str, int]):
        self.text = text
        self.pos = 0
        self.vars = variables

    def parse(self) -> int:
        value = self._expr()
        if self._peek():
            self._fail(f"unexpected {self.text[self.pos]!r}")
        return value

    def _peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _fail(self, message: str):
        raise ParseError(message, column=self.pos + 1)

    def _expr(self) -> int:
        value = self._term()
        while self._peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> int:
        value = self._factor()
        while self._peek() == "*":
            self.pos += 1
            value *= self._factor()
        return value

    def _factor(self) -> int:
        # unary minus binds looser than '^', so -p^2 means -(p^2)
        if self._peek() == "-":
            self.pos += 1
            return -self._factor()
        base = self._atom()
        if self._peek() == "^":
            self.pos += 1
            exp = self._factor()
            if exp < 0:
                self._fail("negative exponent")
            return base**exp
        return base

    def _atom(self) -> int:
        ch = self._peek()
        if ch == "(":
            self.pos += 1
            value = self._expr()
            if self._peek() != ")":
                self._fail("expected ')'")
            self.pos += 1
            return value
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            return int(self.text[start : self.pos])
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.text) and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"
            ):
                self.pos += 1
            name = self.text[start : self.pos]
            if name in self.vars:
                return self.vars[name]
            self._fail(f"unknown name {name!r}")
        self._fail("expected a number, p, q, or '('")


def eval_expr(value, ctx: PrimeContext) -> int:
    """An int passes through; a string is arithmetic in p and q."""
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ParseError(f"expected an integer or expression, got {value!r}")
    if isinstance(value, int):
        return value
    return _ExprParser(value, {"p": ctx.p, "q": ctx.q}).parse()


# ---------------------------------------------------------------------------
# caching


def _canonical(key: dict) -> str:
    return json.dumps(key, sort_keys=True, separators=(",", ":"))


class DiskCache:
    """One JSON file per record under a root directory.

    Records carry {"key": ..., "value": ...}; a stored key that fails
    to round-trip against the request is treated as a miss.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, key: dict) -> Path:
        digest = hashlib.sha256(_canonical(key).encode()).hexdigest()
        return self.root / f"{digest}.json"

    def get(self, key: dict):
        path = self.path_for(key)
        try:
            raw = path.read_text()
        except FileNotFoundError:
            return None
        except OSError as exc:
            click.echo(f"warning: cache read failed ({exc}), recomputing", err=True)
            return None
        try:
            record = json.loads(raw)
        except json.JSONDecodeError:
            click.echo(f"warning: corrupt cache file {path.name}, recomputing", err=True)
            return None
        if not isinstance(record, dict) or record.get("key") != key:
            click.echo(f"warning: cache key mismatch in {path.name}, recomputing", err=True)
            return None
        return record.get("value")

    def put(self, key: dict, value) -> None:
        record = {"key": key, "value": value}
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(record, fh)
            os.replace(tmp, self.path_for(key))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


def summary_to_report(ctx: PrimeContext, data: dict) -> E2Report:
    """Rebuild a report from its serialized form, reparsing representatives."""
    weights = {}
    for entry in data["weights"]:
        reps = [parse_element(txt, ctx) for txt in entry["reps"]]
        weights[entry["u"]] = WeightBlock(
            u=entry["u"],
            e1_dim=entry["e1"],
            cycle_dim=entry["cycles"],
            boundary_dim=entry["boundaries"],
            e2_dim=entry["e2"],
            representatives=reps,
        )
    return E2Report(s=data["s"], t=data["t"], p=data["p"], weights=weights)


class Session:
    """All computations for one prime, with memo and optional disk reuse."""

    def __init__(self, ctx: PrimeContext, cache_dir=None):
        self.ctx = ctx
        self.memo: dict = {}
        self.reports: dict[tuple[int, int], E2Report] = {}
        self.disk = DiskCache(cache_dir) if cache_dir else None

    def _key(self, s: int, t: int) -> dict:
        return {
            "module": "e2",
            "p": self.ctx.p,
            "s": s,
            "t": t,
            "schema_version": SCHEMA_VERSION,
        }

    def report(self, s: int, t: int) -> E2Report:
        hit = self.reports.get((s, t))
        if hit is not None:
            return hit
        if self.disk is not None:
            summary = self.disk.get(self._key(s, t))
            if summary is not None:
                rep = summary_to_report(self.ctx, summary)
                self.reports[(s, t)] = rep
                return rep
        rep = e2_at(self.ctx, s, t, cache=self.memo)
        if self.disk is not None:
            self.disk.put(self._key(s, t), rep.serialize())
        self.reports[(s, t)] = rep
        return rep


def session_vanish(session: Session, s: int, t: int) -> Certificate:
    """Zero-side certificate built from (possibly cached) reports."""
    report = session.report(s, t)
    if report.e1_total == 0:
        return Certificate(s, t, E1_EMPTY, 0, 0, 0, report)
    if report.e2_total == 0:
        return Certificate(s, t, E2_ZERO, 0, report.e1_total, 0, report)
    return Certificate(
        s, t, UPPER_BOUND, report.e2_total, report.e1_total, report.e2_total, report
    )


def session_dim(session: Session, s: int, t: int) -> Certificate:
    """Dimension certificate; exact when both (s-1,t) and (s+1,t) die."""
    cert = session_vanish(session, s, t)
    if cert.certified_zero or cert.e2_total == 0:
        return cert
    above = session.report(s + 1, t).e2_total
    below = session.report(s - 1, t).e2_total if s >= 1 else 0
    if above == 0 and below == 0:
        cert.verdict = DIM_CERTIFIED
    return cert


def session_window(
    session: Session, bidegree: tuple[int, int], r_min: int, r_max: int
) -> WindowReport:
    """Differential-window report built from (possibly cached) reports."""
    s, t = bidegree
    if s < 0 or t < 0:
        raise InvalidParams(f"bidegree out of range: ({s},{t})")
    if r_min < 2 or r_max < r_min:
        raise InvalidRange(f"need 2 <= r_min <= r_max, got [{r_min},{r_max}]")
    report = WindowReport(s, t, r_min, r_max)
    for r in range(r_min, r_max + 1):
        target = session_vanish(session, s + r, t + r - 1)
        if r <= s and t - r + 1 >= 0:
            src_bidegree = (s - r, t - r + 1)
            source = session_vanish(session, *src_bidegree)
        else:
            src_bidegree, source = None, None
        report.rows.append(
            WindowRow(r, (s + r, t + r - 1), target, src_bidegree, source)
        )
    return report


# ---------------------------------------------------------------------------
# claim checking


def _norm_monomials(texts, ctx: PrimeContext) -> list[str]:
    return sorted(parse_monomial(txt, ctx).text() for txt in texts)


def _norm_plain(texts) -> list[str]:
    return sorted(" ".join(txt.split()) for txt in texts)


def _list_verdict(got: list[str], want: list[str]):
    if got == want:
        return "pass", f"{len(got)} entries match"
    missing = [x for x in want if x not in got]
    extra = [x for x in got if x not in want]
    parts = []
    if missing:
        parts.append("missing " + ", ".join(missing))
    if extra:
        parts.append("unexpected " + ", ".join(extra))
    return "fail", "; ".join(parts) if parts else f"got {got}, want {want}"


def _check_e1_basis(session: Session, ctx: PrimeContext, claim: dict):
    s = eval_expr(claim["s"], ctx)
    t = eval_expr(claim["t"], ctx)
    basis = enumerate_basis(ctx, s, t)
    got = sorted(m.text() for m in basis)
    expect = claim["expect"]
    if isinstance(expect, int):
        if len(got) == expect:
            return "pass", f"({s},{t}) has {expect} monomials"
        return "fail", f"({s},{t}) has {len(got)} monomials, expected {expect}"
    status, detail = _list_verdict(got, _norm_monomials(expect, ctx))
    return status, f"({s},{t}): {detail}"


def _check_e2_dim(session: Session, ctx: PrimeContext, claim: dict):
    s = eval_expr(claim["s"], ctx)
    t = eval_expr(claim["t"], ctx)
    got = session.report(s, t).e2_total
    expect = claim["expect"]
    if isinstance(expect, dict):
        lo = eval_expr(expect.get("lo", 0), ctx)
        hi = eval_expr(expect["hi"], ctx) if "hi" in expect else None
        if got >= lo and (hi is None or got <= hi):
            return "pass", f"({s},{t}) second-term dim {got} within bounds"
        return "fail", f"({s},{t}) second-term dim {got}, expected in [{lo},{hi}]"
    want = eval_expr(expect, ctx)
    if got == want:
        return "pass", f"({s},{t}) second-term dim {got}"
    return "fail", f"({s},{t}) second-term dim {got}, expected {want}"


def _check_ext_vanishing(session: Session, ctx: PrimeContext, claim: dict):
    s = eval_expr(claim["s"], ctx)
    t = eval_expr(claim["t"], ctx)
    cert = session_vanish(session, s, t)
    expect = claim["expect"]
    if expect == "zero":
        if cert.certified_zero:
            return "pass", f"({s},{t}) {cert.verdict}"
        return (
            "uncertified",
            f"({s},{t}) second term has dim {cert.e2_total}, cannot certify zero",
        )
    if cert.verdict == expect:
        return "pass", f"({s},{t}) {cert.verdict}"
    return "fail", f"({s},{t}) verdict {cert.verdict}, expected {expect}"


_WINDOW_KEYS = (
    "permanent_cycle_up_to",
    "not_boundary",
    "targets_all_zero",
    "sources_all_zero",
)


def _check_dr_window(session: Session, ctx: PrimeContext, claim: dict):
    s = eval_expr(claim["s"], ctx)
    t = eval_expr(claim["t"], ctx)
    r_min = eval_expr(claim.get("r_min", 2), ctx)
    r_max = eval_expr(claim["r_max"], ctx)
    report = session_window(session, (s, t), r_min, r_max)
    expect = claim["expect"]
    bad = []
    for key, want in expect.items():
        if key not in _WINDOW_KEYS:
            raise InvalidParams(f"unknown window field {key!r}")
        got = getattr(report, key)
        if got != want:
            bad.append(f"{key}={got!r}, expected {want!r}")
    if not bad:
        return "pass", f"({s},{t}) window r=[{r_min},{r_max}] as expected"
    return "fail", f"({s},{t}) " + "; ".join(bad)


def _check_les_dim(session: Session, ctx: PrimeContext, claim: dict):
    spectrum = claim["spectrum"]
    s = eval_expr(claim["s"], ctx)
    t = eval_expr(claim["t"], ctx)
    s_range, t_range = window_for(ctx, spectrum, s, t)
    table = sphere_table(ctx, s_range, t_range, homology=session.memo)
    res = ext_dims(ctx, table, spectrum, s, t)
    expect = claim["expect"]
    where = f"{spectrum}({s},{t})"
    if isinstance(expect, dict) and "min_lo" in expect:
        floor = eval_expr(expect["min_lo"], ctx)
        if res.lo >= floor:
            return "pass", f"{where} dim >= {res.lo}"
        return "fail", f"{where} lower bound {res.lo}, expected >= {floor}"
    if isinstance(expect, dict):
        lo = eval_expr(expect["lo"], ctx)
        hi = eval_expr(expect["hi"], ctx)
        if (res.lo, res.hi) == (lo, hi):
            return "pass", f"{where} dim in [{res.lo},{res.hi}]"
        return "fail", f"{where} dim in [{res.lo},{res.hi}], expected [{lo},{hi}]"
    want = eval_expr(expect, ctx)
    if res.exact and res.lo == want:
        return "pass", f"{where} dim = {want}"
    if res.contains(want):
        return "uncertified", f"{where} dim in [{res.lo},{res.hi}], expected exactly {want}"
    return "fail", f"{where} dim in [{res.lo},{res.hi}], excludes {want}"


def _check_beta_list(session: Session, ctx: PrimeContext, claim: dict):
    t_internal = eval_expr(claim["t_internal"], ctx)
    strict = bool(claim.get("strict", False))
    got = sorted(idx.text() for idx in enumerate_beta(ctx, t_internal, strict=strict))
    status, detail = _list_verdict(got, _norm_plain(claim["expect"]))
    return status, f"degree {t_internal}: {detail}"


def _check_ext0_list(session: Session, ctx: PrimeContext, claim: dict):
    n = eval_expr(claim["n"], ctx)
    t = eval_expr(claim.get("t", 1), ctx)
    t_internal = t * ctx.p**n * (ctx.p + 1) * ctx.q
    gens = enumerate_ext0_KR(ctx, t_internal, n, t)
    got = sorted(g.text() for g in gens)
    status, detail = _list_verdict(got, _norm_plain(claim["expect"]))
    return status, f"n={n}, t={t}: {detail}"


def _check_ext1_bpk_list(session: Session, ctx: PrimeContext, claim: dict):
    n = eval_expr(claim["n"], ctx)
    gens = enumerate_ext1_BPK(ctx, n)
    got = sorted(g.text() for g in gens)
    status, detail = _list_verdict(got, _norm_plain(claim["expect"]))
    return status, f"n={n}: {detail}"


def _check_stem(session: Session, ctx: PrimeContext, claim: dict):
    params = {key: eval_expr(val, ctx) for key, val in claim["params"].items()}
    got = stem_of(ctx, claim["family"], params)
    want = eval_expr(claim["expect"], ctx)
    if got == want:
        return "pass", f"{claim['family']} stem {got}"
    return "fail", f"{claim['family']} stem {got}, expected {want}"


def _check_thom(session: Session, ctx: PrimeContext, claim: dict):
    idx = parse_index(claim["index"])
    try:
        got = thom_image(ctx, idx).text()
    except NoDictionaryEntry:
        got = "NoDictionaryEntry"
    want = " ".join(str(claim["expect"]).split())
    if got == want:
        return "pass", f"{claim['index']} -> {got}"
    return "fail", f"{claim['index']} -> {got}, expected {want}"


def _check_product_nonzero(session: Session, ctx: PrimeContext, claim: dict):
    classes = [
        resolve_named(entry["name"], entry.get("params", {}), ctx)
        for entry in claim["classes"]
    ]
    result = product_nonzero_at_e2(ctx, classes, cache=session.memo)
    want = bool(claim["expect"])
    names = " * ".join(cls.text() for cls in classes)
    note = " (conjectural factor)" if result["conjectural"] else ""
    if result["nonzero"] == want:
        word = "nonzero" if result["nonzero"] else "zero"
        return "pass", f"{names} is {word} at {result['bidegree']}{note}"
    return (
        "fail",
        f"{names} nonzero={result['nonzero']} at {result['bidegree']}, "
        f"expected {want}{note}",
    )


CHECKERS = {
    "e1_basis": _check_e1_basis,
    "e2_dim": _check_e2_dim,
    "ext_vanishing": _check_ext_vanishing,
    "dr_window": _check_dr_window,
    "les_dim": _check_les_dim,
    "beta_list": _check_beta_list,
    "ext0_list": _check_ext0_list,
    "ext1_bpk_list": _check_ext1_bpk_list,
    "stem": _check_stem,
    "thom": _check_thom,
    "product_nonzero": _check_product_nonzero,
}


@dataclass
class ClaimResult:
    index: int
    claim: dict
    status: str
    detail: str

    def serialize(self) -> dict:
        out = {
            "index": self.index,
            "kind": self.claim.get("kind"),
            "status": self.status,
            "detail": self.detail,
        }
        if "p" in self.claim:
            out["p"] = self.claim["p"]
        if self.claim.get("source"):
            out["source"] = self.claim["source"]
        return out


def run_claims(
    claims: list,
    cache_dir=None,
    jobs: int = 1,
    include_conjectures: bool = False,
    sessions: dict | None = None,
) -> list[ClaimResult]:
    """Check every claim, reusing one session per prime.

    Results come back in claim order regardless of the worker count.
    """
    sessions = {} if sessions is None else sessions
    lock = threading.Lock()

    def session_for(p: int) -> Session:
        with lock:
            if p not in sessions:
                sessions[p] = Session(PrimeContext(p), cache_dir)
            return sessions[p]

    def run_one(index: int, claim: dict) -> ClaimResult:
        if not isinstance(claim, dict):
            return ClaimResult(index, {"kind": None}, "error", "claim must be an object")
        if claim.get("conjectural") and not include_conjectures:
            return ClaimResult(
                index, claim, "skipped-conjectural", "re-run with --include-conjectures"
            )
        try:
            checker = CHECKERS.get(claim.get("kind"))
            if checker is None:
                raise InvalidParams(f"unknown claim kind {claim.get('kind')!r}")
            if "p" not in claim:
                raise InvalidParams("claim needs a prime p")
            session = session_for(claim["p"])
            status, detail = checker(session, session.ctx, claim)
            return ClaimResult(index, claim, status, detail)
        except MayextError as exc:
            return ClaimResult(index, claim, "error", f"{type(exc).__name__}: {exc}")
        except (KeyError, TypeError, ValueError) as exc:
            return ClaimResult(index, claim, "error", f"{type(exc).__name__}: {exc}")

    if jobs <= 1:
        return [run_one(i, c) for i, c in enumerate(claims)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_one, i, c) for i, c in enumerate(claims)]
        return [f.result() for f in futures]


def load_claims(path=None) -> list:
    """Claims from a JSON file, or the shipped corpus when path is None."""
    if path is None:
        raw = resources.files("mayext").joinpath("data/corpus.json").read_text()
    else:
        raw = Path(path).read_text()
    doc = json.loads(raw)
    claims = doc.get("claims") if isinstance(doc, dict) else doc
    if not isinstance(claims, list):
        raise InvalidParams("claims file must be a list or an object with 'claims'")
    return claims


# ---------------------------------------------------------------------------
# charts


def chart_data(session: Session, s_max: int, t_max: int) -> dict:
    """Every nonzero second-term cell with 0 <= s <= s_max, s <= t <= t_max."""
    if s_max < 0 or t_max < 0:
        raise InvalidParams(f"bad chart window s_max={s_max}, t_max={t_max}")
    cells = []
    for s in range(s_max + 1):
        for t in range(s, t_max + 1):
            report = session.report(s, t)
            if report.e2_total == 0:
                continue
            cert = session_dim(session, s, t)
            reps = [
                rep.text()
                for u in sorted(report.weights)
                for rep in report.weights[u].representatives
            ]
            cells.append(
                {
                    "s": s,
                    "t": t,
                    "stem": t - s,
                    "e1": report.e1_total,
                    "e2": report.e2_total,
                    "verdict": cert.verdict,
                    "reps": reps,
                }
            )
    return {
        "schema": SCHEMA_VERSION,
        "p": session.ctx.p,
        "s_max": s_max,
        "t_max": t_max,
        "cells": cells,
    }


def _render_tsv(data: dict) -> str:
    lines = ["s\tt\tstem\te1\te2\tverdict\treps"]
    for cell in data["cells"]:
        reps = "; ".join(cell["reps"])
        lines.append(
            f"{cell['s']}\t{cell['t']}\t{cell['stem']}\t{cell['e1']}\t"
            f"{cell['e2']}\t{cell['verdict']}\t{reps}"
        )
    return "\n".join(lines) + "\n"


def _render_svg(data: dict) -> str:
    from xml.sax.saxutils import escape

    unit = 24
    pad = 48
    max_stem = max((c["stem"] for c in data["cells"]), default=0)
    max_s = data["s_max"]
    width = pad * 2 + unit * (max_stem + 1)
    height = pad * 2 + unit * (max_s + 1)

    def x_of(stem: int) -> int:
        return pad + unit // 2 + stem * unit

    def y_of(s: int) -> int:
        return height - pad - unit // 2 - s * unit

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<desc>second-term chart, p={data["p"]}, '
        f's&lt;={data["s_max"]}, t&lt;={data["t_max"]}</desc>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad + 8}" '
        f'y2="{height - pad}" stroke="#888"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{pad}" y2="{pad - 8}" '
        f'stroke="#888"/>',
    ]
    for stem in range(0, max_stem + 1, max(1, (max_stem + 1) // 12)):
        parts.append(
            f'<text x="{x_of(stem)}" y="{height - pad + 16}" font-size="10" '
            f'text-anchor="middle" fill="#888">{stem}</text>'
        )
    for s in range(max_s + 1):
        parts.append(
            f'<text x="{pad - 10}" y="{y_of(s) + 3}" font-size="10" '
            f'text-anchor="end" fill="#888">{s}</text>'
        )
    for cell in data["cells"]:
        cx, cy = x_of(cell["stem"]), y_of(cell["s"])
        exact = cell["verdict"] in (DIM_CERTIFIED, E1_EMPTY, E2_ZERO)
        fill = "#1f6feb" if exact else "none"
        label = escape("; ".join(cell["reps"]) or f"({cell['s']},{cell['t']})")
        parts.append(f'<g data-s="{cell["s"]}" data-t="{cell["t"]}">')
        parts.append(f"<title>{label}</title>")
        count = cell["e2"]
        if count <= 3:
            offsets = [(0, 0), (-5, 5), (5, 5)][:count]
            for dx, dy in offsets:
                parts.append(
                    f'<circle cx="{cx + dx}" cy="{cy + dy}" r="4" fill="{fill}" '
                    f'stroke="#1f6feb" stroke-width="1.5"/>'
                )
        else:
            parts.append(
                f'<circle cx="{cx}" cy="{cy}" r="6" fill="{fill}" '
                f'stroke="#1f6feb" stroke-width="1.5"/>'
            )
            parts.append(
                f'<text x="{cx + 8}" y="{cy - 6}" font-size="9" '
                f'fill="#1f6feb">{count}</text>'
            )
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_chart(data: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    if fmt == "tsv":
        return _render_tsv(data)
    if fmt == "svg":
        return _render_svg(data)
    raise InvalidParams(f"unknown chart format {fmt!r}")


# ---------------------------------------------------------------------------
# command tree


def _cli_expr(text, ctx: PrimeContext) -> int:
    try:
        return eval_expr(text, ctx)
    except ParseError as exc:
        raise click.UsageError(str(exc)) from exc


def _guard(fn):
    try:
        return fn()
    except ParseError as exc:
        raise click.UsageError(str(exc)) from exc
    except MayextError as exc:
        raise click.ClickException(str(exc)) from exc


@click.group()
@click.option("--prime", "-p", default=5, show_default=True, type=int, help="Odd prime.")
@click.option(
    "--cache-dir",
    envvar="MAYEXT_CACHE",
    type=click.Path(file_okay=False),
    default=None,
    help="Directory for the on-disk result cache.",
)
@click.pass_context
def main(ctx, prime, cache_dir):
    """Second-term cohomology computations and degree bookkeeping."""
    try:
        prime_ctx = PrimeContext(prime)
    except InvalidParams as exc:
        raise click.UsageError(str(exc)) from exc
    ctx.obj = Session(prime_ctx, cache_dir)


@main.command()
@click.argument("s")
@click.argument("t")
@click.pass_obj
def basis(session, s, t):
    """First-term monomial basis at filtration S, internal degree T."""
    ctx = session.ctx
    s_val, t_val = _cli_expr(s, ctx), _cli_expr(t, ctx)
    monomials = _guard(lambda: enumerate_basis(ctx, s_val, t_val))
    for mono in monomials:
        click.echo(f"{mono.text()}  u={mono.tridegree(ctx).u}")
    click.echo(f"total {len(monomials)}", err=True)


@main.command("d1")
@click.argument("element")
@click.pass_obj
def d1_command(session, element):
    """First differential of ELEMENT, e.g. 'a2' or '2 h[1,0] b[1,1]'."""
    ctx = session.ctx
    result = _guard(lambda: d1(parse_element(element, ctx), ctx))
    click.echo(result.text())


@main.command()
@click.argument("s")
@click.argument("t")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_obj
def e2(session, s, t, as_json):
    """Second-term summary at (S, T): weights, dims, representatives."""
    ctx = session.ctx
    s_val, t_val = _cli_expr(s, ctx), _cli_expr(t, ctx)
    report = _guard(lambda: session.report(s_val, t_val))
    if as_json:
        click.echo(json.dumps(report.serialize(), indent=2))
        return
    click.echo(f"({s_val},{t_val}): first-term dim {report.e1_total}, "
               f"second-term dim {report.e2_total}")
    for u in sorted(report.weights):
        blk = report.weights[u]
        if blk.e1_dim == 0:
            continue
        line = (
            f"  u={u}: e1={blk.e1_dim} cycles={blk.cycle_dim} "
            f"boundaries={blk.boundary_dim} e2={blk.e2_dim}"
        )
        if blk.representatives:
            line += "  [" + "; ".join(r.text() for r in blk.representatives) + "]"
        click.echo(line)


@main.command()
@click.argument("s")
@click.argument("t")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_obj
def vanish(session, s, t, as_json):
    """Vanishing/dimension certificate at (S, T)."""
    ctx = session.ctx
    s_val, t_val = _cli_expr(s, ctx), _cli_expr(t, ctx)
    cert = _guard(lambda: session_dim(session, s_val, t_val))
    if as_json:
        click.echo(json.dumps(cert.serialize(), indent=2))
        return
    rel = "=" if cert.certified_exact else "<="
    click.echo(f"({s_val},{t_val}): {cert.verdict}, dim {rel} {cert.dim}")


@main.command()
@click.argument("s")
@click.argument("t")
@click.option("--r-min", default=2, show_default=True, type=int)
@click.option("--r-max", required=True, type=int)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_obj
def window(session, s, t, r_min, r_max, as_json):
    """Differential targets and sources for a class at (S, T)."""
    ctx = session.ctx
    s_val, t_val = _cli_expr(s, ctx), _cli_expr(t, ctx)
    report = _guard(lambda: session_window(session, (s_val, t_val), r_min, r_max))
    if as_json:
        click.echo(json.dumps(report.serialize(), indent=2))
        return
    for row in report.rows:
        tgt = f"target ({row.target_bidegree[0]},{row.target_bidegree[1]}) {row.target.verdict}"
        if row.source is None:
            src = "source vacuous"
        else:
            src = f"source ({row.source_bidegree[0]},{row.source_bidegree[1]}) {row.source.verdict}"
        click.echo(f"r={row.r}: {tgt}; {src}")
    click.echo(
        f"permanent cycle up to r={report.permanent_cycle_up_to}; "
        f"not a boundary: {report.not_boundary}"
    )


@main.command()
@click.argument("spectrum", type=click.Choice(sorted(_COLUMNS)))
@click.argument("s")
@click.argument("t")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_obj
def les(session, spectrum, s, t, as_json):
    """Propagated dimension interval for SPECTRUM at (S, T)."""
    ctx = session.ctx
    s_val, t_val = _cli_expr(s, ctx), _cli_expr(t, ctx)

    def go():
        s_range, t_range = window_for(ctx, spectrum, s_val, t_val)
        table = sphere_table(ctx, s_range, t_range, homology=session.memo)
        return ext_dims(ctx, table, spectrum, s_val, t_val)

    res = _guard(go)
    if as_json:
        out = {"spectrum": spectrum, "s": s_val, "t": t_val, **res.serialize()}
        click.echo(json.dumps(out, indent=2))
        return
    exact = " (exact)" if res.exact else ""
    click.echo(f"{spectrum}({s_val},{t_val}): dim in [{res.lo},{res.hi}]{exact}")
    if res.provenance:
        click.echo(f"  via {res.provenance}")


@main.group()
def greek():
    """Degree bookkeeping for the periodic family indices."""


@greek.command("beta-list")
@click.argument("t_internal")
@click.option("--strict", is_flag=True, help="Use the stricter a=1 cap.")
@click.pass_obj
def greek_beta_list(session, t_internal, strict):
    """Admissible second-family indices in one internal degree."""
    ctx = session.ctx
    degree = _cli_expr(t_internal, ctx)
    for idx in _guard(lambda: enumerate_beta(ctx, degree, strict=strict)):
        click.echo(idx.text())


@greek.command("beta-check")
@click.argument("index")
@click.option("--strict", is_flag=True, help="Use the stricter a=1 cap.")
@click.pass_context
def greek_beta_check(ctx_click, index, strict):
    """Exit 0 if INDEX (beta[a,s,b,c]) is admissible, 1 otherwise."""
    session = ctx_click.obj

    def go():
        idx = parse_index(index)
        if not isinstance(idx, BetaIndex):
            raise ParseError(f"expected a beta index, got {index!r}")
        return beta_admissible(session.ctx, idx, strict=strict)

    ok = _guard(go)
    click.echo("admissible" if ok else "inadmissible")
    if not ok:
        ctx_click.exit(1)


@greek.command("ext0")
@click.argument("n")
@click.option("-t", "--t", "t_param", default="1", help="Outer exponent (default 1).")
@click.pass_obj
def greek_ext0(session, n, t_param):
    """Zero-line generators for the height-N truncation in one degree."""
    ctx = session.ctx
    n_val, t_val = _cli_expr(n, ctx), _cli_expr(t_param, ctx)
    t_internal = t_val * ctx.p**n_val * (ctx.p + 1) * ctx.q
    gens = _guard(lambda: enumerate_ext0_KR(ctx, t_internal, n_val, t_val))
    for gen in gens:
        click.echo(gen.text())
    click.echo(f"degree {t_internal}", err=True)


@greek.command("ext1")
@click.argument("n")
@click.pass_obj
def greek_ext1(session, n):
    """One-line generators in the degree p^n q column."""
    ctx = session.ctx
    n_val = _cli_expr(n, ctx)
    for gen in _guard(lambda: enumerate_ext1_BPK(ctx, n_val)):
        click.echo(gen.text())


@greek.command("alpha")
@click.argument("t_internal")
@click.pass_obj
def greek_alpha(session, t_internal):
    """First-family index in one internal degree, if any."""
    ctx = session.ctx
    degree = _cli_expr(t_internal, ctx)
    for idx in _guard(lambda: alpha_generators(ctx, degree)):
        click.echo(f"{idx.text()}  denominator {idx.denominator}")


@greek.command("thom")
@click.argument("index")
@click.pass_obj
def greek_thom(session, index):
    """Named cohomology class detecting INDEX, or NoDictionaryEntry."""
    ctx = session.ctx

    def go():
        idx = parse_index(index)
        try:
            return thom_image(ctx, idx).text()
        except NoDictionaryEntry:
            return "NoDictionaryEntry"

    click.echo(_guard(go))


@main.command()
@click.argument("family")
@click.option(
    "-P",
    "--param",
    "params",
    multiple=True,
    help="key=value; value may be an expression in p and q.",
)
@click.pass_obj
def stems(session, family, params):
    """Stem (t - s) of a family member, e.g. stems h0h -P n=2."""
    ctx = session.ctx
    kv = {}
    for item in params:
        key, sep, val = item.partition("=")
        if not sep:
            raise click.UsageError(f"-P takes key=value, got {item!r}")
        kv[key.strip()] = _cli_expr(val.strip(), ctx)
    click.echo(str(_guard(lambda: stem_of(ctx, family, kv))))


@main.command()
@click.option("--s-max", required=True, type=int)
@click.option("--t-max", "t_max", required=True)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "svg", "tsv"]),
    default="json",
    show_default=True,
)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def chart(session, s_max, t_max, fmt, output):
    """Nonzero second-term cells for s <= S_MAX, t <= T_MAX."""
    ctx = session.ctx
    t_val = _cli_expr(t_max, ctx)
    data = _guard(lambda: chart_data(session, s_max, t_val))
    text = render_chart(data, fmt)
    if output:
        Path(output).write_text(text)
        click.echo(f"wrote {output}", err=True)
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument(
    "claims_file", required=False, type=click.Path(exists=True, dir_okay=False)
)
@click.option("--jobs", default=1, show_default=True, type=int)
@click.option("--include-conjectures", is_flag=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def verify(ctx_click, claims_file, jobs, include_conjectures, as_json):
    """Check a JSON claims file (default: the shipped regression corpus)."""
    session = ctx_click.obj
    try:
        claims = load_claims(claims_file)
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"claims file is not valid JSON: {exc}") from exc
    except InvalidParams as exc:
        raise click.UsageError(str(exc)) from exc
    cache_dir = session.disk.root if session.disk else None
    results = run_claims(
        claims,
        cache_dir=cache_dir,
        jobs=jobs,
        include_conjectures=include_conjectures,
        sessions={session.ctx.p: session},
    )
    counts: dict[str, int] = {}
    for res in results:
        counts[res.status] = counts.get(res.status, 0) + 1
    ok = all(res.status in ("pass", "skipped-conjectural") for res in results)
    if as_json:
        out = {
            "ok": ok,
            "counts": counts,
            "results": [res.serialize() for res in results],
        }
        click.echo(json.dumps(out, indent=2))
    else:
        for res in results:
            kind = res.claim.get("kind") or "?"
            source = res.claim.get("source")
            tail = f"  ({source})" if source else ""
            click.echo(f"{res.index:3d} {res.status:<19} {kind:<15} {res.detail}{tail}")
        summary = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
        click.echo(f"{len(results)} claims: {summary}")
    if not ok:
        ctx_click.exit(1)


if __name__ == "__main__":
    main()
