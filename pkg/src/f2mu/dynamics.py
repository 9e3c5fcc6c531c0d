"""Running evidence: head reduction, traces, actions on terms and productivity.

Evidence for a nonterminating reduction unfolds lazily.  Head reduction
exposes a rule constant applied to its type arguments (a context and an
instance) and to the rest of the proof; reading those prefixes one after
another gives the evidence trace, and acting with each element on a term
replays the reduction.  Every replayed step is cross-checked against plain
rewriting.
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import UnfoldError
from .evidence import (
    EApp,
    EConst,
    ELam,
    EVar,
    Evidence,
    Mu,
    TyApp,
    TyLam,
    canonical_evidence,
    erase,
    ev_apply,
    ev_spine,
    is_type_arg,
    subst_evidence,
    subst_types_in_evidence,
)
from .kernel import Type, normalize_type
from .leibniz import LeibnizRule
from .printer import print_type
from .rewriting import (
    innermost_trace,
    reduction_tree,
    redexes_at,
    trs_multi_step,
    trs_one_step,
)
from .terms import (
    Context,
    Term,
    apply_term_subst,
    fill,
    hole_positions,
    print_term,
    type_to_context,
    type_to_term,
)

__all__ = [
    "HeadNormal",
    "StuckNormal",
    "Exhausted",
    "head_step",
    "head_reduce",
    "TraceElement",
    "Trace",
    "evidence_trace",
    "act",
    "oracle_act",
    "step_unfold",
    "ProductiveTo",
    "NotProductive",
    "Unknown",
    "bounded_hhn",
    "trs_one_step",
    "trs_multi_step",
    "innermost_trace",
    "reduction_tree",
]

DEFAULT_FUEL = 1000
DEFAULT_TRACE_LENGTH = 20
DEFAULT_PRODUCTIVITY_DEPTH = 10


# ---------------------------------------------------------------- head reduction


def head_step(e: Evidence, defs: Mapping[str, Evidence] | None = None) -> Optional[tuple[str, Evidence]]:
    """One step in head position: ``delta`` (unfold a definition), ``mu``,
    ``beta`` (evidence) or ``tau`` (type).  ``None`` when no step applies."""
    defs = defs or {}
    match e:
        case ELam(x, ann, b):
            r = head_step(b, defs)
            return None if r is None else (r[0], ELam(x, ann, r[1]))
        case TyLam(x, b, k):
            r = head_step(b, defs)
            return None if r is None else (r[0], TyLam(x, r[1], k))
    head, args = ev_spine(e)
    match head:
        case Mu(x, b, _):
            return "mu", ev_apply(subst_evidence(b, x, head), args)
        case ELam(x, _, b) if args and not is_type_arg(args[0]):
            return "beta", ev_apply(subst_evidence(b, x, args[0]), args[1:])  # type: ignore[arg-type]
        case TyLam(x, b, _) if args and is_type_arg(args[0]):
            return "tau", ev_apply(subst_types_in_evidence({x: args[0]}, b), args[1:])  # type: ignore[dict-item]
        case EVar(n) | EConst(n) if n in defs:
            return "delta", ev_apply(defs[n], args)
    return None


@dataclass(frozen=True)
class HeadNormal:
    """``\\ binders . head T1 .. Tn e1 .. em`` with a rule constant at the head."""

    head: str
    type_args: tuple[Type, ...]
    remainder: tuple[Evidence, ...]
    term: Evidence
    steps: int


@dataclass(frozen=True)
class StuckNormal:
    term: Evidence
    reason: str


@dataclass(frozen=True)
class Exhausted:
    term: Evidence
    fuel: int


HeadResult = Union[HeadNormal, StuckNormal, Exhausted]


def _strip_binders(e: Evidence) -> Evidence:
    while isinstance(e, (ELam, TyLam)):
        e = e.body
    return e


def head_reduce(e: Evidence, defs: Mapping[str, Evidence] | None = None,
                fuel: int = DEFAULT_FUEL, constants: frozenset[str] | None = None) -> HeadResult:
    """Head-reduce until a constant surfaces.

    ``constants`` are the names that may head a normal form (rule axioms);
    by default any name without a definition qualifies.
    """
    defs = defs or {}
    used = 0
    while True:
        head, args = ev_spine(_strip_binders(e))
        if isinstance(head, (EVar, EConst)) and head.name not in defs:
            if constants is not None and head.name not in constants:
                return StuckNormal(e, f"{head.name} is not a rule constant")
            k = 0
            while k < len(args) and is_type_arg(args[k]):
                k += 1
            if any(is_type_arg(a) for a in args[k:]):
                return StuckNormal(e, "type arguments after evidence arguments")
            types = tuple(normalize_type(t) for t in args[:k])  # type: ignore[arg-type]
            return HeadNormal(head.name, types, tuple(args[k:]), e, used)  # type: ignore[arg-type]
        if used >= fuel:
            return Exhausted(e, fuel)
        r = head_step(e, defs)
        if r is None:
            return StuckNormal(e, "no head redex")
        e = r[1]
        used += 1


def head_reduction_sequence(e: Evidence, defs: Mapping[str, Evidence] | None = None,
                            limit: int = DEFAULT_FUEL) -> Iterator[tuple[str, Evidence]]:
    for _ in range(limit):
        r = head_step(e, defs)
        if r is None:
            return
        yield r
        e = r[1]


# ---------------------------------------------------------------- traces


@dataclass(frozen=True)
class TraceElement:
    """A rule constant with its context and the instance of its variables."""

    rule: str
    type_args: tuple[Type, ...]
    context: Optional[Context]
    instantiation: tuple[Term, ...]

    def __str__(self) -> str:
        if self.context is None:
            # not a first-order context: show the type arguments as they are
            if not self.type_args:
                return f"({self.rule}, ?, [])"
            rest = ", ".join(print_type(t) for t in self.type_args[1:])
            return f"({self.rule}, {print_type(self.type_args[0])}, [{rest}])"
        inst = ", ".join(print_term(t) for t in self.instantiation)
        return f"({self.rule}, {print_term(self.context)}, [{inst}])"


@dataclass
class Trace:
    elements: list[TraceElement] = field(default_factory=list)
    # "length" (requested length reached), "finite" (ran out of evidence) or "undefined"
    verdict: str = "length"
    residuals: list[Evidence] = field(default_factory=list)


def _element(h: HeadNormal) -> TraceElement:
    ctx: Optional[Context] = None
    inst: list[Term] = []
    if h.type_args:
        try:
            ctx = type_to_context(h.type_args[0])
            inst = [type_to_term(t) for t in h.type_args[1:]]  # type: ignore[misc]
        except ValueError:
            ctx, inst = None, []
    return TraceElement(h.head, h.type_args, ctx, tuple(inst))


def evidence_trace(e: Evidence, length: int, defs: Mapping[str, Evidence] | None = None,
                   fuel: int = DEFAULT_FUEL, constants: frozenset[str] | None = None) -> Trace:
    """The first ``length`` elements of the trace of ``e``."""
    out = Trace()
    for _ in range(length):
        r = head_reduce(e, defs, fuel, constants)
        if isinstance(r, Exhausted):
            out.verdict = "undefined"
            return out
        if isinstance(r, StuckNormal):
            out.verdict = "finite"
            return out
        out.elements.append(_element(r))
        if not r.remainder:
            out.verdict = "finite"
            return out
        e = r.remainder[-1]
        out.residuals.append(e)
    return out


# ---------------------------------------------------------------- actions


def act(elem: TraceElement, rules: Mapping[str, LeibnizRule], t: Term) -> Optional[Term]:
    """Rewrite every hole of the element's context at once; ``None`` if undefined."""
    rule = rules.get(elem.rule)
    if rule is None or elem.context is None or len(elem.instantiation) != len(rule.variables):
        return None
    sigma = dict(zip(rule.variables, elem.instantiation))
    if fill(elem.context, apply_term_subst(sigma, rule.lhs)) != t:
        return None
    return fill(elem.context, apply_term_subst(sigma, rule.rhs))  # type: ignore[return-value]


def oracle_act(elem: TraceElement, rules: Sequence[LeibnizRule], t: Term) -> Optional[Term]:
    """The same step done by plain rewriting, one hole at a time from the left."""
    if elem.context is None:
        return None
    cur = t
    for pos in hole_positions(elem.context):
        hits = [r for r in redexes_at(rules, cur, pos) if r.rule == elem.rule]
        if not hits:
            return None
        cur = hits[0].result
    return cur


def step_unfold(e: Evidence, start: Term, n: int, rules: Sequence[LeibnizRule],
                defs: Mapping[str, Evidence] | None = None, fuel: int = DEFAULT_FUEL) -> list[Term]:
    """Terms reached by acting with the first ``n`` trace elements, starting with ``start``."""
    table = {r.name: r for r in rules}
    trace = evidence_trace(e, n, defs, fuel, frozenset(table))
    if len(trace.elements) < n:
        raise UnfoldError(len(trace.elements) + 1, f"the evidence trace is {trace.verdict}")
    terms = [start]
    for i, elem in enumerate(trace.elements, start=1):
        t = terms[-1]
        nxt = act(elem, table, t)
        if nxt is None:
            raise UnfoldError(i, f"{elem} does not act on {print_term(t)}")
        check = oracle_act(elem, rules, t)
        if check != nxt:
            raise UnfoldError(i, f"rewriting disagrees with {elem} on {print_term(t)}")
        terms.append(nxt)
    return terms


# ---------------------------------------------------------------- productivity


@dataclass(frozen=True)
class ProductiveTo:
    depth: int


@dataclass(frozen=True)
class NotProductive:
    witness: Evidence


@dataclass(frozen=True)
class Unknown:
    reason: str


Productivity = Union[ProductiveTo, NotProductive, Unknown]


def _hn(e: Evidence, defs: Mapping[str, Evidence], fuel: int) -> tuple[str, object]:
    """Head normal form under beta, mu and unfolding, with cycle detection."""
    seen: set[tuple] = set()
    for _ in range(fuel + 1):
        key = canonical_evidence(e)
        if key in seen:
            return "cycle", e
        seen.add(key)
        r = head_step(e, defs)
        if r is None:
            return "normal", e
        e = r[1]
    return "fuel", e


def bounded_hhn(e: Evidence, depth: int = DEFAULT_PRODUCTIVITY_DEPTH,
                defs: Mapping[str, Evidence] | None = None, fuel: int = DEFAULT_FUEL,
                budget: int = 100_000) -> Productivity:
    """Check hereditary head normalization of ``|e|`` down to ``depth`` levels."""
    erased_defs = {k: erase(v) for k, v in (defs or {}).items()}
    nodes = [0]

    def go(u: Evidence, d: int) -> Optional[Productivity]:
        if d == 0:
            return None
        nodes[0] += 1
        if nodes[0] > budget:
            return Unknown("node budget exhausted")
        status, nf = _hn(u, erased_defs, fuel)
        if status == "cycle":
            return NotProductive(nf)  # type: ignore[arg-type]
        if status == "fuel":
            return Unknown(f"no head normal form within {fuel} steps")
        head, args = ev_spine(_strip_binders(nf))  # type: ignore[arg-type]
        if not isinstance(head, (EVar, EConst)):
            return NotProductive(nf)  # type: ignore[arg-type]
        for a in args:
            r = go(a, d - 1)  # type: ignore[arg-type]
            if r is not None:
                return r
        return None

    r = go(erase(e), depth)
    return ProductiveTo(depth) if r is None else r


def count_type_redexes(e: Evidence) -> int:
    """Type-level beta redexes: type abstractions applied to a type."""
    match e:
        case TyApp(TyLam(), _):
            return 1 + count_type_redexes(e.fun) + _type_redexes(e.arg)
        case TyApp(f, t):
            return count_type_redexes(f) + _type_redexes(t)
        case EApp(f, a):
            return count_type_redexes(f) + count_type_redexes(a)
        case ELam(_, ann, b) | Mu(_, b, ann):
            return count_type_redexes(b) + (0 if ann is None else _type_redexes(ann))
        case TyLam(_, b, _):
            return count_type_redexes(b)
    return 0


def _type_redexes(t: Type) -> int:
    from .kernel import App, Forall, Imply, Lam

    match t:
        case App(Lam(), a):
            return 1 + _type_redexes(t.fun) + _type_redexes(a)
        case App(f, a) | Imply(f, a):
            return _type_redexes(f) + _type_redexes(a)
        case Lam(_, b) | Forall(_, _, b):
            return _type_redexes(b)
    return 0
