"""Rewrite rules as axioms ``forall p x1 .. xn . p r => p l``.

An axiom of that shape lets ``p`` stand for an arbitrary term context, so
one axiom covers every position a rule can fire at.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import ArityConflict
from .kernel import (
    STAR,
    App,
    Arrow,
    Forall,
    Imply,
    Kind,
    Type,
    Var,
    arity_kind,
    foralls,
    spine,
)
from .program import Program, RuleDecl
from .terms import Term, TVar, term_to_type, term_vars, type_to_term

CONTEXT_VAR = "p"


@dataclass(frozen=True)
class LeibnizRule:
    """A rule together with the binder order of its axiom."""

    name: str
    lhs: Term
    rhs: Term
    variables: tuple[str, ...]

    def __str__(self) -> str:
        from .terms import print_term

        return f"{self.name} : {print_term(self.lhs)} <= {print_term(self.rhs)}"


def _context_var(avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    p = CONTEXT_VAR
    while p in avoid:
        p += "'"
    return p


def axiom_type(lhs: Term, rhs: Term, variables: Sequence[str] | None = None) -> Type:
    xs = list(term_vars(lhs)) if variables is None else list(variables)
    p = _context_var(xs)
    body = Imply(App(Var(p), term_to_type(rhs)), App(Var(p), term_to_type(lhs)))
    return Forall(p, Arrow(STAR), foralls([(x, STAR) for x in xs], body))


def rule_of_decl(rule: RuleDecl) -> LeibnizRule:
    return LeibnizRule(rule.name, rule.lhs, rule.rhs, tuple(term_vars(rule.lhs)))


def rule_of_axiom(name: str, t: Type) -> LeibnizRule | None:
    """Read ``forall p xs . p r => p l`` back as the rule ``l -> r``."""
    if not isinstance(t, Forall) or t.kind != Arrow(STAR):
        return None
    p = t.binder
    body = t.body
    xs: list[str] = []
    while isinstance(body, Forall):
        if body.kind != STAR:
            return None
        xs.append(body.binder)
        body = body.body
    if not isinstance(body, Imply):
        return None
    parts = []
    for side in (body.antecedent, body.consequent):
        head, args = spine(side)
        if head != Var(p) or len(args) != 1:
            return None
        try:
            term = type_to_term(args[0])
        except ValueError:
            return None
        parts.append(term)
    rhs, lhs = parts
    if isinstance(lhs, TVar) or p in term_vars(lhs) or p in term_vars(rhs):
        return None
    if set(term_vars(lhs)) != set(xs) or not set(term_vars(rhs)) <= set(xs):
        return None
    return LeibnizRule(name, lhs, rhs, tuple(xs))  # type: ignore[arg-type]


def symbol_kinds(rules: Iterable[LeibnizRule]) -> dict[str, Kind]:
    arities: dict[str, int] = {}

    def visit(t: Term) -> None:
        if isinstance(t, TVar):
            return
        prev = arities.setdefault(t.symbol, len(t.args))
        if prev != len(t.args):
            raise ArityConflict(t.symbol, prev, len(t.args))
        for a in t.args:
            visit(a)

    for r in rules:
        visit(r.lhs)
        visit(r.rhs)
    return {k: arity_kind(n) for k, n in sorted(arities.items())}


def leibniz_translate(rules: Iterable[RuleDecl | LeibnizRule]) -> tuple[dict[str, Kind], dict[str, Type]]:
    """Kinds of the function symbols and one axiom per rule."""
    lrules = [r if isinstance(r, LeibnizRule) else rule_of_decl(r) for r in rules]
    delta = symbol_kinds(lrules)
    gamma: dict[str, Type] = {}
    for r in lrules:
        gamma[r.name] = axiom_type(r.lhs, r.rhs, r.variables)
    return delta, gamma


def rewrite_system(program: Program) -> list[LeibnizRule]:
    """Rules from ``<=`` declarations, then from axioms that have rule shape."""
    out = [rule_of_decl(r) for r in program.rule_decls]
    for name, t in program.axiom_decls:
        r = rule_of_axiom(name, t)
        if r is not None:
            out.append(r)
    return out
