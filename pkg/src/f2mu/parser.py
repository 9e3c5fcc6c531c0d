"""Parser for input files.

A declaration starts at column 0; indented lines continue it.  Capitalized
identifiers are constants, everything else is a variable.  ``--`` lines are
comments.  Quantified variables get their kind from how often they are
applied in the body, constants from how often they are applied anywhere in
the file.
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass

from .errors import ArityConflict, KindError, ParseError
from .evidence import EApp, EConst, ELam, EVar, Evidence, Mu
from .kernel import (
    App,
    Const,
    Forall,
    Imply,
    Kind,
    Lam,
    Type,
    Var,
    arity_kind,
    spine,
)
from .program import Command, FullTree, InnerTrace, Program, ProofDecl, RuleDecl, Step
from .terms import Term, term_to_type, type_to_term

_TOKEN = re.compile(
    r"(?P<ws>[ \t]+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<int>\d+)"
    r"|(?P<sym>=>|<=|[\\.():=\[\]])"
)

KEYWORDS = {"forall", "mu"}


@dataclass(frozen=True)
class Token:
    kind: str  # "name" | "int" | "sym" | "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[list[Token]]:
    """Tokens grouped into declaration blocks."""
    blocks: list[list[Token]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.lstrip().startswith("--") or not raw.strip():
            continue
        pos = 0
        line_tokens: list[Token] = []
        while pos < len(raw):
            m = _TOKEN.match(raw, pos)
            if m is None:
                if raw.startswith("--", pos):
                    break
                raise ParseError(lineno, pos + 1, "a token", raw[pos])
            kind = m.lastgroup
            assert kind is not None
            if kind != "ws":
                line_tokens.append(Token(kind, m.group(), lineno, pos + 1))
            pos = m.end()
        if not line_tokens:
            continue
        if line_tokens[0].col == 1 or not blocks:
            blocks.append(line_tokens)
        else:
            blocks[-1].extend(line_tokens)
    return blocks


def _is_const(name: str) -> bool:
    return name[0].isupper()


class _Stream:
    def __init__(self, tokens: list[Token]) -> None:
        self.toks = tokens
        self.i = 0
        last = tokens[-1] if tokens else Token("eof", "", 1, 1)
        self.eof = Token("eof", "", last.line, last.col + len(last.text))

    def peek(self, k: int = 0) -> Token:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else self.eof

    def next(self) -> Token:
        t = self.peek()
        self.i += 1
        return t

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("sym", "name") and t.text == text

    def expect(self, text: str) -> Token:
        t = self.peek()
        if not self.at(text):
            raise ParseError(t.line, t.col, repr(text), t.text or "end of declaration")
        return self.next()

    def name(self, what: str = "a name") -> Token:
        t = self.peek()
        if t.kind != "name" or t.text in KEYWORDS:
            raise ParseError(t.line, t.col, what, t.text or "end of declaration")
        return self.next()

    def integer(self) -> int:
        t = self.peek()
        if t.kind != "int":
            raise ParseError(t.line, t.col, "a number", t.text or "end of declaration")
        self.next()
        return int(t.text)

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def expect_end(self) -> None:
        if not self.done():
            t = self.peek()
            raise ParseError(t.line, t.col, "end of declaration", t.text)


# ---------------------------------------------------------------- types


def _binder_arity(x: str, body: Type) -> int:
    found: list[int] = []

    def visit(t: Type) -> None:
        match t:
            case Lam(y, b) | Forall(y, _, b):
                if y != x:
                    visit(b)
            case Imply(a, c):
                visit(a)
                visit(c)
            case App() | Var() | Const():
                head, args = spine(t)
                if isinstance(head, Var) and head.name == x:
                    found.append(len(args))
                elif not isinstance(head, (Var, Const)):
                    visit(head)
                for a in args:
                    visit(a)

    visit(body)
    if not found:
        return 0
    if any(n != found[0] for n in found):
        raise KindError(f"{x} is applied to {found[0]} and to {max(set(found) - {found[0]})} arguments",
                        body)
    return found[0]


def _parse_type(s: _Stream) -> Type:
    if s.at("forall"):
        s.next()
        names = [s.name("a quantified variable").text]
        while not s.at("."):
            names.append(s.name("a quantified variable or '.'").text)
        s.expect(".")
        body = _parse_type(s)
        for x in reversed(names):
            if _is_const(x):
                t = s.peek()
                raise ParseError(t.line, t.col, "a lowercase quantified variable", x)
            body = Forall(x, arity_kind(_binder_arity(x, body)), body)
        return body
    if s.at("\\"):
        s.next()
        names = [s.name("a bound variable").text]
        while not s.at("."):
            names.append(s.name("a bound variable or '.'").text)
        s.expect(".")
        body = _parse_type(s)
        for x in reversed(names):
            body = Lam(x, body)
        return body
    left = _parse_type_app(s)
    if s.at("=>"):
        s.next()
        return Imply(left, _parse_type(s))
    return left


def _type_atom_start(s: _Stream) -> bool:
    t = s.peek()
    return (t.kind == "name" and t.text not in KEYWORDS) or s.at("(") or s.at("[")


def _parse_type_atom(s: _Stream) -> Type:
    t = s.peek()
    if s.at("("):
        s.next()
        inner = _parse_type(s)
        s.expect(")")
        return inner
    if s.at("["):
        # bracketed eigenvariables appear in diagnostics; accept them back
        s.next()
        n = s.name().text
        s.expect("]")
        return Var(n)
    if t.kind == "name" and t.text not in KEYWORDS:
        s.next()
        return Const(t.text) if _is_const(t.text) else Var(t.text)
    raise ParseError(t.line, t.col, "a type", t.text or "end of declaration")


def _parse_type_app(s: _Stream) -> Type:
    head = _parse_type_atom(s)
    while _type_atom_start(s):
        head = App(head, _parse_type_atom(s))
    return head


# ---------------------------------------------------------------- evidence


def _parse_evidence(s: _Stream) -> Evidence:
    if s.at("\\"):
        s.next()
        binders: list[tuple[str, Type | None]] = []
        while not s.at("."):
            if s.at("("):
                s.next()
                n = s.name("a binder").text
                s.expect(":")
                ann = _parse_type(s)
                s.expect(")")
                binders.append((n, ann))
            else:
                binders.append((s.name("a binder or '.'").text, None))
        if not binders:
            t = s.peek()
            raise ParseError(t.line, t.col, "a binder", ".")
        s.expect(".")
        body = _parse_evidence(s)
        for n, ann in reversed(binders):
            body = ELam(n, ann, body)
        return body
    if s.at("mu"):
        s.next()
        n = s.name("a bound variable").text
        s.expect(".")
        return Mu(n, _parse_evidence(s))
    head = _parse_evidence_atom(s)
    while _evidence_atom_start(s):
        head = EApp(head, _parse_evidence_atom(s))
    return head


def _evidence_atom_start(s: _Stream) -> bool:
    t = s.peek()
    return (t.kind == "name" and t.text not in KEYWORDS) or s.at("(") or s.at("[")


def _parse_evidence_atom(s: _Stream) -> Evidence:
    t = s.peek()
    if s.at("("):
        s.next()
        inner = _parse_evidence(s)
        s.expect(")")
        return inner
    if s.at("["):
        s.next()
        n = s.name().text
        s.expect("]")
        return EVar(n)
    if t.kind == "name" and t.text not in KEYWORDS:
        s.next()
        return EConst(t.text) if _is_const(t.text) else EVar(t.text)
    raise ParseError(t.line, t.col, "evidence", t.text or "end of declaration")


# ---------------------------------------------------------------- declarations


def _to_term(t: Type, where: Token) -> Term:
    try:
        out = type_to_term(t)
    except ValueError:
        raise ParseError(where.line, where.col, "a first-order term", str(t)) from None
    return out  # type: ignore[return-value]


@dataclass
class _Signature:
    name: str
    type: Type
    token: Token


@dataclass
class _Equation:
    name: str
    params: tuple[str, ...]
    body: Evidence
    token: Token


def _parse_block(tokens: list[Token]):
    s = _Stream(tokens)
    if s.at(":") and s.peek(1).kind == "name" and s.peek(1).text in ("full", "inner"):
        s.next()
        which = s.next().text
        depth = s.integer()
        where = s.peek()
        term = _to_term(_parse_type(s), where)
        s.expect_end()
        return FullTree(depth, term) if which == "full" else InnerTrace(depth, term)
    if (s.at("step") and s.peek(1).kind == "name" and s.peek(2).kind == "int"
            and len(tokens) == 3):
        s.next()
        n = s.next().text
        return Step(n, s.integer())
    name_tok = s.name("a declaration name")
    if s.at(":"):
        s.next()
        where = s.peek()
        t = _parse_type(s)
        if s.at("<="):
            s.next()
            rhs_where = s.peek()
            rhs = _parse_type(s)
            s.expect_end()
            lhs_term = _to_term(t, where)
            rhs_term = _to_term(rhs, rhs_where)
            try:
                return RuleDecl(name_tok.text, lhs_term, rhs_term)
            except ValueError as exc:
                raise ParseError(where.line, where.col, "a well-formed rewrite rule", str(exc)) from None
        if s.at("="):
            s.next()
            body = _parse_evidence(s)
            s.expect_end()
            return (_Signature(name_tok.text, t, name_tok),
                    _Equation(name_tok.text, (), body, name_tok), True)
        s.expect_end()
        return _Signature(name_tok.text, t, name_tok)
    params: list[str] = []
    while not s.at("="):
        params.append(s.name("a parameter or '='").text)
    s.expect("=")
    body = _parse_evidence(s)
    s.expect_end()
    return _Equation(name_tok.text, tuple(params), body, name_tok)


def constant_arities(types: Iterable[Type], seen: dict[str, int] | None = None) -> dict[str, int]:
    """Arity of every constant, read off application spines."""
    seen = {} if seen is None else seen

    def visit(t: Type) -> None:
        match t:
            case Lam(_, b) | Forall(_, _, b):
                visit(b)
            case Imply(a, c):
                visit(a)
                visit(c)
            case App() | Var() | Const():
                head, args = spine(t)
                if isinstance(head, Const):
                    prev = seen.setdefault(head.name, len(args))
                    if prev != len(args):
                        raise ArityConflict(head.name, prev, len(args))
                elif not isinstance(head, Var):
                    visit(head)
                for a in args:
                    visit(a)

    for t in types:
        visit(t)
    return seen


def parse_program(text: str) -> Program:
    prog = Program()
    signatures: dict[str, _Signature] = {}
    sig_order: list[str] = []
    equations: dict[str, _Equation] = {}
    annotated: set[str] = set()
    located: list[tuple[Token, Iterable[Type]]] = []
    for block in tokenize(text):
        item = _parse_block(block)
        if isinstance(item, tuple):
            sig, eq, _ = item
            items = [sig, eq]
            annotated.add(sig.name)
        else:
            items = [item]
        for it in items:
            match it:
                case RuleDecl():
                    if any(r.name == it.name for r in prog.rule_decls):
                        t = block[0]
                        raise ParseError(t.line, t.col, "a fresh rule name", it.name)
                    prog.rule_decls.append(it)
                    located.append((block[0], [term_to_type(it.lhs), term_to_type(it.rhs)]))
                case _Signature():
                    if it.name in signatures:
                        raise ParseError(it.token.line, it.token.col, "a fresh declaration name", it.name)
                    signatures[it.name] = it
                    sig_order.append(it.name)
                    located.append((it.token, [it.type]))
                case _Equation():
                    if it.name in equations:
                        raise ParseError(it.token.line, it.token.col, "a single equation per name", it.name)
                    equations[it.name] = it
                case Step() | FullTree() | InnerTrace():
                    prog.commands.append(it)
                    if not isinstance(it, Step):
                        located.append((block[0], [term_to_type(it.term)]))
    for n, eq in equations.items():
        if n not in signatures:
            raise ParseError(eq.token.line, eq.token.col, f"a type declaration for {n}", n)
    for n in sig_order:
        sig = signatures[n]
        if n in equations:
            eq = equations[n]
            prog.proof_decls.append(ProofDecl(n, sig.type, eq.params, eq.body, n in annotated))
        else:
            prog.axiom_decls.append((n, sig.type))
    seen: dict[str, int] = {}
    for where, types in located:
        try:
            constant_arities(types, seen)
        except ArityConflict as err:
            raise ArityConflict(err.symbol, *err.arities, where.line, where.col) from None
    prog.constant_kinds = {k: arity_kind(n) for k, n in sorted(seen.items())}
    return prog


def _single(text: str, parse):
    blocks = tokenize(text)
    toks = [t for b in blocks for t in b]
    s = _Stream(toks)
    out = parse(s)
    s.expect_end()
    return out


def parse_type(text: str) -> Type:
    return _single(text, _parse_type)


def parse_evidence(text: str) -> Evidence:
    return _single(text, _parse_evidence)


def parse_term(text: str) -> Term:
    def go(s: _Stream) -> Term:
        where = s.peek()
        return _to_term(_parse_type(s), where)

    return _single(text, go)


def parse_command(text: str) -> Command:
    blocks = tokenize(text)
    if len(blocks) != 1:
        raise ParseError(1, 1, "a single command", text)
    out = _parse_block(blocks[0])
    if not isinstance(out, (Step, FullTree, InnerTrace)):
        raise ParseError(1, 1, "a command", text)
    return out


def free_var_kinds(t: Type) -> dict[str, Kind]:
    """Kinds for the free variables of a declared type, by application arity."""
    from .kernel import free_vars_in_order

    return {x: arity_kind(_binder_arity(x, t)) for x in free_vars_in_order(t)}

