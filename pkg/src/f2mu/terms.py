"""First-order terms and term contexts, with conversions to and from flat types."""

from __future__ import annotations

from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from typing import Union

from .kernel import Const, Lam, Type, Var, mk_app, spine

Position = tuple[int, ...]


@dataclass(frozen=True)
class TVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class TApp:
    symbol: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True)
class THole:
    """The hole of a term context."""

    def __str__(self) -> str:
        return "•"


Term = Union[TVar, TApp]
Context = Union[TVar, TApp, THole]
HOLE = THole()


def print_term(t: Context) -> str:
    match t:
        case TVar(n):
            return n
        case THole():
            return "•"
        case TApp(f, args):
            if not args:
                return f
            parts = [f]
            for a in args:
                s = print_term(a)
                parts.append(f"({s})" if isinstance(a, TApp) and a.args else s)
            return " ".join(parts)
    raise AssertionError(t)


def term_vars(t: Context) -> list[str]:
    """Variables by first occurrence."""
    out: list[str] = []

    def go(u: Context) -> None:
        match u:
            case TVar(n):
                if n not in out:
                    out.append(n)
            case TApp(_, args):
                for a in args:
                    go(a)

    go(t)
    return out


def term_size(t: Context) -> int:
    if isinstance(t, TApp):
        return 1 + sum(term_size(a) for a in t.args)
    return 1


def subterm(t: Context, pos: Position) -> Context:
    for i in pos:
        assert isinstance(t, TApp)
        t = t.args[i - 1]
    return t


def replace_at(t: Context, pos: Position, new: Context) -> Context:
    if not pos:
        return new
    assert isinstance(t, TApp)
    i = pos[0] - 1
    args = list(t.args)
    args[i] = replace_at(args[i], pos[1:], new)
    return TApp(t.symbol, tuple(args))


def positions(t: Context) -> Iterator[Position]:
    """All positions, pre-order and left to right; arguments are numbered from 1."""
    yield ()
    if isinstance(t, TApp):
        for i, a in enumerate(t.args, start=1):
            for p in positions(a):
                yield (i,) + p


def apply_term_subst(sigma: Mapping[str, Term], t: Context) -> Context:
    match t:
        case TVar(n):
            return sigma.get(n, t)
        case TApp(f, args):
            return TApp(f, tuple(apply_term_subst(sigma, a) for a in args))
    return t


def hole_positions(c: Context) -> list[Position]:
    return [p for p in positions(c) if isinstance(subterm(c, p), THole)]


def fill(c: Context, fillers: Sequence[Context] | Context) -> Context:
    """``C[t1, .., tn]``, left to right; a single filler is reused for every hole."""
    if not isinstance(fillers, Sequence):
        fillers = [fillers] * len(hole_positions(c))
    it = iter(fillers)

    def go(u: Context) -> Context:
        match u:
            case THole():
                return next(it)
            case TApp(f, args):
                return TApp(f, tuple(go(a) for a in args))
        return u

    return go(c)


def match_term(pattern: Term, t: Context, sigma: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """First-order matching; returns the extended substitution or ``None``."""
    sigma = {} if sigma is None else dict(sigma)
    stack = [(pattern, t)]
    while stack:
        p, u = stack.pop()
        match p:
            case TVar(n):
                if isinstance(u, THole):
                    return None
                bound = sigma.get(n)
                if bound is None:
                    sigma[n] = u  # type: ignore[assignment]
                elif bound != u:
                    return None
            case TApp(f, args):
                if not isinstance(u, TApp) or u.symbol != f or len(u.args) != len(args):
                    return None
                stack.extend(zip(args, u.args))
    return sigma


# ---------------------------------------------------------------- conversions


def term_to_type(t: Context, hole: str | None = None) -> Type:
    match t:
        case TVar(n):
            return Var(n)
        case THole():
            if hole is None:
                raise ValueError("context has a hole but no hole variable was given")
            return Var(hole)
        case TApp(f, args):
            return mk_app(Const(f), [term_to_type(a, hole) for a in args])
    raise AssertionError(t)


def type_to_term(t: Type, hole: str | None = None) -> Context:
    """Inverse of ``term_to_type`` on flat types with a constant head at every application."""
    if isinstance(t, Var):
        return HOLE if t.name == hole else TVar(t.name)
    head, args = spine(t)
    if not isinstance(head, Const):
        raise ValueError(f"{t} is not a first-order term")
    return TApp(head.name, tuple(type_to_term(a, hole) for a in args))


def context_to_type(c: Context, hole: str = "y") -> Type:
    """``C`` as the second-order type ``\\ y . C[y, .., y]``."""
    avoid = set(term_vars(c))
    while hole in avoid:
        hole += "'"
    return Lam(hole, term_to_type(c, hole))


def type_to_context(t: Type) -> Context:
    """``\\ y . C[y, .., y]`` back to ``C``; ``t`` must be a normal one-binder type."""
    if not isinstance(t, Lam):
        raise ValueError(f"{t} is not a context")
    return type_to_term(t.body, t.binder)


def is_first_order(t: Type) -> bool:
    try:
        c = type_to_term(t)
    except ValueError:
        return False
    return not hole_positions(c)
