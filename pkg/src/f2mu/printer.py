"""Pretty printing of types and evidence.

Single-line printing uses minimal parentheses and prefix application.  The
multi-line layout is a small Wadler-style document renderer with an ``align``
combinator, so arguments and bodies hang relative to where their head starts.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import Union

from .evidence import (
    EApp,
    EConst,
    ELam,
    EVar,
    Evidence,
    Hole,
    Mu,
    TyApp,
    TyLam,
)
from .kernel import App, Const, Forall, Imply, Lam, Type, Var

DEFAULT_WIDTH = 100
DEFAULT_RIBBON = 67
_WIDE = 10**9


# ---------------------------------------------------------------- documents


@dataclass(frozen=True)
class Text:
    s: str


@dataclass(frozen=True)
class Line:
    """A space when its group is flat, otherwise a newline plus indentation."""


@dataclass(frozen=True)
class Cat:
    parts: tuple["Doc", ...]


@dataclass(frozen=True)
class Nest:
    indent: int
    doc: "Doc"


@dataclass(frozen=True)
class Align:
    doc: "Doc"


@dataclass(frozen=True)
class Group:
    doc: "Doc"


Doc = Union[Text, Line, Cat, Nest, Align, Group]
LINE = Line()


def cat(*parts: Doc) -> Doc:
    return Cat(tuple(parts))


def _fits(room: int, items: list[tuple[int, bool, Doc]]) -> bool:
    # items are in print order; stop at the first newline of a broken group
    todo = list(reversed(items))
    while todo:
        if room < 0:
            return False
        i, flat, d = todo.pop()
        match d:
            case Text(s):
                room -= len(s)
            case Line():
                if not flat:
                    return True
                room -= 1
            case Cat(parts):
                for p in reversed(parts):
                    todo.append((i, flat, p))
            case Nest(_, x) | Align(x) | Group(x):
                todo.append((i, flat, x))
    return room >= 0


def render(doc: Doc, width: int = DEFAULT_WIDTH, start_col: int = 0,
           ribbon: int = DEFAULT_RIBBON, line_start: int | None = None) -> str:
    """Lay out ``doc``: a line may reach column ``width`` but carry at most
    ``ribbon`` characters after its indentation."""
    out: list[str] = []
    col = start_col
    indent = start_col if line_start is None else line_start
    stack: list[tuple[int, bool, Doc]] = [(start_col, False, doc)]
    while stack:
        i, flat, d = stack.pop()
        match d:
            case Text(s):
                out.append(s)
                col += len(s)
            case Line():
                if flat:
                    out.append(" ")
                    col += 1
                else:
                    out.append("\n" + " " * i)
                    col = indent = i
            case Cat(parts):
                for p in reversed(parts):
                    stack.append((i, flat, p))
            case Nest(j, x):
                stack.append((i + j, flat, x))
            case Align(x):
                stack.append((col, flat, x))
            case Group(x):
                if flat:
                    stack.append((i, True, x))
                else:
                    room = min(width - col, ribbon - (col - indent))
                    rest = list(reversed(stack))
                    stack.append((i, _fits(room, [(i, True, x)] + rest), x))
    return "".join(out)


# ---------------------------------------------------------------- types


def _tname(n: str, bracket: frozenset[str]) -> str:
    return f"[{n}]" if n in bracket else n


def _is_type_atom(t: Type) -> bool:
    return isinstance(t, (Var, Const))


def type_doc(t: Type, bracket: frozenset[str] = frozenset()) -> Doc:
    match t:
        case Var(n):
            return Text(_tname(n, bracket))
        case Const(n):
            return Text(n)
        case Forall():
            names: list[str] = []
            while isinstance(t, Forall):
                names.append(t.binder)
                t = t.body
            head = Text("forall " + " ".join(names) + " .")
            return Align(Group(cat(head, Nest(2, cat(LINE, type_doc(t, bracket))))))
        case Lam():
            names = []
            while isinstance(t, Lam):
                names.append(t.binder)
                t = t.body
            head = Text("\\ " + " ".join(names) + " .")
            return Align(Group(cat(head, Nest(2, cat(LINE, type_doc(t, bracket))))))
        case Imply(a, c):
            left = _paren_type(a, bracket) if isinstance(a, (Imply, Forall, Lam)) else type_doc(a, bracket)
            return Align(Group(cat(left, LINE, Text("=>"), Nest(2, cat(LINE, type_doc(c, bracket))))))
        case App():
            return Align(_type_app(t, bracket))
    raise AssertionError(t)


def _type_operand(t: Type, bracket: frozenset[str]) -> Doc:
    return type_doc(t, bracket) if _is_type_atom(t) else _paren_type(t, bracket)


def _type_app(t: Type, bracket: frozenset[str]) -> Doc:
    # left-nested: each application either stays on the line or hangs its argument
    if not isinstance(t, App):
        return _type_operand(t, bracket)
    if isinstance(t.fun, (Var, Const)) and len(_tname(t.fun.name, bracket)) == 1:
        # a one-character head leaves room for its hanging argument on the same line
        return cat(Text(t.fun.name + " "), _type_operand(t.arg, bracket))
    return Group(cat(_type_app(t.fun, bracket), Nest(2, cat(LINE, _type_operand(t.arg, bracket)))))


def _paren_type(t: Type, bracket: frozenset[str]) -> Doc:
    return cat(Text("("), Align(type_doc(t, bracket)), Text(")"))


def print_type(t: Type, bracket: Iterable[str] = ()) -> str:
    return render(type_doc(t, frozenset(bracket)), width=_WIDE, ribbon=_WIDE)


# ---------------------------------------------------------------- evidence


def _binder_doc(name: str, ann: Type | None, bracket: frozenset[str]) -> Doc:
    if ann is None:
        return Text(name)
    return cat(Text(f"({name} : "), Align(type_doc(ann, bracket)), Text(")"))


def evidence_doc(e: Evidence, bracket: frozenset[str] = frozenset(),
                 holes: dict[int, Doc] | None = None) -> Doc:
    match e:
        case EVar(n) | EConst(n):
            return Text(n)
        case ELam() | TyLam():
            binders: list[Doc] = []
            while isinstance(e, (ELam, TyLam)):
                if isinstance(e, ELam):
                    binders.append(_binder_doc(e.binder, e.annotation, bracket))
                else:
                    binders.append(Text(e.binder))
                e = e.body
            seq: list[Doc] = []
            for k, b in enumerate(binders):
                if k:
                    seq.append(LINE)
                seq.append(b)
            head = cat(Text("\\ "), Align(Group(Cat(tuple(seq)))), Text(" ."))
            return Align(Group(cat(head, Nest(4, cat(LINE, evidence_doc(e, bracket, holes))))))
        case Mu(x, b, _):
            head = Text(f"mu {x} .")
            return Align(Group(cat(head, Nest(4, cat(LINE, evidence_doc(b, bracket, holes))))))
        case EApp() | TyApp():
            return Align(_ev_app(e, bracket, holes))
    if holes is not None and isinstance(e, Hole):
        return holes[e.ident]
    raise AssertionError(e)


def _ev_app(e: Evidence, bracket: frozenset[str], holes: dict[int, Doc] | None) -> Doc:
    if isinstance(e, TyApp):
        arg = _type_operand(e.arg, bracket)
    elif isinstance(e, EApp):
        arg = _ev_operand(e.arg, bracket, holes)
    else:
        return _ev_operand(e, bracket, holes)
    if isinstance(e.fun, (EVar, EConst)) and len(e.fun.name) == 1:
        return cat(Text(e.fun.name + " "), arg)
    return Group(cat(_ev_app(e.fun, bracket, holes), Nest(2, cat(LINE, arg))))


def _ev_operand(e: Evidence, bracket: frozenset[str], holes: dict[int, Doc] | None) -> Doc:
    if isinstance(e, (EVar, EConst)):
        return Text(e.name)
    if holes is not None and isinstance(e, Hole):
        return cat(Text("("), Align(holes[e.ident]), Text(")"))
    return cat(Text("("), Align(evidence_doc(e, bracket, holes)), Text(")"))


def print_evidence(e: Evidence, bracket: Iterable[str] = (), width: int | None = None) -> str:
    doc = evidence_doc(e, frozenset(bracket))
    if width is None:
        return render(doc, width=_WIDE, ribbon=_WIDE)
    return render(doc, width=width)


def print_mixed(e: object, holes: dict[int, Type], bracket: Iterable[str] = ()) -> str:
    """Print a partial proof term whose ``Hole`` leaves stand for their goal types."""
    br = frozenset(bracket)
    hole_docs = {k: type_doc(t, br) for k, t in holes.items()}
    return render(evidence_doc(e, br, hole_docs), width=_WIDE, ribbon=_WIDE)  # type: ignore[arg-type]


def layout_type(t: Type, start_col: int = 0, line_start: int | None = None,
                bracket: Iterable[str] = ()) -> str:
    return render(type_doc(t, frozenset(bracket)), start_col=start_col, line_start=line_start)


def layout_evidence(e: Evidence, start_col: int = 0, line_start: int | None = None,
                    bracket: Iterable[str] = ()) -> str:
    return render(evidence_doc(e, frozenset(bracket)), start_col=start_col, line_start=line_start)


def layout_mixed(e: object, holes: dict[int, Type], start_col: int = 0,
                 bracket: Iterable[str] = ()) -> str:
    br = frozenset(bracket)
    hole_docs = {k: type_doc(t, br) for k, t in holes.items()}
    return render(evidence_doc(e, br, hole_docs), start_col=start_col)  # type: ignore[arg-type]
