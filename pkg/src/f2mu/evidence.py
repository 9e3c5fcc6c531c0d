"""Evidence (proof terms): syntax, free variables, substitution, alpha-equivalence, erasure."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from typing import Optional, Union

from .kernel import (
    Kind,
    Type,
    Var,
    canonical_type,
    free_type_vars,
    normalize_type,
    rename_away,
    subst_type,
)


class EvidenceNode:
    __slots__ = ()

    def __str__(self) -> str:
        from .printer import print_evidence

        return print_evidence(self)  # type: ignore[arg-type]


@dataclass(frozen=True)
class EVar(EvidenceNode):
    name: str


@dataclass(frozen=True)
class EConst(EvidenceNode):
    name: str


@dataclass(frozen=True)
class ELam(EvidenceNode):
    binder: str
    annotation: Optional[Type]
    body: "Evidence"


@dataclass(frozen=True)
class EApp(EvidenceNode):
    fun: "Evidence"
    arg: "Evidence"


@dataclass(frozen=True)
class Mu(EvidenceNode):
    """Fixed point.  ``annotation`` is the type of the bound variable when known."""

    binder: str
    body: "Evidence"
    annotation: Optional[Type] = None


@dataclass(frozen=True)
class TyLam(EvidenceNode):
    """Type abstraction; ``kind`` is filled in by elaboration and never printed."""

    binder: str
    body: "Evidence"
    kind: Optional[Kind] = None


@dataclass(frozen=True)
class TyApp(EvidenceNode):
    fun: "Evidence"
    arg: Type


@dataclass(frozen=True)
class Hole(EvidenceNode):
    """Placeholder for an unsolved goal inside a partially built proof term."""

    ident: int


Evidence = Union[EVar, EConst, ELam, EApp, Mu, TyLam, TyApp]
Arg = Union["Evidence", Type]


def ev_spine(e: Evidence) -> tuple[Evidence, list[Arg]]:
    """``h a1 .. an`` with type and evidence arguments interleaved."""
    args: list[Arg] = []
    while isinstance(e, (EApp, TyApp)):
        args.append(e.arg)
        e = e.fun
    args.reverse()
    return e, args


def ev_apply(head: Evidence, args: Iterable[Arg]) -> Evidence:
    from .kernel import TypeNode

    for a in args:
        head = TyApp(head, a) if isinstance(a, TypeNode) else EApp(head, a)  # type: ignore[arg-type]
    return head


def is_type_arg(a: Arg) -> bool:
    return not isinstance(a, EvidenceNode)


# ---------------------------------------------------------------- free variables


def free_evidence_vars(e: Evidence) -> frozenset[str]:
    match e:
        case EVar(n):
            return frozenset({n})
        case EConst():
            return frozenset()
        case ELam(x, _, b) | Mu(x, b, _):
            return free_evidence_vars(b) - {x}
        case EApp(f, a):
            return free_evidence_vars(f) | free_evidence_vars(a)
        case TyLam(_, b, _):
            return free_evidence_vars(b)
        case TyApp(f, _):
            return free_evidence_vars(f)
    raise AssertionError(e)


def free_type_vars_of_evidence(e: Evidence) -> frozenset[str]:
    match e:
        case EVar() | EConst():
            return frozenset()
        case ELam(_, ann, b) | Mu(_, b, ann):
            out = free_type_vars_of_evidence(b)
            return out | free_type_vars(ann) if ann is not None else out
        case EApp(f, a):
            return free_type_vars_of_evidence(f) | free_type_vars_of_evidence(a)
        case TyLam(x, b, _):
            return free_type_vars_of_evidence(b) - {x}
        case TyApp(f, t):
            return free_type_vars_of_evidence(f) | free_type_vars(t)
    raise AssertionError(e)


def evidence_names(e: Evidence) -> set[str]:
    """Every evidence and type name occurring anywhere in ``e``, bound or free."""
    out: set[str] = set()

    def ty(t: Type | None) -> None:
        if t is not None:
            from .kernel import constants

            out.update(free_type_vars(t))
            out.update(constants(t))

    def go(u: Evidence) -> None:
        match u:
            case EVar(n) | EConst(n):
                out.add(n)
            case ELam(x, ann, b) | Mu(x, b, ann):
                out.add(x)
                ty(ann)
                go(b)
            case EApp(f, a):
                go(f)
                go(a)
            case TyLam(x, b, _):
                out.add(x)
                go(b)
            case TyApp(f, t):
                go(f)
                ty(t)

    go(e)
    return out


# ---------------------------------------------------------------- substitution


def subst_evidence(e: Evidence, name: str, value: Evidence) -> Evidence:
    """Capture-avoiding ``[value/name] e`` for an evidence variable."""
    fv_ev = free_evidence_vars(value)
    fv_ty = free_type_vars_of_evidence(value)
    return _esub(e, name, value, fv_ev, fv_ty)


def _esub(e: Evidence, name: str, value: Evidence, fv_ev: frozenset[str],
          fv_ty: frozenset[str]) -> Evidence:
    match e:
        case EVar(n):
            return value if n == name else e
        case EConst():
            return e
        case EApp(f, a):
            return EApp(_esub(f, name, value, fv_ev, fv_ty), _esub(a, name, value, fv_ev, fv_ty))
        case TyApp(f, t):
            return TyApp(_esub(f, name, value, fv_ev, fv_ty), t)
        case ELam(x, ann, b) | Mu(x, b, ann):
            if x == name or name not in free_evidence_vars(b):
                return e
            if x in fv_ev:
                x2 = rename_away(x, fv_ev | free_evidence_vars(b) | {name})
                b = _esub(b, x, EVar(x2), frozenset({x2}), frozenset())
                x = x2
            body = _esub(b, name, value, fv_ev, fv_ty)
            return ELam(x, ann, body) if isinstance(e, ELam) else Mu(x, body, ann)
        case TyLam(x, b, k):
            if name not in free_evidence_vars(b):
                return e
            if x in fv_ty:
                x2 = rename_away(x, fv_ty | free_type_vars_of_evidence(b))
                b = subst_types_in_evidence({x: Var(x2)}, b)
                x = x2
            return TyLam(x, _esub(b, name, value, fv_ev, fv_ty), k)
    raise AssertionError(e)


def subst_types_in_evidence(sigma: Mapping[str, Type], e: Evidence) -> Evidence:
    """Apply a type substitution to every annotation and type argument, avoiding capture."""
    if not sigma:
        return e
    match e:
        case EVar() | EConst():
            return e
        case EApp(f, a):
            return EApp(subst_types_in_evidence(sigma, f), subst_types_in_evidence(sigma, a))
        case TyApp(f, t):
            return TyApp(subst_types_in_evidence(sigma, f), subst_type(sigma, t))
        case ELam(x, ann, b):
            return ELam(x, None if ann is None else subst_type(sigma, ann),
                        subst_types_in_evidence(sigma, b))
        case Mu(x, b, ann):
            return Mu(x, subst_types_in_evidence(sigma, b),
                      None if ann is None else subst_type(sigma, ann))
        case TyLam(x, b, k):
            inner = {n: v for n, v in sigma.items() if n != x}
            if not inner:
                return e
            codom: set[str] = set()
            for v in inner.values():
                codom |= free_type_vars(v)
            if x in codom:
                x2 = rename_away(x, codom | free_type_vars_of_evidence(b) | set(inner))
                inner[x] = Var(x2)
                x = x2
            return TyLam(x, subst_types_in_evidence(inner, b), k)
    raise AssertionError(e)


def map_types(e: Evidence, f: Callable[[Type], Type]) -> Evidence:
    """Apply ``f`` to every annotation and type argument (no binder handling)."""
    match e:
        case EVar() | EConst():
            return e
        case EApp(a, b):
            return EApp(map_types(a, f), map_types(b, f))
        case TyApp(a, t):
            return TyApp(map_types(a, f), f(t))
        case ELam(x, ann, b):
            return ELam(x, None if ann is None else f(ann), map_types(b, f))
        case Mu(x, b, ann):
            return Mu(x, map_types(b, f), None if ann is None else f(ann))
        case TyLam(x, b, k):
            return TyLam(x, map_types(b, f), k)
    raise AssertionError(e)


def normalize_evidence_types(e: Evidence) -> Evidence:
    return map_types(e, normalize_type)


# ---------------------------------------------------------------- alpha equivalence


def canonical_evidence(e: Evidence, ev_env: tuple[str, ...] = (),
                       ty_env: tuple[str, ...] = ()) -> tuple:
    def ev_index(n: str) -> tuple:
        for i in range(len(ev_env) - 1, -1, -1):
            if ev_env[i] == n:
                return ("b", len(ev_env) - 1 - i)
        return ("v", n)

    match e:
        case EVar(n):
            return ev_index(n)
        case EConst(n):
            return ("c", n)
        case ELam(x, ann, b):
            a = None if ann is None else canonical_type(ann, ty_env)
            return ("l", a, canonical_evidence(b, ev_env + (x,), ty_env))
        case Mu(x, b, ann):
            a = None if ann is None else canonical_type(ann, ty_env)
            return ("m", a, canonical_evidence(b, ev_env + (x,), ty_env))
        case EApp(f, a):
            return ("a", canonical_evidence(f, ev_env, ty_env), canonical_evidence(a, ev_env, ty_env))
        case TyLam(x, b, _):
            return ("L", canonical_evidence(b, ev_env, ty_env + (x,)))
        case TyApp(f, t):
            return ("A", canonical_evidence(f, ev_env, ty_env), canonical_type(t, ty_env))
    raise AssertionError(e)


def alpha_eq_evidence(a: Evidence, b: Evidence) -> bool:
    return a == b or canonical_evidence(a) == canonical_evidence(b)


# ---------------------------------------------------------------- erasure


def erase(e: Evidence) -> Evidence:
    """Drop type abstractions, type arguments and annotations."""
    match e:
        case EVar() | EConst():
            return e
        case ELam(x, _, b):
            return ELam(x, None, erase(b))
        case Mu(x, b, _):
            return Mu(x, erase(b))
        case EApp(f, a):
            return EApp(erase(f), erase(a))
        case TyLam(_, b, _):
            return erase(b)
        case TyApp(f, _):
            return erase(f)
    raise AssertionError(e)


def is_curry(e: Evidence) -> bool:
    match e:
        case EVar() | EConst():
            return True
        case ELam(_, ann, b):
            return ann is None and is_curry(b)
        case Mu(_, b, ann):
            return ann is None and is_curry(b)
        case EApp(f, a):
            return is_curry(f) and is_curry(a)
    return False


def evidence_size(e: Evidence) -> int:
    match e:
        case EVar() | EConst():
            return 1
        case ELam(_, _, b) | Mu(_, b, _) | TyLam(_, b, _):
            return 1 + evidence_size(b)
        case EApp(f, a):
            return 1 + evidence_size(f) + evidence_size(a)
        case TyApp(f, _):
            return 1 + evidence_size(f)
    raise AssertionError(e)
