"""Types, kinds, capture-avoiding substitution, type-level beta normalization and kinding.

Types double as first-order terms, term contexts and formulas.  Constants and
variables are separate node classes; the parser decides by capitalization.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Union

from .errors import KindError, NormalizationFuel

NORMALIZE_FUEL = 10_000


# ---------------------------------------------------------------- kinds


@dataclass(frozen=True)
class Formula:
    def __str__(self) -> str:
        return "o"


@dataclass(frozen=True)
class Star:
    def __str__(self) -> str:
        return "*"


@dataclass(frozen=True)
class Arrow:
    """``* => result``; the domain of an arrow kind is always ``*``."""

    result: "Kind"

    def __str__(self) -> str:
        return f"* => {self.result}"


Kind = Union[Formula, Star, Arrow]
FORMULA = Formula()
STAR = Star()


def arity_kind(n: int) -> Kind:
    k: Kind = STAR
    for _ in range(n):
        k = Arrow(k)
    return k


def kind_arity(k: Kind) -> int:
    n = 0
    while isinstance(k, Arrow):
        n += 1
        k = k.result
    return n


# ---------------------------------------------------------------- types


class TypeNode:
    __slots__ = ()

    def __str__(self) -> str:
        from .printer import print_type

        return print_type(self)  # type: ignore[arg-type]


@dataclass(frozen=True, repr=False)
class Var(TypeNode):
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Const(TypeNode):
    name: str

    def __repr__(self) -> str:
        return f"Const({self.name!r})"


@dataclass(frozen=True, repr=False)
class Lam(TypeNode):
    binder: str
    body: "Type"

    def __repr__(self) -> str:
        return f"Lam({self.binder!r}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class Forall(TypeNode):
    binder: str
    kind: Kind
    body: "Type"

    def __repr__(self) -> str:
        return f"Forall({self.binder!r}, {self.kind}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class App(TypeNode):
    fun: "Type"
    arg: "Type"

    def __repr__(self) -> str:
        return f"App({self.fun!r}, {self.arg!r})"


@dataclass(frozen=True, repr=False)
class Imply(TypeNode):
    antecedent: "Type"
    consequent: "Type"

    def __repr__(self) -> str:
        return f"Imply({self.antecedent!r}, {self.consequent!r})"


Type = Union[Var, Const, Lam, Forall, App, Imply]


def mk_app(head: Type, args: Iterable[Type]) -> Type:
    for a in args:
        head = App(head, a)
    return head


def spine(t: Type) -> tuple[Type, list[Type]]:
    """Split ``h a1 .. an`` into ``(h, [a1, .., an])``."""
    args: list[Type] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def lams(binders: Iterable[str], body: Type) -> Type:
    for x in reversed(list(binders)):
        body = Lam(x, body)
    return body


def foralls(binders: Iterable[tuple[str, Kind]], body: Type) -> Type:
    for x, k in reversed(list(binders)):
        body = Forall(x, k, body)
    return body


def implies(antecedents: Iterable[Type], head: Type) -> Type:
    for a in reversed(list(antecedents)):
        head = Imply(a, head)
    return head


@dataclass(frozen=True)
class FormulaShape:
    """A formula read as ``forall xs . T1 => .. => Tn => head``."""

    binders: tuple[tuple[str, Kind], ...]
    antecedents: tuple[Type, ...]
    head: Type


def split_formula(t: Type) -> FormulaShape:
    binders: list[tuple[str, Kind]] = []
    while isinstance(t, Forall):
        binders.append((t.binder, t.kind))
        t = t.body
    ants: list[Type] = []
    while isinstance(t, Imply):
        ants.append(t.antecedent)
        t = t.consequent
    return FormulaShape(tuple(binders), tuple(ants), t)


def is_atomic(t: Type) -> bool:
    return not isinstance(t, (Forall, Imply))


# ---------------------------------------------------------------- free variables and names


_NO_VARS: frozenset[str] = frozenset()


def free_type_vars(t: Type) -> frozenset[str]:
    """Free variables, memoized on the (immutable) node."""
    fv = t.__dict__.get("_fv")
    if fv is None:
        match t:
            case Var(n):
                fv = frozenset((n,))
            case Const():
                fv = _NO_VARS
            case Lam(x, b) | Forall(x, _, b):
                fv = free_type_vars(b) - {x}
            case App(f, a):
                fv = free_type_vars(f) | free_type_vars(a)
            case Imply(a, c):
                fv = free_type_vars(a) | free_type_vars(c)
            case _:
                raise AssertionError(t)
        object.__setattr__(t, "_fv", fv)
    return fv


def free_vars_in_order(t: Type) -> list[str]:
    """Free variables of ``t`` by first occurrence, left to right."""
    seen: list[str] = []

    def go(u: Type, bound: frozenset[str]) -> None:
        match u:
            case Var(n):
                if n not in bound and n not in seen:
                    seen.append(n)
            case Lam(x, b) | Forall(x, _, b):
                go(b, bound | {x})
            case App(f, a) | Imply(f, a):
                go(f, bound)
                go(a, bound)

    go(t, frozenset())
    return seen


def constants(t: Type) -> set[str]:
    match t:
        case Const(n):
            return {n}
        case Var():
            return set()
        case Lam(_, b) | Forall(_, _, b):
            return constants(b)
        case App(f, a) | Imply(f, a):
            return constants(f) | constants(a)
    raise AssertionError(t)


_GENERATED = re.compile(r"(.*?)\d*'+")


def name_base(name: str) -> str:
    """``p4'`` -> ``p``; names that were never generated are kept verbatim."""
    m = _GENERATED.fullmatch(name)
    if m and m.group(1):
        return m.group(1)
    return name


def rename_away(name: str, avoid: Iterable[str] | frozenset[str]) -> str:
    avoid = set(avoid)
    cand = name + "'"
    while cand in avoid:
        cand += "'"
    return cand


# ---------------------------------------------------------------- substitution


def subst_type(sigma: Mapping[str, Type], t: Type) -> Type:
    """Simultaneous capture-avoiding substitution."""
    if not sigma:
        return t
    return _subst(dict(sigma), t)


def _subst(s: dict[str, Type], t: Type) -> Type:
    match t:
        case Var(n):
            return s.get(n, t)
        case Const():
            return t
        case App(f, a):
            return App(_subst(s, f), _subst(s, a))
        case Imply(a, c):
            return Imply(_subst(s, a), _subst(s, c))
        case Lam(x, b) | Forall(x, _, b):
            fvb = free_type_vars(b)
            inner = {k: v for k, v in s.items() if k != x and k in fvb}
            if not inner:
                return t
            codom: set[str] = set()
            for v in inner.values():
                codom |= free_type_vars(v)
            if x in codom:
                x2 = rename_away(x, codom | fvb | set(inner))
                inner[x] = Var(x2)
                x = x2
            body = _subst(inner, b)
            return Lam(x, body) if isinstance(t, Lam) else Forall(x, t.kind, body)
    raise AssertionError(t)


class Substitution(Mapping[str, Type]):
    """Finite idempotent map from type variables to types."""

    __slots__ = ("_map",)

    def __init__(self, pairs: Mapping[str, Type] | Iterable[tuple[str, Type]] = ()) -> None:
        m = dict(pairs)
        codom: set[str] = set()
        for v in m.values():
            codom |= free_type_vars(v)
        clash = codom & set(m)
        if clash:
            raise AssertionError(f"substitution is not idempotent on {sorted(clash)}")
        self._map = m

    def __getitem__(self, k: str) -> Type:
        return self._map[k]

    def __iter__(self) -> Iterator[str]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __repr__(self) -> str:
        return "Substitution({" + ", ".join(f"{k!r}: {v}" for k, v in self._map.items()) + "})"

    def __str__(self) -> str:
        return "[" + ", ".join(f"{k} : {v}" for k, v in self._map.items()) + "]"

    def apply(self, t: Type) -> Type:
        return subst_type(self._map, t)

    def restrict(self, names: Iterable[str]) -> "Substitution":
        keep = set(names)
        return Substitution({k: v for k, v in self._map.items() if k in keep})

    def without(self, names: Iterable[str]) -> "Substitution":
        drop = set(names)
        return Substitution({k: v for k, v in self._map.items() if k not in drop})

    def then(self, other: Mapping[str, Type]) -> "Substitution":
        """``other`` after ``self``: apply ``other`` to our codomain, then add its bindings."""
        merged = {k: normalize_type(subst_type(other, v)) for k, v in self._map.items()}
        for k, v in other.items():
            if k not in merged:
                merged[k] = v
        return Substitution(merged)

    def codomain_vars(self) -> frozenset[str]:
        out: set[str] = set()
        for v in self._map.values():
            out |= free_type_vars(v)
        return frozenset(out)


# ---------------------------------------------------------------- alpha equivalence


def canonical_type(t: Type, env: tuple[str, ...] = ()) -> tuple:
    """Hashable nameless form; two types are alpha-equivalent iff their forms are equal."""
    match t:
        case Var(n):
            for i in range(len(env) - 1, -1, -1):
                if env[i] == n:
                    return ("b", len(env) - 1 - i)
            return ("v", n)
        case Const(n):
            return ("c", n)
        case Lam(x, b):
            return ("l", canonical_type(b, env + (x,)))
        case Forall(x, k, b):
            return ("f", str(k), canonical_type(b, env + (x,)))
        case App(f, a):
            return ("a", canonical_type(f, env), canonical_type(a, env))
        case Imply(a, c):
            return ("i", canonical_type(a, env), canonical_type(c, env))
    raise AssertionError(t)


def alpha_eq(a: Type, b: Type) -> bool:
    return a == b or canonical_type(a) == canonical_type(b)


# ---------------------------------------------------------------- normalization


class _Fuel:
    __slots__ = ("left",)

    def __init__(self, n: int) -> None:
        self.left = n

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise NormalizationFuel("type normalization exceeded its fuel bound")


def normalize_type(t: Type, fuel: int = NORMALIZE_FUEL) -> Type:
    """Leftmost-outermost beta normal form."""
    return _nf(t, _Fuel(fuel))


def _nf(t: Type, fuel: _Fuel) -> Type:
    # normal forms are memoized on the immutable nodes, both ways
    done = t.__dict__.get("_nf")
    if done is None:
        done = _nf_step(t, fuel)
        if done == t:
            done = t
        object.__setattr__(t, "_nf", done)
        object.__setattr__(done, "_nf", done)
    return done


def _nf_step(t: Type, fuel: _Fuel) -> Type:
    match t:
        case Var() | Const():
            return t
        case Lam(x, b):
            return Lam(x, _nf(b, fuel))
        case Forall(x, k, b):
            return Forall(x, k, _nf(b, fuel))
        case Imply(a, c):
            return Imply(_nf(a, fuel), _nf(c, fuel))
        case App():
            head, args = spine(t)
            while isinstance(head, Lam) and args:
                fuel.spend()
                head = subst_type({head.binder: args[0]}, head.body)
                args = args[1:]
                if isinstance(head, App):
                    h2, more = spine(head)
                    head, args = h2, more + args
            if not args:
                return _nf(head, fuel)
            return mk_app(_nf(head, fuel), [_nf(a, fuel) for a in args])
    raise AssertionError(t)


def beta_step(t: Type) -> Type | None:
    """One leftmost-outermost beta step, or ``None`` at normal form."""
    match t:
        case App(Lam(x, b), a):
            return subst_type({x: a}, b)
        case App(f, a):
            f2 = beta_step(f)
            if f2 is not None:
                return App(f2, a)
            a2 = beta_step(a)
            return None if a2 is None else App(f, a2)
        case Lam(x, b):
            b2 = beta_step(b)
            return None if b2 is None else Lam(x, b2)
        case Forall(x, k, b):
            b2 = beta_step(b)
            return None if b2 is None else Forall(x, k, b2)
        case Imply(a, c):
            a2 = beta_step(a)
            if a2 is not None:
                return Imply(a2, c)
            c2 = beta_step(c)
            return None if c2 is None else Imply(a, c2)
    return None


def types_convertible(a: Type, b: Type) -> bool:
    return alpha_eq(normalize_type(a), normalize_type(b))


# ---------------------------------------------------------------- kinding


def kind_check(delta: Mapping[str, Kind], t: Type) -> Kind:
    """The unique kind of ``t`` under ``delta``; the Lam rule is relevant."""
    match t:
        case Var(n) | Const(n):
            k = delta.get(n)
            if k is None:
                raise KindError(f"unbound name {n}", t)
            return k
        case App(f, a):
            kf = kind_check(delta, f)
            if not isinstance(kf, Arrow):
                raise KindError(f"{f} has kind {kf} and cannot be applied", t)
            ka = kind_check(delta, a)
            if ka != STAR:
                raise KindError(f"argument {a} has kind {ka}, expected *", t)
            return kf.result
        case Lam(x, b):
            if x not in free_type_vars(b):
                raise KindError(f"abstraction over {x} is not relevant", t)
            kb = kind_check({**delta, x: STAR}, b)
            if kb == FORMULA:
                raise KindError("a formula cannot occur under a type abstraction", t)
            return Arrow(kb)
        case Forall(x, k, b):
            kb = kind_check({**delta, x: k}, b)
            if kb not in (FORMULA, STAR):
                raise KindError(f"quantified body has kind {kb}", t)
            return FORMULA
        case Imply(a, c):
            for part in (a, c):
                kp = kind_check(delta, part)
                if kp not in (FORMULA, STAR):
                    raise KindError(f"{part} has kind {kp}, expected o or *", t)
            return FORMULA
    raise AssertionError(t)


def is_flat(t: Type) -> bool:
    while isinstance(t, App):
        if not is_flat(t.arg):
            return False
        t = t.fun
    return isinstance(t, (Var, Const))


def is_second_order(t: Type) -> bool:
    binders: list[str] = []
    while isinstance(t, Lam):
        binders.append(t.binder)
        t = t.body
    if not is_flat(t):
        return False
    body = t
    for i, x in enumerate(binders):
        if x not in free_type_vars(lams(binders[i + 1:], body)):
            return False
    return True


def infer_arities(types: Iterable[Type], names: Iterable[str] | None = None) -> dict[str, int]:
    """Arity of every head, read off application spines (bound names excluded).

    Raises ``KindError`` when a name is applied to different numbers of arguments.
    """
    seen: dict[str, int] = {}

    def visit(t: Type, bound: frozenset[str]) -> None:
        match t:
            case Lam(x, b) | Forall(x, _, b):
                visit(b, bound | {x})
            case Imply(a, c):
                visit(a, bound)
                visit(c, bound)
            case App() | Var() | Const():
                head, args = spine(t)
                if isinstance(head, (Var, Const)) and head.name not in bound:
                    prev = seen.setdefault(head.name, len(args))
                    if prev != len(args):
                        raise KindError(
                            f"{head.name} is applied to {prev} and to {len(args)} arguments", t)
                elif not isinstance(head, (Var, Const)):
                    visit(head, bound)
                for a in args:
                    visit(a, bound)

    for t in types:
        visit(t, frozenset())
    if names is not None:
        wanted = set(names)
        return {k: v for k, v in seen.items() if k in wanted}
    return seen
