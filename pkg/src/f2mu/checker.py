"""Independent checker for annotated evidence, and the erasure into lambda-Y.

Nothing here reuses the elaborator: proofs produced by resolution are
re-checked from scratch, so an unsound elaboration step shows up as a
``ProofTypeError`` instead of a silently wrong certificate.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from itertools import count
from typing import Optional, Union

from .errors import InvalidStep, KindError, ProofTypeError
from .evidence import (
    EApp,
    EConst,
    ELam,
    EVar,
    Evidence,
    Mu,
    TyApp,
    TyLam,
    ev_spine,
    erase,
    free_type_vars_of_evidence,
    subst_types_in_evidence,
)
from .kernel import (
    App,
    Const,
    Forall,
    Imply,
    Kind,
    Lam,
    Type,
    Var,
    free_type_vars,
    kind_check,
    normalize_type,
    rename_away,
    subst_type,
    types_convertible,
)
from .leibniz import LeibnizRule, axiom_type
from .terms import (
    HOLE,
    Context,
    Term,
    apply_term_subst,
    context_to_type,
    fill,
    hole_positions,
    match_term,
    print_term,
    replace_at,
    subterm,
    term_to_type,
)

__all__ = [
    "CheckResult",
    "proof_check",
    "check_proof",
    "reinterpret",
    "erase",
    "Base",
    "YArrow",
    "theta_type",
    "theta_env",
    "lambda_y_check",
    "ReductionStep",
    "represent_finite_reduction",
]


# ---------------------------------------------------------------- proof checking


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    error: Optional[ProofTypeError] = None

    def __bool__(self) -> bool:
        return self.ok


class _Checker:
    def __init__(self, delta: Mapping[str, Kind], gamma: Mapping[str, Type]) -> None:
        self.delta = dict(delta)
        self.gamma = dict(gamma)

    def env_vars(self, local: Sequence[tuple[str, Type]]) -> frozenset[str]:
        out: set[str] = set()
        for _, t in local:
            out |= free_type_vars(t)
        return frozenset(out)

    def lookup(self, name: str, local: Sequence[tuple[str, Type]], path: tuple[str, ...]) -> Type:
        for n, t in reversed(local):
            if n == name:
                return t
        if name in self.gamma:
            return self.gamma[name]
        raise ProofTypeError(path, "a bound name", name, f"{name} is not in scope")

    def freshen(self, x: str, body: Evidence, avoid: frozenset[str]) -> tuple[str, Evidence]:
        """Rename a type binder that would capture a variable of the environment.

        The eigenvariable condition only constrains the name, so an
        alpha-renamed abstraction is checked instead of being rejected.
        This happens after unfolding a fixed point, when a copy of the
        whole proof lands under its own type abstractions.
        """
        if x not in avoid:
            return x, body
        y = rename_away(x, avoid | free_type_vars_of_evidence(body))
        return y, subst_types_in_evidence({x: Var(y)}, body)

    def kind_of(self, t: Type, delta: Mapping[str, Kind], path: tuple[str, ...]) -> Kind:
        try:
            return kind_check(delta, t)
        except KindError as err:
            raise ProofTypeError(path, "a kindable type", t, str(err)) from None

    def synth(self, e: Evidence, local: tuple[tuple[str, Type], ...], delta: dict[str, Kind],
              path: tuple[str, ...]) -> Type:
        match e:
            case EVar(n) | EConst(n):
                return normalize_type(self.lookup(n, local, path))
            case EApp(f, a):
                ft = self.synth(f, local, delta, path + ("fun",))
                if not isinstance(ft, Imply):
                    raise ProofTypeError(path + ("fun",), "an implication", ft,
                                         "applied evidence must prove an implication")
                self.check(a, ft.antecedent, local, delta, path + ("arg",))
                return normalize_type(ft.consequent)
            case TyApp(f, t):
                ft = self.synth(f, local, delta, path + ("fun",))
                if not isinstance(ft, Forall):
                    raise ProofTypeError(path + ("fun",), "a quantified type", ft,
                                         "type application needs a quantifier")
                k = self.kind_of(t, delta, path + ("type",))
                if k != ft.kind:
                    raise ProofTypeError(path + ("type",), ft.kind, k, f"{t} has the wrong kind")
                return normalize_type(subst_type({ft.binder: t}, ft.body))
            case ELam(x, ann, b):
                if ann is None:
                    raise ProofTypeError(path, "an annotated binder", x, "binder needs a type")
                self.check_formula(ann, delta, path + ("annotation",))
                body = self.synth(b, local + ((x, normalize_type(ann)),), delta, path + ("body",))
                return Imply(normalize_type(ann), body)
            case Mu(x, b, ann):
                if ann is None:
                    raise ProofTypeError(path, "an annotated fixed point", x,
                                         "the type of a fixed point cannot be synthesized")
                t = normalize_type(ann)
                self.check(b, t, local + ((x, t),), delta, path + ("body",))
                return t
            case TyLam(x, b, k):
                if k is None:
                    raise ProofTypeError(path, "a kinded type binder", x, "binder kind unknown")
                x, b = self.freshen(x, b, self.env_vars(local))
                body = self.synth(b, local, {**delta, x: k}, path + ("body",))
                return Forall(x, k, body)
        raise ProofTypeError(path, "evidence", e, "unexpected node")

    def check_formula(self, t: Type, delta: Mapping[str, Kind], path: tuple[str, ...]) -> None:
        from .kernel import FORMULA, STAR

        k = self.kind_of(t, delta, path)
        if k not in (FORMULA, STAR):
            raise ProofTypeError(path, "kind o or *", k, f"{t} is not a formula")

    def check(self, e: Evidence, goal: Type, local: tuple[tuple[str, Type], ...],
              delta: dict[str, Kind], path: tuple[str, ...]) -> None:
        goal = normalize_type(goal)
        match e, goal:
            case ELam(x, ann, b), Imply(a, c):
                if ann is not None:
                    self.check_formula(ann, delta, path + ("annotation",))
                    if not types_convertible(ann, a):
                        raise ProofTypeError(path + ("annotation",), a, ann,
                                             "binder annotation disagrees with the premise")
                else:
                    raise ProofTypeError(path, "an annotated binder", x, "binder needs a type")
                self.check(b, c, local + ((x, a),), delta, path + ("body",))
                return
            case TyLam(x, b, k), Forall(y, ky, body):
                if k is not None and k != ky:
                    raise ProofTypeError(path, ky, k, "type binder kind disagrees")
                avoid = self.env_vars(local) | (free_type_vars(goal) if x != y else frozenset())
                x, b = self.freshen(x, b, avoid)
                inner = normalize_type(subst_type({y: Var(x)}, body))
                self.check(b, inner, local, {**delta, x: ky}, path + ("body",))
                return
            case Mu(x, b, ann), _:
                if ann is not None and not types_convertible(ann, goal):
                    raise ProofTypeError(path, goal, ann, "fixed-point annotation disagrees")
                self.check(b, goal, local + ((x, goal),), delta, path + ("body",))
                return
        found = self.synth(e, local, delta, path)
        if not types_convertible(found, goal):
            raise ProofTypeError(path, goal, found, "types are not convertible")


def check_proof(delta: Mapping[str, Kind], gamma: Mapping[str, Type], e: Evidence, t: Type) -> None:
    """Raise ``ProofTypeError`` unless ``gamma |- e : t``."""
    c = _Checker(delta, gamma)
    c.check_formula(t, delta, ())
    c.check(e, t, (), dict(delta), ())


def proof_check(delta: Mapping[str, Kind], gamma: Mapping[str, Type], e: Evidence, t: Type) -> CheckResult:
    try:
        check_proof(delta, gamma, e, t)
    except ProofTypeError as err:
        return CheckResult(False, err)
    return CheckResult(True)


# ---------------------------------------------------------------- re-reading printed proofs


def evidence_as_type(e: Evidence) -> Type:
    """A printed type argument was parsed as evidence; read it back as a type."""
    match e:
        case EVar(n):
            return Var(n)
        case EConst(n):
            return Const(n)
        case EApp(f, a):
            return App(evidence_as_type(f), evidence_as_type(a))
        case ELam(x, None, b):
            return Lam(x, evidence_as_type(b))
    raise ValueError(f"{e} is not a type")


def reinterpret(gamma: Mapping[str, Type], e: Evidence, t: Type) -> Evidence:
    """Turn parsed annotated evidence into explicit type abstractions and applications.

    Printed proofs do not mark which binders and arguments are types; the
    declared types decide it.
    """

    def check(e: Evidence, goal: Type, local: tuple[tuple[str, Type], ...], path: tuple[str, ...]) -> Evidence:
        goal = normalize_type(goal)
        match e, goal:
            case ELam(x, None, b), Forall(y, k, body):
                inner = normalize_type(subst_type({y: Var(x)}, body))
                return TyLam(x, check(b, inner, local, path + ("body",)), k)
            case ELam(x, ann, b), Imply(a, c):
                return ELam(x, a if ann is None else ann,
                            check(b, c, local + ((x, a if ann is None else ann),), path + ("body",)))
            case Mu(x, b, _), _:
                return Mu(x, check(b, goal, local + ((x, goal),), path + ("body",)), goal)
        return synth(e, local, path)[0]

    def synth(e: Evidence, local: tuple[tuple[str, Type], ...], path: tuple[str, ...]) -> tuple[Evidence, Type]:
        head, args = ev_spine(e)
        if not isinstance(head, (EVar, EConst)):
            raise ProofTypeError(path, "a named head", head, "cannot read this application")
        ht: Type | None = None
        for n, ty in reversed(local):
            if n == head.name:
                ht = ty
                break
        if ht is None:
            if head.name not in gamma:
                raise ProofTypeError(path, "a bound name", head.name, f"{head.name} is not in scope")
            ht = gamma[head.name]
        out: Evidence = head
        cur = normalize_type(ht)
        for i, a in enumerate(args):
            apath = path + (f"arg{i + 1}",)
            if isinstance(cur, Forall):
                try:
                    ty = evidence_as_type(a)  # type: ignore[arg-type]
                except ValueError:
                    raise ProofTypeError(apath, "a type argument", a, "expected a type") from None
                out = TyApp(out, ty)
                cur = normalize_type(subst_type({cur.binder: ty}, cur.body))
            elif isinstance(cur, Imply):
                out = EApp(out, check(a, cur.antecedent, local, apath))  # type: ignore[arg-type]
                cur = normalize_type(cur.consequent)
            else:
                raise ProofTypeError(apath, "a function", cur, "too many arguments")
        return out, cur

    return check(e, t, (), ())


# ---------------------------------------------------------------- lambda-Y


@dataclass(frozen=True)
class Base:
    def __str__(self) -> str:
        return "B"


@dataclass(frozen=True)
class YArrow:
    dom: "YType"
    cod: "YType"

    def __str__(self) -> str:
        d = f"({self.dom})" if isinstance(self.dom, YArrow) else str(self.dom)
        return f"{d} => {self.cod}"


YType = Union[Base, YArrow]
BASE = Base()


def theta_type(t: Type) -> YType:
    """Forget everything but the implication structure."""
    match t:
        case Var() | Const():
            return BASE
        case Lam(_, b) | Forall(_, _, b):
            return theta_type(b)
        case App(f, _):
            return theta_type(f)
        case Imply(a, c):
            return YArrow(theta_type(a), theta_type(c))
    raise AssertionError(t)


def theta_env(gamma: Mapping[str, Type]) -> dict[str, YType]:
    return {k: theta_type(v) for k, v in gamma.items()}


@dataclass(frozen=True)
class _Meta:
    ident: int


def lambda_y_check(env: Mapping[str, YType], e: Evidence, t: YType) -> bool:
    """Simple typing with a fixed-point rule, by unification."""
    subst: dict[int, object] = {}
    fresh = count()

    def walk(x: object) -> object:
        while isinstance(x, _Meta) and x.ident in subst:
            x = subst[x.ident]
        return x

    def occurs(m: _Meta, x: object) -> bool:
        x = walk(x)
        if isinstance(x, _Meta):
            return x == m
        if isinstance(x, YArrow):
            return occurs(m, x.dom) or occurs(m, x.cod)
        return False

    def unify(a: object, b: object) -> bool:
        a, b = walk(a), walk(b)
        if a == b:
            return True
        if isinstance(a, _Meta):
            if occurs(a, b):
                return False
            subst[a.ident] = b
            return True
        if isinstance(b, _Meta):
            return unify(b, a)
        if isinstance(a, YArrow) and isinstance(b, YArrow):
            return unify(a.dom, b.dom) and unify(a.cod, b.cod)
        return False

    def infer(e: Evidence, local: dict[str, object]) -> object | None:
        match e:
            case EVar(n) | EConst(n):
                if n in local:
                    return local[n]
                return env.get(n)
            case ELam(x, _, b):
                m = _Meta(next(fresh))
                body = infer(b, {**local, x: m})
                return None if body is None else YArrow(m, body)  # type: ignore[arg-type]
            case EApp(f, a):
                ft, at = infer(f, local), infer(a, local)
                if ft is None or at is None:
                    return None
                r = _Meta(next(fresh))
                return r if unify(ft, YArrow(at, r)) else None  # type: ignore[arg-type]
            case Mu(x, b, _):
                m = _Meta(next(fresh))
                body = infer(b, {**local, x: m})
                return m if body is not None and unify(m, body) else None
        return None

    found = infer(e, {})
    return found is not None and unify(found, t)


# ---------------------------------------------------------------- finite reductions as evidence


@dataclass(frozen=True)
class ReductionStep:
    """Rewrite with ``rule`` inside the one-hole ``context`` under ``sigma``."""

    rule: str
    context: Context
    sigma: Mapping[str, Term]


def steps_from_positions(rules: Sequence[LeibnizRule], start: Term,
                         schedule: Sequence[tuple[tuple[int, ...], str]]) -> list[ReductionStep]:
    """Turn ``(position, rule)`` pairs into contexts and matchers."""
    table = {r.name: r for r in rules}
    out: list[ReductionStep] = []
    t: Context = start
    for i, (pos, name) in enumerate(schedule):
        r = table[name]
        sub = subterm(t, pos)
        sigma = match_term(r.lhs, sub)
        if sigma is None:
            raise InvalidStep(i, f"{name} does not match {print_term(sub)}")
        ctx = replace_at(t, pos, HOLE)
        out.append(ReductionStep(name, ctx, sigma))
        t = replace_at(t, pos, apply_term_subst(sigma, r.rhs))
    return out


def represent_finite_reduction(rules: Sequence[LeibnizRule], start: Term,
                               steps: Sequence[ReductionStep]) -> tuple[Evidence, Type]:
    """Evidence for ``t_last => start`` built from one rule application per step."""
    table = {r.name: r for r in rules}
    current: Context = start
    pieces: list[Evidence] = []
    for i, s in enumerate(steps):
        if s.rule not in table:
            raise InvalidStep(i, f"unknown rule {s.rule}")
        r = table[s.rule]
        if len(hole_positions(s.context)) != 1:
            raise InvalidStep(i, "the context must have exactly one hole")
        missing = [x for x in r.variables if x not in s.sigma]
        if missing:
            raise InvalidStep(i, f"no instance for {' '.join(missing)}")
        before = fill(s.context, apply_term_subst(s.sigma, r.lhs))
        if before != current:
            raise InvalidStep(i, f"{print_term(before)} is not {print_term(current)}")
        head: Evidence = EConst(s.rule) if s.rule[:1].isupper() else EVar(s.rule)
        e: Evidence = TyApp(head, context_to_type(s.context))
        for x in r.variables:
            e = TyApp(e, term_to_type(s.sigma[x]))
        pieces.append(e)
        current = fill(s.context, apply_term_subst(s.sigma, r.rhs))
    final_type = term_to_type(current)
    alpha = "w'"
    while alpha in table:
        alpha += "'"
    body: Evidence = EVar(alpha)
    for p in reversed(pieces):
        body = EApp(p, body)
    return ELam(alpha, final_type, body), Imply(final_type, term_to_type(start))


def rule_environment(rules: Sequence[LeibnizRule]) -> dict[str, Type]:
    return {r.name: axiom_type(r.lhs, r.rhs, r.variables) for r in rules}
