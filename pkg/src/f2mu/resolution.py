"""Goal-directed elaboration of Curry-style evidence into annotated evidence.

A goal ``(L, env, e, T)`` asks for a proof of ``T`` whose erasure is ``e``.
Four rules take goals apart:

* application: ``h e1 .. en`` against an atomic goal ``A`` when ``h`` has
  type ``forall xs . T1 => .. => Tn => B`` and ``B`` matches ``A``;
* evidence abstraction: ``\\ a . e`` against ``T => A``;
* type abstraction: any evidence against ``forall x . T`` introduces a
  fresh eigenvariable;
* fixed point: ``mu a . e`` against ``T`` assumes ``a : T``.

Quantified variables of ``h`` that the matcher leaves unbound become
existential variables.  They stay flexible in later matches where they
occur only on the hypothesis side, and every instantiation is guarded by a
scope check on ``L`` so that an existential never captures an eigenvariable
introduced after it.  Goals whose head mentions an open existential are
postponed while other goals remain.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import (
    ExistentialInRSM,
    NoMatcher,
    NotLongForm,
    ResolutionError,
    ScopeError,
    StepLimit,
    UnknownName,
)
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
    ev_spine,
    map_types,
)
from .kernel import (
    Forall,
    Imply,
    Kind,
    Substitution,
    Type,
    Var,
    alpha_eq,
    free_type_vars,
    free_vars_in_order,
    name_base,
    normalize_type,
    split_formula,
    subst_type,
)
from .matching import match_types

DEFAULT_STEP_LIMIT = 200_000


class Mode(Enum):
    RSM = "rsm"
    ERSM = "ersm"


def scope_ok(scope: Sequence[str], sigma: Mapping[str, Type]) -> bool:
    """Bindings of listed variables may only mention earlier listed variables;
    bindings of unlisted variables may mention no listed variable at all."""
    index = {x: i for i, x in enumerate(scope)}
    for x, v in sigma.items():
        fv = free_type_vars(v)
        if x in index:
            if any(y not in index or index[y] >= index[x] for y in fv):
                return False
        elif fv & index.keys():
            return False
    return True


@dataclass(frozen=True)
class Goal:
    ident: int
    scope: tuple[str, ...]
    env: tuple[tuple[str, Type], ...]
    evidence: Evidence
    goal: Type


@dataclass(frozen=True)
class StepRecord:
    """One application step: the head used and the matcher that was chosen."""

    head: str
    pattern: Type
    target: Type
    matcher: Substitution
    instantiation: tuple[Type, ...]
    existentials: tuple[str, ...]


@dataclass
class _State:
    goals: list[Goal]
    sigma: Substitution
    fills: dict[int, Evidence]
    existentials: list[str]
    eigen: set[str]
    kinds: dict[str, Kind]
    counter: int
    next_ident: int
    log: list[StepRecord]

    def clone(self) -> "_State":
        return _State(list(self.goals), self.sigma, dict(self.fills), list(self.existentials),
                      set(self.eigen), dict(self.kinds), self.counter, self.next_ident,
                      list(self.log))

    def apply(self, t: Type) -> Type:
        return normalize_type(subst_type(self.sigma, t)) if self.sigma else t

    def fresh(self, base: str, avoid: Iterable[str] = ()) -> str:
        avoid = set(avoid)
        while True:
            name = f"{name_base(base)}{self.counter}'"
            self.counter += 1
            if name not in avoid and name not in self.kinds:
                return name

    def new_ident(self) -> int:
        self.next_ident += 1
        return self.next_ident

    def live_scope(self, scope: Sequence[str]) -> tuple[str, ...]:
        return tuple(x for x in scope if x not in self.sigma)

    def open_existentials(self) -> set[str]:
        return {x for x in self.existentials if x not in self.sigma}


@dataclass
class Resolution:
    """A successful elaboration."""

    evidence: Evidence
    sigma: Substitution
    log: list[StepRecord] = field(default_factory=list)
    existentials: tuple[str, ...] = ()


def assemble(fills: Mapping[int, Evidence], root: int) -> Evidence:
    """Replace holes by their fillers; holes without a filler stay."""

    def go(e: Evidence) -> Evidence:
        match e:
            case Hole(i):
                return go(fills[i]) if i in fills else e
            case EVar() | EConst():
                return e
            case ELam(x, ann, b):
                return ELam(x, ann, go(b))
            case EApp(f, a):
                return EApp(go(f), go(a))
            case Mu(x, b, ann):
                return Mu(x, go(b), ann)
            case TyLam(x, b, k):
                return TyLam(x, go(b), k)
            case TyApp(f, t):
                return TyApp(go(f), t)
        raise AssertionError(e)

    return go(Hole(root))


class _Abort(Exception):
    """A failure that must not be retried with another matcher."""

    def __init__(self, error: ResolutionError) -> None:
        self.error = error


class Resolver:
    """Elaborates one declaration; ``globals_`` holds axioms and declared lemmas."""

    def __init__(self, globals_: Mapping[str, Type], kinds: Mapping[str, Kind],
                 mode: Mode = Mode.ERSM, backtrack_existentials: bool = False,
                 step_limit: int = DEFAULT_STEP_LIMIT, decl: str | None = None,
                 check_invariants: bool = False) -> None:
        self.globals = dict(globals_)
        self.kinds = dict(kinds)
        self.mode = mode
        self.backtrack_existentials = backtrack_existentials
        self.step_limit = step_limit
        self.decl = decl
        self.check_invariants = check_invariants
        self.steps = 0

    # ------------------------------------------------------------ driver

    def resolve(self, evidence: Evidence, goal: Type, var_kinds: Mapping[str, Kind] | None = None) -> Resolution:
        scope = tuple(free_vars_in_order(goal))
        kinds = dict(self.kinds)
        kinds.update(var_kinds or {})
        root = Goal(0, scope, (), evidence, normalize_type(goal))
        start = _State([root], Substitution(), {}, [], set(scope), kinds, 0, 0, [])
        stack = [start]
        first_failure: ResolutionError | None = None
        while stack:
            state = stack.pop()
            try:
                done = self._run(state, stack)
            except _Abort as a:
                raise a.error from None
            except ResolutionError as err:
                if first_failure is None:
                    first_failure = err
                continue
            if done is not None:
                return done
        assert first_failure is not None
        raise first_failure

    def _run(self, st: _State, stack: list[_State]) -> Resolution | None:
        while st.goals:
            self.steps += 1
            if self.steps > self.step_limit:
                raise _Abort(StepLimit(self.step_limit))
            idx = self._select(st)
            g = st.goals.pop(idx)
            alternatives = self._step(st, g, idx)
            if self.check_invariants:
                for branch in [st] if alternatives is None else alternatives:
                    assert_invariants(branch)
            if alternatives is None:
                continue
            # several matchers: keep the later ones for backtracking
            stack.extend(reversed(alternatives[1:]))
            st = alternatives[0]
        ev = assemble(st.fills, 0)
        final = st.sigma

        def close(t: Type) -> Type:
            return normalize_type(subst_type(final, t))

        return Resolution(map_types(ev, close), final, st.log, tuple(st.existentials))

    def _select(self, st: _State) -> int:
        if self.mode is Mode.ERSM:
            open_ex = st.open_existentials()
            if open_ex:
                for i, g in enumerate(st.goals):
                    head = split_formula(st.apply(g.goal)).head
                    if not (free_type_vars(head) & open_ex):
                        return i
        return 0

    # ------------------------------------------------------------ rules

    def _lookup(self, st: _State, g: Goal, name: str) -> Type:
        for n, t in reversed(g.env):
            if n == name:
                return st.apply(t)
        if name in self.globals:
            return self.globals[name]
        raise _Abort(UnknownName(name))

    def _step(self, st: _State, g: Goal, idx: int) -> list[_State] | None:
        """Apply one rule to ``g``; returns branch states when matching is ambiguous."""
        goal = st.apply(g.goal)
        e = g.evidence
        if isinstance(e, (EVar, EConst)):
            t = self._lookup(st, g, e.name)
            if alpha_eq(normalize_type(t), goal):
                st.fills[g.ident] = e
                return None
        match e, goal:
            case Mu(a, body, _), _:
                child = Goal(st.new_ident(), g.scope, g.env + ((a, goal),), body, goal)
                st.fills[g.ident] = Mu(a, Hole(child.ident), goal)
                st.goals.insert(idx, child)
                return None
            case _, Forall():
                names: list[str] = []
                t = goal
                while isinstance(t, Forall):
                    x = st.fresh(t.binder, free_type_vars(t))
                    st.kinds[x] = t.kind
                    st.eigen.add(x)
                    names.append(x)
                    t = normalize_type(subst_type({t.binder: Var(x)}, t.body))
                child = Goal(st.new_ident(), g.scope + tuple(names), g.env, e, t)
                filler: Evidence = Hole(child.ident)
                for x in reversed(names):
                    filler = TyLam(x, filler, st.kinds[x])
                st.fills[g.ident] = filler
                st.goals.insert(idx, child)
                return None
            case ELam(), Imply():
                env = list(g.env)
                binders: list[tuple[str, Type]] = []
                t = goal
                while isinstance(e, ELam) and isinstance(t, Imply):
                    binders.append((e.binder, t.antecedent))
                    env.append((e.binder, t.antecedent))
                    e, t = e.body, t.consequent
                child = Goal(st.new_ident(), g.scope, tuple(env), e, t)
                filler = Hole(child.ident)
                for a, ann in reversed(binders):
                    filler = ELam(a, ann, filler)
                st.fills[g.ident] = filler
                st.goals.insert(idx, child)
                return None
            case ELam(), _:
                raise NotLongForm(e, goal, "an abstraction needs an implication goal")
            case _, Imply():
                raise NotLongForm(e, goal, "write the evidence with one abstraction per premise")
        return self._apply_head(st, g, goal, idx)

    def _apply_head(self, st: _State, g: Goal, goal: Type, idx: int) -> list[_State] | None:
        head, args = ev_spine(g.evidence)
        if not isinstance(head, (EVar, EConst)) or any(not isinstance(a, (EVar, EConst, ELam, EApp, Mu))
                                                         for a in args):
            raise NotLongForm(g.evidence, goal, "the head of an application must be a name")
        htype = self._lookup(st, g, head.name)
        shape = split_formula(htype)
        if len(shape.antecedents) != len(args):
            raise NotLongForm(g.evidence, goal,
                              f"{head.name} takes {len(shape.antecedents)} premises, "
                              f"given {len(args)}")
        avoid = free_type_vars(htype) | free_type_vars(goal)
        renaming: dict[str, Type] = {}
        fresh: list[str] = []
        for x, k in shape.binders:
            y = st.fresh(x, avoid)
            st.kinds[y] = k
            renaming[x] = Var(y)
            fresh.append(y)
        ants = [normalize_type(subst_type(renaming, a)) for a in shape.antecedents]
        pattern = normalize_type(subst_type(renaming, shape.head))
        open_ex = st.open_existentials() if self.mode is Mode.ERSM else set()
        flex = set(fresh) | ((open_ex & free_type_vars(pattern)) - free_type_vars(goal))
        frozen = free_type_vars(pattern) - flex
        matchers = match_types(pattern, goal, frozen, st.kinds)
        if not matchers:
            raise NoMatcher(head.name, pattern, goal, self.decl)
        # the scope check filters matchers; it is an error only when none survives
        branches: list[_State] = []
        scope_error: ScopeError | None = None
        for m in matchers:
            branch = st.clone()
            try:
                self._commit(branch, g, idx, head, htype, fresh, ants, pattern, goal, m)
            except ScopeError as err:
                scope_error = scope_error or err
                continue
            except ExistentialInRSM as err:
                raise _Abort(err) from None
            branches.append(branch)
        if not branches:
            assert scope_error is not None
            if self.backtrack_existentials:
                raise scope_error
            raise _Abort(scope_error)
        return branches

    def _commit(self, st: _State, g: Goal, idx: int, head: EVar | EConst, htype: Type,
                fresh: list[str], ants: list[Type], pattern: Type, goal: Type,
                m: Substitution) -> None:
        inst = m.without(fresh)
        scope = st.live_scope(g.scope)
        scope_checks = [scope] + [st.live_scope(o.scope) for o in st.goals]
        if inst and not all(scope_ok(s, inst) for s in scope_checks):
            holes = {g.ident: goal}
            holes.update({o.ident: st.apply(o.goal) for o in st.goals})
            raise ScopeError(scope=scope, substitution=inst, pattern=pattern, target=goal,
                             hypothesis=head.name, hypothesis_type=htype,
                             mixed_term=(assemble(st.fills, 0), holes), eigen=frozenset(st.eigen))
        unbound = [x for x in fresh if x not in m]
        if unbound and self.mode is Mode.RSM:
            raise ExistentialInRSM(tuple(unbound), head.name)
        st.existentials.extend(unbound)
        st.sigma = st.sigma.then(inst)
        new_scope = tuple(x for x in scope if x not in inst) + tuple(unbound)
        args = ev_spine(g.evidence)[1]
        children = [Goal(st.new_ident(), new_scope, g.env, a,  # type: ignore[arg-type]
                         normalize_type(subst_type(m, t))) for a, t in zip(args, ants)]
        targs = tuple(m[x] if x in m else Var(x) for x in fresh)
        filler: Evidence = head
        for t in targs:
            filler = TyApp(filler, t)
        for c in children:
            filler = EApp(filler, Hole(c.ident))
        st.fills[g.ident] = filler
        st.goals[idx:idx] = children
        st.log.append(StepRecord(head.name, pattern, goal, m, targs, tuple(unbound)))


def assert_invariants(st: _State) -> None:
    """Checked after every step when ``check_invariants`` is on.

    The substitution stays idempotent, eigenvariables stay rigid, and every
    pending goal only mentions variables of its own live scope.
    """
    sigma = st.sigma
    assert not (sigma.keys() & sigma.codomain_vars()), "substitution is not idempotent"
    assert not (sigma.keys() & st.eigen), "an eigenvariable was instantiated"
    for g in st.goals:
        live = set(st.live_scope(g.scope))
        stray = free_type_vars(st.apply(g.goal)) - live
        assert not stray, f"goal {g.ident} mentions {sorted(stray)} outside its scope"


def resolve(evidence: Evidence, goal: Type, globals_: Mapping[str, Type],
            kinds: Mapping[str, Kind], mode: Mode = Mode.ERSM, *,
            var_kinds: Mapping[str, Kind] | None = None, backtrack_existentials: bool = False,
            step_limit: int = DEFAULT_STEP_LIMIT, decl: Optional[str] = None,
            check_invariants: bool = False) -> Resolution:
    """Elaborate ``evidence`` against ``goal``; raises a ResolutionError on failure."""
    r = Resolver(globals_, kinds, mode, backtrack_existentials, step_limit, decl, check_invariants)
    return r.resolve(evidence, goal, var_kinds)
