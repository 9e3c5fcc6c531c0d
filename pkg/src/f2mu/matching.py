"""Second-order matching by projection and imitation.

Patterns are flat types whose flexible heads may be applied to arguments;
targets contain no flexible variables.  Every derivation is explored depth
first (imitation before projections, projections in ascending argument
order), so the result list is deterministic and the largest context comes
first.  Matchers that bind a variable to a
non-relevant abstraction such as ``\\ x y . D Z (S y)`` are dropped.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

from .errors import KindError
from .kernel import (
    App,
    Const,
    Imply,
    Kind,
    Lam,
    Substitution,
    Type,
    Var,
    alpha_eq,
    arity_kind,
    canonical_type,
    constants,
    free_type_vars,
    free_vars_in_order,
    infer_arities,
    is_second_order,
    kind_arity,
    kind_check,
    lams,
    mk_app,
    normalize_type,
    spine,
    subst_type,
)

# generated unknowns never clash with parsed names
_UNKNOWN = "?h"


@dataclass(frozen=True)
class MatchProblem:
    pairs: tuple[tuple[Type, Type], ...]


class _Names:
    def __init__(self, avoid: set[str]) -> None:
        self.avoid = avoid
        self.unknowns = 0

    def unknown(self) -> str:
        self.unknowns += 1
        return f"{_UNKNOWN}{self.unknowns}"

    def binders(self, base: str, n: int) -> list[str]:
        out = []
        for i in range(1, n + 1):
            name = f"{base}{i}'"
            while name in self.avoid:
                name += "'"
            out.append(name)
        return out


def _resolve(sigma: Mapping[str, Type], t: Type) -> Type:
    """Apply a triangular substitution until none of its variables remain."""
    for _ in range(len(sigma) + 1):
        if not (free_type_vars(t) & sigma.keys()):
            return normalize_type(t)
        t = subst_type(sigma, t)
    return normalize_type(t)


def _solve(pairs: list[tuple[Type, Type]], sigma: dict[str, Type], flex: frozenset[str],
           names: _Names) -> Iterator[dict[str, Type]]:
    if not pairs:
        yield sigma
        return
    (p, t), rest = pairs[0], pairs[1:]
    p = normalize_type(subst_type(sigma, p)) if free_type_vars(p) & sigma.keys() else p
    live = free_type_vars(p) & flex
    if not live:
        if alpha_eq(p, t):
            yield from _solve(rest, sigma, flex, names)
        return
    head, args = spine(p)
    if isinstance(head, Var) and head.name in flex:
        x = head.name
        if not args:
            yield from _solve(rest, {**sigma, x: t}, flex, names)
            return
        th, targs = spine(t)
        if isinstance(th, (Const, Var)):
            ms = names.binders("m", len(args))
            hs = [names.unknown() for _ in targs]
            body = mk_app(th, [mk_app(Var(h), [Var(m) for m in ms]) for h in hs])
            new_pairs = [(mk_app(Var(h), args), u) for h, u in zip(hs, targs)]
            yield from _solve(new_pairs + rest, {**sigma, x: lams(ms, body)},
                              flex | frozenset(hs), names)
        ys = names.binders("x", len(args))
        for i, a in enumerate(args):
            yield from _solve([(a, t)] + rest, {**sigma, x: lams(ys, Var(ys[i]))}, flex, names)
        return
    match p, t:
        case App(), App():
            th, targs = spine(t)
            if (isinstance(head, (Var, Const)) and type(head) is type(th) and head == th
                    and len(args) == len(targs)):
                yield from _solve(list(zip(args, targs)) + rest, sigma, flex, names)
        case Imply(a, c), Imply(a2, c2):
            yield from _solve([(a, a2), (c, c2)] + rest, sigma, flex, names)
        case (Var() | Const()), _:
            pass
        case _:
            # binders in patterns are outside the second-order fragment
            return


def _relevant(value: Type, arity: int, kinds: Mapping[str, Kind]) -> bool:
    if not is_second_order(value):
        return False
    n = 0
    v = value
    while isinstance(v, Lam):
        n += 1
        v = v.body
    if n != arity:
        return False
    delta: dict[str, Kind] = {k: arity_kind(a) for k, a in infer_arities([value]).items()}
    delta.update({k: kinds[k] for k in (free_type_vars(value) | constants(value)) if k in kinds})
    try:
        kind_check(delta, value)
    except KindError:
        return False
    return True


def _pattern_arities(pattern: Type, flex: Iterable[str]) -> dict[str, int]:
    try:
        return infer_arities([pattern], names=flex)
    except KindError:
        return {}


def match_types(pattern: Type, target: Type, frozen: Iterable[str] = (),
                kinds: Mapping[str, Kind] | None = None) -> list[Substitution]:
    """All kindable matchers of ``pattern`` against ``target``.

    The flexible variables are ``FV(pattern) - frozen``; ``kinds`` may give
    their kinds, otherwise the arity in the pattern is used.
    """
    return match_all(MatchProblem(((pattern, target),)), frozen, kinds)


def match_all(problem: MatchProblem, frozen: Iterable[str] = (),
              kinds: Mapping[str, Kind] | None = None) -> list[Substitution]:
    frozen = set(frozen)
    kinds = dict(kinds or {})
    order: list[str] = []
    for p, _ in problem.pairs:
        for x in free_vars_in_order(p):
            if x not in frozen and x not in order:
                order.append(x)
    flex = frozenset(order)
    arities: dict[str, int] = {}
    for p, _ in problem.pairs:
        arities.update(_pattern_arities(p, flex))
    for x in order:
        if x in kinds:
            arities[x] = kind_arity(kinds[x])
    # generated binders only have to avoid capturing target variables
    avoid: set[str] = set()
    pairs = []
    for p, t in problem.pairs:
        avoid |= free_type_vars(t)
        pairs.append((normalize_type(p), normalize_type(t)))
    names = _Names(avoid)
    out: list[Substitution] = []
    seen: set[tuple] = set()
    for sigma in _solve(pairs, {}, flex, names):
        values = {x: _resolve(sigma, Var(x)) for x in order if x in sigma}
        if not all(_relevant(v, arities.get(x, 0), kinds) for x, v in values.items()):
            continue
        key = tuple((x, canonical_type(v)) for x, v in values.items())
        if key in seen:
            continue
        seen.add(key)
        out.append(Substitution(values))
    return out


def is_matcher(sigma: Mapping[str, Type], pattern: Type, target: Type) -> bool:
    return alpha_eq(normalize_type(subst_type(sigma, pattern)), normalize_type(target))
