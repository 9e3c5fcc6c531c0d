from __future__ import annotations

import functools
import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from f2mu.kernel import (
    App,
    Const,
    Type,
    Var,
    canonical_type,
    free_type_vars,
    lams,
    mk_app,
    normalize_type,
    spine,
)
from f2mu.matching import is_matcher, match_types
from f2mu.parser import parse_type
from f2mu.printer import print_type
from strategies import RIGID, matching_problems


def shown(sigmas) -> list[str]:
    return ["[" + ", ".join(print_type(v) for v in s.values()) + "]" for s in sigmas]


def test_imitation_comes_before_projection() -> None:
    got = match_types(parse_type("d Z Z"), parse_type("D Z (S Z)"))
    assert shown(got) == ["[\\ m1' m2' . D m1' (S m2')]", "[\\ m1' m2' . D m2' (S m1')]"]


def test_all_matchers_of_a_unary_head() -> None:
    got = match_types(parse_type("a x"), parse_type("a0 (b1 x2)"), frozen=["a0", "b1", "x2"])
    assert shown(got) == [
        "[\\ m1' . a0 (b1 m1'), x2]",
        "[\\ m1' . a0 m1', b1 x2]",
        "[\\ x1' . x1', a0 (b1 x2)]",
    ]


def test_rigid_mismatch_has_no_matcher() -> None:
    assert match_types(parse_type("D Z Z"), parse_type("D Z (S Z)")) == []


def test_first_order_variable_is_bound_directly() -> None:
    (sigma,) = match_types(parse_type("F x Z"), parse_type("F (S Z) Z"))
    assert print_type(sigma["x"]) == "S Z"


def test_vacuous_abstractions_are_rejected() -> None:
    # \ m . Z is not a relevant abstraction
    got = match_types(parse_type("p Z"), parse_type("Z"))
    assert shown(got) == ["[\\ x1' . x1']"]


def test_binders_avoid_target_variables() -> None:
    pattern, target = parse_type("p (S y)"), parse_type("G (S m1')")
    (sigma,) = match_types(pattern, target, frozen=["m1'"])
    assert print_type(sigma["p"]) == "\\ m1'' . G m1''"
    assert print_type(sigma["y"]) == "m1'"
    assert is_matcher(sigma, pattern, target)


@given(matching_problems())
@settings(max_examples=300)
def test_every_returned_matcher_is_sound(problem: tuple[Type, Type, dict[str, Type]]) -> None:
    pattern, target, _ = problem
    for sigma in match_types(pattern, target, frozen=RIGID):
        assert is_matcher(sigma, pattern, target)


@given(matching_problems())
@settings(max_examples=200)
def test_the_planted_solution_is_found(problem: tuple[Type, Type, dict[str, Type]]) -> None:
    pattern, target, planted = problem
    want = {x: canonical_type(normalize_type(v)) for x, v in planted.items()}
    found = [{x: canonical_type(v) for x, v in s.items()} for s in match_types(pattern, target, frozen=RIGID)]
    assert want in found


# ---------------------------------------------------------------- brute force


def _size(t: Type) -> int:
    head, args = spine(t)
    return 1 + sum(_size(a) for a in args)


@functools.lru_cache(maxsize=None)
def _bodies(size: int, atoms: tuple[str, ...]) -> tuple[Type, ...]:
    """Every flat type of exactly ``size`` symbols over ``S``, ``F`` and ``atoms``."""
    if size == 1:
        return tuple(Const(a) if a[0].isupper() else Var(a) for a in atoms)
    out: list[Type] = [App(Const("S"), b) for b in _bodies(size - 1, atoms)]
    for left in range(1, size - 1):
        for a in _bodies(left, atoms):
            for b in _bodies(size - 1 - left, atoms):
                out.append(mk_app(Const("F"), [a, b]))
    return tuple(out)


def _candidates(arity: int, bound: int) -> list[Type]:
    ms = tuple(f"m{i}" for i in range(1, arity + 1))
    atoms = ("Z",) + RIGID + ms
    out = []
    for n in range(1, bound + 1):
        for body in _bodies(n, atoms):
            if set(ms) <= free_type_vars(body):
                out.append(lams(ms, body) if ms else body)
    return out


def _arity(x: str, pattern: Type) -> int:
    head, args = spine(pattern)
    if head == Var(x):
        return len(args)
    for a in args:
        k = _arity(x, a)
        if k >= 0:
            return k
    return -1


@given(matching_problems(max_flex=2, arg_leaves=1, body_leaves=2).filter(lambda p: _size(p[1]) <= 5))
@settings(max_examples=60)
def test_matching_agrees_with_brute_force(problem: tuple[Type, Type, dict[str, Type]]) -> None:
    pattern, target, _ = problem
    flex = sorted(free_type_vars(pattern) - set(RIGID))
    bound = _size(target)
    pools = [_candidates(_arity(x, pattern), bound) for x in flex]
    brute = set()
    for values in itertools.product(*pools):
        sigma = dict(zip(flex, values))
        if is_matcher(sigma, pattern, target):
            brute.add(tuple(canonical_type(v) for v in values))
    got = {tuple(canonical_type(s[x]) for x in flex) for s in match_types(pattern, target, frozen=RIGID)}
    assert got == brute


@given(st.sampled_from(["Z", "a", "S a", "F a Z", "F (S Z) a"]))
def test_identity_projection_for_a_single_argument(target_text: str) -> None:
    target = parse_type(target_text)
    got = match_types(App(Var("X"), target), target, frozen=RIGID)
    assert any(print_type(s["X"]) == "\\ x1' . x1'" for s in got)
