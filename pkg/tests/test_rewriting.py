from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from f2mu.errors import NormalForm
from f2mu.leibniz import LeibnizRule
from f2mu.parser import parse_term
from f2mu.rewriting import (
    draw_tree,
    innermost_step,
    innermost_trace,
    reduction_tree,
    redexes_at,
    render_trace,
    trs_multi_step,
    trs_one_step,
)
from f2mu.terms import apply_term_subst, match_term, positions, print_term, replace_at, subterm
from strategies import ground_terms, rule_systems

from conftest import loaded

GOLDENS = Path(__file__).parent / "goldens"

INNER_TRACE = """\
the execution trace is:
 F Z (S Z) (S Z)
-K-> G (F Z Z (S (S Z))) (F Z (S Z) (S (S Z)))
-K-> G (F Z Z (S (S Z)))
       (G (F Z Z (S (S (S Z)))) (F Z (S (S Z)) (S (S Z))))
-K-> G (F Z Z (S (S Z)))
       (G (F Z Z (S (S (S Z))))
          (G (F Z (S Z) (S (S (S Z)))) (F (S Z) (S (S Z)) (S (S Z)))))
-K-> G (F Z Z (S (S Z)))
       (G (F Z Z (S (S (S Z))))
          (G (G (F Z Z (S (S (S (S Z))))) (F Z (S (S (S Z))) (S (S Z))))
             (F (S Z) (S (S Z)) (S (S Z)))))
-K-> G (F Z Z (S (S Z)))
       (G (F Z Z (S (S (S Z))))
          (G (G (F Z Z (S (S (S (S Z)))))
                (G (F Z (S (S Z)) (S (S (S Z))))
                   (F (S (S Z)) (S (S Z)) (S (S Z)))))
             (F (S Z) (S (S Z)) (S (S Z)))))
-K-> G (F Z Z (S (S Z)))
       (G (F Z Z (S (S (S Z))))
          (G (G (F Z Z (S (S (S (S Z)))))
                (G (G (F Z (S Z) (S (S (S (S Z)))))
                      (F (S Z) (S (S (S Z))) (S (S Z))))
                   (F (S (S Z)) (S (S Z)) (S (S Z)))))
             (F (S Z) (S (S Z)) (S (S Z)))))"""


def dummy_rules():
    _, r = loaded("dummy_eliminated", False)
    return r.rules


def one_rule():
    _, r = loaded("one_rule", False)
    return r.rules


def golden_tree() -> list[str]:
    lines = (GOLDENS / "dummy_eliminated.txt").read_text().splitlines()
    return lines[lines.index("[], _, F Z (S Z) (S Z)"):]


def test_full_tree_matches_the_golden() -> None:
    tree = reduction_tree(dummy_rules(), parse_term("F Z (S Z) (S Z)"), 6)
    assert draw_tree(tree).splitlines() == golden_tree()


def test_tree_lists_later_rules_first_at_one_position() -> None:
    tree = reduction_tree(dummy_rules(), parse_term("F Z (S Z) (S Z)"), 1)
    assert [c.rule for c in tree.children] == ["B", "A"]


def test_inner_trace_matches_the_golden() -> None:
    t = parse_term("F Z (S Z) (S Z)")
    assert render_trace(t, innermost_trace(one_rule(), t, 6)) == INNER_TRACE


def test_innermost_stops_at_normal_forms() -> None:
    t = parse_term("G Z Z")
    assert innermost_trace(one_rule(), t, 6) == []
    with pytest.raises(NormalForm):
        innermost_step(one_rule(), t)
    with pytest.raises(NormalForm):
        trs_multi_step(one_rule(), t, 1)


def test_positions_are_one_based_preorder() -> None:
    t = parse_term("F Z (S Z) (S Z)")
    assert list(positions(t)) == [(), (1,), (2,), (2, 1), (3,), (3, 1)]


# ---------------------------------------------------------------- oracle consistency


@given(rule_systems(), ground_terms)
@settings(max_examples=100)
def test_one_step_reducts_are_rule_instances(rules: list[LeibnizRule], t) -> None:
    table = {r.name: r for r in rules}
    for red in trs_one_step(rules, t):
        r = table[red.rule]
        sigma = match_term(r.lhs, subterm(t, red.position))
        assert sigma is not None
        assert red.result == replace_at(t, red.position, apply_term_subst(sigma, r.rhs))


@given(rule_systems(), ground_terms)
@settings(max_examples=100)
def test_one_step_is_complete(rules: list[LeibnizRule], t) -> None:
    found = {(s.position, s.rule) for s in trs_one_step(rules, t)}
    for pos in positions(t):
        for r in rules:
            if match_term(r.lhs, subterm(t, pos)) is not None:
                assert (pos, r.name) in found


@given(rule_systems(), ground_terms, st.integers(0, 8))
@settings(max_examples=100)
def test_innermost_trace_is_a_reduction(rules: list[LeibnizRule], t, n: int) -> None:
    cur = t
    for red in innermost_trace(rules, t, n):
        assert red in trs_one_step(rules, cur)
        # nothing below the chosen position is reducible
        below = [p for p in positions(cur) if p[:len(red.position)] == red.position and p != red.position]
        assert all(not redexes_at(rules, cur, p) for p in below)
        cur = red.result


@given(rule_systems(), ground_terms)
@settings(max_examples=50)
def test_tree_children_are_the_one_step_reducts(rules: list[LeibnizRule], t) -> None:
    tree = reduction_tree(rules, t, 2)
    assert sorted(print_term(c.term) for c in tree.children) == \
        sorted(print_term(s.result) for s in trs_one_step(rules, t))
    for c in tree.children:
        assert len(c.children) == len(trs_one_step(rules, c.term))
