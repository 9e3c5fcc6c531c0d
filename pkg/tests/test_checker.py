from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from f2mu.checker import (
    BASE,
    ReductionStep,
    YArrow,
    check_proof,
    proof_check,
    reinterpret,
    represent_finite_reduction,
    rule_environment,
    steps_from_positions,
    lambda_y_check,
    theta_env,
    theta_type,
)
from f2mu.errors import InvalidStep, ProofTypeError
from f2mu.evidence import EApp, ELam, EVar, Mu, TyApp, TyLam, erase
from f2mu.kernel import STAR, Arrow, arity_kind
from f2mu.parser import free_var_kinds, parse_evidence, parse_term, parse_type
from f2mu.rewriting import trs_one_step
from f2mu.terms import HOLE, Term, apply_term_subst, fill, term_vars
from strategies import SIGNATURE, ground_terms, rule_systems

from conftest import POSITIVE, loaded

DELTA = {"F": arity_kind(1), "G": arity_kind(1)}
K = parse_type("forall p x . p (G (F (G x))) => p (F x)")
GAMMA = {"K": K}
H_TYPE = parse_type("forall p x . p (F x)")


def section_two_proof():
    # mu h . /\ p x . K [\ m . p m] [x] (h [\ m . p (G m)] [G x])
    body = EApp(
        TyApp(TyApp(EVar("K"), parse_type("\\ m . p m")), parse_type("x")),
        TyApp(TyApp(EVar("h"), parse_type("\\ m . p (G m)")), parse_type("G x")),
    )
    return Mu("h", TyLam("p", TyLam("x", body, STAR), Arrow(STAR)), H_TYPE)


def test_hand_written_fixed_point_checks() -> None:
    check_proof(DELTA, GAMMA, section_two_proof(), H_TYPE)


def test_wrong_type_argument_is_rejected() -> None:
    body = EApp(
        TyApp(TyApp(EVar("K"), parse_type("\\ m . p m")), parse_type("x")),
        TyApp(TyApp(EVar("h"), parse_type("\\ m . p m")), parse_type("G x")),
    )
    bad = Mu("h", TyLam("p", TyLam("x", body)), H_TYPE)
    verdict = proof_check(DELTA, GAMMA, bad, H_TYPE)
    assert not verdict
    assert isinstance(verdict.error, ProofTypeError)
    assert verdict.error.path


def test_unbound_evidence_is_rejected() -> None:
    with pytest.raises(ProofTypeError):
        check_proof(DELTA, {}, section_two_proof(), H_TYPE)


def test_ill_kinded_type_argument_is_rejected() -> None:
    body = EApp(
        TyApp(TyApp(EVar("K"), parse_type("\\ m . p m")), parse_type("G")),
        TyApp(TyApp(EVar("h"), parse_type("\\ m . p (G m)")), parse_type("G x")),
    )
    bad = Mu("h", TyLam("p", TyLam("x", body)), H_TYPE)
    assert not proof_check(DELTA, GAMMA, bad, H_TYPE)


def test_abstraction_over_a_free_name_is_renamed_not_rejected() -> None:
    # the binder x clashes with the x free in the hypothesis type
    t = parse_type("F x => forall x . F x => F x")
    e = ELam("v", parse_type("F x"), TyLam("x", ELam("w", parse_type("F x"), EVar("w"))))
    check_proof({**DELTA, "x": STAR}, {}, e, t)
    wrong = ELam("v", parse_type("F x"), TyLam("x", ELam("w", parse_type("F x"), EVar("v"))))
    assert not proof_check({**DELTA, "x": STAR}, {}, wrong, t)


def test_printed_lemmas_are_read_back_type_directed() -> None:
    text = "\\ p0' x1' . K (\\ m1' . p0' m1') x1' (h (\\ m1' . p0' (G m1')) (G x1'))"
    e = reinterpret(GAMMA, Mu("h", parse_evidence(text)), H_TYPE)
    check_proof(DELTA, GAMMA, e, H_TYPE)
    assert isinstance(e.body, TyLam)


def test_reinterpret_rejects_terms_at_type_positions() -> None:
    with pytest.raises(ProofTypeError):
        reinterpret(GAMMA, parse_evidence("\\ p x . K (\\ (v : F x) . v) x"), H_TYPE)


# ---------------------------------------------------------------- lambda-Y


def test_theta_keeps_only_implications() -> None:
    assert theta_type(K) == YArrow(BASE, BASE)
    assert theta_type(parse_type("forall d . (forall p x . p (d x) => p x) => d Z")) == \
        YArrow(YArrow(BASE, BASE), BASE)


def test_lambda_y_accepts_fixed_points_and_rejects_self_application() -> None:
    env = theta_env(GAMMA)
    assert lambda_y_check(env, erase(section_two_proof()), BASE)
    assert lambda_y_check({}, Mu("h", EVar("h")), BASE)
    assert not lambda_y_check({}, parse_evidence("\\ x . x x"), YArrow(BASE, BASE))
    assert not lambda_y_check(env, parse_evidence("K K"), BASE)


@pytest.mark.parametrize("name", POSITIVE)
def test_every_lemma_maps_to_a_simply_typed_term(name: str) -> None:
    p, r = loaded(name, False)
    env = theta_env(p.globals)
    for lm in r.lemmas:
        assert lambda_y_check(env, erase(lm.evidence), theta_type(lm.declared_type))
        assert proof_check({**r.kinds, **free_var_kinds(lm.declared_type)}, p.globals,
                           lm.evidence, lm.declared_type)


# ---------------------------------------------------------------- finite reductions


def test_a_two_step_reduction_is_represented() -> None:
    from f2mu.leibniz import LeibnizRule

    rules = [LeibnizRule("K", parse_term("F x"), parse_term("G (F (G x))"), ("x",))]
    start = parse_term("F Z")
    steps = steps_from_positions(rules, start, [((), "K"), ((1,), "K")])
    e, t = represent_finite_reduction(rules, start, steps)
    assert str(t) == str(parse_type("G (G (F (G (G Z)))) => F Z"))
    check_proof({**DELTA, "Z": STAR}, rule_environment(rules), e, t)


def test_a_step_that_does_not_match_is_refused() -> None:
    from f2mu.leibniz import LeibnizRule

    rules = [LeibnizRule("K", parse_term("F x"), parse_term("G x"), ("x",))]
    with pytest.raises(InvalidStep):
        steps_from_positions(rules, parse_term("G Z"), [((), "K")])
    with pytest.raises(InvalidStep):
        represent_finite_reduction(rules, parse_term("F Z"),
                                   [ReductionStep("K", fill(HOLE, HOLE), {})])


@st.composite
def finite_reductions(draw: st.DrawFn):
    rules = draw(rule_systems())
    # start from an instance of a left-hand side so at least one step exists
    lhs = draw(st.sampled_from(rules)).lhs
    sigma = {x: draw(ground_terms) for x in term_vars(lhs)}
    start: Term = apply_term_subst(sigma, lhs)
    t, schedule = start, []
    for _ in range(draw(st.integers(1, 6))):
        options = trs_one_step(rules, t)
        if not options:
            break
        r = draw(st.sampled_from(options))
        schedule.append((r.position, r.rule))
        t = r.result
    assert schedule
    return rules, start, schedule


@given(finite_reductions())
@settings(max_examples=200)
def test_random_finite_reductions_give_checked_evidence(problem) -> None:
    rules, start, schedule = problem
    steps = steps_from_positions(rules, start, schedule)
    e, t = represent_finite_reduction(rules, start, steps)
    delta = {f: arity_kind(n) for f, n in SIGNATURE.items()}
    check_proof(delta, rule_environment(rules), e, t)
