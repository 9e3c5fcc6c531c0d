from __future__ import annotations

import pytest
from hypothesis import given, settings

from f2mu.errors import KindError
from f2mu.kernel import (
    FORMULA,
    STAR,
    App,
    Arrow,
    Forall,
    Lam,
    Substitution,
    Type,
    Var,
    alpha_eq,
    arity_kind,
    beta_step,
    free_type_vars,
    free_vars_in_order,
    kind_check,
    name_base,
    normalize_type,
    rename_away,
    subst_type,
    types_convertible,
)
from f2mu.parser import parse_type
from f2mu.printer import print_type
from strategies import beta_redexes

DELTA = {"F": arity_kind(2), "S": arity_kind(1), "Z": STAR, "a": STAR}


def test_arrow_kinds_print_right_nested() -> None:
    assert str(arity_kind(3)) == "* => * => * => *"
    assert arity_kind(0) == STAR


def test_leibniz_axiom_is_a_formula() -> None:
    t = parse_type("forall p x y . p (D x (S y)) => p (D (S x) y)")
    assert kind_check({"D": arity_kind(2), "S": arity_kind(1)}, t) == FORMULA


def test_context_variable_gets_an_arrow_kind() -> None:
    t = parse_type("forall p x . p (F x) => p x")
    assert isinstance(t, Forall) and t.kind == Arrow(STAR)


@pytest.mark.parametrize("text, reason", [
    ("S Z Z", "cannot be applied"),
    ("Z Z", "cannot be applied"),
    ("(\\ m . Z) a", "not relevant"),
    ("F (S) Z", "expected \\*"),
    ("W Z", "unbound name W"),
])
def test_ill_kinded_types_are_rejected(text: str, reason: str) -> None:
    with pytest.raises(KindError, match=reason):
        kind_check(DELTA, parse_type(text))


def test_normalization_is_beta() -> None:
    t = parse_type("(\\ m1 m2 . F m2 (S m1)) Z a")
    assert print_type(normalize_type(t)) == "F a (S Z)"


def test_substitution_avoids_capture() -> None:
    t = parse_type("forall y . F x y")
    out = subst_type({"x": Var("y")}, t)
    assert isinstance(out, Forall) and out.binder != "y"
    assert free_type_vars(out) == {"y"}


def test_alpha_equivalence_ignores_binder_names() -> None:
    assert alpha_eq(parse_type("forall p x . p x"), parse_type("forall q y . q y"))
    assert not alpha_eq(parse_type("forall p x . p x"), parse_type("forall p x . p Z"))


def test_convertibility_normalizes_both_sides() -> None:
    assert types_convertible(parse_type("(\\ m . S m) Z"), parse_type("S Z"))


def test_substitutions_must_be_idempotent() -> None:
    Substitution({"x": parse_type("S y")})
    with pytest.raises(AssertionError, match="idempotent"):
        Substitution({"x": parse_type("S y"), "y": parse_type("Z")})


def test_composition_keeps_idempotence() -> None:
    s = Substitution({"x": parse_type("S y")}).then({"y": parse_type("Z")})
    assert print_type(s["x"]) == "S Z" and print_type(s["y"]) == "Z"


def test_free_variables_in_first_occurrence_order() -> None:
    assert free_vars_in_order(parse_type("F (q y) x => q x")) == ["q", "y", "x"]


def test_generated_names_share_a_base() -> None:
    assert name_base("x12'") == "x"
    assert name_base("qa0'") == "qa"
    assert rename_away("x", {"x", "x'"}) not in {"x", "x'"}


# ---------------------------------------------------------------- properties


@given(beta_redexes())
@settings(max_examples=200)
def test_type_reduction_preserves_kinds_and_free_variables(t: Type) -> None:
    k = kind_check(DELTA, t)
    fv = free_type_vars(t)
    steps = 0
    while (nxt := beta_step(t)) is not None:
        assert kind_check(DELTA, nxt) == k
        assert free_type_vars(nxt) <= fv
        t = nxt
        steps += 1
    assert steps >= 1
    assert alpha_eq(t, normalize_type(t))


@given(beta_redexes())
@settings(max_examples=100)
def test_normal_forms_have_no_redex(t: Type) -> None:
    nf = normalize_type(t)
    assert beta_step(nf) is None

    def no_lam_head(u: Type) -> bool:
        match u:
            case App(Lam(), _):
                return False
            case App(f, a):
                return no_lam_head(f) and no_lam_head(a)
        return True

    assert no_lam_head(nf) or isinstance(nf, Lam)
