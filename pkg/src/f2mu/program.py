"""Parsed input files: rewrite rules, axioms, typed corecursive declarations and commands."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .evidence import ELam, Evidence, Mu
from .kernel import Kind, Type
from .terms import Term, term_vars


@dataclass(frozen=True)
class RuleDecl:
    """``name : lhs <= rhs`` in the input, i.e. the rule ``lhs -> rhs``."""

    name: str
    lhs: Term
    rhs: Term

    def __post_init__(self) -> None:
        from .terms import TVar

        if isinstance(self.lhs, TVar):
            raise ValueError(f"rule {self.name}: left-hand side is a variable")
        extra = set(term_vars(self.rhs)) - set(term_vars(self.lhs))
        if extra:
            raise ValueError(f"rule {self.name}: {sorted(extra)} occur only on the right")


@dataclass(frozen=True)
class ProofDecl:
    """A declared type plus an equation ``name params = body``.

    ``annotated`` marks the ``name : T = e`` form, whose body may carry
    type arguments and binder annotations.
    """

    name: str
    declared_type: Type
    params: tuple[str, ...]
    body: Evidence
    annotated: bool = False

    @property
    def term(self) -> Evidence:
        """The equation as a fixed point: ``mu name . \\ params . body``."""
        e = self.body
        for p in reversed(self.params):
            e = ELam(p, None, e)
        return Mu(self.name, e)

    @property
    def lambda_body(self) -> Evidence:
        e = self.body
        for p in reversed(self.params):
            e = ELam(p, None, e)
        return e


@dataclass(frozen=True)
class Step:
    name: str
    count: int


@dataclass(frozen=True)
class FullTree:
    depth: int
    term: Term


@dataclass(frozen=True)
class InnerTrace:
    depth: int
    term: Term


Command = Union[Step, FullTree, InnerTrace]


@dataclass
class Program:
    rule_decls: list[RuleDecl] = field(default_factory=list)
    axiom_decls: list[tuple[str, Type]] = field(default_factory=list)
    proof_decls: list[ProofDecl] = field(default_factory=list)
    commands: list[Command] = field(default_factory=list)
    constant_kinds: dict[str, Kind] = field(default_factory=dict)

    def proof(self, name: str) -> Optional[ProofDecl]:
        for d in self.proof_decls:
            if d.name == name:
                return d
        return None
