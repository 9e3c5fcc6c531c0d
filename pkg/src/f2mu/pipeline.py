"""The whole run for one input file: parse, kind, translate, elaborate, check, unfold.

Every stage either completes or raises an :class:`~f2mu.errors.F2MuError`;
:func:`run_program` catches it and records it so the report can show how
far the run got.  Lemmas are kept only when the independent proof checker
accepts them, and commands only run on checked lemmas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .checker import lambda_y_check, proof_check, reinterpret, theta_env, theta_type
from .dynamics import (
    DEFAULT_FUEL,
    DEFAULT_PRODUCTIVITY_DEPTH,
    Productivity,
    Trace,
    bounded_hhn,
    evidence_trace,
    step_unfold,
)
from .errors import F2MuError, KindError, ProofTypeError, UnfoldError, UnknownName
from .evidence import Evidence, alpha_eq_evidence, erase
from .kernel import FORMULA, STAR, App, Forall, Kind, Type, Var, kind_check, spine
from .leibniz import LeibnizRule, leibniz_translate, rewrite_system
from .parser import free_var_kinds, parse_program
from .program import Command, FullTree, InnerTrace, ProofDecl, Program, Step
from .resolution import DEFAULT_STEP_LIMIT, Mode, resolve
from .rewriting import draw_tree, innermost_trace, reduction_tree, render_trace
from .terms import Term, print_term, type_to_term


@dataclass(frozen=True)
class Options:
    fuel: int = DEFAULT_FUEL
    trace_steps: int = 0
    productivity_depth: int = DEFAULT_PRODUCTIVITY_DEPTH
    strict_names: bool = False
    check_only: bool = False
    backtrack_existentials: bool = False
    run_commands: bool = True
    step_limit: int = DEFAULT_STEP_LIMIT
    check_invariants: bool = False


@dataclass
class Lemma:
    name: str
    declared_type: Type
    evidence: Evidence
    elaborated: bool
    productivity: Optional[Productivity] = None
    trace: Optional[Trace] = None


@dataclass
class CommandOutput:
    command: Command
    lines: list[str]


@dataclass
class PipelineResult:
    program: Optional[Program] = None
    rules: list[LeibnizRule] = field(default_factory=list)
    kinds: dict[str, Kind] = field(default_factory=dict)
    axioms: list[tuple[str, Type]] = field(default_factory=list)
    lemmas: list[Lemma] = field(default_factory=list)
    outputs: list[CommandOutput] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    error: Optional[F2MuError] = None
    # set once every declaration elaborated and checked
    checked: bool = False

    @property
    def exit_code(self) -> int:
        return 0 if self.error is None else self.error.exit_code


def _kind_check_formula(delta: dict[str, Kind], name: str, t: Type) -> None:
    local = {**delta, **free_var_kinds(t)}
    k = kind_check(local, t)
    # a bare atom of kind * is a formula too
    if k not in (FORMULA, STAR):
        raise KindError(f"declaration {name} has kind {k}", t)


def start_term(t: Type) -> Term:
    """The first-order term a lemma's type talks about.

    Quantifiers are dropped and a leading context variable ``p t`` is
    replaced by ``t``.
    """
    while isinstance(t, Forall):
        t = t.body
    head, args = spine(t)
    if isinstance(head, Var) and len(args) == 1 and isinstance(t, App):
        t = args[0]
    try:
        return type_to_term(t)  # type: ignore[return-value]
    except ValueError:
        raise UnfoldError(0, f"{t} is not a first-order term") from None


class Pipeline:
    def __init__(self, options: Options | None = None) -> None:
        self.options = options or Options()
        self.result = PipelineResult()

    # -- stages

    def load(self, text: str) -> None:
        r = self.result
        r.program = prog = parse_program(text)
        r.rules = rewrite_system(prog)
        delta, gamma = leibniz_translate(prog.rule_decls)
        kinds = dict(prog.constant_kinds)
        kinds.update(delta)
        r.kinds = dict(sorted(kinds.items()))
        r.axioms = list(gamma.items()) + list(prog.axiom_decls)
        for name, t in r.axioms:
            _kind_check_formula(r.kinds, name, t)
        for d in prog.proof_decls:
            _kind_check_formula(r.kinds, d.name, d.declared_type)

    @property
    def globals(self) -> dict[str, Type]:
        r = self.result
        assert r.program is not None
        g = dict(r.axioms)
        g.update({d.name: d.declared_type for d in r.program.proof_decls})
        return g

    def elaborate(self, d: ProofDecl) -> Lemma:
        glob = self.globals
        vk = free_var_kinds(d.declared_type)
        if d.annotated:
            ev = reinterpret(glob, d.term, d.declared_type)
            elaborated = False
        elif self.options.check_only:
            raise ProofTypeError((d.name,), "annotated evidence", "an unannotated equation",
                                 "check-only mode does not elaborate")
        else:
            res = resolve(d.term, d.declared_type, glob, self.result.kinds, Mode.ERSM,
                          var_kinds=vk, backtrack_existentials=self.options.backtrack_existentials,
                          step_limit=self.options.step_limit, decl=d.name,
                          check_invariants=self.options.check_invariants)
            ev = res.evidence
            elaborated = True
        verdict = proof_check({**self.result.kinds, **vk}, glob, ev, d.declared_type)
        if not verdict:
            assert verdict.error is not None
            raise verdict.error
        if elaborated and not alpha_eq_evidence(erase(ev), d.term):
            raise ProofTypeError((d.name,), d.term, erase(ev), "erasure does not give back the input")
        if not lambda_y_check(theta_env(glob), erase(ev), theta_type(d.declared_type)):
            raise ProofTypeError((d.name,), theta_type(d.declared_type), erase(ev),
                                 "the simply typed image does not type check")
        return Lemma(d.name, d.declared_type, ev, elaborated)

    def analyse(self) -> None:
        opts = self.options
        defs = self.definitions
        constants = frozenset(r.name for r in self.result.rules)
        for lem in self.result.lemmas:
            lem.productivity = bounded_hhn(lem.evidence, opts.productivity_depth, defs, opts.fuel)
            if opts.trace_steps > 0:
                lem.trace = evidence_trace(lem.evidence, opts.trace_steps, defs, opts.fuel, constants)

    @property
    def definitions(self) -> dict[str, Evidence]:
        return {lem.name: lem.evidence for lem in self.result.lemmas}

    def run_command(self, c: Command) -> CommandOutput:
        rules = self.result.rules
        match c:
            case Step(name, n):
                lem = next((x for x in self.result.lemmas if x.name == name), None)
                if lem is None:
                    raise UnknownName(name)
                # ``step h n`` shows the n-th term, counting the start term as the first
                terms = step_unfold(lem.evidence, start_term(lem.declared_type), max(n - 1, 0),
                                    rules, self.definitions, self.options.fuel)
                return CommandOutput(c, [print_term(terms[-1])])
            case FullTree(depth, term):
                return CommandOutput(c, draw_tree(reduction_tree(rules, term, depth)).split("\n"))
            case InnerTrace(depth, term):
                return CommandOutput(c, render_trace(term, innermost_trace(rules, term, depth)).split("\n"))
        raise AssertionError(c)

    def run(self, text: str) -> PipelineResult:
        r = self.result
        try:
            self.load(text)
            assert r.program is not None
            for d in r.program.proof_decls:
                r.lemmas.append(self.elaborate(d))
            r.checked = True
            if not self.options.check_only:
                self.analyse()
            if self.options.run_commands and not self.options.check_only:
                for c in r.program.commands:
                    r.outputs.append(self.run_command(c))
        except F2MuError as err:
            r.error = err
        return r


def run_program(text: str, options: Options | None = None) -> PipelineResult:
    return Pipeline(options).run(text)


def run_file(path: str, options: Options | None = None) -> PipelineResult:
    with open(path, encoding="utf-8") as fh:
        return run_program(fh.read(), options)


def standalone_command(text: str, command: Union[FullTree, InnerTrace]) -> CommandOutput:
    """Run a tree or trace command against the rules of a file without elaborating anything."""
    p = Pipeline(Options())
    p.load(text)
    return p.run_command(command)
