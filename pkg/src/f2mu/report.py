"""Text report for a pipeline run.

The layout follows the prototype checker's output: numbered sections
(rewrite rules, kinds, axioms, proof declarations, lemmas, steps), the
success line, and the results of ``step`` commands.  Scope errors get a
dedicated listing with eigenvariables in brackets.
"""

from __future__ import annotations

from collections.abc import Mapping

from .dynamics import NotProductive, ProductiveTo, Productivity, Unknown
from .errors import F2MuError, ScopeError
from .evidence import Mu
from .kernel import Type
from .pipeline import PipelineResult
from .printer import layout_evidence, layout_mixed, layout_type, print_evidence, print_type
from .program import Command, FullTree, InnerTrace, Step
from .terms import print_term

SUCCESS = "automated proof reconstruction success!"


def typed_header(name: str, t: Type) -> str:
    prefix = f"{name} : "
    return prefix + layout_type(t, start_col=len(prefix), line_start=0)


def command_text(c: Command) -> str:
    match c:
        case Step(name, n):
            return f"step {name} {n}"
        case FullTree(depth, term):
            return f":full {depth} ({print_term(term)})"
        case InnerTrace(depth, term):
            return f":inner {depth} ({print_term(term)})"
    raise AssertionError(c)


def productivity_text(p: Productivity | None) -> str:
    match p:
        case ProductiveTo(d):
            return f"productive to depth {d}"
        case NotProductive(w):
            return f"not productive: {print_evidence(w)} has no head normal form"
        case Unknown(reason):
            return f"unknown ({reason})"
    return "not analysed"


def scope_error_lines(err: ScopeError) -> list[str]:
    eigen = err.eigen
    lines = [
        "  scope error when matching " + layout_type(err.pattern, 27, 2, eigen),
        "  against " + layout_type(err.target, 10, 2, eigen),
        f"    when applying {err.hypothesis} : "
        + layout_type(err.hypothesis_type, 22 + len(err.hypothesis), 4, eigen),
    ]
    subst: Mapping[str, Type] = err.substitution
    text = "    when applying substitution [ "
    for k, (x, v) in enumerate(subst.items()):
        if k:
            text += ", "
        text += f"{x} : "
        text += layout_type(v, start_col=len(text.rsplit("\n", 1)[-1]), line_start=4, bracket=eigen)
    lines.append(text + " ]")
    lines.append("    current variables list:")
    lines.append("      " + " ".join(err.scope))
    lines.append("    the current mixed proof term:")
    term, holes = err.mixed_term
    if isinstance(term, Mu):
        term = term.body
    lines.append("      " + layout_mixed(term, holes, start_col=6, bracket=eigen))
    return lines


def error_lines(err: F2MuError) -> list[str]:
    if isinstance(err, ScopeError):
        return scope_error_lines(err)
    return [f"  {err}"]


_TRACE_VERDICTS = {
    "length": "requested length reached",
    "finite": "the trace ends",
    "undefined": "head reduction ran out of fuel",
}


def render_report(r: PipelineResult, strict: bool = False) -> str:
    """The report as one string; ``strict`` leaves out the informational sections."""
    out: list[str] = []
    prog = r.program
    if prog is None:
        if r.error is not None:
            out.append("error")
            out.extend(error_lines(r.error))
        return "\n".join(out) + ("\n" if out else "")
    if not (prog.rule_decls or prog.axiom_decls or prog.proof_decls or prog.commands):
        if r.error is not None:
            out.append("error")
            out.extend(error_lines(r.error))
        return "\n".join(out) + ("\n" if out else "")

    out.append("rewrite rules")
    for rd in prog.rule_decls:
        out.append(f"{rd.name} : {print_term(rd.lhs)} <= {print_term(rd.rhs)}")
    out.append("kinds")
    out.extend(f"{n} : {k}" for n, k in r.kinds.items())
    out.append("axioms")
    out.extend(typed_header(n, t) for n, t in r.axioms)
    out.append("proof declarations")
    for d in prog.proof_decls:
        out.append(typed_header(d.name, d.declared_type) + " =")
        out.append(print_evidence(d.lambda_body))
    if r.error is not None and not r.checked:
        out.append("error")
        out.extend(error_lines(r.error))
        return "\n".join(out) + "\n"

    out.append("lemmas")
    for lem in reversed(r.lemmas):
        e = lem.evidence
        if isinstance(e, Mu) and e.binder == lem.name:
            e = e.body
        out.append(typed_header(lem.name, lem.declared_type) + " =")
        out.append("  " + layout_evidence(e, start_col=2))
    out.append("steps")
    out.extend(command_text(c) for c in prog.commands)
    out.append(SUCCESS)
    steps = [o for o in r.outputs if isinstance(o.command, Step)]
    if steps:
        out.append("steps results")
        for o in steps:
            out.extend(o.lines)
    for o in r.outputs:
        if not isinstance(o.command, Step):
            out.extend(o.lines)
    if not strict and r.lemmas and any(lem.productivity is not None for lem in r.lemmas):
        out.append("productivity")
        for lem in r.lemmas:
            out.append(f"{lem.name} : {productivity_text(lem.productivity)}")
    if not strict and any(lem.trace is not None for lem in r.lemmas):
        out.append("evidence traces")
        for lem in r.lemmas:
            if lem.trace is None:
                continue
            n = len(lem.trace.elements)
            out.append(f"{lem.name} : {n} elements, {_TRACE_VERDICTS[lem.trace.verdict]}")
            out.extend(f"  {el}" for el in lem.trace.elements)
    if r.error is not None:
        out.append("error")
        out.extend(error_lines(r.error))
    return "\n".join(out) + "\n"


__all__ = [
    "SUCCESS",
    "render_report",
    "scope_error_lines",
    "typed_header",
    "command_text",
    "productivity_text",
    "print_type",
]
