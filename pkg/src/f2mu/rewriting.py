"""Plain first-order rewriting, used as an oracle and for tree/trace commands."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import NormalForm
from .leibniz import LeibnizRule
from .printer import layout_type
from .terms import (
    Position,
    TApp,
    Term,
    apply_term_subst,
    match_term,
    positions,
    print_term,
    replace_at,
    subterm,
    term_to_type,
)


@dataclass(frozen=True)
class Redex:
    position: Position
    rule: str
    result: Term


def redexes_at(rules: Sequence[LeibnizRule], t: Term, pos: Position) -> list[Redex]:
    u = subterm(t, pos)
    out = []
    for r in rules:
        sigma = match_term(r.lhs, u)
        if sigma is not None:
            out.append(Redex(pos, r.name, replace_at(t, pos, apply_term_subst(sigma, r.rhs))))  # type: ignore[arg-type]
    return out


def trs_one_step(rules: Sequence[LeibnizRule], t: Term) -> list[Redex]:
    """Every one-step reduct, by position (pre-order, left to right) then rule order."""
    out: list[Redex] = []
    for pos in positions(t):
        out.extend(redexes_at(rules, t, pos))
    return out


def _innermost_positions(t: Term, prefix: Position = ()) -> list[Position]:
    # post-order: arguments left to right, then the node itself
    out: list[Position] = []
    if isinstance(t, TApp):
        for i, a in enumerate(t.args, start=1):
            out.extend(_innermost_positions(a, prefix + (i,)))
    out.append(prefix)
    return out


def innermost_step(rules: Sequence[LeibnizRule], t: Term) -> Redex:
    """Leftmost-innermost step; the first matching rule in declaration order fires."""
    for pos in _innermost_positions(t):
        found = redexes_at(rules, t, pos)
        if found:
            return found[0]
    raise NormalForm(print_term(t))


def trs_multi_step(rules: Sequence[LeibnizRule], t: Term, n: int,
                   strategy: str = "innermost") -> Term:
    for _ in range(n):
        if strategy == "innermost":
            t = innermost_step(rules, t).result
        elif strategy == "leftmost":
            steps = trs_one_step(rules, t)
            if not steps:
                raise NormalForm(print_term(t))
            t = steps[0].result
        else:
            raise ValueError(f"unknown strategy {strategy}")
    return t


def innermost_trace(rules: Sequence[LeibnizRule], t: Term, n: int) -> list[Redex]:
    """Up to ``n`` innermost steps; stops early at a normal form."""
    out: list[Redex] = []
    for _ in range(n):
        try:
            r = innermost_step(rules, t)
        except NormalForm:
            break
        out.append(r)
        t = r.result
    return out


# ---------------------------------------------------------------- trees


@dataclass
class TreeNode:
    position: Position | None
    rule: str
    term: Term
    children: list["TreeNode"] = field(default_factory=list)

    def label(self) -> str:
        pos = "[]" if not self.position else "[" + ",".join(map(str, self.position)) + "]"
        return f"{pos}, {self.rule}, {print_term(self.term)}"

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def reduction_tree(rules: Sequence[LeibnizRule], t: Term, depth: int) -> TreeNode:
    """Full reduction tree to ``depth``.

    Children are ordered by redex position, and at one position later
    rules come first.
    """
    order = {r.name: i for i, r in enumerate(rules)}

    def build(node: TreeNode, d: int) -> None:
        if d <= 0:
            return
        steps = trs_one_step(rules, node.term)
        steps.sort(key=lambda s: (list(s.position), -order[s.rule]))
        for s in steps:
            child = TreeNode(s.position, s.rule, s.result)
            build(child, d - 1)
            node.children.append(child)

    root = TreeNode((), "_", t)
    build(root, depth)
    return root


def draw_tree(node: TreeNode) -> str:
    """ASCII rendering in the style of Haskell's ``drawTree``."""

    def draw(n: TreeNode) -> list[str]:
        lines = [n.label()]
        kids = n.children
        for i, k in enumerate(kids):
            sub = draw(k)
            lines.append("|")
            last = i == len(kids) - 1
            first_prefix, rest_prefix = ("`- ", "   ") if last else ("+- ", "|  ")
            lines.append(first_prefix + sub[0])
            lines.extend(rest_prefix + s for s in sub[1:])
        return lines

    return "\n".join(draw(node))


def render_trace(start: Term, steps: Sequence[Redex]) -> str:
    lines = ["the execution trace is:", " " + layout_type(term_to_type(start), start_col=1, line_start=0)]
    for s in steps:
        prefix = f"-{s.rule}-> "
        lines.append(prefix + layout_type(term_to_type(s.result), start_col=len(prefix), line_start=0))
    return "\n".join(lines)
