"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations

from typing import Any


class F2MuError(Exception):
    """Base class; ``exit_code`` is what the command-line driver returns."""

    exit_code = 1


class ParseError(F2MuError):
    exit_code = 1

    def __init__(self, line: int, col: int, expected: str, found: str = "") -> None:
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        where = f" but found {found!r}" if found else ""
        super().__init__(f"parse error at {line}:{col}: expected {expected}{where}")


class ArityConflict(ParseError):
    """A function symbol is used with two different numbers of arguments."""

    def __init__(self, symbol: str, first: int, second: int, line: int = 0, col: int = 0) -> None:
        self.symbol = symbol
        self.arities = (first, second)
        super().__init__(line, col, f"{symbol} applied to {first} arguments", f"{second} arguments")


class KindError(F2MuError):
    exit_code = 2

    def __init__(self, reason: str, subterm: Any = None) -> None:
        self.reason = reason
        self.subterm = subterm
        suffix = f" in {subterm}" if subterm is not None else ""
        super().__init__(f"kind error: {reason}{suffix}")


class ProofTypeError(F2MuError):
    """Proof-checking failure; ``path`` walks from the root of the evidence."""

    exit_code = 4

    def __init__(self, path: tuple[str, ...], expected: Any, found: Any, reason: str = "") -> None:
        self.path = tuple(path)
        self.expected = expected
        self.found = found
        self.reason = reason
        where = "/".join(self.path) or "<root>"
        msg = f"type error at {where}: expected {expected}, found {found}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class ResolutionError(F2MuError):
    exit_code = 3


class NoMatcher(ResolutionError):
    def __init__(self, head: str, pattern: Any, target: Any, decl: str | None = None) -> None:
        self.head = head
        self.pattern = pattern
        self.target = target
        self.decl = decl
        super().__init__(f"no kindable matcher for {head}: {pattern} against {target}")


class NotLongForm(ResolutionError):
    def __init__(self, evidence: Any, goal: Any, hint: str) -> None:
        self.evidence = evidence
        self.goal = goal
        self.hint = hint
        super().__init__(f"evidence {evidence} is not in long form for {goal}: {hint}")


class ExistentialInRSM(ResolutionError):
    def __init__(self, names: tuple[str, ...], head: str) -> None:
        self.names = names
        super().__init__(
            f"applying {head} introduces existential variables {' '.join(names)}; "
            "plain RSM cannot handle them, use ERSM"
        )


class ScopeError(ResolutionError):
    """Carries everything printed for a rejected existential instantiation."""

    def __init__(self, *, scope: tuple[str, ...], substitution: Any, pattern: Any, target: Any,
                 hypothesis: str, hypothesis_type: Any, mixed_term: Any, eigen: frozenset[str]) -> None:
        self.scope = scope
        self.substitution = substitution
        self.pattern = pattern
        self.target = target
        self.hypothesis = hypothesis
        self.hypothesis_type = hypothesis_type
        self.mixed_term = mixed_term
        self.eigen = eigen
        super().__init__(f"scope error: {substitution} under {' '.join(scope)}")


class StepLimit(ResolutionError):
    def __init__(self, limit: int) -> None:
        super().__init__(f"resolution exceeded {limit} steps")


class UnfoldError(F2MuError):
    exit_code = 5

    def __init__(self, index: int, reason: str) -> None:
        self.index = index
        self.reason = reason
        super().__init__(f"unfolding failed at trace element {index}: {reason}")


class NormalForm(F2MuError):
    exit_code = 5

    def __init__(self, term: Any) -> None:
        self.term = term
        super().__init__(f"{term} is a normal form")


class InvalidStep(F2MuError):
    exit_code = 5

    def __init__(self, index: int, reason: str = "") -> None:
        self.index = index
        super().__init__(f"step {index} does not rewrite" + (f": {reason}" if reason else ""))


class UnknownName(F2MuError):
    exit_code = 3

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"unknown name {name}")


class NormalizationFuel(F2MuError):
    """Type-level normalization ran out of fuel; signals an ill-kinded input."""

    exit_code = 2
