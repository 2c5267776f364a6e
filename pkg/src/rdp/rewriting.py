"""Rewrite rules and four reduction relations, with fuel-bounded search.

The relations differ along two independent axes: whether the root position
may be rewritten, and whether a redex must have all proper subterms in
normal form (the innermost side condition).  All searches are deterministic:
candidate steps are ordered by position in pre-order with ties broken by
rule index, and breadth-first exploration visits terms in that order.

Fuel bounds work, never correctness: a positive answer always carries a
replayable trace, a negative answer only says nothing was found within fuel.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from .substitution import Substitution, match
from .terms import (
    App,
    InvalidPositionError,
    Position,
    Signature,
    Symbol,
    Term,
    Var,
    format_position,
    positions_of,
    replace_at,
    subterm_at,
    symbols_of,
    term_to_str,
    vars_of,
)

DEFAULT_FUEL = 10_000


class RelationMode(Enum):
    """Which one-step reduction relation is in force."""

    FULL = "full"
    NON_ROOT = "non-root"
    INNERMOST = "innermost"
    NON_ROOT_INNERMOST = "non-root-innermost"

    @property
    def non_root(self) -> bool:
        return self in (RelationMode.NON_ROOT, RelationMode.NON_ROOT_INNERMOST)

    @property
    def innermost(self) -> bool:
        return self in (RelationMode.INNERMOST, RelationMode.NON_ROOT_INNERMOST)


class RuleRestrictionError(ValueError):
    """A rule whose lhs is a variable, or whose rhs invents variables."""


class FuelExhausted(Exception):
    """Normalization ran out of fuel; ``trace`` holds the steps taken so far."""

    def __init__(self, trace: DerivationTrace):
        super().__init__(f"fuel exhausted after {len(trace.steps)} steps")
        self.trace = trace


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    index: int

    def __post_init__(self) -> None:
        if isinstance(self.lhs, Var):
            raise RuleRestrictionError(
                f"rule {self.index}: left-hand side is the variable {self.lhs.name}"
            )
        extra = vars_of(self.rhs) - vars_of(self.lhs)
        if extra:
            names = ", ".join(sorted(v.name for v in extra))
            raise RuleRestrictionError(
                f"rule {self.index}: right-hand side invents variables {names}"
            )

    def __repr__(self) -> str:
        return f"{term_to_str(self.lhs)} -> {term_to_str(self.rhs)}"


@dataclass(frozen=True)
class TRS:
    """A finite set of rules, indexed 0..n-1 in file order."""

    signature: Signature
    variables: frozenset[Var]
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        for i, rule in enumerate(self.rules):
            if rule.index != i:
                raise ValueError(f"rule {i} carries index {rule.index}")


def trs_of(*rules: tuple[Term, Term]) -> TRS:
    """Build a TRS from lhs/rhs pairs, inferring signature and variables."""
    indexed = tuple(Rule(l, r, i) for i, (l, r) in enumerate(rules))
    symbols: dict[str, Symbol] = {}
    variables: set[Var] = set()
    for rule in indexed:
        for t in (rule.lhs, rule.rhs):
            for sym in symbols_of(t):
                symbols.setdefault(sym.name, sym)
            variables |= vars_of(t)
    return TRS(Signature(tuple(symbols.values())), frozenset(variables), indexed)


def defined_symbols(trs: TRS) -> frozenset[Symbol]:
    """Root symbols of left-hand sides; everything else is a constructor."""
    return frozenset(rule.lhs.sym for rule in trs.rules if isinstance(rule.lhs, App))


@dataclass(frozen=True)
class Step:
    """One reduction: rule ``rule_index`` fired at ``position`` with ``substitution``."""

    position: Position
    rule_index: int
    substitution: Substitution
    result: Term

    def __repr__(self) -> str:
        return (
            f"--{self.rule_index}@{format_position(self.position)}--> "
            f"{term_to_str(self.result)}"
        )


@dataclass(frozen=True)
class DerivationTrace:
    start: Term
    steps: tuple[Step, ...]
    mode: RelationMode

    @property
    def end(self) -> Term:
        return self.steps[-1].result if self.steps else self.start

    def terms(self) -> Iterator[Term]:
        yield self.start
        for step in self.steps:
            yield step.result

    def __len__(self) -> int:
        return len(self.steps)


def has_redex(trs: TRS, term: Term) -> bool:
    """True when some rule matches at some position of ``term``."""
    if isinstance(term, Var):
        return False
    if any(match(rule.lhs, term) is not None for rule in trs.rules):
        return True
    return any(has_redex(trs, arg) for arg in term.args)


def is_nr_normal_form(trs: TRS, term: Term) -> bool:
    """True when every proper subterm of ``term`` is a normal form.

    This is the innermost side condition: a redex may fire only when it is
    nr-normal.
    """
    if isinstance(term, Var):
        return True
    return not any(has_redex(trs, arg) for arg in term.args)


def iter_successors(trs: TRS, term: Term, mode: RelationMode) -> Iterator[Step]:
    """One-step reducts under ``mode``, ordered by (position pre-order, rule index)."""
    for pos in positions_of(term):
        if mode.non_root and pos == ():
            continue
        sub = subterm_at(term, pos)
        if isinstance(sub, Var):
            continue
        if mode.innermost and not is_nr_normal_form(trs, sub):
            continue
        for rule in trs.rules:
            sigma = match(rule.lhs, sub)
            if sigma is None:
                continue
            result = replace_at(term, pos, sigma.apply(rule.rhs))
            yield Step(pos, rule.index, sigma, result)


def successors(trs: TRS, term: Term, mode: RelationMode) -> list[Step]:
    return list(iter_successors(trs, term, mode))


def reduce_at(
    trs: TRS, term: Term, pos: Position, mode: RelationMode
) -> Step | None:
    """The lowest-rule-index step at ``pos`` valid under ``mode``, if any."""
    sub = subterm_at(term, pos)
    if mode.non_root and pos == ():
        return None
    if isinstance(sub, Var):
        return None
    if mode.innermost and not is_nr_normal_form(trs, sub):
        return None
    for rule in trs.rules:
        sigma = match(rule.lhs, sub)
        if sigma is not None:
            result = replace_at(term, pos, sigma.apply(rule.rhs))
            return Step(pos, rule.index, sigma, result)
    return None


def is_normal_form(trs: TRS, term: Term, mode: RelationMode) -> bool:
    return next(iter_successors(trs, term, mode), None) is None


def normalize(
    trs: TRS, term: Term, mode: RelationMode, fuel: int = DEFAULT_FUEL
) -> DerivationTrace:
    """Reduce with the leftmost-lowest strategy until a mode-normal form.

    Each step consumes one unit of fuel; raises FuelExhausted (carrying the
    partial trace) if no normal form is reached within ``fuel`` steps.
    """
    steps: list[Step] = []
    current = term
    for _ in range(max(fuel, 0)):
        step = next(iter_successors(trs, current, mode), None)
        if step is None:
            return DerivationTrace(term, tuple(steps), mode)
        steps.append(step)
        current = step.result
    if next(iter_successors(trs, current, mode), None) is None:
        return DerivationTrace(term, tuple(steps), mode)
    raise FuelExhausted(DerivationTrace(term, tuple(steps), mode))


def derives(
    trs: TRS,
    source: Term,
    target: Term,
    mode: RelationMode,
    fuel: int = DEFAULT_FUEL,
) -> DerivationTrace | None:
    """A shortest derivation source ->* target under ``mode``, or None.

    Breadth-first; ``fuel`` bounds the number of distinct terms explored.
    None means not found within fuel, never unreachability.
    """
    if source == target:
        return DerivationTrace(source, (), mode)
    parent: dict[Term, tuple[Term, Step]] = {}
    visited: set[Term] = {source}
    queue: deque[Term] = deque([source])
    while queue:
        u = queue.popleft()
        for step in iter_successors(trs, u, mode):
            v = step.result
            if v in visited:
                continue
            if len(visited) >= fuel:
                return None
            visited.add(v)
            parent[v] = (u, step)
            if v == target:
                steps: list[Step] = []
                node = v
                while node != source:
                    node, st = parent[node]
                    steps.append(st)
                steps.reverse()
                return DerivationTrace(source, tuple(steps), mode)
            queue.append(v)
    return None


def descendants(
    trs: TRS, term: Term, mode: RelationMode, fuel: int = DEFAULT_FUEL
) -> tuple[frozenset[Term], bool]:
    """All terms reachable under ``mode`` (including ``term``), with a truncation flag.

    The flag is True when the closure was cut off by fuel, i.e. some reduct
    outside the returned set exists.
    """
    visited: set[Term] = {term}
    queue: deque[Term] = deque([term])
    truncated = False
    while queue:
        u = queue.popleft()
        for step in iter_successors(trs, u, mode):
            v = step.result
            if v in visited:
                continue
            if len(visited) >= fuel:
                truncated = True
                continue
            visited.add(v)
            queue.append(v)
    return frozenset(visited), truncated


def check_step(trs: TRS, source: Term, step: Step, mode: RelationMode) -> bool:
    """Replay one step: position, rule, substitution, side condition, result."""
    try:
        sub = subterm_at(source, step.position)
    except InvalidPositionError:
        return False
    if not 0 <= step.rule_index < len(trs.rules):
        return False
    if mode.non_root and step.position == ():
        return False
    if mode.innermost and not is_nr_normal_form(trs, sub):
        return False
    rule = trs.rules[step.rule_index]
    if step.substitution.apply(rule.lhs) != sub:
        return False
    expected = replace_at(source, step.position, step.substitution.apply(rule.rhs))
    return expected == step.result


def check_trace(trs: TRS, trace: DerivationTrace) -> bool:
    """Replay a whole trace under its recorded mode."""
    current = trace.start
    for step in trace.steps:
        if not check_step(trs, current, step, trace.mode):
            return False
        current = step.result
    return True


def embed_trace(context: Term, pos: Position, trace: DerivationTrace) -> DerivationTrace:
    """Run ``trace`` inside ``context`` at ``pos``.

    Validity under the same mode is preserved because both the matching and
    the innermost side condition only look at the redex subterm, which the
    embedding does not change.
    """
    start = replace_at(context, pos, trace.start)
    steps = tuple(
        Step(
            pos + step.position,
            step.rule_index,
            step.substitution,
            replace_at(context, pos, step.result),
        )
        for step in trace.steps
    )
    return DerivationTrace(start, steps, trace.mode)
