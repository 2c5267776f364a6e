"""Dependency pairs, chain witnesses, and loop certificates.

A dependency pair in alternative form is a (rule index, rhs position) pair
whose addressed subterm has a defined root symbol; the standard form pairs
the rule's lhs with that subterm.  A chain witness lists (pair,
substitution) entries; consecutive entries are chained when the
instantiated rhs subterm of one rewrites below the root to the
instantiated lhs of the next.

Checking is fuel-bounded and evidence-carrying in both directions: chain
links come with replayable non-root traces, nontermination evidence is an
exact innermost cycle, and from a cycle a verified chain of any requested
length can be extracted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rewriting import (
    DEFAULT_FUEL,
    DerivationTrace,
    FuelExhausted,
    RelationMode,
    Step,
    TRS,
    check_trace,
    defined_symbols,
    derives,
    embed_trace,
    is_nr_normal_form,
    normalize,
    successors,
)
from .substitution import Substitution, is_normal_substitution, match
from .terms import (
    App,
    Position,
    Term,
    Var,
    format_position,
    positions_of,
    replace_at,
    subterm_at,
    term_to_str,
    vars_in_order,
    vars_of,
)

VERIFIED = "verified"
NOT_FOUND = "not-found"
PRECONDITION_FAILED = "precondition-failed"


class InvalidDepPairError(ValueError):
    """A (rule, position) pair that is not a dependency pair of the TRS."""

    def __init__(self, message: str, entry: int | None = None):
        super().__init__(message)
        self.entry = entry


class PreconditionFailed(Exception):
    """An operation's checked precondition does not hold."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class ConstructionFailure(Exception):
    """A fuel-bounded construction stage could not produce its result."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class DepPairAlt:
    """Alternative form: rule index plus a position in that rule's rhs."""

    rule_index: int
    position: Position

    def __repr__(self) -> str:
        return f"({self.rule_index}, {format_position(self.position)})"


@dataclass(frozen=True)
class DepPair:
    """Standard form: the rule's lhs paired with the addressed rhs subterm."""

    lhs: Term
    rhs_sub: Term

    def __repr__(self) -> str:
        return f"<{term_to_str(self.lhs)}, {term_to_str(self.rhs_sub)}>"


@dataclass(frozen=True)
class ChainWitness:
    """Entries of (pair, substitution); substitutions are per entry, never shared."""

    entries: tuple[tuple[DepPairAlt, Substitution], ...]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class LoopCertificate:
    """An exact innermost cycle: a nonempty trace from a term back to itself."""

    trace: DerivationTrace

    def __post_init__(self) -> None:
        if self.trace.mode != RelationMode.INNERMOST:
            raise ValueError("loop certificate trace must use the innermost relation")
        if not self.trace.steps:
            raise ValueError("loop certificate trace must have at least one step")
        if self.trace.start != self.trace.end:
            raise ValueError("loop certificate trace must return to its start")


@dataclass(frozen=True)
class LinkVerdict:
    """Outcome of one chain-link check."""

    status: str
    trace: DerivationTrace | None = None
    reason: str | None = None


@dataclass(frozen=True)
class ChainVerdict:
    """Outcome of checking all consecutive links of a witness.

    On failure, ``failed_index`` is the first bad link (between entries i and
    i+1) and ``traces`` holds the links verified before it.
    """

    status: str
    traces: tuple[DerivationTrace, ...] = ()
    failed_index: int | None = None
    reason: str | None = None


def is_dep_pair_alt(trs: TRS, dp: DepPairAlt) -> bool:
    """True when ``dp`` addresses a defined-root application in its rule's rhs."""
    if not 0 <= dp.rule_index < len(trs.rules):
        return False
    rhs = trs.rules[dp.rule_index].rhs
    if dp.position not in positions_of(rhs):
        return False
    sub = subterm_at(rhs, dp.position)
    return isinstance(sub, App) and sub.sym in defined_symbols(trs)


def dep_pairs_alt(trs: TRS) -> list[DepPairAlt]:
    """All dependency pairs, ordered by (rule index, position pre-order)."""
    defined = defined_symbols(trs)
    out: list[DepPairAlt] = []
    for rule in trs.rules:
        for pos in positions_of(rule.rhs):
            sub = subterm_at(rule.rhs, pos)
            if isinstance(sub, App) and sub.sym in defined:
                out.append(DepPairAlt(rule.index, pos))
    return out


def to_standard(trs: TRS, dp: DepPairAlt) -> DepPair:
    if not is_dep_pair_alt(trs, dp):
        raise InvalidDepPairError(f"not a dependency pair of this TRS: {dp!r}")
    rule = trs.rules[dp.rule_index]
    return DepPair(rule.lhs, subterm_at(rule.rhs, dp.position))


def canonical_pair(pair: DepPair) -> DepPair:
    """Rename variables to v1, v2, ... in order of first occurrence (lhs first).

    Two standard pairs are equal up to renaming exactly when their canonical
    forms are equal.
    """
    order = dict.fromkeys(vars_in_order(pair.lhs) + vars_in_order(pair.rhs_sub))
    renaming = Substitution(
        {v: Var(f"v{i}") for i, v in enumerate(order, start=1)}
    )
    return DepPair(renaming.apply(pair.lhs), renaming.apply(pair.rhs_sub))


def standard_dep_pairs(trs: TRS, dedup: bool = False) -> list[DepPair]:
    """Standard-form pairs; with ``dedup`` duplicates up to renaming are dropped."""
    pairs = [to_standard(trs, dp) for dp in dep_pairs_alt(trs)]
    if not dedup:
        return pairs
    seen: set[DepPair] = set()
    out: list[DepPair] = []
    for pair in pairs:
        key = canonical_pair(pair)
        if key not in seen:
            seen.add(key)
            out.append(pair)
    return out


def validate_witness(trs: TRS, witness: ChainWitness) -> None:
    for i, (dp, _) in enumerate(witness.entries):
        if not is_dep_pair_alt(trs, dp):
            raise InvalidDepPairError(
                f"entry {i} is not a dependency pair of this TRS: {dp!r}", entry=i
            )


def check_chained(
    trs: TRS,
    dp1: DepPairAlt,
    sigma1: Substitution,
    dp2: DepPairAlt,
    sigma2: Substitution,
    innermost: bool,
    fuel: int = DEFAULT_FUEL,
) -> LinkVerdict:
    """Is (dp1, sigma1) followed by (dp2, sigma2) a chain link?

    The instantiated rhs subterm of dp1 must rewrite below the root to the
    instantiated lhs of dp2.  In innermost mode both instantiated lhs's must
    additionally be nr-normal (checked first; violation is reported as
    precondition-failed, not as not-found).
    """
    for dp in (dp1, dp2):
        if not is_dep_pair_alt(trs, dp):
            raise InvalidDepPairError(f"not a dependency pair of this TRS: {dp!r}")
    rule1 = trs.rules[dp1.rule_index]
    rule2 = trs.rules[dp2.rule_index]
    if innermost:
        for which, rule, sigma in (
            ("first", rule1, sigma1),
            ("second", rule2, sigma2),
        ):
            if not is_nr_normal_form(trs, sigma.apply(rule.lhs)):
                return LinkVerdict(
                    PRECONDITION_FAILED,
                    reason=f"{which}-lhs-instance-not-nr-normal",
                )
    source = sigma1.apply(subterm_at(rule1.rhs, dp1.position))
    target = sigma2.apply(rule2.lhs)
    mode = RelationMode.NON_ROOT_INNERMOST if innermost else RelationMode.NON_ROOT
    trace = derives(trs, source, target, mode, fuel)
    if trace is None:
        return LinkVerdict(NOT_FOUND)
    return LinkVerdict(VERIFIED, trace=trace)


def verify_chain_prefix(
    trs: TRS, witness: ChainWitness, innermost: bool, fuel: int = DEFAULT_FUEL
) -> ChainVerdict:
    """Check every consecutive link; empty and singleton witnesses are vacuously verified."""
    validate_witness(trs, witness)
    traces: list[DerivationTrace] = []
    entries = witness.entries
    for i in range(len(entries) - 1):
        dp1, sigma1 = entries[i]
        dp2, sigma2 = entries[i + 1]
        verdict = check_chained(trs, dp1, sigma1, dp2, sigma2, innermost, fuel)
        if verdict.status != VERIFIED:
            return ChainVerdict(
                verdict.status, tuple(traces), failed_index=i, reason=verdict.reason
            )
        assert verdict.trace is not None
        traces.append(verdict.trace)
    return ChainVerdict(VERIFIED, tuple(traces))


def term_pos_dps_alt(
    trs: TRS, witness: ChainWitness, i: int
) -> tuple[Term, Position]:
    """The i-th term of the derivation a chain witness denotes.

    Entry 0 contributes its instantiated rhs; each later entry is plugged in
    at the accumulated position, which extends by that entry's pair position.
    The returned position always addresses a subterm of the returned term.
    """
    if not 0 <= i < len(witness.entries):
        raise IndexError(f"witness has {len(witness.entries)} entries, asked for {i}")
    validate_witness(trs, witness)
    dp0, sigma0 = witness.entries[0]
    term = sigma0.apply(trs.rules[dp0.rule_index].rhs)
    acc = dp0.position
    for j in range(1, i + 1):
        dpj, sigmaj = witness.entries[j]
        term = replace_at(term, acc, sigmaj.apply(trs.rules[dpj.rule_index].rhs))
        acc = acc + dpj.position
    return term, acc


def derivation_from_chain(
    trs: TRS, witness: ChainWitness, fuel: int = DEFAULT_FUEL
) -> list[tuple[Term, DerivationTrace]]:
    """Turn a verified innermost chain into connected innermost derivations.

    Returns one (term, trace) pair per link: the i-th denoted term together
    with a nonempty, replay-verified innermost trace to the (i+1)-th.  The
    trace embeds the link's below-root derivation at the accumulated
    position and closes with the next entry's own rule step there.
    """
    verdict = verify_chain_prefix(trs, witness, innermost=True, fuel=fuel)
    if verdict.status != VERIFIED:
        raise PreconditionFailed(
            f"witness is not innermost chained: {verdict.status}"
            + (f" ({verdict.reason})" if verdict.reason else "")
        )
    out: list[tuple[Term, DerivationTrace]] = []
    for i in range(len(witness.entries) - 1):
        term_i, acc = term_pos_dps_alt(trs, witness, i)
        embedded = embed_trace(term_i, acc, verdict.traces[i])
        dp_next, sigma_next = witness.entries[i + 1]
        rule_next = trs.rules[dp_next.rule_index]
        closing_result = replace_at(
            embedded.end, acc, sigma_next.apply(rule_next.rhs)
        )
        closing = Step(
            acc,
            dp_next.rule_index,
            sigma_next.restrict(vars_of(rule_next.lhs)),
            closing_result,
        )
        trace = DerivationTrace(
            term_i, embedded.steps + (closing,), RelationMode.INNERMOST
        )
        if trace.end != term_pos_dps_alt(trs, witness, i + 1)[0]:
            raise ConstructionFailure("derivation-does-not-reach-next-term")
        if not check_trace(trs, trace):
            raise ConstructionFailure("derivation-replay-failed")
        out.append((term_i, trace))
    return out


def check_certificate(trs: TRS, cert: LoopCertificate) -> bool:
    """Replay the cycle; structural shape is already enforced at construction."""
    return check_trace(trs, cert.trace)


def detect_innermost_loop(
    trs: TRS, term: Term, fuel: int = DEFAULT_FUEL
) -> LoopCertificate | None:
    """Search for an exact innermost cycle reachable from ``term``.

    Explores at most ``fuel`` distinct terms breadth-first, then looks for a
    cycle among them by depth-first search.  Sound but incomplete: None only
    means no cycle was found within fuel, and in particular nonterminating
    systems whose terms grow forever are never caught.
    """
    order: list[Term] = [term]
    visited: set[Term] = {term}
    edges: dict[Term, list[Step]] = {}
    idx = 0
    while idx < len(order):
        u = order[idx]
        idx += 1
        steps = successors(trs, u, RelationMode.INNERMOST)
        edges[u] = steps
        for st in steps:
            v = st.result
            if v not in visited and len(visited) < fuel:
                visited.add(v)
                order.append(v)

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {u: WHITE for u in edges}
    for root in order:
        if color[root] != WHITE:
            continue
        stack: list[tuple[Term, object]] = [(root, iter(edges[root]))]
        path_steps: list[Step] = []
        color[root] = GRAY
        while stack:
            node, it = stack[-1]
            step = next(it, None)  # type: ignore[call-overload]
            if step is None:
                color[node] = BLACK
                stack.pop()
                if path_steps:
                    path_steps.pop()
                continue
            v = step.result
            if v not in edges:
                continue
            if color[v] == GRAY:
                cycle_from = next(i for i, (n, _) in enumerate(stack) if n == v)
                steps = tuple(path_steps[cycle_from:]) + (step,)
                return LoopCertificate(
                    DerivationTrace(v, steps, RelationMode.INNERMOST)
                )
            if color[v] == WHITE:
                color[v] = GRAY
                stack.append((v, iter(edges[v])))
                path_steps.append(step)
    return None


def find_mint_subterm(
    trs: TRS, term: Term, fuel: int = DEFAULT_FUEL
) -> tuple[Position, LoopCertificate] | None:
    """Deepest-leftmost subterm carrying a loop certificate, with its position.

    Arguments are searched before the term itself, so no proper subterm of
    the reported one carries a certificate within the same fuel.
    """
    if isinstance(term, App):
        for i, arg in enumerate(term.args, start=1):
            found = find_mint_subterm(trs, arg, fuel)
            if found is not None:
                pos, cert = found
                return (i,) + pos, cert
    cert = detect_innermost_loop(trs, term, fuel)
    if cert is not None:
        return (), cert
    return None


def dp_and_sub_from_nrnf(
    trs: TRS, term: Term, fuel: int = DEFAULT_FUEL
) -> tuple[DepPairAlt, Substitution, Term]:
    """From an nr-normal term, extract the dependency pair its root step takes.

    Matches the lowest-index rule at the root (the substitution is normal
    because the term is nr-normal), reduces, and locates a certified
    subterm of the reduct.  Returns the pair, the substitution, and that
    subterm.
    """
    if isinstance(term, Var) or not is_nr_normal_form(trs, term):
        raise ConstructionFailure("not-nr-normal")
    sigma: Substitution | None = None
    rule = None
    for candidate in trs.rules:
        sigma = match(candidate.lhs, term)
        if sigma is not None:
            rule = candidate
            break
    if rule is None or sigma is None:
        raise ConstructionFailure("no-root-rule")
    assert is_normal_substitution(sigma, trs)
    reduct = sigma.apply(rule.rhs)
    found = find_mint_subterm(trs, reduct, fuel)
    if found is None:
        raise ConstructionFailure("no-mint-within-fuel")
    pos, _ = found
    dp = DepPairAlt(rule.index, pos)
    if not is_dep_pair_alt(trs, dp):
        raise ConstructionFailure("mint-not-a-dependency-pair-position")
    return dp, sigma, subterm_at(reduct, pos)


def next_dp_and_sub(
    trs: TRS,
    dp: DepPairAlt,
    sigma: Substitution,
    fuel: int = DEFAULT_FUEL,
) -> tuple[DepPairAlt, Substitution]:
    """The entry following (dp, sigma) in a chain being grown from a loop.

    Checks the preconditions within fuel (the instantiated rhs subterm
    carries a certificate, the instantiated lhs is nr-normal), normalizes
    the subterm below the root, extracts the next pair, and only returns it
    after the link has been verified chained.
    """
    if not is_dep_pair_alt(trs, dp):
        raise InvalidDepPairError(f"not a dependency pair of this TRS: {dp!r}")
    rule = trs.rules[dp.rule_index]
    if not is_nr_normal_form(trs, sigma.apply(rule.lhs)):
        raise ConstructionFailure("lhs-instance-not-nr-normal")
    u = sigma.apply(subterm_at(rule.rhs, dp.position))
    if detect_innermost_loop(trs, u, fuel) is None:
        raise ConstructionFailure("no-loop-certificate")
    try:
        t = normalize(trs, u, RelationMode.NON_ROOT_INNERMOST, fuel).end
    except FuelExhausted:
        raise ConstructionFailure("fuel-exhausted-normalizing") from None
    dp2, sigma2, _ = dp_and_sub_from_nrnf(trs, t, fuel)
    verdict = check_chained(trs, dp, sigma, dp2, sigma2, innermost=True, fuel=fuel)
    if verdict.status != VERIFIED:
        raise ConstructionFailure(f"link-not-chained:{verdict.status}")
    return dp2, sigma2


def chain_from_loop(
    trs: TRS, cert: LoopCertificate, k: int, fuel: int = DEFAULT_FUEL
) -> ChainWitness:
    """Extract a verified innermost chain witness of length ``k`` from a cycle.

    Entry 0 comes from the certified term's minimal looping subterm; later
    entries are produced by iterating next_dp_and_sub.  The result is
    re-checked with verify_chain_prefix before being returned.
    """
    if k < 1:
        raise ValueError("chain length must be at least 1")
    if not check_certificate(trs, cert):
        raise PreconditionFailed("loop-certificate-does-not-replay")
    found = find_mint_subterm(trs, cert.trace.start, fuel)
    if found is None:
        raise ConstructionFailure("no-mint-within-fuel")
    pos, _ = found
    mint = subterm_at(cert.trace.start, pos)
    try:
        t0 = normalize(trs, mint, RelationMode.NON_ROOT_INNERMOST, fuel).end
    except FuelExhausted:
        raise ConstructionFailure("fuel-exhausted-normalizing") from None
    entries = [dp_and_sub_from_nrnf(trs, t0, fuel)[:2]]
    for _ in range(k - 1):
        entries.append(next_dp_and_sub(trs, entries[-1][0], entries[-1][1], fuel))
    witness = ChainWitness(tuple(entries))
    verdict = verify_chain_prefix(trs, witness, innermost=True, fuel=fuel)
    if verdict.status != VERIFIED:
        raise ConstructionFailure(
            f"chain-verification-failed-at-link-{verdict.failed_index}"
        )
    return witness
