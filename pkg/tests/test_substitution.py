import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdp import EMPTY_SUBSTITUTION, Substitution, Var, is_normal_substitution, match, rename_apart
from rdp.terms import vars_of

from helpers import X, Y, Z0, ack, ack_system, ack_terms, ap, ground_ack_terms, nat


def test_identity_bindings_are_dropped():
    assert Substitution({X: X}) == EMPTY_SUBSTITUTION
    assert not Substitution({X: X})
    assert Substitution({X: nat(1), Y: Y}).domain() == frozenset({X})


def test_apply():
    sigma = Substitution({X: nat(1), Y: ap(Z0)})
    assert sigma.apply(ack(X, ack(X, Y))) == ack(nat(1), ack(nat(1), ap(Z0)))
    assert sigma.apply(Var("z")) == Var("z")
    assert sigma.get(X) == nat(1)
    assert sigma.get(Var("z")) == Var("z")


def test_restrict():
    sigma = Substitution({X: nat(1), Y: nat(2)})
    assert sigma.restrict([X]) == Substitution({X: nat(1)})
    assert sigma.restrict([]) == EMPTY_SUBSTITUTION


def test_equality_is_extensional():
    assert Substitution({X: nat(1), Y: Y}) == Substitution({X: nat(1)})
    assert hash(Substitution({X: nat(1), Y: Y})) == hash(Substitution({X: nat(1)}))


def test_match_basic():
    trs = ack_system()
    rule = trs.rules[0]
    sigma = match(rule.lhs, ack(ap(Z0), nat(1)))
    assert sigma == Substitution({Y: nat(1)})
    assert match(rule.lhs, ack(nat(1), ap(Z0))) is None
    assert match(X, ack(X, Y)) == Substitution({X: ack(X, Y)})


def test_match_nonlinear():
    pattern = ack(X, X)
    assert match(pattern, ack(nat(1), nat(1))) == Substitution({X: nat(1)})
    assert match(pattern, ack(nat(1), nat(2))) is None


def test_match_respects_symbols():
    assert match(nat(1), nat(2)) is None
    assert match(ap(Z0), X) is None


@given(ack_terms, ground_ack_terms, ground_ack_terms)
def test_match_recovers_an_equivalent_substitution(pattern, t1, t2):
    sigma = Substitution({X: t1, Y: t2})
    subject = sigma.apply(pattern)
    found = match(pattern, subject)
    assert found is not None
    assert found.apply(pattern) == subject


def test_rename_apart_disjoint_is_identity():
    t = ack(X, Y)
    variant, renaming = rename_apart(t, [Var("z")])
    assert variant == t
    assert renaming == EMPTY_SUBSTITUTION


def test_rename_apart_clashes():
    t = ack(X, Y)
    variant, renaming = rename_apart(t, [X])
    assert vars_of(variant).isdisjoint({X})
    assert renaming.apply(t) == variant
    assert variant == ack(Var("x#1"), Y)


def test_rename_apart_avoids_own_variables():
    t = ack(X, Var("x#1"))
    variant, _ = rename_apart(t, [X])
    assert vars_of(variant) == frozenset({Var("x#2"), Var("x#1")})


@given(ack_terms, st.sets(st.sampled_from(("x", "y", "z")), max_size=3))
def test_rename_apart_property(t, names):
    forbidden = [Var(n) for n in names]
    variant, renaming = rename_apart(t, forbidden)
    assert vars_of(variant).isdisjoint(forbidden)
    assert renaming.apply(t) == variant


def test_is_normal_substitution():
    trs = ack_system()
    assert is_normal_substitution(Substitution({Y: nat(1)}), trs)
    assert not is_normal_substitution(
        Substitution({X: ack(ap(Z0), ap(Z0))}), trs
    )
    assert is_normal_substitution(EMPTY_SUBSTITUTION, trs)
