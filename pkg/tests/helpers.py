"""Hand-built systems and term builders shared across the test modules."""

from hypothesis import strategies as st

from rdp import App, Symbol, Term, Var, trs_of

A2 = Symbol("a", 2)
S1 = Symbol("s", 1)
Z0 = Symbol("0", 0)
F1 = Symbol("f", 1)
G1 = Symbol("g", 1)
C0 = Symbol("c", 0)
H2 = Symbol("h", 2)
G2 = Symbol("g", 2)
P1 = Symbol("p", 1)
Q1 = Symbol("q", 1)
LOOP1 = Symbol("loop", 1)

X = Var("x")
Y = Var("y")


def ap(sym: Symbol, *args: Term) -> App:
    return App(sym, tuple(args))


def nat(k: int) -> Term:
    t: Term = ap(Z0)
    for _ in range(k):
        t = ap(S1, t)
    return t


def ack(left: Term, right: Term) -> Term:
    return ap(A2, left, right)


def ack_system():
    """a(0,y) -> s(y); a(s(x),0) -> a(x,s(0)); a(s(x),s(y)) -> a(x,a(s(x),y))"""
    return trs_of(
        (ack(ap(Z0), Y), ap(S1, Y)),
        (ack(ap(S1, X), ap(Z0)), ack(X, ap(S1, ap(Z0)))),
        (ack(ap(S1, X), ap(S1, Y)), ack(X, ack(ap(S1, X), Y))),
    )


def loop_system():
    """f(x) -> f(x): the one-rule self loop."""
    return trs_of((ap(F1, X), ap(F1, X)))


def fc() -> Term:
    return ap(F1, ap(C0))


def hg_system():
    """h(x,y) -> h(g(x,y), g(g(x,y),y)); h(x,y) -> g(x,y); g(x,y) -> y"""
    gxy = ap(G2, X, Y)
    return trs_of(
        (ap(H2, X, Y), ap(H2, gxy, ap(G2, gxy, Y))),
        (ap(H2, X, Y), gxy),
        (gxy, Y),
    )


def grow_system():
    """g(x) -> g(s(x)): nonterminating but with no cycle, ever."""
    return trs_of((ap(G1, X), ap(G1, ap(S1, X))))


def nest_system():
    """p(x) -> q(loop(x)); loop(x) -> loop(x): the loop sits under a constructor."""
    return trs_of(
        (ap(P1, X), ap(Q1, ap(LOOP1, X))),
        (ap(LOOP1, X), ap(LOOP1, X)),
    )


def growing_wrap_system():
    """p(x) -> q(p(x)): every derivation grows, so no exact cycle exists."""
    return trs_of((ap(P1, X), ap(Q1, ap(P1, X))))


# Hypothesis strategy: terms over the Ackermann-style signature with two
# variables.  Small on purpose; depth is bounded by the leaf budget.
ack_terms = st.recursive(
    st.sampled_from((ap(Z0), X, Y)),
    lambda children: st.one_of(
        st.builds(lambda t: ap(S1, t), children),
        st.builds(lambda l, r: ap(A2, l, r), children, children),
    ),
    max_leaves=10,
)

ground_ack_terms = st.recursive(
    st.just(ap(Z0)),
    lambda children: st.one_of(
        st.builds(lambda t: ap(S1, t), children),
        st.builds(lambda l, r: ap(A2, l, r), children, children),
    ),
    max_leaves=8,
)
