from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from ordloc.model import Agent, Instance, ModelKind


def rationals(denominator: int = 60):
    return st.integers(0, denominator).map(lambda k: Fraction(k, denominator))


@st.composite
def alphas(draw, m: int = 2, kind: ModelKind = ModelKind.MULTIPLICATIVE):
    steps = draw(st.lists(st.integers(0, 8), min_size=m - 1, max_size=m - 1))
    if kind is ModelKind.MULTIPLICATIVE:
        out, cur = [Fraction(1)], Fraction(1)
        for s in steps:
            cur += Fraction(s, 4)
            out.append(cur)
        return tuple(out)
    out, cur = [Fraction(0)], Fraction(0)
    for s in steps:
        cur = min(Fraction(1), cur + Fraction(s, 16))
        out.append(cur)
    return tuple(out)


@st.composite
def instances(draw, min_n=1, max_n=6, m=2, kind=ModelKind.MULTIPLICATIVE, denominator=60):
    alpha = draw(alphas(m, kind))
    n = draw(st.integers(min_n, max_n))
    agents = []
    for _ in range(n):
        x = draw(rationals(denominator))
        pref = tuple(draw(st.permutations(list(range(m)))))
        agents.append(Agent(x, pref))
    return Instance(alpha, tuple(agents), kind)


@st.composite
def placements(draw, m=2, denominator=60):
    return tuple(draw(rationals(denominator)) for _ in range(m))
