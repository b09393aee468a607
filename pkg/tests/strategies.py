"""Hypothesis strategies shared by the property suites."""

from fractions import Fraction

from hypothesis import strategies as st

from dsloc.algebra import Monomial, Presentation, SuperPoly
from dsloc.derivation import Derivation

# t, s polynomial; x laurent; xi, eta, zeta odd: six generators in all
P6 = Presentation.build(even="t s x", odd="xi eta zeta", laurent="x")

coefficients = st.one_of(
    st.integers(-3, 3).map(Fraction),
    st.tuples(st.integers(-3, 3), st.integers(1, 3)).map(lambda p: Fraction(*p)),
)


@st.composite
def odd_words(draw, n_odd: int, parity=None):
    """Sorted sets of odd indices; a requested parity is reached by toggling one index."""
    word = set(draw(st.lists(st.integers(0, n_odd - 1), unique=True, max_size=n_odd)))
    if parity is not None and len(word) % 2 != parity:
        word ^= {draw(st.integers(0, n_odd - 1))}
    return tuple(sorted(word))


@st.composite
def monomials(draw, pres: Presentation = P6, parity=None, max_deg: int = 2):
    exps = []
    for v in pres.even:
        lo = -max_deg if v.laurent else 0
        exps.append(draw(st.integers(lo, max_deg)))
    return Monomial(tuple(exps), draw(odd_words(len(pres.odd), parity)))


@st.composite
def polys(draw, pres: Presentation = P6, parity=None, max_terms: int = 4, max_deg: int = 2):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        m = draw(monomials(pres, parity, max_deg))
        terms[m] = terms.get(m, 0) + draw(coefficients)
    return SuperPoly(pres, terms)


@st.composite
def derivations(draw, pres: Presentation = P6, parity: int = 1, max_terms: int = 3):
    images = {}
    for v in pres.variables:
        images[v.name] = draw(polys(pres, (v.parity + parity) % 2, max_terms, 1))
    return Derivation(pres, images, parity)
