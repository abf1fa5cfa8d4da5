"""Hypothesis strategies shared by the test modules."""
from __future__ import annotations

from hypothesis import strategies as st

from snfmom.polymat import PolyMatrix
from snfmom.polyring import Poly

NAMES = ("a", "q", "y")

coeffs = st.integers(min_value=-20, max_value=20)
exps = st.integers(min_value=0, max_value=3)


@st.composite
def polys(draw, names=NAMES, max_terms=4):
    terms = draw(st.lists(st.tuples(coeffs, st.fixed_dictionaries({n: exps for n in names})),
                          max_size=max_terms))
    return Poly.from_terms(terms)


def univariate(name="q", max_terms=4):
    return polys(names=(name,), max_terms=max_terms)


@st.composite
def matrices(draw, rows, cols, names=NAMES, max_terms=2):
    return PolyMatrix([[draw(polys(names, max_terms)) for _ in range(cols)] for _ in range(rows)])
