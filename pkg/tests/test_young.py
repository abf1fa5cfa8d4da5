from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from snfmom.errors import BudgetExceeded, InvalidAnchor
from snfmom.families import family_spec
from snfmom.moments import MomentFunctional, hankel
from snfmom.polymat import PolyMatrix, ldu_extract
from snfmom.polyring import Poly, substitute, var
from snfmom.young import (RectAnchor, YoungShape, a_matrix, border_strip, catalan_specialization,
                          cell_var, lambda_ij, random_shape, rect_a_matrix, skew_genfun,
                          skew_genfun_bruteforce, staircase, substitute_all, udl_combinatorial,
                          verify_rect_udl, verify_udl)

q = var("q")
x11, x12, x21, x22 = (cell_var(c) for c in ((1, 1), (1, 2), (2, 1), (2, 2)))


def S(text):
    return YoungShape.parse(text)


def test_shape_basics():
    sh = S("3,2,1")
    assert sh.diagonal == 2 and sh.size == 6
    assert sh.conjugate() == sh
    assert S("4,1").conjugate() == S("2,1,1,1")
    with pytest.raises(ValueError):
        S("1,2")
    assert S("") == YoungShape(())


def test_lambda_ij_examples():
    sh = S("3,2,1")
    assert lambda_ij(sh, 1, 1) == frozenset(sh.cells())
    assert lambda_ij(sh, 2, 2) == frozenset({(2, 2)})
    assert lambda_ij(sh, 4, 1) == frozenset()


def test_skew_genfun_examples():
    assert skew_genfun([(1, 1)]) == 1 + x11
    assert skew_genfun([(1, 1), (2, 1)]) == 1 + x21 + x11 * x21
    assert skew_genfun([]) == 1
    with pytest.raises(BudgetExceeded):
        skew_genfun(S("6,6,6,6,6,1").cells())


def test_a_matrix_examples():
    sh = S("1")
    assert a_matrix(sh) == PolyMatrix([[1 + x11, 1], [1, 1]])
    A = a_matrix(S("3,2,1"))
    assert A[2, 2] == skew_genfun(lambda_ij(S("3,2,1"), 3, 3))
    spec_A = a_matrix(S("1"), lambda c: q)
    assert spec_A == hankel(MomentFunctional(family_spec("catalan_star")), 1, "even").flipped()


def test_udl_examples():
    f = udl_combinatorial(S("1"))
    # A = [[1+x, 1], [1, 1]] forces U = [[1, 1], [0, 1]] and L = U^t
    assert f.U == PolyMatrix([[1, 1], [0, 1]])
    assert f.L == PolyMatrix([[1, 0], [1, 1]])
    assert f.D == [x11, 1]
    g = udl_combinatorial(S("3,2,1"))
    prod = Poly.const(1)
    for c in S("3,2,1").cells():
        prod = prod * cell_var(c)
    assert g.D == [prod, x22, 1]
    assert all(g.U[i, i] == 1 and g.L[i, i] == 1 for i in range(3))


def test_verify_udl_examples():
    assert verify_udl(S("1")).diagonal == [1, x11]
    assert verify_udl(S("2,1")).diagonal == [1, x11 * x12 * x21]


def test_random_shapes_udl():
    rng = random.Random(11)
    for _ in range(50):
        sh = random_shape(rng, 12)
        cert = verify_udl(sh)
        f = udl_combinatorial(sh)
        assert ldu_extract(a_matrix(sh).flipped()).D == f.D[::-1]
        assert cert.chain_ok


@given(st.lists(st.integers(1, 4), min_size=0, max_size=4))
def test_genfun_matches_bruteforce(parts):
    sh = YoungShape(tuple(sorted(parts, reverse=True)))
    for i in range(1, 3):
        for j in range(1, 3):
            cells = lambda_ij(sh, i, j)
            assert skew_genfun(cells) == skew_genfun_bruteforce(cells)


def test_rect_examples():
    sh = S("2,1")
    square = RectAnchor(sh.diagonal + 1, sh.diagonal + 1)
    assert rect_a_matrix(sh, square) == a_matrix(sh)
    row = rect_a_matrix(sh, RectAnchor(1, 3))
    assert row.shape == (1, 3)
    assert rect_a_matrix(sh, RectAnchor(3, 2)).shape == (3, 2)
    with pytest.raises(InvalidAnchor):
        rect_a_matrix(sh, RectAnchor(1, 1))
    with pytest.raises(InvalidAnchor):
        rect_a_matrix(sh, RectAnchor(5, 5))


def test_rect_square_reduces_to_udl():
    sh = S("3,2,1")
    rep = verify_rect_udl(sh, RectAnchor(3, 3))
    assert rep.diagonal == verify_udl(sh).diagonal


def test_rect_trailing_zeros():
    sh = S("3,1")
    rep = verify_rect_udl(sh, RectAnchor(3, 2))
    assert rep.diagonal[2:] == [0]
    assert len([d for d in rep.diagonal if d == 0]) == 1


def test_rect_transpose_symmetry():
    sh = S("3,1")
    conj = sh.conjugate()
    for anc in border_strip(sh):
        A = rect_a_matrix(sh, anc)
        B = rect_a_matrix(conj, RectAnchor(anc.b, anc.a))
        swap = {f"x_{i}_{j}": cell_var((j, i)) for i, j in sh.cells()}
        assert A.T.map(lambda e: substitute(e, swap)) == B


def test_rect_all_anchors_random_shapes():
    rng = random.Random(5)
    checked = 0
    while checked < 20:
        sh = random_shape(rng, 10)
        for anc in border_strip(sh):
            rep = verify_rect_udl(sh, anc)
            assert rep.det_P == 1 and rep.det_Q == 1
            checked += 1


def test_catalan_examples():
    assert a_matrix(S("1"), lambda c: q) == PolyMatrix([[1 + q, 1], [1, 1]])
    assert catalan_specialization(1, "even").diagonal == [1, q]
    assert catalan_specialization(1, "odd").diagonal == [1, q ** 3]
    assert staircase(1, "odd") == S("2,1")


@pytest.mark.parametrize("variant", ["even", "odd"])
def test_catalan_bridge(variant):
    for n in range(5):
        rep = catalan_specialization(n, variant)
        H = hankel(MomentFunctional(family_spec("catalan_star")), n, variant)
        assert rep.matrix.flipped() == H


def test_substitute_all():
    sh = S("2,1")
    assert substitute_all(a_matrix(sh), q, sh) == a_matrix(sh, lambda c: q)
