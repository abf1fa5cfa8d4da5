from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from snfmom.errors import DimensionMismatch, NoRingFactorization, NotAPermutation
from snfmom.families import family_spec
from snfmom.moments import MomentFunctional, hankel
from snfmom.polymat import (PolyMatrix, check_chain, det_bareiss, det_cofactor, ldu_extract,
                            minor_gcd_oracle, normalize_sign, reorder_to_ssnf, snf_from_divisors,
                            unitriangular_inverse)
from snfmom.polyring import Poly, exact_div, substitute, var

from strategies import matrices, univariate

q = var("q")
b0, l1 = var("b0"), var("l1")


def M(rows):
    return PolyMatrix(rows)


def test_matmul_examples():
    assert M([[1, 1], [0, 1]]) @ M([[1, 0], [1, 1]]) == M([[2, 1], [1, 1]])
    A = M([[q, 2], [3, q * q]])
    assert A @ PolyMatrix.identity(2) == A
    Z = M([[1, 1], [0, 1]])
    assert Z @ PolyMatrix.diag([q - 1, 1]) @ Z.T == M([[q, 1], [1, 1]])
    with pytest.raises(DimensionMismatch):
        M([[1, 2]]) @ M([[1, 2]])


def test_det_examples():
    assert det_bareiss(M([[q, 1], [1, 1]])) == q - 1
    assert det_bareiss(PolyMatrix.identity(5)) == 1
    # b = 0, lambda = 1 gives the Catalan numbers, whose Hankel determinants are 1
    H = hankel(MomentFunctional(family_spec("catalan_star")), 2, "even")
    assert det_bareiss(H.map(lambda e: substitute(e, {"q": 1}))) == 1
    assert det_bareiss(M([[0, 1], [1, 0]])) == -1
    assert det_bareiss(M([[0, q], [0, 1]])) == 0


def test_ldu_examples():
    A = M([[1, b0], [b0, b0 ** 2 + l1]])
    f = ldu_extract(A)
    assert f.L == M([[1, 0], [b0, 1]])
    assert f.D == [1, l1]
    assert f.U == f.L.T
    with pytest.raises(NoRingFactorization) as err:
        ldu_extract(M([[q, 1], [1, 1]]))
    assert err.value.position is not None
    f = ldu_extract(PolyMatrix.diag([q, q + 1]))
    assert f.L == PolyMatrix.identity(2) and f.U == PolyMatrix.identity(2)
    assert f.D == [q, q + 1]


def test_ldu_zero_pivot_policy():
    f = ldu_extract(M([[1, 2, 0], [3, 6, 0]]))
    assert f.D == [1, 0]
    with pytest.raises(NoRingFactorization):
        ldu_extract(M([[0, 1], [1, 0]]))


def test_check_chain_examples():
    assert check_chain([1, q, q ** 3])
    assert not check_chain([q, 1])
    assert check_chain([1, q - 1, (q - 1) * (q - 2) * (q + 5), 0, 0])
    assert not check_chain([1, 0, q])


def test_reorder_examples():
    d11, d22 = q + 2, q * (q + 2)
    cert = reorder_to_ssnf([d11, d22, 1], [1, d22, d11])
    assert cert.perm == [2, 1, 0]
    assert cert.sign_fix is True  # a single transposition is odd
    same = reorder_to_ssnf([1, q], [1, q])
    assert same.perm == [0, 1] and not same.sign_fix
    signed = reorder_to_ssnf([1, -q], [1, q])
    assert signed.unit == -1 and signed.sign_fix
    with pytest.raises(NotAPermutation):
        reorder_to_ssnf([1, q], [1, q + 1])


def test_minor_gcd_examples():
    assert minor_gcd_oracle(M([[q, 1], [1, 1]])) == [1, q - 1]
    assert minor_gcd_oracle(PolyMatrix.identity(3)) == [1, 1, 1]
    H = hankel(MomentFunctional(family_spec("catalan_star")), 2)
    deltas = minor_gcd_oracle(H)
    assert deltas == [1, 1, q]
    assert snf_from_divisors(deltas) == [1, 1, q]


def test_json_round_trip():
    A = M([[q ** 2 - 1, 3], [0, -q]])
    data = json.loads(json.dumps(A.to_json()))
    assert PolyMatrix.from_json(data) == A


def test_unitriangular_inverse():
    L = M([[1, 0, 0], [q, 1, 0], [2, q * q, 1]])
    assert L @ unitriangular_inverse(L) == PolyMatrix.identity(3)
    assert unitriangular_inverse(L.T) @ L.T == PolyMatrix.identity(3)
    assert unitriangular_inverse(PolyMatrix.identity(2)) == PolyMatrix.identity(2)


def test_normalize_sign():
    assert normalize_sign(-q + 1) == q - 1
    assert normalize_sign(q) == q


@st.composite
def ldu_inputs(draw, n=3):
    L = PolyMatrix.build(n, n, lambda i, j: 1 if i == j else (draw(univariate(max_terms=2)) if i > j else 0))
    U = PolyMatrix.build(n, n, lambda i, j: 1 if i == j else (draw(univariate(max_terms=2)) if i < j else 0))
    D = [draw(univariate(max_terms=2)) or Poly.const(1) for _ in range(n)]
    return L, D, U


@given(ldu_inputs())
def test_ldu_round_trip(data):
    L, D, U = data
    A = L @ PolyMatrix.diag(D) @ U
    f = ldu_extract(A)
    assert f.exact
    assert f.L @ PolyMatrix.diag(f.D) @ f.U == A
    assert f.L.is_lower_unitriangular() and f.U.is_upper_unitriangular()
    assert f.D == D
    prod = Poly.const(1)
    for d in f.D:
        prod = prod * d
    assert det_bareiss(A) == prod


@given(ldu_inputs())
def test_ldu_symmetric(data):
    L, D, _ = data
    A = L @ PolyMatrix.diag(D) @ L.T
    f = ldu_extract(A)
    assert f.U == f.L.T


@given(matrices(4, 4, max_terms=2))
def test_det_bareiss_matches_cofactor(A):
    assert det_bareiss(A) == det_cofactor(A)


@given(ldu_inputs())
def test_minor_gcd_matches_ldu_on_chains(data):
    L, D, U = data
    # build a chain so the LDU diagonal is also the Smith form
    chain = [D[0]]
    for d in D[1:]:
        chain.append(chain[-1] * d)
    A = L @ PolyMatrix.diag(chain) @ U
    cand = snf_from_divisors(minor_gcd_oracle(A))
    assert [normalize_sign(c) for c in cand] == [normalize_sign(c) for c in ldu_extract(A).D]
    for c, d in zip(cand, chain):
        exact_div(c, d)
