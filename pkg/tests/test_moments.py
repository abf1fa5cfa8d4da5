from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from snfmom.errors import (BudgetExceeded, DegreeMismatch, Mismatch, NonzeroB, NotMonic,
                           NotMonicWeights)
from snfmom.families import FAMILY_NAMES, family_spec
from snfmom.moments import (MomentFunctional, RecurrenceSpec, charlier_gram_bases, gram_matrix,
                            hankel, motzkin_moment_oracle, odd_even_split, orthogonal_polys,
                            orthogonality_check, poly_coeffs, symbolic_b0_spec, symbolic_spec,
                            vandermonde_matrix, verify_eo_theorem, verify_generalized_gram,
                            verify_hankel_snf, verify_vandermonde_gram_identity,
                            verify_vandermonde_snf)
from snfmom.polymat import PolyMatrix, det_bareiss, ldu_extract
from snfmom.polyring import Poly, var
from snfmom.qnumbers import q_binomial, q_factorial, q_int

q, a, x = var("q"), var("a"), var("x")
b0, b1, l1, l2 = var("b0"), var("b1"), var("l1"), var("l2")
SYM = symbolic_spec()
ZERO = Poly.const(0)


def const_spec(b, lam, name="const"):
    return RecurrenceSpec(lambda n: Poly.const(b), lambda n: Poly.const(lam), name)


def test_poly_coeffs_examples():
    P = poly_coeffs(SYM, 2)
    assert P.row(1)[:2] == [-b0, 1]
    assert P.row(2) == [b0 * b1 - l1, -(b0 + b1), 1]
    assert P.is_lower_unitriangular()
    H = poly_coeffs(family_spec("hermite_pm"), 2)
    assert H.row(2) == [-1, 0, 1]


def test_moment_examples():
    fn = MomentFunctional(SYM)
    assert fn.moment(0) == 1
    assert fn.moment(2) == b0 ** 2 + l1
    assert MomentFunctional(const_spec(0, 1)).moment(4) == 2


def test_oracle_examples():
    assert motzkin_moment_oracle(symbolic_b0_spec(), 3) == 0
    assert motzkin_moment_oracle(SYM, 2) == b0 ** 2 + l1
    assert motzkin_moment_oracle(family_spec("catalan_star"), 6) == 1 + 2 * q + q ** 2 + q ** 3
    with pytest.raises(BudgetExceeded):
        motzkin_moment_oracle(SYM, 17)


def test_hankel_examples():
    assert hankel(MomentFunctional(SYM), 1) == PolyMatrix([[1, b0], [b0, b0 ** 2 + l1]])
    cat = MomentFunctional(family_spec("catalan_star"))
    assert hankel(cat, 2, "even")[0, 1] == 1
    assert hankel(MomentFunctional(symbolic_b0_spec()), 2, "odd")[0, 0] == l1


def test_verify_hankel_snf_examples():
    assert verify_hankel_snf(SYM, 1).diagonal == [1, l1]
    assert verify_hankel_snf(family_spec("catalan_star"), 3).diagonal == [1, 1, q, q ** 3]
    assert verify_hankel_snf(family_spec("factorial"), 2).diagonal == [1, q, q ** 4 * (1 + q) ** 2]


def test_verify_hankel_snf_detects_wrong_functional():
    spec = family_spec("motzkin")
    bad = RecurrenceSpec(spec.b, lambda n: spec.lam_at(n) + (1 if n == 2 else 0), "bad")
    fn = MomentFunctional(bad)
    H = hankel(fn, 3)
    # the Hankel matrix of the perturbed functional does not match the original claim
    assert ldu_extract(H).D != verify_hankel_snf(spec, 3).diagonal


def test_orthogonality_examples():
    assert orthogonality_check(SYM, 5)
    herm = family_spec("hermite_pm")
    fn = MomentFunctional(herm)
    p = orthogonal_polys(herm, 2)
    G = gram_matrix(fn, p, p)
    assert G[0, 0] == 1 and G[2, 2] == q * q_int(2)
    assert gram_matrix(MomentFunctional(SYM), orthogonal_polys(SYM, 1), orthogonal_polys(SYM, 1))[0, 1] == 0


def test_odd_even_split_examples():
    even, odd = odd_even_split(family_spec("catalan_star"))
    for n in range(4):
        assert even.b_at(n) == q ** (2 * n) + (q ** (2 * n - 1) if n else 0)
        assert odd.b_at(n) == q ** (2 * n) * (1 + q)
    for n in range(1, 4):
        assert even.lam_at(n) == q ** (4 * n - 3)
        assert odd.lam_at(n) == q ** (4 * n - 1)
    he, _ = odd_even_split(family_spec("hermite_pm"))
    for n in range(1, 4):
        assert he.b_at(n) == q ** (2 * n - 1) * q_int(2 * n) + q ** (2 * n) * q_int(2 * n + 1)
        assert he.lam_at(n) == q ** (4 * n - 3) * q_int(2 * n - 1) * q_int(2 * n)
    with pytest.raises(NonzeroB):
        odd_even_split(family_spec("motzkin"))


def test_eo_theorem_examples():
    rep = verify_eo_theorem(family_spec("catalan_star"), 2)
    assert rep.even_diagonal == [1, q, q ** 6]
    assert verify_eo_theorem(family_spec("catalan_star"), 1).odd_diagonal == [1, q ** 3]
    sym = verify_eo_theorem(symbolic_b0_spec(), 2)
    l3, l4 = var("l3"), var("l4")
    assert sym.even_diagonal == [1, l1 * l2, l1 * l2 * l3 * l4]


def test_gram_examples():
    fn = MomentFunctional(SYM)
    powers = [x ** i for i in range(4)]
    assert gram_matrix(fn, powers, powers) == hankel(fn, 3)
    p = orthogonal_polys(SYM, 3)
    G = gram_matrix(fn, p, p)
    assert G == PolyMatrix.diag([SYM.lam_product(k) for k in range(4)])
    assert gram_matrix(fn, [Poly.const(1)], [Poly.const(1)]) == PolyMatrix([[1]])
    with pytest.raises(NotMonic):
        gram_matrix(fn, [Poly.const(1), 2 * x], [Poly.const(1), x])
    with pytest.raises(DegreeMismatch):
        gram_matrix(fn, [Poly.const(1), x * x], [Poly.const(1), x])


def test_generalized_gram_examples():
    charlier = family_spec("charlier_msw")
    Y = [Poly.const(1), x + 3, x ** 2 - 2 * x + 5, x ** 3 + x + 1]
    Z = [Poly.const(1), x - 1, x ** 2 + 7, x ** 3 - x ** 2]
    cert = verify_generalized_gram(charlier, Y, Z)
    assert cert.diagonal == [a ** k * q ** (k * (k - 1) // 2) * q_factorial(k) for k in range(4)]
    powers = [x ** i for i in range(4)]
    assert verify_generalized_gram(SYM, powers, powers).diagonal == verify_hankel_snf(SYM, 3).diagonal
    Yv, Zv = charlier_gram_bases(1)
    assert verify_generalized_gram(charlier, Yv, Zv).diagonal == [1, a]


def test_vandermonde_examples():
    assert vandermonde_matrix(None, 1, "case_a") == PolyMatrix([[1, 1], [1, 1 + a]])
    assert vandermonde_matrix(None, 1, "case_b") == PolyMatrix([[1, 1], [1, 1 + q]])
    for variant in ("case_a", "case_b"):
        assert vandermonde_matrix(None, 3, variant).row(0) == [1, 1, 1, 1]
    assert verify_vandermonde_snf(None, 1, "case_a").diagonal == [1, a]
    assert verify_vandermonde_snf(None, 1, "case_b").diagonal == [1, q]
    assert verify_vandermonde_snf(None, 2, "case_b").diagonal == [1, q, q ** 3 * (1 + q)]
    with pytest.raises(NotMonicWeights):
        vandermonde_matrix([[1], [3, 2]], 1)


def test_charlier_bases_examples():
    Y, Z = charlier_gram_bases(2)
    charlier = family_spec("charlier_msw")
    assert Y[0] == 1 and Z[0] == 1
    assert Z[1] == x - charlier.b_at(0) + 1
    assert q_binomial(3, 1) == 1 + q + q ** 2
    assert verify_vandermonde_gram_identity(None, 4)


def test_vandermonde_gram_identity_random_weights():
    rng = random.Random(7)
    for _ in range(3):
        g = [[rng.randint(-3, 3) for _ in range(i)] + [1] for i in range(4)]
        assert verify_vandermonde_gram_identity(g, 3)


@pytest.mark.parametrize("name", [f for f in FAMILY_NAMES if f != "octabasic"])
def test_oracle_equivalence_families(name):
    spec = family_spec(name)
    fn = MomentFunctional(spec)
    for n in range(9):
        assert fn.moment(n) == motzkin_moment_oracle(spec, n)


def test_oracle_equivalence_symbolic():
    fn = MomentFunctional(SYM)
    for n in range(9):
        assert fn.moment(n) == motzkin_moment_oracle(SYM, n)


@given(st.lists(st.integers(-3, 3), min_size=6, max_size=6),
       st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_oracle_equivalence_random_specs(bs, ls):
    spec = RecurrenceSpec(lambda n: Poly.const(bs[n]) + q * (n % 2),
                          lambda n: Poly.const(ls[n % 6]) + a, "random")
    fn = MomentFunctional(spec)
    for n in range(10):
        assert fn.moment(n) == motzkin_moment_oracle(spec, n)


def test_odd_moments_vanish():
    fn = MomentFunctional(symbolic_b0_spec())
    for n in range(7):
        assert fn.moment(2 * n + 1) == 0


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_hankel_and_ldu_agree(name):
    spec = family_spec(name)
    n = 3 if name == "octabasic" else 6
    cert = verify_hankel_snf(spec, n)
    assert ldu_extract(hankel(MomentFunctional(spec), n)).D == cert.diagonal


def test_eo_determinant_identity_symbolic():
    spec = symbolic_b0_spec()
    fn = MomentFunctional(spec)
    for n in range(6):
        full = det_bareiss(hankel(fn, n))
        left = det_bareiss(hankel(fn, n // 2, "even"))
        right = det_bareiss(hankel(fn, (n - 1) // 2, "odd")) if n else Poly.const(1)
        assert full == left * right


def test_mismatch_carries_witness(monkeypatch):
    from snfmom import moments
    monkeypatch.setattr(moments, "vandermonde_claim",
                        lambda n, variant="general": [Poly.const(1)] * (n + 1))
    with pytest.raises(Mismatch) as err:
        moments.verify_vandermonde_snf(None, 2, "case_a")
    assert err.value.witness is not None
