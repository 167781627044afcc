from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from weylforge.algebra import WEYL, Signature, SignatureMismatch
from weylforge.coeffring import CPoly
from weylforge.dixmier import family_instantiate
from weylforge.matrixalg import (
    Inapplicable, NCMatrix, NotFoundWithinBounds, automorphism_conditions, build_condition_iii_matrix,
    family_matrices, left_inverse_ansatz, mat_mul, recover_generators,
)

from strategies import ncpolys, nonzero_rationals, rationals

t, x = WEYL.gens()
one = WEYL.one()
I2 = NCMatrix.identity(2)


def M(rows):
    return NCMatrix(rows, WEYL)


class TestMatMul:
    def test_inverse_pair(self):
        A = M([[1, x], [1, 1 + x]])
        B = M([[1 + x, -x], [-1, 1]])
        assert (A * B).is_identity() and (B * A).is_identity()

    def test_identity(self):
        A = M([[t, x**2], [3, t * x]])
        assert I2 * A == A and A * I2 == A

    def test_entry_order(self):
        assert M([[x]]) * M([[t]]) == M([[t * x + 1]])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            mat_mul(M([[1, 2]]), M([[1, 2]]))

    def test_signature_mismatch(self):
        sig = Signature.csd(2, [2])
        with pytest.raises(SignatureMismatch):
            mat_mul(I2, NCMatrix.identity(2, sig))


class TestConditionMatrix:
    def test_table2_instance(self):
        assert build_condition_iii_matrix(t + x**2, t + x + x**2) == M([[1, x], [1, 1 + x]])

    def test_shifted_is_inapplicable(self):
        assert isinstance(build_condition_iii_matrix(t + 5, x), Inapplicable)
        assert isinstance(build_condition_iii_matrix(t, x + 1), Inapplicable)

    def test_identity_pair(self):
        assert build_condition_iii_matrix(t, x).is_identity()

    def test_symbolic_denominators(self):
        l0 = CPoly.param("l0")
        p, q = t * (1 / l0), t * l0 + x * l0
        m = build_condition_iii_matrix(p, q)
        assert m == M([[one * (1 / l0), 0], [one * l0, one * l0]])


class TestLeftInverse:
    def test_table2_instance(self):
        N = left_inverse_ansatz(M([[1, x], [1, 1 + x]]), 1)
        assert N == M([[1 + x, -x], [-1, 1]])

    def test_identity(self):
        assert left_inverse_ansatz(I2, 1) == I2

    def test_singular(self):
        res = left_inverse_ansatz(M([[1, 0], [1, 0]]), 2)
        assert isinstance(res, NotFoundWithinBounds)

    def test_bounds_too_small(self):
        A = M([[1, x**2], [0, 1]])
        assert isinstance(left_inverse_ansatz(A, 1), NotFoundWithinBounds)
        assert left_inverse_ansatz(A, (0, 2)) == M([[1, -x**2], [0, 1]])

    def test_non_square(self):
        with pytest.raises(ValueError):
            left_inverse_ansatz(M([[1, 2]]), 1)


class TestRecover:
    def test_linear_example(self):
        p, q = 3 * t + 4 * x, 2 * t + 3 * x
        assert recover_generators(p, q, M([[3, -4], [-2, 3]])) == (t, x)

    def test_identity(self):
        assert recover_generators(t, x, I2) == (t, x)

    def test_table1_instance(self):
        p, q = family_instantiate("table1.case1", {"l0": 1, "l1": 1, "l2": 2}, index=1)
        _, N = family_matrices("table1.case1", {"l0": 1, "l1": 1, "l2": 2}, index=1)
        assert recover_generators(p, q, N) == (t, x)

    def test_wrong_inverse(self):
        with pytest.raises(ValueError):
            recover_generators(t, x, M([[1, 1], [0, 1]]))


class TestConditions:
    def test_flags_are_independent(self):
        r = automorphism_conditions(t + 1, x)
        assert r.dixmier and not r.t_divides and r.invertible_matrix is None
        assert not r.certifies_automorphism

    def test_certified(self):
        r = automorphism_conditions(t + x**2, t + x + x**2, bounds=1)
        assert r.certifies_automorphism
        assert r.inverse == M([[1 + x, -x], [-1, 1]])

    def test_not_dixmier(self):
        r = automorphism_conditions(t**2, t + x)
        assert not r.dixmier


@given(st.sampled_from(["type1", "type2", "type3", "type4"]), nonzero_rationals, nonzero_rationals,
       st.lists(rationals, max_size=4))
def test_family_matrix_inverses(family, alpha, lam, f):
    params = {"alpha": alpha, "lambda": lam}
    A, B = family_matrices(family, params, f)
    assert (A * B).is_identity() and (B * A).is_identity()
    p, q = family_instantiate(family, params, f)
    assert A == build_condition_iii_matrix(p, q)
    assert recover_generators(p, q, B) == (t, x)


@given(st.lists(rationals, min_size=1, max_size=3), st.integers(1, 3))
def test_left_inverse_is_two_sided(coeffs, k):
    g = WEYL.zero()
    for e, c in enumerate(coeffs):
        g = g + x**e * c
    A = M([[1, g], [0, 1]]) * M([[1, 0], [t**k, 1]])
    # the inverse [[1, -g], [-t^k, 1 + t^k g]] fits these bounds
    N = left_inverse_ansatz(A, (k, len(coeffs) - 1))
    assert not isinstance(N, NotFoundWithinBounds)
    assert (N * A).is_identity() and (A * N).is_identity()


entries = ncpolys(max_degree=2, max_terms=3)
matrices = st.lists(st.lists(entries, min_size=2, max_size=2), min_size=2, max_size=2).map(M)


@given(matrices, matrices, matrices)
def test_mat_mul_associative(a, b, c):
    assert (a * b) * c == a * (b * c)
