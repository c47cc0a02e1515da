from __future__ import annotations

import itertools

import pytest
import sympy as sp

from gamma2trace.matrices import (
    CONSTANTS,
    GenWord,
    IntMatrix2,
    PolyMatrix2,
    compute_F,
    compute_F_sigma,
    enumerate_words,
    is_decreasing,
    m_table,
    p_k,
    sym_power_A,
    sym_power_B,
    trace_comb,
    word_to_matrix,
)
from gamma2trace.polynomial import MultilinearPoly, SignSequence

from conftest import from_sympy, sympy_F

P = MultilinearPoly.from_text
E = IntMatrix2.identity()


def test_constants_values():
    C = CONSTANTS
    assert C["A4"] == IntMatrix2.from_rows([[3, 2], [-2, -1]])
    assert C["A1"] == IntMatrix2.from_rows([[1, 0], [0, 0]])
    assert C["A5"] == IntMatrix2.from_rows([[5, 2], [2, 1]])
    assert C["A6"] == IntMatrix2.from_rows([[5, -2], [-2, 1]])
    assert C["E"] == IntMatrix2(1, 0, 0, 1)
    assert C["A4t"] == IntMatrix2.from_rows([[3, -2], [2, -1]])


def test_layout_b_is_lower_left():
    M = IntMatrix2.from_rows([[1, 2], [3, 4]])
    assert (M.a, M.c, M.b, M.d) == (1, 2, 3, 4)
    assert M.rows() == [[1, 2], [3, 4]]


def test_int_matrix_product_and_inverse():
    A, B = CONSTANTS["A"], CONSTANTS["B"]
    assert A @ B == IntMatrix2.from_rows([[-3, 2], [-2, 1]])
    assert A @ CONSTANTS["A_inv"] == E
    assert (A @ B).det() == 1


def test_int_matrix_json_round_trip():
    M = IntMatrix2(10**30, -2, 3, -4)
    assert IntMatrix2.from_json_obj(M.to_json_obj()) == M
    assert M.to_json_obj()["a"] == str(10**30)


def test_parse_literal():
    assert IntMatrix2.parse("[[3,2],[-2,-1]]") == CONSTANTS["A4"]
    with pytest.raises(ValueError):
        IntMatrix2.parse("[[3,2],[-2]]")


# symbolic powers


def test_raw_A_power():
    M = sym_power_A(1, 1)
    assert (M.f, M.h, M.t, M.g) == (P("1", k=1), P("2*x1"), MultilinearPoly.zero(1), P("1", k=1))


def test_substituted_A_power_plus():
    M = sym_power_A(1, 1, substituted=True, sign=1)
    assert M.h == P("2 + 2*x1")


def test_substituted_B_power_minus():
    M = sym_power_B(2, 2, substituted=True, sign=-1)
    assert M.t == P("2 + 2*y2", k=2)
    assert M.f == M.g == MultilinearPoly.constant(2, 1)


def test_power_index_checked():
    with pytest.raises(ValueError):
        sym_power_A(2, 3)


# F_k


def test_F1_base_values():
    F = compute_F(1)
    assert F.f == P("1 - 4*x1*y1")
    assert F.h == P("2*x1")
    assert F.t == P("-2*y1")
    assert F.g == P("1", k=1)


def test_F0_identity():
    assert compute_F(0) == PolyMatrix2.identity(0)
    assert p_k(0) == MultilinearPoly.constant(0, 2)


def test_F2_trace():
    expected = P("2 - 4*x1*y1 - 4*x2*y2 - 4*x1*y2 - 4*x2*y1 + 16*x1*y1*x2*y2")
    assert p_k(2) == expected


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_F_matches_sympy_product(k):
    S = sympy_F(k)
    F = compute_F(k)
    assert F.f == from_sympy(S[0, 0], k)
    assert F.h == from_sympy(S[0, 1], k)
    assert F.t == from_sympy(S[1, 0], k)
    assert F.g == from_sympy(S[1, 1], k)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_det_is_one_symbolically(k):
    S = sympy_F(k)
    assert sp.expand(S.det()) == 1


def test_F_sigma_k1_plus_plus():
    F = compute_F_sigma(1, SignSequence.from_string("++"))
    assert F.f == P("-3 - 4*x1 - 4*y1 - 4*x1*y1")
    assert F.h == P("2 + 2*x1")
    assert F.t == P("-2 - 2*y1")
    assert F.g == P("1", k=1)


def test_F_sigma_k0():
    assert compute_F_sigma(0, SignSequence(0)) == PolyMatrix2.identity(0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_F_sigma_equals_substituted_F(k):
    F = compute_F(k)
    for sigma in SignSequence.all(k):
        assert compute_F_sigma(k, sigma) == F.substitute_signs(sigma)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_degrees_and_leading_coefficient(k):
    F = compute_F(k)
    assert F.f.degree() == 2 * k
    assert F.h.degree() == F.t.degree() == 2 * k - 1
    assert F.g.degree() == 2 * k - 2
    assert F.f.coefficient((1 << 2 * k) - 1) == (-4) ** k


@pytest.mark.parametrize("k", [2, 3, 4])
def test_cyclic_invariance(k):
    p = p_k(k)
    for shift in range(k):
        assert p.rotate_pairs(shift) == p


# trace combinations


def test_trace_comb_identity():
    assert trace_comb(compute_F(1), E) == P("2 - 4*x1*y1")


def test_trace_comb_A4():
    assert trace_comb(compute_F(1), CONSTANTS["A4"]) == P("2 - 4*x1 - 4*y1 - 12*x1*y1")


def test_trace_comb_k0_is_matrix_trace():
    M = IntMatrix2(7, -3, 11, 5)
    assert trace_comb(compute_F(0), M) == MultilinearPoly.constant(0, 12)


def test_trace_comb_matches_sympy_trace():
    M = IntMatrix2(2, -1, 3, 7)
    S = sympy_F(2) * sp.Matrix(M.rows())
    assert trace_comb(compute_F(2), M) == from_sympy(S.trace(), 2)


# M^{ij} table


def test_m_table_entries():
    C = CONSTANTS
    assert m_table(E, 0, 3) == C["A4t"]
    assert m_table(E, 1, 3) == C["A5"]
    assert m_table(C["A4"], 3, 3) == IntMatrix2.from_rows([[5, 4], [-4, -3]])
    assert m_table(E, 2, 0) == 4 * C["A1"]
    assert m_table(E, 2, 2) == 2 * C["A3t"]


def test_m_table_bounds():
    with pytest.raises(ValueError):
        m_table(E, 4, 0)


# words


def test_word_to_matrix():
    assert word_to_matrix(GenWord()) == E
    assert word_to_matrix(GenWord.parse("4")) == CONSTANTS["A4"]
    assert word_to_matrix(GenWord.parse("45")) == IntMatrix2.from_rows([[19, 8], [-12, -5]])


def test_word_text_form():
    w = GenWord.parse("45T")
    assert str(w) == "45T"
    assert word_to_matrix(w) == CONSTANTS["A4"] @ CONSTANTS["A5"] @ CONSTANTS["A4t"]
    with pytest.raises(ValueError):
        GenWord.parse("47")


def test_word_homomorphism():
    words = list(enumerate_words(2))
    for u, v in itertools.product(words, repeat=2):
        assert word_to_matrix(u + v) == word_to_matrix(u) @ word_to_matrix(v)


def test_enumerate_words_order_and_count():
    words = [str(w) for w in enumerate_words(2)]
    assert len(words) == 1 + 4 + 16
    assert words[:6] == ["", "4", "T", "5", "6", "44"]


# decreasing


@pytest.mark.parametrize(
    "M, expected",
    [
        (CONSTANTS["A4"], True),
        (E, False),
        (IntMatrix2.from_rows([[19, 8], [-12, -5]]), True),
        (IntMatrix2.from_rows([[5, 5], [2, 1]]), False),
        (IntMatrix2.from_rows([[-7, 3], [-4, 2]]), True),
    ],
)
def test_is_decreasing(M, expected):
    assert is_decreasing(M) is expected
