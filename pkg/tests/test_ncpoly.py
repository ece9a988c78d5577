"""Algebra of free polynomials: ring axioms, involution, serialization."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncgeom.ncpoly import (NcPolynomial, ShapeMismatchError, graded_lex_key,
                           scalar_poly, word_count, word_involution,
                           words_up_to)


def random_poly(rng, g, d, rows, cols, n_terms=4):
    terms = {}
    words = list(words_up_to(g, d))
    for _ in range(n_terms):
        w = words[rng.integers(0, len(words))]
        terms[w] = rng.standard_normal((rows, cols))
    return NcPolynomial(g, rows, cols, terms)


def test_word_involution():
    assert word_involution((1, 2, 3)) == (3, 2, 1)
    assert word_involution(()) == ()


def test_words_up_to_graded_lex():
    ws = list(words_up_to(2, 2))
    assert ws == [(), (1,), (2,), (1, 1), (1, 2), (2, 1), (2, 2)]
    assert ws == sorted(ws, key=graded_lex_key)


def test_word_count():
    assert word_count(2, 2) == 7
    assert word_count(1, 5) == 6
    assert word_count(3, 0) == 1
    assert word_count(2, -1) == 0


def test_constructor_rejects_bad_words():
    with pytest.raises(ValueError):
        NcPolynomial(1, 1, 1, {(2,): np.array([[1.0]])})
    with pytest.raises(ShapeMismatchError):
        NcPolynomial(1, 1, 1, {(1,): np.ones((2, 2))})


def test_zero_terms_dropped_and_degree():
    p = NcPolynomial(2, 1, 1, {(1,): np.zeros((1, 1)),
                               (2, 2): np.array([[3.0]])})
    assert set(p.terms) == {(2, 2)}
    assert p.degree() == 2
    assert NcPolynomial.zero(2).degree() == -1


def test_transpose_is_involution_and_antihomomorphism():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = random_poly(rng, 2, 3, 2, 3)
        b = random_poly(rng, 2, 3, 3, 2)
        assert a.transpose().transpose().allclose(a, 1e-15)
        assert (a * b).transpose().allclose(b.transpose() * a.transpose(), 1e-12)


def test_mul_associative_add_distributive():
    rng = np.random.default_rng(1)
    for _ in range(30):
        a = random_poly(rng, 2, 2, 2, 2)
        b = random_poly(rng, 2, 2, 2, 2)
        c = random_poly(rng, 2, 2, 2, 2)
        assert ((a * b) * c).allclose(a * (b * c), 1e-12)
        assert (a * (b + c)).allclose(a * b + a * c, 1e-12)


def test_symmetry_detection():
    p = scalar_poly({(): 1.0, (1, 2): -0.5, (2, 1): -0.5}, 2)
    assert p.is_symmetric()
    q = scalar_poly({(1, 2): 1.0}, 2)
    assert not q.is_symmetric()


def test_direct_sum_shapes_and_coeffs():
    a = scalar_poly({(): 1.0, (1,): 2.0}, 1)
    b = scalar_poly({(1, 1): -1.0}, 1)
    s = a.direct_sum(b)
    assert (s.rows, s.cols) == (2, 2)
    assert np.array_equal(s.coeff(()), np.diag([1.0, 0.0]))
    assert np.array_equal(s.coeff((1, 1)), np.diag([0.0, -1.0]))


def test_scale_and_neg():
    p = scalar_poly({(1,): 2.0}, 1)
    assert p.scale(-0.5).allclose(-p.scale(0.5), 0.0)


def test_json_roundtrip():
    rng = np.random.default_rng(2)
    p = random_poly(rng, 3, 3, 2, 2)
    q = NcPolynomial.from_json(p.to_json())
    assert q.allclose(p, 1e-15)
    assert q.sorted_words() == p.sorted_words()


def test_from_dict_rejects_ragged_and_duplicates():
    with pytest.raises(ValueError):
        NcPolynomial.from_dict({"g": 1, "rows": 1, "cols": 2,
                                "terms": [{"word": [1], "coeff": [[1.0]]}]})


def test_mismatched_g_raises():
    a = scalar_poly({(1,): 1.0}, 1)
    b = scalar_poly({(1,): 1.0}, 2)
    with pytest.raises(ShapeMismatchError):
        a + b
    with pytest.raises(ShapeMismatchError):
        a * b


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.floats(-5, 5)), max_size=6),
       st.lists(st.tuples(st.integers(0, 6), st.floats(-5, 5)), max_size=6))
def test_scalar_commutator_symmetric_words(ta, tb):
    # scalar polynomials in one variable commute
    a = scalar_poly({(1,) * k: c for k, c in ta}, 1)
    b = scalar_poly({(1,) * k: c for k, c in tb}, 1)
    assert (a * b).allclose(b * a, 1e-9)
