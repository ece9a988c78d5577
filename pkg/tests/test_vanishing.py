"""Vanishing spaces: hand-checked dimensions, intersection law, domination."""

import numpy as np

from ncgeom.boundary import direct_sum_pairs, find_boundary_pair
from ncgeom.evaluate import MatrixTuple
from ncgeom.ncpoly import scalar_poly
from ncgeom.sampling import boundary_sample
from ncgeom.vanishing import (closure_contains, coefficients_to_poly,
                              constraint_matrix, dominating_pair,
                              dominating_representative, is_dominating,
                              poly_to_coefficients, subspace_contained,
                              vanishing_space)

INTERVAL = scalar_poly({(): 1.0, (1, 1): -1.0}, 1)
BALL = scalar_poly({(): 1.0, (1, 1): -1.0, (2, 2): -1.0}, 2)


def interval_pair(x):
    return find_boundary_pair(INTERVAL, MatrixTuple.scalars([float(np.sign(x))]))


def test_interval_hand_computed_dimensions():
    # words 1, x, x^2 at X = (1): single row [1, 1, 1] -> nullspace dim 2
    right = interval_pair(1.0)
    vs1 = vanishing_space([right], 2)
    assert vs1.nu == 3
    assert vs1.dim == 2
    # adding X = (-1): rows [1,1,1], [1,-1,1] -> dim 1, spanned by 1 - x^2
    left = interval_pair(-1.0)
    vs2 = vanishing_space([right, left], 2)
    assert vs2.dim == 1
    q = vs2.basis_polys()[0]
    # the basis element is proportional to 1 - x^2
    c = poly_to_coefficients(q, 2)
    ref = np.array([1.0, 0.0, -1.0]) / np.sqrt(2.0)
    assert min(np.max(np.abs(c - ref)), np.max(np.abs(c + ref))) < 1e-10


def test_constraint_matrix_shape_and_action():
    pair = interval_pair(1.0)
    A = constraint_matrix(pair, 2, 1)
    assert A.shape == (1, 3)
    q = scalar_poly({(): 1.0, (1, 1): -1.0}, 1)
    c = poly_to_coefficients(q, 2)
    assert np.max(np.abs(A @ c)) < 1e-10


def test_coefficients_roundtrip():
    q = scalar_poly({(): 0.5, (1,): -1.0}, 1)
    c = poly_to_coefficients(q, 2)
    back = coefficients_to_poly(c, 1, 2, 1)
    assert back.allclose(q, 1e-15)


def test_direct_sum_intersects_vanishing_spaces():
    rng = np.random.default_rng(0)
    for trial in range(20):
        pairs = [boundary_sample(BALL, rng, int(rng.integers(1, 3)))
                 for _ in range(3)]
        vsum = vanishing_space([direct_sum_pairs(BALL, pairs)], 2)
        vint = vanishing_space(pairs, 2)
        assert vsum.dim == vint.dim
        assert subspace_contained(vsum.basis, vint.basis)
        assert subspace_contained(vint.basis, vsum.basis)


def test_monotonicity():
    rng = np.random.default_rng(1)
    pairs = [boundary_sample(BALL, rng, 2) for _ in range(4)]
    small = vanishing_space(pairs[:2], 2)
    big = vanishing_space(pairs, 2)
    assert subspace_contained(big.basis, small.basis)


def test_is_dominating_direct_sum():
    rng = np.random.default_rng(2)
    pairs = [boundary_sample(BALL, rng, 2) for _ in range(3)]
    cand = direct_sum_pairs(BALL, pairs)
    assert is_dominating(cand, pairs, 2)
    assert not is_dominating(pairs[0], pairs, 2)


def test_closure_contains():
    rng = np.random.default_rng(3)
    pairs = [boundary_sample(BALL, rng, 2) for _ in range(6)]
    # any member of the list is in the closure of the list
    assert closure_contains(pairs[0], pairs, 2)


def test_dominating_representative_matches_full_space():
    rng = np.random.default_rng(4)
    pairs = [boundary_sample(BALL, rng, int(rng.integers(1, 3)))
             for _ in range(8)]
    chosen, space = dominating_representative(pairs, 2)
    assert space.dim == vanishing_space(pairs, 2).dim
    assert chosen[0] == 0
    rep = dominating_pair(BALL, pairs, 2)
    assert is_dominating(rep, pairs, 2)
