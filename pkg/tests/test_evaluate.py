"""Evaluation kernel identities, kernel parity, and ray membership."""

import numpy as np
import pytest

from ncgeom.evaluate import (KERNEL, CompiledPoly, MatrixTuple,
                             MembershipVerdict, SingularAtZeroError,
                             Signature, VariableCountMismatchError,
                             constant_term_signature, eval_poly,
                             ray_membership, signature)
from ncgeom.ncpoly import NcPolynomial, scalar_poly
from ncgeom.sampling import random_orthogonal, random_symmetric_tuple

from test_ncpoly import random_poly


def test_kernel_is_compiled():
    assert KERNEL == "compiled"


def test_matrix_tuple_validation():
    with pytest.raises(ValueError):
        MatrixTuple(np.zeros((1, 2, 3)))
    with pytest.raises(ValueError):
        MatrixTuple(np.array([[[0.0, 1.0], [0.0, 0.0]]]))


def test_matrix_tuple_ops():
    X = MatrixTuple.scalars([1.0, -2.0])
    assert (X.g, X.n) == (2, 1)
    assert X.scale(2.0).mats[1, 0, 0] == -4.0
    Y = X.direct_sum(X)
    assert Y.n == 2
    B = np.array([[1.0], [0.0]])
    assert Y.conjugate(B).n == 1
    assert X.norm() == 2.0
    Z = MatrixTuple.from_json(X.to_dict().__str__().replace("'", '"'))
    assert np.array_equal(Z.mats, X.mats)


def test_eval_empty_word_is_identity_kron():
    p = scalar_poly({(): 3.0}, 1)
    X = MatrixTuple(np.zeros((1, 4, 4)))
    assert np.array_equal(eval_poly(p, X), 3.0 * np.eye(4))


def test_eval_matches_naive():
    rng = np.random.default_rng(0)
    for _ in range(25):
        p = random_poly(rng, 2, 3, 2, 2)
        X = random_symmetric_tuple(rng, 2, 3)
        out = eval_poly(p, X)
        ref = np.zeros((2 * 3, 2 * 3))
        for w, c in p.terms.items():
            wX = np.eye(3)
            for j in w:
                wX = wX @ X.mats[j - 1]
            ref += np.kron(c, wX)
        assert np.max(np.abs(out - ref)) < 1e-10 * (1.0 + np.max(np.abs(ref)))


def test_compiled_and_pure_kernels_agree():
    rng = np.random.default_rng(1)
    for _ in range(25):
        p = random_poly(rng, 3, 4, 2, 3)
        cp = CompiledPoly(p)
        X = random_symmetric_tuple(rng, 3, 4)
        assert np.max(np.abs(cp(X) - cp.eval_pure(X))) < 1e-12


def test_eval_transpose_identity():
    rng = np.random.default_rng(2)
    for _ in range(25):
        p = random_poly(rng, 2, 3, 2, 3)
        X = random_symmetric_tuple(rng, 2, 3)
        lhs = eval_poly(p.transpose(), X)
        rhs = eval_poly(p, X).T
        assert np.max(np.abs(lhs - rhs)) < 1e-9 * (1.0 + np.max(np.abs(rhs)))


def test_eval_multiplicative():
    rng = np.random.default_rng(3)
    for _ in range(25):
        a = random_poly(rng, 2, 2, 2, 3)
        b = random_poly(rng, 2, 2, 3, 2)
        X = random_symmetric_tuple(rng, 2, 3)
        lhs = eval_poly(a * b, X)
        rhs = eval_poly(a, X) @ eval_poly(b, X)
        assert np.max(np.abs(lhs - rhs)) < 1e-9 * (1.0 + np.max(np.abs(rhs)))


def test_eval_direct_sum_shuffle():
    rng = np.random.default_rng(4)
    p = random_poly(rng, 2, 2, 2, 2)
    X = random_symmetric_tuple(rng, 2, 2)
    Y = random_symmetric_tuple(rng, 2, 3)
    M = eval_poly(p, X.direct_sum(Y))
    # direct-sum evaluation is a permutation-conjugate of the block diagonal
    ref = np.zeros_like(M)
    MX, MY = eval_poly(p, X), eval_poly(p, Y)
    n, m = X.n, Y.n
    for a in range(p.rows):
        for b in range(p.cols):
            ref[a * (n + m):a * (n + m) + n,
                b * (n + m):b * (n + m) + n] = MX[a * n:(a + 1) * n,
                                                  b * n:(b + 1) * n]
            ref[a * (n + m) + n:(a + 1) * (n + m),
                b * (n + m) + n:(b + 1) * (n + m)] = MY[a * m:(a + 1) * m,
                                                        b * m:(b + 1) * m]
    assert np.max(np.abs(M - ref)) < 1e-10 * (1.0 + np.max(np.abs(ref)))


def test_eval_orthogonal_equivariance():
    rng = np.random.default_rng(5)
    for _ in range(10):
        p = random_poly(rng, 2, 3, 2, 2)
        X = random_symmetric_tuple(rng, 2, 3)
        U = random_orthogonal(rng, 3)
        lhs = eval_poly(p, X.conjugate(U))
        rhs = np.kron(np.eye(p.rows), U.T) @ eval_poly(p, X) @ np.kron(
            np.eye(p.cols), U)
        assert np.max(np.abs(lhs - rhs)) < 1e-9 * (1.0 + np.max(np.abs(rhs)))


def test_signature_counts():
    s = signature(np.diag([2.0, -1.0, 0.0]))
    assert s.counts() == (1, 1, 1)
    with pytest.raises(ValueError):
        signature(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_ray_membership_interval():
    p = scalar_poly({(): 1.0, (1, 1): -1.0}, 1)
    inside = ray_membership(p, MatrixTuple.scalars([0.5]))
    assert inside.status == "Inside"
    outside = ray_membership(p, MatrixTuple.scalars([2.0]))
    assert outside.status == "Outside"
    assert abs(outside.critical_scale - 0.5) < 1e-6
    boundary = ray_membership(p, MatrixTuple.scalars([1.0]))
    assert boundary.status == "Boundary"


def test_ray_membership_errors():
    p = scalar_poly({(1,): 1.0}, 1)  # p(0) = 0
    with pytest.raises(SingularAtZeroError):
        ray_membership(p, MatrixTuple.scalars([1.0]))
    q = scalar_poly({(): 1.0}, 1)
    with pytest.raises(VariableCountMismatchError):
        ray_membership(q, MatrixTuple.scalars([1.0, 2.0]))


def test_constant_term_signature():
    p = NcPolynomial(1, 2, 2, {(): np.diag([1.0, -1.0])})
    assert constant_term_signature(p).counts() == (1, 1, 0)
