"""Degree-bounded vanishing spaces of boundary-pair samples.

For a sample set S of boundary pairs, the vanishing space collects the row
polynomials q (shape 1 x delta, words up to degree d) with q(X)v = 0 for
every pair, as a nullspace in graded-lex word-coefficient coordinates of
dimension nu = delta * sum_{j<=d} g^j.

Only finite sampled S is ever certified: domination and closure relative to
the full graded boundary across all levels are not finitely checkable, and
the returned verdicts are always relative to the listed pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ncpoly import NcPolynomial, words_up_to, word_count
from .boundary import BoundaryPair

NULL_TOL = 1e-9
CONTAIN_TOL = 1e-8
ANNIHILATE_TOL = 1e-7


@dataclass
class VanishingSpace:
    d: int
    delta: int
    g: int
    basis: np.ndarray  # (dim, nu), orthonormal rows
    dim: int = field(init=False)

    def __post_init__(self):
        self.dim = self.basis.shape[0]

    @property
    def nu(self) -> int:
        return self.delta * word_count(self.g, self.d)

    def basis_polys(self) -> list[NcPolynomial]:
        """Basis vectors decoded into 1 x delta row polynomials."""
        return [coefficients_to_poly(b, self.g, self.d, self.delta)
                for b in self.basis]

    def to_dict(self) -> dict:
        return {"d": self.d, "dim": self.dim, "basis": self.basis.tolist()}


def constraint_matrix(pair: BoundaryPair, d: int, g: int) -> np.ndarray:
    """The n x nu evaluation map q -> q(X)v in graded-lex coordinates.

    Column (w, alpha) holds w(X) v_alpha; words outer, alpha inner, so a
    coefficient vector c gives q(X)v = constraint_matrix @ c.
    """
    X = pair.X
    vb = pair.v_blocks()
    word_evals: dict[tuple, np.ndarray] = {(): np.eye(X.n)}
    cols = []
    for w in words_up_to(g, d):
        if w not in word_evals:
            word_evals[w] = word_evals[w[:-1]] @ X.mats[w[-1] - 1]
        wX = word_evals[w]
        for alpha in range(pair.delta):
            cols.append(wX @ vb[alpha])
    return np.array(cols).T


def poly_to_coefficients(q: NcPolynomial, d: int) -> np.ndarray:
    """Flatten a 1 x delta row polynomial into graded-lex coordinates."""
    if q.rows != 1:
        raise ValueError("expected a row polynomial (1 x delta)")
    if q.degree() > d:
        raise ValueError(f"degree {q.degree()} exceeds bound {d}")
    delta = q.cols
    vec = np.zeros(delta * word_count(q.g, d))
    for i, w in enumerate(words_up_to(q.g, d)):
        c = q.terms.get(w)
        if c is not None:
            vec[i * delta:(i + 1) * delta] = c[0]
    return vec


def coefficients_to_poly(vec: np.ndarray, g: int, d: int,
                         delta: int) -> NcPolynomial:
    terms = {}
    for i, w in enumerate(words_up_to(g, d)):
        c = vec[i * delta:(i + 1) * delta]
        if np.any(c != 0.0):
            terms[w] = c.reshape(1, delta)
    return NcPolynomial(g, 1, delta, terms)


def _nullspace(A: np.ndarray, tol: float = NULL_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of the nullspace of A."""
    if A.shape[0] == 0:
        return np.eye(A.shape[1])
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(smax, 1.0)))
    return vh[rank:]


def vanishing_space(S: list[BoundaryPair], d: int) -> VanishingSpace:
    """Common nullspace of the evaluation maps over all pairs in S."""
    if not S:
        raise ValueError("sample set is empty")
    delta = S[0].delta
    g = S[0].X.g
    if any(q.delta != delta or q.X.g != g for q in S):
        raise ValueError("pairs have mismatched delta or g")
    A = np.vstack([constraint_matrix(q, d, g) for q in S])
    return VanishingSpace(d, delta, g, _nullspace(A))


def subspace_contained(inner: np.ndarray, outer: np.ndarray,
                       tol: float = CONTAIN_TOL) -> bool:
    """Row span of ``inner`` inside row span of ``outer`` (orthonormal rows)."""
    if inner.shape[0] == 0:
        return True
    if outer.shape[0] == 0:
        return False
    proj = inner @ outer.T @ outer
    return bool(np.max(np.linalg.norm(inner - proj, axis=1)) <= tol)


def is_dominating(candidate: BoundaryPair, S: list[BoundaryPair],
                  d: int) -> bool:
    """True iff every q vanishing at the candidate vanishes on all of S."""
    vc = vanishing_space([candidate], d)
    vs = vanishing_space(S, d)
    return subspace_contained(vc.basis, vs.basis)


def closure_contains(candidate: BoundaryPair, W: list[BoundaryPair], d: int,
                     tol: float = ANNIHILATE_TOL) -> bool:
    """True iff every basis element of the vanishing space of W annihilates
    the candidate, with a tolerance scaled by (1 + |X|)^d."""
    vw = vanishing_space(W, d)
    if vw.dim == 0:
        return True
    A = constraint_matrix(candidate, d, candidate.X.g)
    bound = tol * (1.0 + candidate.X.norm()) ** max(d, 0)
    return bool(np.max(np.linalg.norm(A @ vw.basis.T, axis=0)) <= bound)


def dominating_representative(S: list[BoundaryPair],
                              d: int) -> tuple[list[int], VanishingSpace]:
    """Greedy subset of S whose vanishing space already equals that of all
    of S.  Returns the chosen indices and the common space.

    Each accepted pair strictly shrinks the running vanishing space, so at
    most nu pairs are accepted.
    """
    if not S:
        raise ValueError("sample set is empty")
    delta, g = S[0].delta, S[0].X.g
    nu = delta * word_count(g, d)
    chosen = [0]
    stack = constraint_matrix(S[0], d, g)
    dim = _nullspace(stack).shape[0]
    shrinks = 0
    for i, pair in enumerate(S[1:], start=1):
        cand = np.vstack([stack, constraint_matrix(pair, d, g)])
        new_dim = _nullspace(cand).shape[0]
        if new_dim < dim:
            chosen.append(i)
            stack, dim = cand, new_dim
            shrinks += 1
            assert shrinks <= nu, "more strict shrinks than the dimension allows"
    target = vanishing_space(S, d)
    rep_space = VanishingSpace(d, delta, g, _nullspace(stack))
    assert rep_space.dim == target.dim, "greedy representative missed constraints"
    assert subspace_contained(rep_space.basis, target.basis)
    assert subspace_contained(target.basis, rep_space.basis)
    return chosen, rep_space


def dominating_pair(p: NcPolynomial, S: list[BoundaryPair],
                    d: int) -> BoundaryPair:
    """The direct-sum boundary pair of the greedy dominating subset."""
    from .boundary import direct_sum_pairs

    chosen, _ = dominating_representative(S, d)
    return direct_sum_pairs(p, [S[i] for i in chosen])
