"""Boundary pairs (X, v) with p(X)v = 0 and their subspace compressions.

A boundary pair records a point on the edge of the invertibility set of p
together with a kernel vector of p(X).  Compression restricts X to the span
of the vectors w(X)v_alpha over words up to the full degree (dimension at
most nu) or half degree (at most nu-breve, valid when p(0) = I).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .ncpoly import NcPolynomial, words_up_to, word_count
from .evaluate import (CompiledPoly, MatrixTuple, SingularAtZeroError,
                       constant_term_signature, eval_poly, DEFAULT_EIG_TOL)

RESIDUAL_TOL = 1e-7
RANK_TOL = 1e-9


class RayNeverExitsError(RuntimeError):
    """No signature change found along the ray up to t_max."""


class NotOnBoundaryError(ValueError):
    pass


@dataclass(frozen=True)
class SizeConstants:
    """Dimension bounds for degree-d coefficient space with delta rows."""
    delta: int
    d: int
    g: int

    @property
    def nu(self) -> int:
        return self.delta * word_count(self.g, self.d)

    @property
    def nu_half(self) -> int:
        return self.delta * word_count(self.g, self.d // 2)

    @property
    def mu_bound(self) -> int:
        nu = self.nu
        return nu * (nu + 1) // 2


@dataclass
class BoundaryPair:
    X: MatrixTuple
    v: np.ndarray         # unit vector of length delta * n
    residual: float
    delta: int

    @property
    def n(self) -> int:
        return self.X.n

    def v_blocks(self) -> np.ndarray:
        """v reshaped to (delta, n): the components v_alpha."""
        return self.v.reshape(self.delta, self.X.n)

    def to_dict(self) -> dict:
        d = self.X.to_dict()
        d.update({"v": self.v.tolist(), "residual": self.residual,
                  "delta": self.delta})
        return d

    @staticmethod
    def from_dict(d: dict) -> "BoundaryPair":
        return BoundaryPair(MatrixTuple.from_dict(d), np.asarray(d["v"], float),
                            float(d["residual"]), int(d["delta"]))

    @staticmethod
    def from_json(s: str) -> "BoundaryPair":
        return BoundaryPair.from_dict(json.loads(s))


def _expected_signature(p: NcPolynomial, n: int, eig_tol: float):
    sig0 = constant_term_signature(p, eig_tol)
    if sig0.n_zero > 0:
        raise SingularAtZeroError("p(0) has a numerically zero eigenvalue")
    return (n * sig0.n_pos, n * sig0.n_neg, 0)


def _sig_ok(cp: CompiledPoly, X: MatrixTuple, t: float, expected,
            eig_tol: float) -> bool:
    eigs = np.linalg.eigvalsh(cp(X.scale(t)))
    cut = eig_tol * (1.0 + np.max(np.abs(eigs)))
    npos = int(np.sum(eigs > cut))
    nneg = int(np.sum(eigs < -cut))
    return (npos, nneg, len(eigs) - npos - nneg) == expected


def ray_exit_scale(p: NcPolynomial, direction: MatrixTuple,
                   t_max: float = 1e6, grid: int = 64,
                   refine_iters: int = 60,
                   eig_tol: float = DEFAULT_EIG_TOL) -> float:
    """First t > 0 where p(t * direction) changes signature; the window is
    doubled until a change is found or t exceeds t_max."""
    expected = _expected_signature(p, direction.n, eig_tol)
    cp = CompiledPoly(p)
    lo_window, hi_window = 0.0, 1.0
    while True:
        bad = None
        good = lo_window
        for k in range(1, grid + 1):
            t = lo_window + (hi_window - lo_window) * k / grid
            if _sig_ok(cp, direction, t, expected, eig_tol):
                good = t
            else:
                bad = t
                break
        if bad is not None:
            lo, hi = good, bad
            for _ in range(refine_iters):
                mid = (lo + hi) / 2.0
                if mid == lo or mid == hi:
                    break
                if _sig_ok(cp, direction, mid, expected, eig_tol):
                    lo = mid
                else:
                    hi = mid
            return (lo + hi) / 2.0
        lo_window = hi_window
        hi_window *= 2.0
        if lo_window >= t_max:
            raise RayNeverExitsError(
                f"no signature change along the ray up to t={t_max:g}")


def find_boundary_pairs(p: NcPolynomial, direction: MatrixTuple,
                        t_max: float = 1e6,
                        eig_tol: float = DEFAULT_EIG_TOL,
                        refine_eig_tol: float = 1e-11) -> list[BoundaryPair]:
    """Boundary pairs along the ray through ``direction``: one pair per
    near-kernel vector of p(X) at the exit point.

    The exit bisection runs with a band much tighter than ``eig_tol``:
    bisection lands on the edge of its band, so a loose band would leave the
    smallest eigenvalue right at the membership cutoff instead of under it.
    """
    t_star = ray_exit_scale(p, direction, t_max=t_max,
                            eig_tol=min(eig_tol, refine_eig_tol))
    X = direction.scale(t_star)
    M = eval_poly(p, X)
    Ms = (M + M.T) / 2.0
    eigs, vecs = np.linalg.eigh(Ms)
    cut = eig_tol * (1.0 + np.max(np.abs(eigs)))
    kernel = np.where(np.abs(eigs) <= cut)[0]
    if len(kernel) == 0:
        kernel = [int(np.argmin(np.abs(eigs)))]
    pairs = []
    for idx in kernel:
        v = vecs[:, idx]
        pairs.append(BoundaryPair(X, v / np.linalg.norm(v),
                                  float(np.linalg.norm(M @ v)), p.rows))
    return pairs


def find_boundary_pair(p: NcPolynomial, direction: MatrixTuple,
                       t_max: float = 1e6,
                       eig_tol: float = DEFAULT_EIG_TOL) -> BoundaryPair:
    return find_boundary_pairs(p, direction, t_max=t_max, eig_tol=eig_tol)[0]


def validate_pair(p: NcPolynomial, pair: BoundaryPair,
                  tol: float = RESIDUAL_TOL) -> bool:
    M = eval_poly(p, pair.X)
    scale = 1.0 + np.linalg.norm(M, 2)
    return float(np.linalg.norm(M @ pair.v)) <= tol * scale


def _span_basis(p: NcPolynomial, pair: BoundaryPair, max_word_len: int,
                rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (n x k) of span{w(X) v_alpha : |w| <= max_word_len},
    built by incremental orthogonalization in graded-lex word order so the
    empty word's vectors enter first."""
    X = pair.X
    vb = pair.v_blocks()
    word_evals: dict[tuple, np.ndarray] = {(): np.eye(X.n)}
    cols = []
    for w in words_up_to(p.g, max_word_len):
        if w not in word_evals:
            word_evals[w] = word_evals[w[:-1]] @ X.mats[w[-1] - 1]
        wX = word_evals[w]
        for alpha in range(pair.delta):
            cols.append(wX @ vb[alpha])
    cols = np.array(cols).T  # n x (delta * words)
    max_norm = np.max(np.linalg.norm(cols, axis=0)) if cols.size else 0.0
    basis: list[np.ndarray] = []
    for c in cols.T:
        r = c.copy()
        for b in basis:
            r -= (b @ r) * b
        # second orthogonalization pass for numerical stability
        for b in basis:
            r -= (b @ r) * b
        nr = np.linalg.norm(r)
        if nr > rank_tol * (1.0 + max_norm):
            basis.append(r / nr)
    return np.array(basis).T if basis else np.zeros((X.n, 0))


def compress_pair(p: NcPolynomial, pair: BoundaryPair, mode: str = "full",
                  rank_tol: float = RANK_TOL) -> BoundaryPair:
    """Restrict (X, v) to the compression subspace; the result is again a
    boundary pair for p (checked by the caller via validate_pair).

    mode "full" uses words up to deg(p) and dimension is bounded by nu;
    mode "half" uses words up to floor(deg(p)/2), requires p(0) = I, and is
    bounded by nu-breve.
    """
    if mode not in ("full", "half"):
        raise ValueError(f"unknown mode {mode!r}")
    if not validate_pair(p, pair):
        raise NotOnBoundaryError(
            f"pair residual {pair.residual:.3e} fails the boundary tolerance")
    d = max(p.degree(), 0)
    if mode == "half":
        c0 = p.coeff(())
        if p.rows != p.cols or np.max(np.abs(c0 - np.eye(p.rows))) > 1e-10:
            raise ValueError("half-degree compression requires p(0) = I")
        max_len = d // 2
    else:
        max_len = d
    B = _span_basis(p, pair, max_len, rank_tol)
    k = B.shape[1]
    bound = SizeConstants(p.rows, d, p.g)
    limit = bound.nu_half if mode == "half" else bound.nu
    assert k <= limit, f"compression dimension {k} exceeds bound {limit}"
    Xc = pair.X.conjugate(B)
    vc = (pair.v_blocks() @ B).reshape(-1)
    nv = np.linalg.norm(vc)
    if nv == 0.0:
        raise NotOnBoundaryError("kernel vector vanishes under compression")
    vc = vc / nv
    M = eval_poly(p, Xc)
    return BoundaryPair(Xc, vc, float(np.linalg.norm(M @ vc)), p.rows)


def direct_sum_pairs(p: NcPolynomial, pairs: list[BoundaryPair]) -> BoundaryPair:
    """Block-diagonal direct sum of boundary pairs for the same p."""
    if not pairs:
        raise ValueError("empty pair list")
    delta = pairs[0].delta
    if any(q.delta != delta or q.X.g != pairs[0].X.g for q in pairs):
        raise ValueError("pairs have mismatched delta or g")
    X = pairs[0].X
    for q in pairs[1:]:
        X = X.direct_sum(q.X)
    blocks = [q.v_blocks() for q in pairs]
    v = np.concatenate([np.concatenate([b[alpha] for b in blocks])
                        for alpha in range(delta)])
    v = v / np.linalg.norm(v)
    M = eval_poly(p, X)
    return BoundaryPair(X, v, float(np.linalg.norm(M @ v)), delta)
