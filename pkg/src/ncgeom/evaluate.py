"""Evaluation of free polynomials on tuples of symmetric matrices.

Provides the matrix-tuple type, eigenvalue signatures, and ray-based
membership in the invertibility set of a symmetric polynomial: the component
of 0 where p(X) keeps the signature it has at the origin.

The per-word evaluation kernel is compiled (Cython) when available and falls
back to a pure numpy implementation; both expose ``eval_compiled`` with the
same flattened calling convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ncpoly import NcPolynomial, ShapeMismatchError

try:  # pragma: no cover - exercised indirectly
    from . import _evalcore as _kernel
    KERNEL = "compiled"
except ImportError:  # pragma: no cover
    from . import _evalpy as _kernel
    KERNEL = "python"

from . import _evalpy

SYM_TOL = 1e-12
DEFAULT_EIG_TOL = 1e-8
DEFAULT_RAY_TOL = 1e-6


class VariableCountMismatchError(ValueError):
    pass


class SingularAtZeroError(ValueError):
    """p(0) has an eigenvalue at 0; ray membership is undefined."""


class MatrixTuple:
    """A g-tuple of real symmetric n x n matrices (a point at level n)."""

    __slots__ = ("mats", "g", "n")

    def __init__(self, mats):
        mats = np.ascontiguousarray(np.asarray(mats, dtype=float))
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ValueError("expected shape (g, n, n)")
        for j, M in enumerate(mats):
            dev = np.max(np.abs(M - M.T)) if M.size else 0.0
            scale = 1.0 + (np.max(np.abs(M)) if M.size else 0.0)
            if dev > SYM_TOL * scale:
                raise ValueError(f"matrix {j} is not symmetric (deviation {dev:.2e})")
        self.mats = (mats + mats.transpose(0, 2, 1)) / 2.0
        self.g = mats.shape[0]
        self.n = mats.shape[1]

    @staticmethod
    def zeros(g: int, n: int) -> "MatrixTuple":
        return MatrixTuple(np.zeros((g, n, n)))

    @staticmethod
    def scalars(values) -> "MatrixTuple":
        """Level-1 tuple from a list of reals."""
        return MatrixTuple(np.array(values, dtype=float).reshape(-1, 1, 1))

    def scale(self, t: float) -> "MatrixTuple":
        return MatrixTuple(t * self.mats)

    def direct_sum(self, other: "MatrixTuple") -> "MatrixTuple":
        if self.g != other.g:
            raise VariableCountMismatchError("tuples have different g")
        n, m = self.n, other.n
        out = np.zeros((self.g, n + m, n + m))
        out[:, :n, :n] = self.mats
        out[:, n:, n:] = other.mats
        return MatrixTuple(out)

    def conjugate(self, B: np.ndarray) -> "MatrixTuple":
        """The tuple (B^T X_j B) for an n x k matrix B."""
        return MatrixTuple(np.einsum("ai,gab,bj->gij", B, self.mats, B))

    def norm(self) -> float:
        """Max spectral norm over the entries of the tuple."""
        if self.n == 0 or self.g == 0:
            return 0.0
        return max(np.max(np.abs(np.linalg.eigvalsh(M))) for M in self.mats)

    def to_dict(self) -> dict:
        return {"n": self.n, "g": self.g, "matrices": self.mats.tolist()}

    @staticmethod
    def from_dict(d: dict) -> "MatrixTuple":
        mats = np.asarray(d["matrices"], dtype=float)
        if mats.shape != (int(d["g"]), int(d["n"]), int(d["n"])):
            raise ValueError("matrices do not match declared g, n")
        return MatrixTuple(mats)

    @staticmethod
    def from_json(s: str) -> "MatrixTuple":
        return MatrixTuple.from_dict(json.loads(s))

    def __repr__(self) -> str:
        return f"MatrixTuple(g={self.g}, n={self.n})"


@dataclass(frozen=True)
class Signature:
    n_pos: int
    n_neg: int
    n_zero: int
    tol: float

    def counts(self) -> tuple[int, int, int]:
        return (self.n_pos, self.n_neg, self.n_zero)


@dataclass(frozen=True)
class MembershipVerdict:
    status: str  # "Inside" | "Boundary" | "Outside"
    critical_scale: Optional[float]
    min_gap: float

    def to_dict(self) -> dict:
        return {"status": self.status, "t_star": self.critical_scale,
                "min_gap": self.min_gap}


class CompiledPoly:
    """Polynomial flattened into kernel-ready arrays; reusable across calls."""

    __slots__ = ("g", "rows", "cols", "letters", "offsets", "coeffs")

    def __init__(self, p: NcPolynomial):
        words = p.sorted_words()
        letters: list[int] = []
        offsets = [0]
        for w in words:
            letters.extend(j - 1 for j in w)
            offsets.append(len(letters))
        self.g = p.g
        self.rows, self.cols = p.rows, p.cols
        self.letters = np.asarray(letters, dtype=np.intc)
        self.offsets = np.asarray(offsets, dtype=np.intc)
        if words:
            self.coeffs = np.ascontiguousarray(
                np.stack([p.terms[w] for w in words]))
        else:
            self.coeffs = np.zeros((0, p.rows, p.cols))

    def __call__(self, X: MatrixTuple) -> np.ndarray:
        if self.g != X.g:
            raise VariableCountMismatchError(
                f"polynomial has g={self.g}, tuple has g={X.g}")
        if self.coeffs.shape[0] == 0:
            return np.zeros((self.rows * X.n, self.cols * X.n))
        return _kernel.eval_compiled(self.letters, self.offsets, self.coeffs,
                                     X.mats)

    def eval_pure(self, X: MatrixTuple) -> np.ndarray:
        """Force the pure-python kernel (used by the benchmark and tests)."""
        if self.coeffs.shape[0] == 0:
            return np.zeros((self.rows * X.n, self.cols * X.n))
        return _evalpy.eval_compiled(self.letters, self.offsets, self.coeffs,
                                     X.mats)


def eval_poly(p: NcPolynomial, X: MatrixTuple) -> np.ndarray:
    """p(X) = sum_w c_w (x) w(X), a (rows*n) x (cols*n) matrix."""
    return CompiledPoly(p)(X)


def eval_pencil(L, X: MatrixTuple) -> np.ndarray:
    """L(X) for a monic pencil; delegates to the pencil's own evaluation."""
    return L.eval(X)


def signature(M: np.ndarray, tol: float = DEFAULT_EIG_TOL) -> Signature:
    M = np.asarray(M, dtype=float)
    if M.size and np.max(np.abs(M - M.T)) > SYM_TOL * (1.0 + np.max(np.abs(M))):
        raise ValueError("signature requires a symmetric matrix")
    eigs = np.linalg.eigvalsh((M + M.T) / 2.0)
    scale = 1.0 + (np.max(np.abs(eigs)) if eigs.size else 0.0)
    cut = tol * scale
    n_pos = int(np.sum(eigs > cut))
    n_neg = int(np.sum(eigs < -cut))
    return Signature(n_pos, n_neg, len(eigs) - n_pos - n_neg, tol)


def constant_term_signature(p: NcPolynomial, tol: float = DEFAULT_EIG_TOL) -> Signature:
    return signature(p.coeff(()), tol)


def ray_membership(p: NcPolynomial, X: MatrixTuple, grid: int = 64,
                   refine_iters: int = 60, tol_t: float = DEFAULT_RAY_TOL,
                   eig_tol: float = DEFAULT_EIG_TOL) -> MembershipVerdict:
    """Membership of X in the invertibility set of p via the ray t -> tX.

    Inside means the signature of p(tX) equals n times the signature of p(0)
    at every probed t in [0, 1] with no eigenvalue near zero.  The first
    signature change along the ray is bracketed on the grid and refined by
    bisection to the critical scale t*.  Only the star-shaped hull of 0 is
    probed; for convex sets this is exact.
    """
    if p.g != X.g:
        raise VariableCountMismatchError(f"p has g={p.g}, X has g={X.g}")
    sig0 = constant_term_signature(p, eig_tol)
    if sig0.n_zero > 0:
        raise SingularAtZeroError("p(0) has a numerically zero eigenvalue")
    expected = (X.n * sig0.n_pos, X.n * sig0.n_neg, 0)
    cp = CompiledPoly(p)

    min_gap = np.inf

    def probe(t: float) -> bool:
        nonlocal min_gap
        eigs = np.linalg.eigvalsh(cp(X.scale(t)))
        scale = 1.0 + (np.max(np.abs(eigs)) if eigs.size else 0.0)
        cut = eig_tol * scale
        npos = int(np.sum(eigs > cut))
        nneg = int(np.sum(eigs < -cut))
        nzero = len(eigs) - npos - nneg
        if eigs.size:
            min_gap = min(min_gap, float(np.min(np.abs(eigs))))
        return (npos, nneg, nzero) == expected

    t_bad = None
    t_good = 0.0
    for k in range(grid + 1):
        t = k / grid
        if probe(t):
            t_good = t
        else:
            t_bad = t
            break

    if t_bad is None:
        return MembershipVerdict("Inside", None, min_gap)

    lo, hi = t_good, t_bad
    for _ in range(refine_iters):
        mid = (lo + hi) / 2.0
        if mid == lo or mid == hi:
            break
        if probe(mid):
            lo = mid
        else:
            hi = mid
    t_star = (lo + hi) / 2.0
    status = "Boundary" if t_star >= 1.0 - tol_t else "Outside"
    return MembershipVerdict(status, t_star, min_gap)
