"""Monic linear pencils L = I + sum A_j x_j and their positivity sets.

Includes the exact constructor turning a scalar degree-2 polynomial with
PSD quadratic part into an LMI via the Schur complement of the (1,1) block,
and a sampled set-equality report comparing the positivity set of a pencil
against ray membership for a polynomial.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .ncpoly import NcPolynomial, ShapeMismatchError
from .evaluate import (MatrixTuple, VariableCountMismatchError)

PD_TOL = 1e-9


class DegreeTooHighError(ValueError):
    pass


class NotMonicConstantError(ValueError):
    pass


class NotPSDError(ValueError):
    """Quadratic form has a negative eigenvalue; carries the certified ray.

    Along the attached unit direction the level-1 set is unbounded (for one
    sign of the parameter the polynomial can never reach zero).
    """

    def __init__(self, direction: np.ndarray, eigenvalue: float):
        super().__init__(
            f"quadratic form has negative eigenvalue {eigenvalue:.3e}")
        self.direction = direction
        self.eigenvalue = eigenvalue


class MonicPencil:
    """L(x) = I_size + sum_j A_j x_j with symmetric coefficients."""

    __slots__ = ("g", "size", "A")

    def __init__(self, g: int, size: int, A):
        A = np.asarray(A, dtype=float).reshape(g, size, size)
        for j, M in enumerate(A):
            if M.size and np.max(np.abs(M - M.T)) > 1e-12 * (1.0 + np.max(np.abs(M))):
                raise ValueError(f"coefficient {j} is not symmetric")
        self.g = g
        self.size = size
        self.A = (A + A.transpose(0, 2, 1)) / 2.0

    @staticmethod
    def identity(g: int, size: int = 1) -> "MonicPencil":
        return MonicPencil(g, size, np.zeros((g, size, size)))

    def eval(self, X: MatrixTuple) -> np.ndarray:
        if self.g != X.g:
            raise VariableCountMismatchError(
                f"pencil has g={self.g}, tuple has g={X.g}")
        out = np.eye(self.size * X.n)
        for j in range(self.g):
            out += np.kron(self.A[j], X.mats[j])
        return out

    def direct_sum(self, other: "MonicPencil") -> "MonicPencil":
        if self.g != other.g:
            raise ShapeMismatchError("pencils have different g")
        size = self.size + other.size
        A = np.zeros((self.g, size, size))
        A[:, :self.size, :self.size] = self.A
        A[:, self.size:, self.size:] = other.A
        return MonicPencil(self.g, size, A)

    def to_poly(self) -> NcPolynomial:
        """The pencil as a degree-1 matrix polynomial (delta = size)."""
        terms = {(): np.eye(self.size)}
        for j in range(self.g):
            if np.any(self.A[j] != 0.0):
                terms[(j + 1,)] = self.A[j]
        return NcPolynomial(self.g, self.size, self.size, terms)

    def to_dict(self) -> dict:
        return {"g": self.g, "size": self.size, "A": self.A.tolist(),
                "sign": "+1"}

    @staticmethod
    def from_dict(d: dict) -> "MonicPencil":
        A = np.asarray(d["A"], dtype=float)
        if d.get("sign", "+1") == "-1":
            A = -A
        return MonicPencil(int(d["g"]), int(d["size"]), A)

    @staticmethod
    def from_json(s: str) -> "MonicPencil":
        return MonicPencil.from_dict(json.loads(s))

    def __repr__(self) -> str:
        return f"MonicPencil(g={self.g}, size={self.size})"


def pencil_membership(L: MonicPencil, X: MatrixTuple, tol: float = PD_TOL) -> bool:
    """True iff L(X) is positive definite with a scale-relative margin."""
    eigs = np.linalg.eigvalsh(L.eval(X))
    scale = 1.0 + (np.max(np.abs(eigs)) if eigs.size else 0.0)
    return bool(eigs.size == 0 or np.min(eigs) > tol * scale)


def pencil_direct_sum(L: MonicPencil, M: MonicPencil) -> MonicPencil:
    return L.direct_sum(M)


@dataclass(frozen=True)
class QuadraticDecomposition:
    ell: np.ndarray       # linear coefficients, shape (g,)
    Lambda: np.ndarray    # symmetric quadratic form, shape (g, g)
    m: int                # rank of Lambda
    us: np.ndarray        # shape (m, g); Lambda = sum us[l] us[l]^T


def quadratic_to_lmi(p: NcPolynomial,
                     psd_tol: float = 1e-9) -> tuple[MonicPencil, QuadraticDecomposition]:
    """Exact LMI for a scalar degree-2 polynomial with constant term 1.

    Writes p = 1 + ell(x) - <Lambda x, x> and, for PSD Lambda = sum u_l u_l^T,
    returns the (m+1)-size monic pencil whose Schur complement in the (1,1)
    identity block reproduces p.  The identity p = L0 - Lhat^T Lhat is checked
    in exact coefficients before returning.
    """
    if p.rows != 1 or p.cols != 1:
        raise ShapeMismatchError("quadratic constructor requires scalar coefficients")
    if p.degree() > 2:
        raise DegreeTooHighError(f"degree {p.degree()} > 2")
    if not p.is_symmetric(1e-12):
        raise ValueError("polynomial must be symmetric")
    c0 = float(p.coeff(())[0, 0])
    if abs(c0 - 1.0) > 1e-12:
        raise NotMonicConstantError(f"constant term {c0} != 1")

    g = p.g
    ell = np.array([float(p.coeff((j,))[0, 0]) for j in range(1, g + 1)])
    Lam = np.zeros((g, g))
    for i in range(1, g + 1):
        for j in range(1, g + 1):
            cij = float(p.coeff((i, j))[0, 0])
            cji = float(p.coeff((j, i))[0, 0])
            Lam[i - 1, j - 1] = -(cij + cji) / 2.0

    evals, evecs = np.linalg.eigh(Lam)
    scale = 1.0 + (np.max(np.abs(evals)) if evals.size else 0.0)
    if evals.size and evals[0] < -psd_tol * scale:
        raise NotPSDError(evecs[:, 0], float(evals[0]))
    cut = psd_tol * (np.max(evals) if evals.size and np.max(evals) > 0 else 1.0)
    keep = [k for k in range(len(evals)) if evals[k] > cut]
    us = np.array([np.sqrt(evals[k]) * evecs[:, k] for k in keep]).reshape(len(keep), g)
    m = len(keep)

    size = m + 1
    A = np.zeros((g, size, size))
    for j in range(g):
        for l in range(m):
            A[j, l, m] = us[l, j]
            A[j, m, l] = us[l, j]
        A[j, m, m] = ell[j]
    L = MonicPencil(g, size, A)

    # symbolic Schur identity: p == L0 - Lhat^T Lhat, exact in coefficients
    lhat = NcPolynomial(g, m, 1,
                        {(j,): us[:, j - 1].reshape(m, 1) for j in range(1, g + 1)
                         if np.any(us[:, j - 1] != 0.0)})
    l0 = NcPolynomial(g, 1, 1,
                      {(): np.array([[1.0]]),
                       **{(j,): np.array([[ell[j - 1]]]) for j in range(1, g + 1)
                          if ell[j - 1] != 0.0}})
    rebuilt = l0 - lhat.transpose() * lhat
    if not rebuilt.allclose(p, 1e-12):
        raise ArithmeticError("Schur identity failed to reproduce the input")

    return L, QuadraticDecomposition(ell=ell, Lambda=Lam, m=m, us=us)


def sets_agree_sampled(p: NcPolynomial, L: MonicPencil, levels, samples: int,
                       seed: int, band: float = 1e-4,
                       t_max: float = 1e3) -> dict:
    """Compare ray membership for p with pencil positivity for L on samples.

    Per level, random symmetric directions are swept across a radius range
    around the boundary of the p-set along each ray; points whose relative
    boundary distance is below ``band`` are excluded as inconclusive.
    """
    from .boundary import ray_exit_scale, RayNeverExitsError

    rng = np.random.default_rng(seed)
    report = {"seed": seed, "band": band, "levels": {},
              "total_disagreements": 0}
    for n in levels:
        checked = 0
        skipped = 0
        disagreements = []
        for _ in range(samples):
            D = _random_direction(rng, p.g, n)
            try:
                t_exit = ray_exit_scale(p, D, t_max=t_max)
            except RayNeverExitsError:
                skipped += 1
                continue
            u = rng.uniform(0.0, 1.6)
            if abs(u - 1.0) <= band:
                skipped += 1
                continue
            X = D.scale(u * t_exit)
            inside_p = u < 1.0
            inside_L = pencil_membership(L, X)
            checked += 1
            if inside_p != inside_L:
                disagreements.append({"n": n, "u": u,
                                      "tuple": X.to_dict(),
                                      "inside_p": inside_p,
                                      "inside_L": inside_L})
        report["levels"][str(n)] = {"samples": samples, "checked": checked,
                                    "skipped": skipped,
                                    "disagreements": disagreements}
        report["total_disagreements"] += len(disagreements)
    return report


def _random_direction(rng, g: int, n: int) -> MatrixTuple:
    mats = rng.standard_normal((g, n, n))
    mats = (mats + mats.transpose(0, 2, 1)) / 2.0
    return MatrixTuple(mats)
