"""Randomized falsifiers for the matrix-convexity axioms.

These checks can only refute: a NoViolationFound verdict certifies nothing
beyond the sampled scope, while every ViolationWitness embeds the inputs
needed to replay it deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ncpoly import NcPolynomial
from .evaluate import MatrixTuple, ray_membership
from .sampling import interior_sample, random_contraction

JULIA_NORM_TOL = 1e-12


@dataclass
class ConvexityReport:
    check: str
    trials_run: int
    seed: int
    verdict: str  # "NoViolationFound" | "ViolationWitness"
    witness: Optional[dict] = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"check": self.check, "trials_run": self.trials_run,
                "seed": self.seed, "verdict": self.verdict,
                "witness": self.witness, "params": self.params}


def _psd_sqrt(M: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh((M + M.T) / 2.0)
    return evecs @ np.diag(np.sqrt(np.clip(evals, 0.0, None))) @ evecs.T


def julia_unitary(C: np.ndarray) -> np.ndarray:
    """The orthogonal dilation [[C, (I-CC^T)^1/2], [-(I-C^TC)^1/2, C^T]]."""
    C = np.atleast_2d(np.asarray(C, dtype=float))
    m, k = C.shape
    if np.linalg.norm(C, 2) > 1.0 + JULIA_NORM_TOL:
        raise ValueError("matrix norm exceeds 1")
    top = np.hstack([C, _psd_sqrt(np.eye(m) - C @ C.T)])
    bot = np.hstack([-_psd_sqrt(np.eye(k) - C.T @ C), C.T])
    return np.vstack([top, bot])


def contraction_closure_check(p: NcPolynomial, trials: int, max_level: int,
                              seed: int, u_max: float = 0.95) -> ConvexityReport:
    """Search for X in the set and a contraction F with F^T X F outside."""
    rng = np.random.default_rng(seed)
    params = {"trials": trials, "max_level": max_level, "u_max": u_max}
    for trial in range(trials):
        n = int(rng.integers(1, max_level + 1))
        k = int(rng.integers(1, max_level + 1))
        X = interior_sample(p, rng, n, u_max=u_max)
        F = random_contraction(rng, n, k)
        Y = X.conjugate(F)
        verdict = ray_membership(p, Y)
        if verdict.status != "Inside":
            witness = {"trial": trial, "level_in": n, "level_out": k,
                       "X": X.to_dict(), "F": F.tolist(),
                       "status": verdict.status,
                       "t_star": verdict.critical_scale}
            return ConvexityReport("contraction_closure", trial + 1, seed,
                                   "ViolationWitness", witness, params)
    return ConvexityReport("contraction_closure", trials, seed,
                           "NoViolationFound", None, params)


def midpoint_falsifier(p: NcPolynomial, level: int, trials: int,
                       seed: int, u_max: float = 0.95) -> ConvexityReport:
    """Search for X, Y in the set at one level with (X+Y)/2 outside."""
    rng = np.random.default_rng(seed)
    params = {"trials": trials, "level": level, "u_max": u_max}
    for trial in range(trials):
        X = interior_sample(p, rng, level, u_max=u_max)
        Y = interior_sample(p, rng, level, u_max=u_max)
        Z = MatrixTuple((X.mats + Y.mats) / 2.0)
        verdict = ray_membership(p, Z)
        if verdict.status != "Inside":
            witness = {"trial": trial, "level": level,
                       "X": X.to_dict(), "Y": Y.to_dict(),
                       "status": verdict.status,
                       "t_star": verdict.critical_scale}
            return ConvexityReport("midpoint", trial + 1, seed,
                                   "ViolationWitness", witness, params)
    return ConvexityReport("midpoint", trials, seed,
                           "NoViolationFound", None, params)


def replay_witness(p: NcPolynomial, report: ConvexityReport) -> bool:
    """Re-run membership on a serialized witness; True iff it reproduces."""
    if report.verdict != "ViolationWitness" or report.witness is None:
        return False
    w = report.witness
    if report.check == "contraction_closure":
        X = MatrixTuple.from_dict(w["X"])
        F = np.asarray(w["F"], dtype=float)
        Y = X.conjugate(F)
    else:
        X = MatrixTuple.from_dict(w["X"])
        Y2 = MatrixTuple.from_dict(w["Y"])
        Y = MatrixTuple((X.mats + Y2.mats) / 2.0)
    return ray_membership(p, Y).status == w["status"] != "Inside"
