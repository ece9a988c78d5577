"""Iterative LMI synthesis: separate where the current pencil is still
invertible on the sampled boundary, direct-sum the new pencil in, repeat.

Progress is measured in integers: each augmentation must strictly grow the
vanishing-space dimension of the surviving pairs, which caps the number of
iterations by the coefficient-space dimension nu.  The result is an
empirical representation: equality of the two sets is certified only on the
sampled scope recorded in the report.
"""

from __future__ import annotations

import numpy as np

from .ncpoly import NcPolynomial
from .boundary import BoundaryPair, SizeConstants, compress_pair
from .pencil import MonicPencil, sets_agree_sampled
from .boundary import direct_sum_pairs
from .sampling import boundary_sample
from .separate import (SeparationFailedError, separating_pencil,
                       structured_pencil)
from .vanishing import dominating_representative, vanishing_space

SURVIVOR_TOL = 1e-7


class IterationCapExceededError(RuntimeError):
    def __init__(self, msg: str, pencil: MonicPencil, report: dict):
        super().__init__(msg)
        self.pencil = pencil
        self.report = report


def invertible_survivors(L: MonicPencil, S: list[BoundaryPair],
                         tol: float = SURVIVOR_TOL) -> list[BoundaryPair]:
    """Pairs of S at which L(X) is still invertible (smallest |eigenvalue|
    above a scale-relative gap)."""
    out = []
    for pair in S:
        eigs = np.linalg.eigvalsh(L.eval(pair.X))
        if np.min(np.abs(eigs)) > tol * (1.0 + np.max(np.abs(eigs))):
            out.append(pair)
    return out


def sample_boundary_pool(p: NcPolynomial, budget: int, seed: int,
                         max_level: int = 2,
                         with_compressed: bool = True) -> list[BoundaryPair]:
    """Boundary pairs from random rays across levels, plus their full-degree
    compressions."""
    rng = np.random.default_rng(seed)
    pool: list[BoundaryPair] = []
    while len(pool) < budget:
        n = int(rng.integers(1, max_level + 1))
        pair = boundary_sample(p, rng, n)
        pool.append(pair)
        if with_compressed and len(pool) < budget:
            comp = compress_pair(p, pair, mode="full")
            if comp.X.n < pair.X.n:
                pool.append(comp)
    return pool[:budget]


def synthesize_lmi(p: NcPolynomial, boundary_budget: int, iteration_cap: int,
                   seed: int, sample_max_level: int = 2,
                   agree_levels=(1, 2, 3, 4), agree_samples: int = 100,
                   sep_kwargs: dict | None = None) -> tuple[MonicPencil, dict]:
    """Build a monic pencil whose positivity set matches the sampled set of p.

    Anchors each separation call at a dominating representative of the
    surviving pairs, so one pencil is singular on everything the
    representative dominates.
    """
    sep_kwargs = dict(sep_kwargs or {})
    d = max(p.degree(), 0)
    consts = SizeConstants(p.rows, d, p.g)
    S = sample_boundary_pool(p, boundary_budget, seed,
                             max_level=sample_max_level)

    report: dict = {"seed": seed, "boundary_budget": boundary_budget,
                    "iteration_cap": iteration_cap,
                    "vanishing_dims": [], "component_sizes": [],
                    "nu": consts.nu, "mu_bound": consts.mu_bound}

    rep, blocks = _rep_and_blocks(p, S, d)
    L = _separate_at(p, rep, blocks, seed, sep_kwargs, pairs=S)
    report["component_sizes"].append(L.size)
    report["vanishing_dims"].append(vanishing_space(S, d).dim)

    iterations = 0
    survivors = invertible_survivors(L, S)
    last_dim = None
    while survivors:
        if iterations >= iteration_cap:
            report["survivors"] = len(survivors)
            raise IterationCapExceededError(
                f"cap {iteration_cap} reached with {len(survivors)} survivors",
                L, report)
        dim = vanishing_space(survivors, d).dim
        if last_dim is not None and dim <= last_dim:
            report["survivors"] = len(survivors)
            raise IterationCapExceededError(
                f"no vanishing-dimension progress ({dim} after {last_dim})",
                L, report)
        last_dim = dim
        report["vanishing_dims"].append(dim)
        rep, blocks = _rep_and_blocks(p, survivors, d)
        M = _separate_at(p, rep, blocks, seed + 17 * (iterations + 1),
                         sep_kwargs, pairs=survivors)
        L = L.direct_sum(M)
        report["component_sizes"].append(M.size)
        iterations += 1
        survivors = invertible_survivors(L, S)

    report["iterations"] = iterations
    report["survivors"] = 0
    report["pencil_size"] = L.size
    report["size_within_mu_bound"] = bool(L.size <= consts.mu_bound)
    report["agreement"] = sets_agree_sampled(p, L, agree_levels, agree_samples,
                                             seed + 1)
    return L, report


def _rep_and_blocks(p: NcPolynomial, pairs: list[BoundaryPair],
                    d: int) -> tuple[BoundaryPair, list[int]]:
    """Dominating direct-sum representative plus its summand sizes."""
    chosen, _ = dominating_representative(pairs, d)
    sub = [pairs[i] for i in chosen]
    return direct_sum_pairs(p, sub), [q.X.n for q in sub]


def _separate_at(p: NcPolynomial, rep, blocks: list[int], seed: int,
                 sep_kwargs: dict, pairs: list[BoundaryPair] | None = None):
    """Separating pencil anchored at the dominating representative.

    The structured (half-degree basis) construction is tried first with the
    whole surviving pair set as kernel constraints: singular at every pair
    at once, so the augmentation loop terminates as the theory predicts.
    The generic functional/state pipeline is the fallback when no pencil on
    that basis fits the samples.
    """
    if pairs:
        try:
            cert = structured_pencil(p, pairs, rep.X, seed)
            if cert.interior_margin > 0.0:
                return cert.pencil
        except SeparationFailedError:
            pass
    cert = separating_pencil(p, rep.X, seed=seed, blocks=blocks, **sep_kwargs)
    return cert.pencil


def min_degree_witness(p: NcPolynomial, pairs: int, seed: int,
                       max_level: int = 2) -> dict:
    """Dimension of the vanishing space of a sampled boundary at degree
    floor(d/2) + 1; a nonzero dimension is the expected outcome for a convex
    instance."""
    d = max(p.degree(), 0)
    target_degree = d // 2 + 1
    S = sample_boundary_pool(p, pairs, seed, max_level=max_level,
                             with_compressed=False)
    vs = vanishing_space(S, target_degree)
    return {"degree": target_degree, "dim": vs.dim, "pairs": len(S),
            "space": vs.to_dict()}
