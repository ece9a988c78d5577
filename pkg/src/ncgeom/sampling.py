"""Random tuples, contractions, and interior points of invertibility sets."""

from __future__ import annotations

import numpy as np

from .ncpoly import NcPolynomial
from .evaluate import MatrixTuple
from .boundary import RayNeverExitsError, ray_exit_scale


def random_symmetric_tuple(rng: np.random.Generator, g: int, n: int,
                           scale: float = 1.0) -> MatrixTuple:
    mats = rng.standard_normal((g, n, n)) * scale
    return MatrixTuple((mats + mats.transpose(0, 2, 1)) / 2.0)


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_contraction(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    """Gaussian matrix normalized just inside the contraction ball."""
    C = rng.standard_normal((m, n))
    s = np.linalg.norm(C, 2)
    return C / (s + 1e-6)


def interior_sample(p: NcPolynomial, rng: np.random.Generator, n: int,
                    u_max: float = 0.95, u_min: float = 0.0,
                    t_max: float = 1e6,
                    max_attempts: int = 20) -> MatrixTuple:
    """A point of the invertibility set of p at level n, interior with margin.

    Draws a Gaussian direction, finds the boundary scale along its ray, and
    pulls back by a uniform factor in (u_min, u_max).  Valid for star-shaped
    sets, which covers every bounded invertibility set handled here.
    """
    last_err = None
    for _ in range(max_attempts):
        D = random_symmetric_tuple(rng, p.g, n)
        try:
            t_star = ray_exit_scale(p, D, t_max=t_max)
        except RayNeverExitsError as e:
            last_err = e
            continue
        u = rng.uniform(u_min, u_max)
        return D.scale(u * t_star)
    raise RayNeverExitsError(
        f"no exiting ray found in {max_attempts} attempts") from last_err


def boundary_sample(p: NcPolynomial, rng: np.random.Generator, n: int,
                    t_max: float = 1e6, max_attempts: int = 20):
    """A boundary pair from a random ray at level n."""
    from .boundary import find_boundary_pair

    last_err = None
    for _ in range(max_attempts):
        D = random_symmetric_tuple(rng, p.g, n)
        try:
            return find_boundary_pair(p, D, t_max=t_max)
        except RayNeverExitsError as e:
            last_err = e
    raise RayNeverExitsError(
        f"no exiting ray found in {max_attempts} attempts") from last_err
