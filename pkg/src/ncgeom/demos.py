"""Worked examples wired as regression checks: the two-disc intersection
with its degree-6 defining polynomials, and the quartic "screen" set with
its lifted SDP description."""

from __future__ import annotations

import numpy as np

from .ncpoly import NcPolynomial, scalar_poly
from .evaluate import MatrixTuple
from .sampling import interior_sample


def disc_poly() -> NcPolynomial:
    """b = 1 - x^2 - y^2."""
    return scalar_poly({(): 1.0, (1, 1): -1.0, (2, 2): -1.0}, g=2)


def shifted_disc_poly() -> NcPolynomial:
    """f = 1 - (x - 1/4)^2 - y^2 = 15/16 + x/2 - x^2 - y^2."""
    return scalar_poly({(): 15.0 / 16.0, (1,): 0.5, (1, 1): -1.0,
                        (2, 2): -1.0}, g=2)


def quartic_screen_poly() -> NcPolynomial:
    """1 - x^4 - y^4."""
    return scalar_poly({(): 1.0, (1, 1, 1, 1): -1.0, (2, 2, 2, 2): -1.0}, g=2)


def commutative_collapse(p: NcPolynomial) -> dict[tuple[int, ...], float]:
    """Scalar polynomial as a commutative exponent map {(e_1..e_g): coeff}."""
    if p.rows != 1 or p.cols != 1:
        raise ValueError("expected a scalar polynomial")
    out: dict[tuple[int, ...], float] = {}
    for w, c in p.terms.items():
        expo = tuple(sum(1 for j in w if j == v) for v in range(1, p.g + 1))
        out[expo] = out.get(expo, 0.0) + float(c[0, 0])
    return out


def scalar_ray_inside(collapsed: dict, point: np.ndarray,
                      imag_tol: float = 1e-5) -> np.ndarray:
    """Ray membership of level-1 points in the component of 0.

    ``point`` has shape (g, N); entry i is True when p(t * point_i) has no
    zero for t in [0, 1]. The restriction to a ray is a univariate
    polynomial in t, so the question is decided by its (near-)real roots
    rather than by grid sampling — products like f*b*f only *touch* zero
    where a squared factor vanishes, and value sampling steps over the dip.
    """
    N = point.shape[1]
    maxdeg = max(sum(e) for e in collapsed)
    coef = np.zeros((maxdeg + 1, N))
    for expo, c in collapsed.items():
        mono = np.ones(N)
        for j, e in enumerate(expo):
            if e:
                mono = mono * point[j] ** e
        coef[sum(expo)] += c * mono
    inside = coef[0] > 0.0
    for i in range(N):
        if not inside[i]:
            continue
        cvec = np.trim_zeros(coef[::-1, i], "f")
        if cvec.size <= 1:
            continue
        for r in np.roots(cvec):
            if abs(r.imag) <= imag_tol and -imag_tol <= r.real <= 1.0:
                inside[i] = False
                break
    return inside


def demo_bandf(grid: int = 201, extent: float = 1.2,
               band: float = 1e-6) -> dict:
    """Level-1 grid agreement of the sets of b+f, fbf, and bfb.

    Membership in the component of 0 is decided by a dense ray scan of the
    scalar polynomial; grid points within ``band`` of either disc boundary
    are excluded.
    """
    b = disc_poly()
    f = shifted_disc_poly()
    p_sum = b.direct_sum(f)
    p_fbf = f * b * f
    p_bfb = b * f * b

    xs = np.linspace(-extent, extent, grid)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    pts = np.vstack([X.ravel(), Y.ravel()])
    bv = 1.0 - pts[0] ** 2 - pts[1] ** 2
    fv = 15.0 / 16.0 + pts[0] / 2.0 - pts[0] ** 2 - pts[1] ** 2
    conclusive = (np.abs(bv) > band) & (np.abs(fv) > band)
    ref_inside = (bv > band) & (fv > band)

    results = {}
    disagreements = 0
    for name, poly in (("b_plus_f", p_sum), ("fbf", p_fbf), ("bfb", p_bfb)):
        if name == "b_plus_f":
            # the direct sum is singular exactly where either summand is
            inside = (scalar_ray_inside(commutative_collapse(b), pts)
                      & scalar_ray_inside(commutative_collapse(f), pts))
        else:
            inside = scalar_ray_inside(commutative_collapse(poly), pts)
        bad = int(np.sum(conclusive & (inside != ref_inside)))
        disagreements += bad
        results[name] = {"disagreements": bad}

    return {"demo": "bandf", "grid": grid, "band": band,
            "conclusive_points": int(np.sum(conclusive)),
            "sets": results, "total_disagreements": disagreements,
            "ok": disagreements == 0}


def screen_lift_blocks(X: MatrixTuple, Ymats: np.ndarray, alpha: float,
                       gamma: float) -> list[np.ndarray]:
    """The three lifted LMI blocks evaluated at (X, Y)."""
    n = X.n
    I = np.eye(n)
    Y1, Y2 = Ymats
    L0 = np.block([
        [I, np.zeros((n, n)), Y1],
        [np.zeros((n, n)), I, Y2],
        [Y1, Y2, I - 2.0 * alpha * (Y1 + Y2)],
    ])
    blocks = [L0]
    for j in range(2):
        blocks.append(np.block([
            [I, gamma * X.mats[j]],
            [gamma * X.mats[j], alpha * I + Ymats[j]],
        ]))
    return blocks


def screen_lift_feasible(X: MatrixTuple, alpha: float, gamma: float,
                         slacks=(1e-6, 1e-4, 1e-2)) -> bool:
    """Feasibility of the lifted description at X via the explicit lift
    Y_j = gamma^2 X_j^2 - (alpha - slack) I."""
    for slack in slacks:
        Y = np.array([gamma ** 2 * X.mats[j] @ X.mats[j]
                      - (alpha - slack) * np.eye(X.n) for j in range(2)])
        if all(np.min(np.linalg.eigvalsh(B)) > 0.0
               for B in screen_lift_blocks(X, Y, alpha, gamma)):
            return True
    return False


def demo_tvscreen(alpha: float, seed: int, grid: int = 201,
                  extent: float = 1.2, band: float = 1e-6,
                  containment_samples: int = 300,
                  max_level: int = 3) -> dict:
    """Checks on the lifted SDP family for the quartic screen set.

    (a) the scaling constant satisfies gamma^4 = 1 + 2 alpha^2;
    (b) on a level-1 grid, membership agrees with the lift identity
        (feasibility of the lifted blocks iff (1+2a^2)(1 - x1^4 - x2^4) > 0);
    (c) sampled containment of the quartic set in the lifted set at levels
        up to ``max_level``.
    """
    gamma = (1.0 + 2.0 * alpha ** 2) ** 0.25
    gamma_residual = abs(gamma ** 4 - (1.0 + 2.0 * alpha ** 2))

    xs = np.linspace(-extent, extent, grid)
    X1, X2 = np.meshgrid(xs, xs, indexing="ij")
    quartic = 1.0 - X1.ravel() ** 4 - X2.ravel() ** 4
    identity_value = (1.0 + 2.0 * alpha ** 2) * quartic
    conclusive = np.abs(quartic) > band
    grid_disagreements = int(np.sum(conclusive
                                    & ((quartic > 0) != (identity_value > 0))))

    # spot-check the identity against actual feasibility of the blocks
    rng = np.random.default_rng(seed)
    p = quartic_screen_poly()
    spot_fail = 0
    idx = rng.choice(np.where(conclusive & (quartic > 0))[0],
                     size=min(50, int(np.sum(conclusive & (quartic > 0)))),
                     replace=False)
    for i in idx:
        Xp = MatrixTuple.scalars([X1.ravel()[i], X2.ravel()[i]])
        if not screen_lift_feasible(Xp, alpha, gamma):
            spot_fail += 1

    violations = 0
    for _ in range(containment_samples):
        n = int(rng.integers(1, max_level + 1))
        X = interior_sample(p, rng, n)
        if not screen_lift_feasible(X, alpha, gamma):
            violations += 1

    ok = (gamma_residual <= 1e-12 and grid_disagreements == 0
          and spot_fail == 0 and violations == 0)
    return {"demo": "tvscreen", "alpha": alpha, "gamma": gamma,
            "gamma_residual": gamma_residual,
            "grid": grid, "band": band,
            "grid_disagreements": grid_disagreements,
            "feasibility_spot_failures": spot_fail,
            "containment_samples": containment_samples,
            "containment_violations": violations,
            "seed": seed, "ok": ok}
