"""Numerical separation of a boundary point from an invertibility set.

Pipeline: a sampled LP finds a level-n supporting functional at the boundary
point, alternating projections find a trace-one PSD state making the
functional matricial, and the two combine into a monic pencil that is
positive definite on the sampled set and singular at the boundary point.

Compactness arguments are replaced by sampling with explicit budgets, so a
returned certificate only speaks for its sampled scope; every certificate is
re-checkable from its serialized form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .ncpoly import NcPolynomial, word_count, words_up_to
from .evaluate import MatrixTuple, ray_membership, SingularAtZeroError
from .boundary import BoundaryPair, RayNeverExitsError, ray_exit_scale
from .pencil import MonicPencil
from .sampling import interior_sample, random_contraction


class SeparationFailedError(RuntimeError):
    """No verified supporting functional within the sampling budget."""


class StateNotFoundError(RuntimeError):
    """Alternating projections exhausted their budget without feasibility.

    Carries the level-n compressions of the violated constraints, which a
    caller can feed back into the supporting-functional LP as cuts.
    """

    def __init__(self, msg: str, violations: list | None = None):
        super().__init__(msg)
        self.violations = violations or []


@dataclass
class LinearFunctional:
    """X -> sum_j tr(lams[j] X_j) at a fixed level."""
    lams: np.ndarray  # (g, n, n), each symmetric

    @property
    def n(self) -> int:
        return self.lams.shape[1]

    @property
    def g(self) -> int:
        return self.lams.shape[0]

    def value(self, X: MatrixTuple) -> float:
        return float(np.einsum("gij,gji->", self.lams, X.mats))

    def to_dict(self) -> dict:
        return {"n": self.n, "g": self.g, "lams": self.lams.tolist()}


@dataclass
class TraceState:
    T: np.ndarray
    achieved_margin: float

    def to_dict(self) -> dict:
        return {"T": self.T.tolist(), "achieved_margin": self.achieved_margin}


@dataclass
class SeparationCertificate:
    pencil: MonicPencil
    Xb: MatrixTuple
    boundary_singularity: float   # lambda_min of L(Xb), should be ~0
    interior_margin: float        # min lambda_min of L(Y) over fresh samples
    epsilon: float
    max_coeff_norm: float
    seed: int
    budgets: dict = field(default_factory=dict)

    def coefficient_bound_ok(self, slack: float = 1e-6) -> bool:
        return self.max_coeff_norm <= 1.0 / self.epsilon + slack

    def to_dict(self) -> dict:
        return {"pencil": self.pencil.to_dict(), "Xb": self.Xb.to_dict(),
                "boundary_singularity": self.boundary_singularity,
                "interior_margin": self.interior_margin,
                "epsilon": self.epsilon,
                "max_coeff_norm": self.max_coeff_norm,
                "seed": self.seed, "budgets": self.budgets}


def epsilon_bound(p: NcPolynomial) -> float:
    """Radius of a coordinate-norm ball around 0 inside the set of p,
    min{1, Delta / (tau (M+1))} with M the largest non-constant coefficient
    norm, tau the number of non-empty words up to deg p, Delta the smallest
    absolute eigenvalue of p(0)."""
    c0 = p.coeff(())
    eigs = np.linalg.eigvalsh((c0 + c0.T) / 2.0) if p.rows == p.cols else None
    if eigs is None or np.min(np.abs(eigs)) <= 1e-12 * (1.0 + np.max(np.abs(eigs))):
        raise SingularAtZeroError("p(0) must be square and invertible")
    delta = float(np.min(np.abs(eigs)))
    d = p.degree()
    tau = word_count(p.g, d) - 1  # non-empty words
    if tau <= 0:
        return 1.0
    M = max((np.linalg.norm(c, 2) for w, c in p.terms.items() if w), default=0.0)
    return min(1.0, delta / (tau * (M + 1.0)))


def _sym_basis(n: int) -> list[np.ndarray]:
    out = []
    for a in range(n):
        for b in range(a, n):
            S = np.zeros((n, n))
            S[a, b] = S[b, a] = 1.0
            out.append(S)
    return out


def _coordinate_points(p: NcPolynomial, n: int, epsilon: float,
                       t_max: float = 1e6) -> list[MatrixTuple]:
    """Interior points along the signed coordinate rays, pushed out far
    enough that the implied coefficient bound matches the epsilon ball."""
    pts = []
    for j in range(p.g):
        for sign in (+1.0, -1.0):
            mats = np.zeros((p.g, n, n))
            mats[j] = sign * np.eye(n)
            D = MatrixTuple(mats)
            try:
                r = ray_exit_scale(p, D, t_max=t_max)
            except RayNeverExitsError:
                continue
            t = min(0.97 * r, max(epsilon, 0.9 * r))
            pts.append(D.scale(t))
    return pts


def _compression_samples(p: NcPolynomial, rng, n: int, count: int,
                         max_level: int, u_max: float) -> list[MatrixTuple]:
    """Level-n points C^T Y C for interior Y and contractions C; these lie
    in the level-n set whenever the set is matrix convex, and constrain the
    functional the way the trace-state inequality will."""
    out = []
    for _ in range(count):
        m = int(rng.integers(1, max_level + 1))
        Y = interior_sample(p, rng, m, u_max=u_max)
        C = random_contraction(rng, m, n)
        out.append(Y.conjugate(C))
    return out


def supporting_functional(p: NcPolynomial, Xb: MatrixTuple, samples: int,
                          seed: int, u_max: float = 0.97,
                          box: float | None = None, max_level: int = 3,
                          extra_points: list[MatrixTuple] | None = None,
                          verify_rounds: int = 6) -> LinearFunctional:
    """Margin-maximizing sampled supporting functional at a boundary point.

    Solves, over symmetric coefficient matrices, the LP: value 1 at Xb, at
    most 1 - margin on sampled interior points and compression samples,
    margin maximal; then checks the result against a fresh batch, feeding
    violated fresh points back as cuts for up to ``verify_rounds`` re-solves.
    """
    verdict = ray_membership(p, Xb)
    if verdict.status != "Boundary":
        raise ValueError(f"Xb is not on the boundary (status {verdict.status})")
    rng = np.random.default_rng(seed)
    n, g = Xb.n, p.g
    eps = epsilon_bound(p)
    if box is None:
        box = min(10.0 / eps, 1e6)

    basis = _sym_basis(n)
    nb = len(basis)

    def features(X: MatrixTuple) -> np.ndarray:
        f = np.empty(g * nb)
        for j in range(g):
            for k, S in enumerate(basis):
                f[j * nb + k] = float(np.sum(S * X.mats[j]))
        return f

    # half the interior batch hugs the boundary shell, where the LP is most
    # likely to overshoot on finite samples
    half = samples // 2
    train = [interior_sample(p, rng, n, u_max=u_max) for _ in range(samples - half)]
    train += [interior_sample(p, rng, n, u_max=u_max, u_min=0.85)
              for _ in range(half)]
    train += _compression_samples(p, rng, n, samples, max_level, u_max)
    train += _coordinate_points(p, n, eps)
    train += list(extra_points or [])

    nvar = g * nb + 1  # coefficients plus the margin
    c = np.zeros(nvar)
    c[-1] = -1.0  # maximize margin
    A_eq = np.zeros((1, nvar))
    A_eq[0, :-1] = features(Xb)
    b_eq = np.array([1.0])
    bounds = [(-box, box)] * (g * nb) + [(-10.0, 10.0)]

    lam = None
    margin = -np.inf
    for _ in range(verify_rounds):
        A_ub = np.zeros((len(train), nvar))
        for i, Y in enumerate(train):
            A_ub[i, :-1] = features(Y)
            A_ub[i, -1] = 1.0
        b_ub = np.ones(len(train))
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                      bounds=bounds, method="highs")
        if not res.success or res.x[-1] <= 0.0:
            raise SeparationFailedError(
                f"LP margin {res.x[-1] if res.success else 'n/a'}; "
                "set may be non-convex at this level or the budget too small")

        lams = np.zeros((g, n, n))
        for j in range(g):
            for k, S in enumerate(basis):
                lams[j] += res.x[j * nb + k] * S
        lam = LinearFunctional(lams)

        fresh = [interior_sample(p, rng, n, u_max=u_max)
                 for _ in range(samples - half)]
        fresh += [interior_sample(p, rng, n, u_max=u_max, u_min=0.85)
                  for _ in range(half)]
        fresh += _compression_samples(p, rng, n, samples // 2, max_level, u_max)
        margin = min(1.0 - lam.value(Y) for Y in fresh)
        if margin > 0.0:
            return lam
        # keep only the informative fresh points as cuts for the re-solve
        train += [Y for Y in fresh if lam.value(Y) >= 0.9]
    raise SeparationFailedError(
        f"verification margin {margin:.3e} not positive after "
        f"{verify_rounds} rounds")


def _pencil_matrix(lams: np.ndarray, T: np.ndarray, Y: MatrixTuple) -> np.ndarray:
    """T (x) I - sum_j lams[j] (x) Y_j at the level of Y."""
    out = np.kron(T, np.eye(Y.n))
    for j in range(lams.shape[0]):
        out -= np.kron(lams[j], Y.mats[j])
    return out


def trace_state(lam: LinearFunctional, p: NcPolynomial, Xb: MatrixTuple,
                max_level: int, n_constraints: int, seed: int,
                iters: int = 2000, tol: float = 1e-9,
                u_max: float = 0.97) -> TraceState:
    """Trace-one PSD state making the supporting functional matricial.

    Enforces T (x) I - sum lams[j] (x) Y_j >= 0 on sampled interior points
    (plus coordinate-ray points and a near-boundary copy of Xb) through
    alternating projection: eigenvector cutting planes for violated points,
    then projection back to the trace-one PSD set.
    """
    rng = np.random.default_rng(seed)
    n = lam.n
    eps = epsilon_bound(p)

    constraint_pts: list[MatrixTuple] = []
    per_level = max(1, n_constraints // max_level)
    for m in range(1, max_level + 1):
        for _ in range(per_level):
            constraint_pts.append(interior_sample(p, rng, m, u_max=u_max))
    constraint_pts += [pt for pt in _coordinate_points(p, 1, eps)]
    constraint_pts.append(Xb.scale(0.99))

    T = np.eye(n) / n
    converged = False
    best_worst = -np.inf
    stall = 0
    for _ in range(iters):
        worst = 0.0
        for Y in constraint_pts:
            M = _pencil_matrix(lam.lams, T, Y)
            evals, evecs = np.linalg.eigh(M)
            lam_min = evals[0]
            if lam_min < -tol:
                worst = min(worst, lam_min)
                gamma = evecs[:, 0].reshape(n, Y.n)
                G = gamma @ gamma.T
                b = float(np.einsum("jab,ak,jkl,bl->", lam.lams, gamma,
                                    Y.mats, gamma))
                T = T + (b - float(np.sum(G * T))) / float(np.sum(G * G)) * G
        # back to the trace-one PSD set
        evals, evecs = np.linalg.eigh((T + T.T) / 2.0)
        evals = np.clip(evals, 0.0, None)
        tr = float(np.sum(evals))
        if tr <= 0.0:
            T = np.eye(n) / n
            continue
        T = (evecs * (evals / tr)) @ evecs.T
        if worst >= -tol:
            converged = True
            break
        if worst > best_worst + 1e-12:
            best_worst = worst
            stall = 0
        else:
            stall += 1
            if stall >= 60 and worst < -100 * tol:
                break  # flat residual far from feasibility: infeasible
    if not converged:
        violations = []
        for Y in constraint_pts:
            M = _pencil_matrix(lam.lams, T, Y)
            evals, evecs = np.linalg.eigh(M)
            if evals[0] < -tol:
                gamma = evecs[:, 0].reshape(n, Y.n)
                C = gamma.T / (np.linalg.norm(gamma, 2) * (1.0 + 1e-9))
                violations.append(Y.conjugate(C))
        raise StateNotFoundError(
            "projection budget exhausted; the functional may not be "
            "matricially separating or the budget is too small", violations)

    # fresh verification batch of (level, contraction) constraints
    margin = np.inf
    for _ in range(max(20, n_constraints // 4)):
        m = int(rng.integers(1, max_level + 1))
        Y = interior_sample(p, rng, m, u_max=u_max)
        C = random_contraction(rng, m, n)
        lhs = float(np.trace(C @ T @ C.T))
        rhs = float(np.einsum("jab,ka,jkl,lb->", lam.lams, C, Y.mats, C))
        margin = min(margin, lhs - rhs)
    return TraceState(T, float(margin))


def _spectahedron_project(T: np.ndarray) -> np.ndarray:
    """Exact Frobenius projection onto {T PSD, tr T = 1}: eigenvalues are
    projected onto the probability simplex by the usual thresholding."""
    evals, evecs = np.linalg.eigh((T + T.T) / 2.0)
    u = np.sort(evals)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.max(np.where(u - css / np.arange(1, len(u) + 1) > 0.0)[0]) + 1
    theta = css[rho - 1] / rho
    w = np.clip(evals - theta, 0.0, None)
    return (evecs * w) @ evecs.T


def _joint_state(lam: LinearFunctional, p: NcPolynomial, Xb: MatrixTuple,
                 max_level: int, n_constraints: int, seed: int,
                 iters: int = 400, tol: float = 1e-9,
                 conv_tol: float = 1e-7,
                 u_max: float = 0.97,
                 blocks: list[int] | None = None,
                 extra_pts: list[MatrixTuple] | None = None
                 ) -> tuple[LinearFunctional, TraceState]:
    """Joint search for (functional, state) by LP cut generation.

    The constraints T (x) I - sum lams[j] (x) Y_j >= 0, Lambda(Xb) = 1, and
    T PSD trace-one are jointly convex in (lams, T), so when the two-stage
    search stalls on a functional that is not matricially separating, the
    pair can still be found together: maximize a shared margin over
    accumulated eigenvector cuts of the sampled constraints, regenerate cuts
    at the optimum, repeat until the true smallest eigenvalue clears -tol.

    When ``blocks`` gives the direct-sum structure of Xb, per-block weight
    equalities tr T|_B = Lambda|_B(X_B) = 1/#blocks are imposed; together
    with feasibility at Xb itself they make the final pencil singular at
    every summand, not only at the summand with the largest eigenvalue.
    """
    rng = np.random.default_rng(seed)
    n = lam.n
    eps = epsilon_bound(p)

    pts: list[tuple[MatrixTuple, bool]] = []  # (point, counts toward margin)
    per_level = max(1, n_constraints // max_level)
    for m in range(1, max_level + 1):
        for _ in range(per_level):
            pts.append((interior_sample(p, rng, m, u_max=u_max), True))
        # margin violations concentrate near the boundary shell
        for _ in range(per_level):
            pts.append((interior_sample(p, rng, m, u_max=u_max,
                                        u_min=0.85), True))
    if n > max_level:
        # the functional lives at level n; keep it supporting there too
        pts += [(interior_sample(p, rng, n, u_max=u_max), True)
                for _ in range(per_level)]
        pts += [(interior_sample(p, rng, n, u_max=u_max, u_min=0.85), True)
                for _ in range(per_level)]
    pts += [(pt, True) for pt in _coordinate_points(p, 1, eps)]
    pts += [(pt, True) for pt in (extra_pts or [])]
    pts.append((Xb.scale(0.99), True))
    if blocks:
        # Xb itself: a tight constraint (margin zero by the equalities), so
        # its cuts must not participate in the shared margin
        pts.append((Xb, False))

    g = p.g
    basis = _sym_basis(n)
    nb = len(basis)
    nvar = nb + g * nb + 1  # T coords, lams coords, margin
    box = min(10.0 / eps, 1e6)

    def unpack(x):
        T = np.zeros((n, n))
        for k, S in enumerate(basis):
            T += x[k] * S
        lams = np.zeros((g, n, n))
        for j in range(g):
            for k, S in enumerate(basis):
                lams[j] += x[nb + j * nb + k] * S
        return T, lams

    def cut_row(G, P, with_margin):
        """Row for -(<G,T> - sum_j <P_j, lams_j>) + margin <= 0."""
        row = np.zeros(nvar)
        for k, S in enumerate(basis):
            row[k] = -float(np.sum(S * G))
            for j in range(g):
                row[nb + j * nb + k] = float(np.sum(S * P[j]))
        row[-1] = 1.0 if with_margin else 0.0
        return row

    if blocks:
        starts = np.cumsum([0] + list(blocks))
        kblocks = len(blocks)
        A_eq = np.zeros((2 * kblocks, nvar))
        for i in range(kblocks):
            inside = range(starts[i], starts[i + 1])
            for k, S in enumerate(basis):
                a, b = int(np.nonzero(S)[0][0]), int(np.nonzero(S)[1][0])
                if a in inside and b in inside:
                    A_eq[2 * i, k] = float(np.trace(S))
                    for j in range(g):
                        A_eq[2 * i + 1, nb + j * nb + k] = float(
                            np.sum(S * Xb.mats[j]))
        b_eq = np.full(2 * kblocks, 1.0 / kblocks)
    else:
        A_eq = np.zeros((2, nvar))
        for k, S in enumerate(basis):
            A_eq[0, k] = float(np.trace(S))                   # tr T = 1
            for j in range(g):
                A_eq[1, nb + j * nb + k] = float(np.sum(S * Xb.mats[j]))
        b_eq = np.array([1.0, 1.0])
    bounds = [(-2.0, 2.0)] * nb + [(-box, box)] * (g * nb) + [(-10.0, 1.0)]
    c = np.zeros(nvar)
    c[-1] = -1.0  # maximize margin

    rows: list[np.ndarray] = []
    ubs: list[float] = []
    T = np.eye(n) / n
    lams = lam.lams.copy()
    converged = False
    for _ in range(iters):
        worst = 0.0
        for Y, with_margin in pts:
            M = _pencil_matrix(lams, T, Y)
            evals, evecs = np.linalg.eigh(M)
            for idx in range(min(3, len(evals))):
                if evals[idx] >= -tol:
                    break
                worst = min(worst, evals[idx])
                gamma = evecs[:, idx].reshape(n, Y.n)
                G = gamma @ gamma.T
                P = np.einsum("ak,jkl,bl->jab", gamma, Y.mats, gamma)
                P = (P + P.transpose(0, 2, 1)) / 2.0
                rows.append(cut_row(G, P, with_margin))
                ubs.append(0.0)
        tev, tvec = np.linalg.eigh(T)
        for idx in np.where(tev < tol)[0]:
            q = tvec[:, idx]
            row = np.zeros(nvar)
            for k, S in enumerate(basis):
                row[k] = -float(q @ S @ q)
            rows.append(row)
            ubs.append(0.0)
        # the averaged iterate hovers an order or two below the cut band;
        # accept within conv_tol, which the final projection and the
        # singularity normalization downstream both absorb
        if worst >= -conv_tol and np.min(tev) >= -conv_tol:
            converged = True
            break
        res = linprog(c, A_ub=np.array(rows), b_ub=np.array(ubs),
                      A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
        if not res.success or res.x[-1] <= 0.0:
            break  # no strictly feasible pair on the accumulated cuts
        if len(rows) > 3000:
            # LP time grows with the cut pile; keep the rows most binding
            # at the current vertex (cuts that matter again regenerate)
            act = np.asarray(rows) @ res.x
            keep = np.argsort(act)[-1500:]
            rows = [rows[i] for i in keep]
            ubs = [ubs[i] for i in keep]
        # average toward the LP vertex: plain Kelley steps oscillate
        Tn, lamsn = unpack(res.x)
        T = (T + Tn) / 2.0
        lams = (lams + lamsn) / 2.0
    if not converged:
        raise StateNotFoundError(
            "joint cut generation exhausted; the sampled set may not be "
            "matrix convex at this point")
    T = _spectahedron_project(T)

    margin = np.inf
    for _ in range(max(20, n_constraints // 4)):
        m = int(rng.integers(1, max_level + 1))
        Y = interior_sample(p, rng, m, u_max=u_max)
        C = random_contraction(rng, m, n)
        lhs = float(np.trace(C @ T @ C.T))
        rhs = float(np.einsum("jab,ka,jkl,lb->", lams, C, Y.mats, C))
        margin = min(margin, lhs - rhs)
    return LinearFunctional(lams), TraceState(T, float(margin))


def separating_pencil(p: NcPolynomial, Xb: MatrixTuple, seed: int,
                      samples: int = 120, max_level: int = 3,
                      n_constraints: int = 60, iters: int = 2000,
                      verify_samples: int = 200, verify_levels=(1, 2, 3, 4),
                      rank_tol: float = 1e-9,
                      u_max: float = 0.97,
                      outer_rounds: int = 2,
                      retries: int = 3,
                      blocks: list[int] | None = None) -> SeparationCertificate:
    """Monic pencil positive definite on sampled interior points and singular
    at the boundary point Xb, with certificate-grade numeric checks.

    When the fresh-sample interior margin of an attempt comes out
    non-positive, the violated interior points are compressed to level-n
    cuts and the whole search is re-run, up to ``retries`` times; the last
    certificate is returned if none verifies, so callers can inspect it.

    ``blocks`` declares Xb as a direct sum of boundary points with the given
    sizes; the search then goes straight to the joint stage with per-block
    equalities so the pencil comes out singular at every summand.
    """
    cuts: list[MatrixTuple] = []
    cert = None
    for attempt in range(max(retries, 1)):
        cert, violations = _pencil_attempt(
            p, Xb, seed + 977 * attempt, samples, max_level, n_constraints,
            iters, verify_samples, verify_levels, rank_tol, u_max,
            outer_rounds, blocks, cuts)
        if cert.interior_margin > 0.0:
            return cert
        cuts.extend(violations)
    return cert


def _pencil_attempt(p: NcPolynomial, Xb: MatrixTuple, seed: int,
                    samples: int, max_level: int, n_constraints: int,
                    iters: int, verify_samples: int, verify_levels,
                    rank_tol: float, u_max: float, outer_rounds: int,
                    blocks: list[int] | None,
                    extra_cuts: list[MatrixTuple]
                    ) -> tuple[SeparationCertificate, list[MatrixTuple]]:
    """One full run of the separation pipeline; returns the certificate and
    the level-n compressions of any fresh interior points the final pencil
    fails on (empty when the margin is positive)."""
    if blocks and len(blocks) > 1:
        lam = supporting_functional(p, Xb, samples, seed, u_max=u_max,
                                    max_level=max_level,
                                    extra_points=extra_cuts)
        lam, ts = _joint_state(lam, p, Xb, max_level, n_constraints,
                               seed + 1, u_max=u_max, blocks=list(blocks),
                               extra_pts=extra_cuts)
    else:
        cuts = list(extra_cuts)
        lam = ts = None
        for round_idx in range(outer_rounds):
            lam = supporting_functional(p, Xb, samples, seed + round_idx,
                                        u_max=u_max, max_level=max_level,
                                        extra_points=cuts)
            try:
                ts = trace_state(lam, p, Xb, max_level, n_constraints,
                                 seed + round_idx + 1, iters=iters,
                                 u_max=u_max)
                break
            except StateNotFoundError as e:
                ts = None
                cuts.extend(e.violations)
        if ts is None:
            lam, ts = _joint_state(lam, p, Xb, max_level, n_constraints,
                                   seed + outer_rounds + 1, u_max=u_max,
                                   extra_pts=extra_cuts)

    evals, evecs = np.linalg.eigh(ts.T)
    cut = rank_tol * max(np.max(evals), 1e-300)
    keep = evals > cut
    Q = evecs[:, keep]
    s = evals[keep]
    sinv = 1.0 / np.sqrt(s)
    A = np.array([(sinv[:, None] * (Q.T @ lam.lams[j] @ Q)) * sinv[None, :]
                  for j in range(p.g)])
    A = (A + A.transpose(0, 2, 1)) / 2.0
    L = MonicPencil(p.g, Q.shape[1], -A)  # L(x) = I - sum A_j x_j

    # normalize so the pencil is singular at Xb exactly: the sampled state
    # leaves a slack of order the constraint relaxation, so the top
    # eigenvalue of sum A_j (x) Xb_j sits near but not at 1
    mu = 1.0 - float(np.min(np.linalg.eigvalsh(L.eval(Xb))))
    if mu <= 0.0:
        raise SeparationFailedError(
            f"pencil strictly positive along Xb (mu={mu:.3e})")
    A = A / mu
    L = MonicPencil(p.g, Q.shape[1], -A)

    boundary_sing = float(np.min(np.linalg.eigvalsh(L.eval(Xb))))
    rng = np.random.default_rng(seed + 2)
    per_level = max(1, verify_samples // len(verify_levels))
    interior_margin = np.inf
    violations: list[MatrixTuple] = []
    W = Q * sinv[None, :]  # maps pencil coordinates back to state coordinates
    n = lam.n
    for m in verify_levels:
        for _ in range(per_level):
            Y = interior_sample(p, rng, m, u_max=u_max)
            yevals, yevecs = np.linalg.eigh(L.eval(Y))
            interior_margin = min(interior_margin, float(yevals[0]))
            if yevals[0] <= 0.0:
                # level-n compression of the violated point, usable as an
                # LP cut on the next attempt
                gamma = W @ yevecs[:, 0].reshape(Q.shape[1], Y.n)
                C = gamma.T / (np.linalg.norm(gamma, 2) * (1.0 + 1e-9))
                violations.append(Y.conjugate(C))
    eps = epsilon_bound(p)
    max_norm = max((np.linalg.norm(A[j], 2) for j in range(p.g)), default=0.0)
    budgets = {"samples": samples, "max_level": max_level,
               "n_constraints": n_constraints, "iters": iters,
               "verify_samples": verify_samples,
               "verify_levels": list(verify_levels),
               "trace_margin": ts.achieved_margin}
    return SeparationCertificate(L, Xb, boundary_sing, float(interior_margin),
                                 eps, float(max_norm), seed,
                                 budgets), violations


def _word_apply(word: tuple[int, ...], X: MatrixTuple,
                v: np.ndarray) -> np.ndarray:
    """w(X) @ v for a word of 1-based letters."""
    out = v
    for letter in reversed(word):
        out = X.mats[letter - 1] @ out
    return out


def structured_pencil(p: NcPolynomial, pairs: list[BoundaryPair],
                      Xb: MatrixTuple, seed: int,
                      n_constraints: int = 60, max_level: int = 3,
                      verify_samples: int = 200, verify_levels=(1, 2, 3, 4),
                      u_max: float = 0.97, ls_tol: float = 1e-6,
                      null_tol: float = 1e-7, iters: int = 150,
                      tol: float = 1e-9) -> SeparationCertificate:
    """Monic pencil on the half-degree monomial row basis, singular at every
    given boundary pair by construction.

    Rows are indexed by (word w of degree <= deg(p)/2) x (coefficient
    component), so the kernel candidate at a boundary pair (X, v) is the
    evaluation vector kappa = stack_w(w(X) v).  Requiring L(X) kappa = 0 is
    *linear* in the pencil coefficients, which buys two things the
    unstructured pipeline cannot deliver: exact singularity at every
    constrained pair simultaneously, and transfer of singularity to every
    pair the constrained ones dominate (each row of L(X) kappa is a
    polynomial of degree <= deg p evaluated at (X, v)).  The coefficients
    are the least-squares solution of the stacked kernel equations; any
    remaining nullspace freedom is spent maximizing the interior margin by
    LP cut generation.

    Raises SeparationFailedError when no pencil on this basis fits the
    pairs (e.g. the sampled set is not LMI-representable at this degree).
    """
    g, delta = p.g, p.rows
    d = max(p.degree(), 0)
    words = list(words_up_to(g, d // 2))
    k = delta * len(words)
    nsym = k * (k + 1) // 2
    nv = g * nsym

    def sym_index(j: int, i: int, l: int) -> int:
        i, l = min(i, l), max(i, l)
        return j * nsym + i * k - i * (i - 1) // 2 + (l - i)

    def mats_of(a: np.ndarray) -> np.ndarray:
        A = np.zeros((g, k, k))
        for j in range(g):
            idx = j * nsym
            for i in range(k):
                for l in range(i, k):
                    A[j, i, l] = A[j, l, i] = a[idx]
                    idx += 1
        return A

    blocks_E = []
    blocks_f = []
    for pair in pairs:
        m = pair.X.n
        Vb = pair.v_blocks()
        K = np.asarray([_word_apply(w, pair.X, Vb[a])
                        for w in words for a in range(delta)])
        K = K / max(np.linalg.norm(K), 1e-300)
        Eb = np.zeros((k * m, nv))
        for j in range(g):
            P = K @ pair.X.mats[j]
            for i in range(k):
                for l in range(i, k):
                    c = sym_index(j, i, l)
                    Eb[i * m:(i + 1) * m, c] += P[l]
                    if l != i:
                        Eb[l * m:(l + 1) * m, c] += P[i]
        blocks_E.append(Eb)
        blocks_f.append(K.reshape(-1))
    E = np.vstack(blocks_E)
    f = np.concatenate(blocks_f)

    a0, *_ = np.linalg.lstsq(E, f, rcond=None)
    resid = float(np.linalg.norm(E @ a0 - f) / max(np.linalg.norm(f), 1e-300))
    if resid > ls_tol:
        raise SeparationFailedError(
            f"no structured pencil on the half-degree basis fits the pairs "
            f"(relative residual {resid:.2e})")
    _, s, Vt = np.linalg.svd(E)
    rank = int(np.sum(s > null_tol * s[0])) if len(s) else 0
    N = Vt[rank:].T  # (nv, nz) nullspace of the kernel equations

    rng = np.random.default_rng(seed)
    eps = epsilon_bound(p)
    a = a0
    if N.shape[1]:
        # spend the leftover freedom maximizing the interior margin
        pts = []
        per_level = max(1, n_constraints // max_level)
        for m in range(1, max_level + 1):
            for _ in range(per_level):
                pts.append(interior_sample(p, rng, m, u_max=u_max))
            for _ in range(per_level):
                pts.append(interior_sample(p, rng, m, u_max=u_max,
                                           u_min=0.85))
        pts += _coordinate_points(p, 1, eps)
        nz = N.shape[1]
        rows: list[np.ndarray] = []
        ubs: list[float] = []
        z = np.zeros(nz)
        bounds = [(-100.0, 100.0)] * nz + [(-10.0, 1.0)]
        c = np.zeros(nz + 1)
        c[-1] = -1.0
        res = None
        for _ in range(iters):
            A = mats_of(a0 + N @ z)
            L = MonicPencil(g, k, -A)
            scored = []
            for Y in pts:
                evals, evecs = np.linalg.eigh(L.eval(Y))
                scored.append((evals[0], evecs[:, 0], Y))
            scored.sort(key=lambda item: item[0])
            worst = scored[0][0]
            for ev, u, Y in scored[:10]:
                U = u.reshape(k, Y.n)
                pvec = np.zeros(nv)
                for j in range(g):
                    P = (U @ Y.mats[j]) @ U.T
                    P = (P + P.T) / 2.0
                    for i in range(k):
                        for l in range(i, k):
                            pvec[sym_index(j, i, l)] = (
                                P[i, l] * (2.0 if l != i else 1.0))
                # u^T L u = |u|^2 - pvec.(a0 + N z) >= t
                rows.append(np.concatenate([pvec @ N, [1.0]]))
                ubs.append(float(u @ u - pvec @ a0))
            if res is not None and worst >= float(res.x[-1]) - 1e-7:
                break  # achieved margin meets the LP upper bound
            res = linprog(c, A_ub=np.array(rows), b_ub=np.array(ubs),
                          bounds=bounds, method="highs")
            if not res.success:
                break
            z = (z + res.x[:-1]) / 2.0
        a = a0 + N @ z

    A = mats_of(a)
    L = MonicPencil(g, k, -A)
    boundary_sing = float(np.min(np.linalg.eigvalsh(L.eval(Xb))))
    rng2 = np.random.default_rng(seed + 2)
    per_level = max(1, verify_samples // len(verify_levels))
    interior_margin = np.inf
    for m in verify_levels:
        for _ in range(per_level):
            Y = interior_sample(p, rng2, m, u_max=u_max)
            interior_margin = min(
                interior_margin, float(np.min(np.linalg.eigvalsh(L.eval(Y)))))
    max_norm = max((np.linalg.norm(A[j], 2) for j in range(g)), default=0.0)
    budgets = {"pairs": len(pairs), "ls_residual": resid,
               "null_dim": int(N.shape[1]), "n_constraints": n_constraints,
               "verify_samples": verify_samples,
               "verify_levels": list(verify_levels)}
    return SeparationCertificate(L, Xb, boundary_sing, float(interior_margin),
                                 eps, float(max_norm), seed, budgets)


def verify_certificate(p: NcPolynomial, cert: dict, samples: int, seed: int,
                       levels=(1, 2, 3, 4), u_max: float = 0.97) -> dict:
    """Re-check a serialized certificate on fresh samples."""
    L = MonicPencil.from_dict(cert["pencil"])
    Xb = MatrixTuple.from_dict(cert["Xb"])
    boundary_sing = float(np.min(np.linalg.eigvalsh(L.eval(Xb))))
    rng = np.random.default_rng(seed)
    per_level = max(1, samples // len(levels))
    margin = np.inf
    for m in levels:
        for _ in range(per_level):
            Y = interior_sample(p, rng, m, u_max=u_max)
            margin = min(margin, float(np.min(np.linalg.eigvalsh(L.eval(Y)))))
    eps = epsilon_bound(p)
    max_norm = max((np.linalg.norm(L.A[j], 2) for j in range(L.g)), default=0.0)
    return {"boundary_singularity": boundary_sing,
            "interior_margin": float(margin),
            "epsilon": eps,
            "max_coeff_norm": float(max_norm),
            "coefficient_bound_ok": bool(max_norm <= 1.0 / eps + 1e-6),
            "ok": bool(abs(boundary_sing) <= 1e-6 and margin > 0.0
                       and max_norm <= 1.0 / eps + 1e-6)}
