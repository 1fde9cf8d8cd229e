"""Most-probable occupation vectors under worker and demand conservation.

The equilibrium allocation maximizes the multinomial weight n!/prod(n_i!)
subject to sum(n_i) = n and sum(a_i n_i) = D.  The stationary solution is
Boltzmann-like,

    n_i = exp(nu) * exp(-beta * a_i),

with multipliers (nu, beta) fixed by the two constraints.  A one-parameter
generalization n_i = 1/(exp(-nu) exp(beta a_i) - c) interpolates between
Boltzmann (c = 0), Bose-like (c = 1) and Fermi-like (c = -1) occupation
forms.  Exact small-instance oracles (full enumeration with big-integer
weights) cross-check the continuous solutions.

All functions here are pure; results are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import (
    DomainError,
    DomainViolation,
    InfeasibleDemand,
    InstanceTooLarge,
    NoConvergence,
)
from .model_core import EconomyParams, OccupationVector, integer_lattice, validate

_BISECTION_WIDTH = 1e-8   # coarse bracket width before Newton polish
_DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class Multipliers:
    """Lagrange multipliers: nu (dimensionless), beta (1/productivity).

    c is the occupation-form parameter; 0 recovers the pure Boltzmann
    solution.  For c != 0 every sector must satisfy
    exp(-nu) exp(beta a_i) - c > 0 so occupations stay positive.
    """

    nu: float
    beta: float
    c: float = 0.0


@dataclass(frozen=True)
class EquilibriumSolution:
    """Real-valued equilibrium occupations with constraint residuals.

    residuals = (|sum n_i - n|, |sum a_i n_i - D|); both are below the
    solver tolerance after a successful solve.
    """

    multipliers: Multipliers
    occupations: tuple[float, ...]
    residuals: tuple[float, float]

    def to_json_dict(self) -> dict:
        return {
            "nu": self.multipliers.nu,
            "beta": self.multipliers.beta,
            "c": self.multipliers.c,
            "occupations": list(self.occupations),
            "residuals": list(self.residuals),
        }


def _weighted_mean_var(levels: np.ndarray, beta: float) -> tuple[float, float]:
    """Mean and variance of the levels under weights exp(-beta * a).

    The shift by the max exponent keeps the weights in range for any beta.
    """
    z = -beta * levels
    z -= z.max()
    w = np.exp(z)
    total = w.sum()
    m = float((levels * w).sum() / total)
    v = float(((levels - m) ** 2 * w).sum() / total)
    return m, v


def _occupations_at(levels: np.ndarray, n: float, beta: float) -> tuple[np.ndarray, float]:
    """Occupations exp(nu - beta*a) with nu chosen so they sum to n exactly."""
    nu = math.log(n) - float(logsumexp(-beta * levels))
    occ = np.exp(nu - beta * levels)
    return occ, nu


def solve_boltzmann(params: EconomyParams, tol: float = _DEFAULT_TOL,
                    max_iter: int = 200) -> EquilibriumSolution:
    """Solve the two-constraint Boltzmann equilibrium.

    Reduces to the scalar equation mean_{exp(-beta a)}(a) = D/n, which is
    strictly decreasing in beta, then recovers nu = ln(n / sum exp(-beta a)).
    Safeguarded root find: geometric bracket growth, bisection down to a
    coarse width, Newton polish on the constraint residual.

    Raises InfeasibleDemand when D/n is not strictly inside the level hull
    (boundary demand forces a degenerate corner the exponential form cannot
    represent) and NoConvergence if the budget is exhausted.
    """
    params = validate(params)
    levels = np.asarray(params.levels, dtype=float)
    n, D = params.n, params.D
    target = D / n
    if not levels[0] < target < levels[-1]:
        raise InfeasibleDemand(
            f"demand per worker {target} must lie strictly inside ({levels[0]}, {levels[-1]})")

    iterations = 0
    scale = 1.0 / float(levels[-1] - levels[0])

    def mean_at(beta: float) -> float:
        nonlocal iterations
        iterations += 1
        return _weighted_mean_var(levels, beta)[0]

    # bracket the root of mean(beta) - target (mean is strictly decreasing)
    lo, hi = 0.0, 0.0
    if mean_at(0.0) >= target:
        hi = scale
        while mean_at(hi) > target:
            lo, hi = hi, 2.0 * hi
            if iterations > max_iter:
                raise NoConvergence(iterations, "bracket search failed")
    else:
        lo = -scale
        while mean_at(lo) < target:
            hi, lo = lo, 2.0 * lo
            if iterations > max_iter:
                raise NoConvergence(iterations, "bracket search failed")

    while hi - lo > _BISECTION_WIDTH * max(1.0, abs(lo), abs(hi)) and iterations < max_iter:
        mid = 0.5 * (lo + hi)
        if mean_at(mid) > target:
            lo = mid
        else:
            hi = mid

    beta = 0.5 * (lo + hi)
    best: tuple[float, EquilibriumSolution] | None = None
    for _ in range(max_iter):
        occ, nu = _occupations_at(levels, n, beta)
        res = (abs(float(occ.sum()) - n), abs(float((levels * occ).sum()) - D))
        sol = EquilibriumSolution(Multipliers(nu, beta, 0.0),
                                  tuple(float(x) for x in occ), res)
        if best is None or max(res) < max(best[1].residuals):
            best = (beta, sol)
        if res[0] < tol and res[1] < tol:
            return sol
        m, v = _weighted_mean_var(levels, beta)
        if v == 0.0:
            break
        step = (m - target) / v
        beta = beta + step
        if not lo <= beta <= hi:  # keep Newton inside the verified bracket
            beta = min(max(beta, lo), hi)
        iterations += 1
    detail = f"constraint residuals stuck at {best[1].residuals}" if best else "no iterations run"
    raise NoConvergence(iterations, detail)


def closed_form_ladder(r: float, n: float, i: int) -> float:
    """Most-probable occupation of rung i on the unbounded arithmetic ladder.

    n_i = n/(r-1) * ((r-1)/r)**i with r = (D/n)/a0; the geometric series
    over i >= 1 sums to n.  Requires r > 1.
    """
    if r <= 1.0:
        raise DomainError(f"ladder form needs r > 1, got {r}")
    return n / (r - 1.0) * ((r - 1.0) / r) ** i


def ladder_limit_form(r: float, i: int) -> float:
    """Large-r probability that a worker sits on rung i: (1/r + 1/r^2) e^{-i/r}."""
    return (1.0 / r + 1.0 / (r * r)) * math.exp(-i / r)


def _generalized_occupations(levels: np.ndarray, nu: float, beta: float,
                             c: float) -> np.ndarray | None:
    """Occupations 1/(exp(-nu + beta a) - c), or None if positivity fails.

    Evaluated through u = exp(nu - beta a) as u/(1 - c u), which stays
    finite when exp(-nu + beta a) overflows.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        u = np.exp(nu - beta * levels)
        if not np.all(np.isfinite(u)):
            return None
        denom = 1.0 - c * u
    if not np.all(np.isfinite(denom)) or np.any(denom <= 0.0):
        return None
    return u / denom


def _generalized_newton(levels, n, D, c, nu, beta, tol, max_iter):
    """Damped Newton on the residual vector of the generalized occupation form.

    Step-size control keeps every denominator exp(-nu + beta a_i) - c
    positive.  Returns (nu, beta, occupations, residuals).
    """
    nu, beta = float(nu), float(beta)
    occ = _generalized_occupations(levels, nu, beta, c)
    if occ is None:
        raise DomainViolation("initial point violates occupation positivity")
    for _ in range(max_iter):
        F = np.array([occ.sum() - n, (levels * occ).sum() - D])
        if abs(F[0]) < tol and abs(F[1]) < tol:
            return nu, beta, occ, (abs(float(F[0])), abs(float(F[1])))
        # d occ_i / d nu = occ_i (1 + c occ_i);  d occ_i / d beta = -a_i * same
        w = occ * (1.0 + c * occ)
        J = np.array([
            [w.sum(), -(levels * w).sum()],
            [(levels * w).sum(), -(levels * levels * w).sum()],
        ])
        try:
            delta = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(max_iter, f"singular Jacobian: {exc}") from exc
        norm0 = float(np.hypot(*F))
        s = 1.0
        moved = False
        positivity_seen = False
        while s >= 2.0 ** -40:
            cand_occ = _generalized_occupations(levels, nu + s * delta[0],
                                                beta + s * delta[1], c)
            if cand_occ is not None:
                positivity_seen = True
                F2 = np.array([cand_occ.sum() - n, (levels * cand_occ).sum() - D])
                if float(np.hypot(*F2)) < norm0:
                    nu, beta = float(nu + s * delta[0]), float(beta + s * delta[1])
                    occ = cand_occ
                    moved = True
                    break
            s *= 0.5
        if not moved:
            if not positivity_seen:
                raise DomainViolation("no positivity-preserving Newton step exists")
            raise NoConvergence(max_iter, f"residual stalled at {tuple(abs(F))}")
    raise NoConvergence(max_iter, "generalized solve budget exhausted")


def solve_generalized(params: EconomyParams, c: float, tol: float = _DEFAULT_TOL,
                      max_iter: int = 200) -> EquilibriumSolution:
    """Solve the generalized occupation form n_i = 1/(exp(-nu+beta a_i) - c).

    Starts from the c = 0 Boltzmann solution and continues in c toward the
    target, halving the increment whenever the damped Newton inner solve
    loses positivity or stalls.  c = 0 reproduces solve_boltzmann.

    Raises DomainViolation when no positivity-preserving path exists (the
    solver asserts no feasibility theory for general c) and NoConvergence on
    a stalled residual.
    """
    params = validate(params)
    base = solve_boltzmann(params, tol=tol, max_iter=max_iter)
    levels = np.asarray(params.levels, dtype=float)
    n, D = params.n, params.D

    nu, beta = base.multipliers.nu, base.multipliers.beta
    if c == 0.0:
        # still route through the generalized occupation formula so the
        # algebraic reduction to the Boltzmann form is exercised, not assumed
        nu, beta, occ, res = _generalized_newton(levels, n, D, 0.0, nu, beta, tol, max_iter)
        return EquilibriumSolution(Multipliers(nu, beta, 0.0),
                                   tuple(float(x) for x in occ), res)

    c_cur = 0.0
    dc = c
    while c_cur != c:
        c_try = c_cur + dc
        if (dc > 0 and c_try > c) or (dc < 0 and c_try < c):
            c_try = c
        try:
            nu, beta, occ, res = _generalized_newton(levels, n, D, c_try, nu, beta, tol, max_iter)
            c_cur = c_try
            dc = c - c_cur  # retry the full remaining distance after progress
        except (DomainViolation, NoConvergence) as exc:
            dc *= 0.5
            if abs(dc) < 1e-8 * abs(c):
                # note: for c < 0 occupations are bounded by 1/|c| each, so
                # instances with n > g/|c| have no solution at all
                if isinstance(exc, DomainViolation):
                    raise DomainViolation(
                        f"no positivity-preserving path from c=0 to c={c}") from exc
                raise NoConvergence(
                    max_iter,
                    f"continuation stalled at c={c_cur:g} en route to c={c:g}; "
                    f"the instance may admit no solution there",
                ) from exc
    return EquilibriumSolution(Multipliers(nu, beta, c),
                               tuple(float(x) for x in occ), res)


def log_multinomial_weight(occupation: OccupationVector) -> float:
    """ln(n! / prod n_i!) by log-gamma accumulation (overflow-free)."""
    counts = occupation.counts
    total = sum(counts)
    return math.lgamma(total + 1) - sum(math.lgamma(k + 1) for k in counts)


def _exact_multinomial(counts: tuple[int, ...]) -> int:
    """n!/prod(n_i!) as an exact integer (product of binomials)."""
    total = 0
    weight = 1
    for k in counts:
        total += k
        weight *= math.comb(total, k)
    return weight


@dataclass(frozen=True)
class EnumerationResult:
    """All integer occupation vectors meeting both constraints.

    weights are exact big-integer multinomial coefficients; log_weights the
    matching ln values.  argmax is the maximum-weight vector with ties broken
    toward the lexicographically smallest counts (None for an empty set).
    """

    vectors: tuple[OccupationVector, ...]
    weights: tuple[int, ...]
    log_weights: tuple[float, ...]
    argmax: OccupationVector | None


def enumerate_feasible(params: EconomyParams, max_vectors: int = 500_000) -> EnumerationResult:
    """Exhaustively list integer allocations with sum n_i = n, sum a_i n_i = D.

    Levels and D must sit on a common integer lattice; n must be integral.
    Raises InstanceTooLarge past max_vectors feasible vectors.  Determinism:
    vectors are emitted in lexicographically increasing order of counts.
    """
    if params.n != int(params.n) or params.n < 0:
        raise DomainError(f"enumeration needs an integral non-negative n, got {params.n}")
    n = int(params.n)
    if n == 0:
        # empty economy: a single empty allocation iff there is no demand
        if params.D == 0:
            empty = OccupationVector((0,) * params.g)
            return EnumerationResult((empty,), (1,), (0.0,), empty)
        return EnumerationResult((), (), (), None)
    validate(params)
    units_all, _ = integer_lattice((*params.levels, params.D))
    units, demand = units_all[:-1], units_all[-1]

    found: list[tuple[int, ...]] = []
    prefix: list[int] = [0] * params.g

    def descend(idx: int, workers: int, dem: int):
        if idx == 0:
            if units[0] * workers == dem:
                prefix[0] = workers
                found.append(tuple(prefix))
                if len(found) > max_vectors:
                    raise InstanceTooLarge(
                        f"more than {max_vectors} feasible vectors; raise the cap to enumerate")
            return
        ui, u_lo, u_hi = units[idx], units[0], units[idx - 1]
        # occupancy k of sector idx must leave a demand the lower sectors can meet:
        #   (workers-k)*u_lo <= dem - k*ui <= (workers-k)*u_hi
        k_hi = min(workers, (dem - workers * u_lo) // (ui - u_lo))
        k_lo = max(0, -((-(dem - workers * u_hi)) // (ui - u_hi)))  # ceil division
        for k in range(k_lo, k_hi + 1):
            prefix[idx] = k
            descend(idx - 1, workers - k, dem - k * ui)
        prefix[idx] = 0

    descend(params.g - 1, n, demand)
    found.sort()
    vectors = tuple(OccupationVector(counts) for counts in found)
    weights = tuple(_exact_multinomial(v.counts) for v in vectors)
    log_weights = tuple(log_multinomial_weight(v) for v in vectors)
    argmax = None
    if vectors:
        best = max(range(len(vectors)), key=lambda j: (weights[j], [-x for x in vectors[j].counts]))
        argmax = vectors[best]
    return EnumerationResult(vectors, weights, log_weights, argmax)


@dataclass(frozen=True)
class StirlingReport:
    """Exact argmax versus the rounded continuous solution.

    log_weight_gap = ln w(exact argmax) - ln w(projected) >= 0.
    small_n_caveat flags instances where the large-n approximation behind
    the continuous solution is not trustworthy.
    """

    exact_argmax: OccupationVector
    projected: OccupationVector
    coincide: bool
    log_weight_gap: float
    small_n_caveat: bool


SMALL_N_THRESHOLD = 20


def stirling_consistency(params: EconomyParams, tol: float = _DEFAULT_TOL,
                         max_vectors: int = 500_000) -> StirlingReport:
    """Compare the enumeration argmax with the projected Boltzmann solution.

    The real-valued solution is projected onto the feasible integer set by
    L1 distance (ties toward the lexicographically smallest vector).
    """
    enumeration = enumerate_feasible(params, max_vectors=max_vectors)
    if enumeration.argmax is None:
        raise DomainError("no feasible integer vectors to compare against")
    solution = solve_boltzmann(params, tol=tol)
    real = np.asarray(solution.occupations)

    def l1(vec: OccupationVector) -> float:
        return float(np.abs(np.asarray(vec.counts, dtype=float) - real).sum())

    projected = min(enumeration.vectors, key=lambda v: (l1(v), v.counts))
    gap = (log_multinomial_weight(enumeration.argmax) - log_multinomial_weight(projected))
    return StirlingReport(
        exact_argmax=enumeration.argmax,
        projected=projected,
        coincide=projected == enumeration.argmax,
        log_weight_gap=gap,
        small_n_caveat=params.n < SMALL_N_THRESHOLD,
    )
