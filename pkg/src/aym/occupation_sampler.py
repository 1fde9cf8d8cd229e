"""Metropolis sampling of occupation vectors on the conservation surface.

Target law: the multinomial weight n!/prod(n_i!) restricted to integer
allocations with both sums conserved.  Proposals move one worker up k rungs
and another worker down k rungs, so worker count and total output are
conserved exactly at every step.  A proposal is a uniformly chosen triple
(up-source i, down-source j, rung distance k) from the feasible set of the
current state; triples whose net effect is a no-op (two workers swapping
sectors) are excluded.  Because the feasible-triple count varies between
states, the acceptance ratio carries the reverse/forward proposal
probabilities:

    A(x -> y) = min(1, [w(y) q(y -> x)] / [w(x) q(x -> y)])
    q(x -> y) = #(triples of x producing y) / #(triples of x)

Chains are deterministic given (params, config): the generator is
numpy's PCG64, recorded in the summary as "numpy:PCG64".
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoFeasibleState, InstanceTooLarge
from .model_core import EconomyParams, OccupationVector, integer_lattice, validate
from .discrete_equilibrium import enumerate_feasible, log_multinomial_weight

RNG_ALGORITHM = "numpy:PCG64"

_STATE_CACHE_CAP = 200_000  # per-chain cache of move sets, keyed by state

IRREDUCIBILITY_VERIFIED = "verified"
IRREDUCIBILITY_FAILED = "failed"
IRREDUCIBILITY_UNCHECKED = "unchecked"


@dataclass(frozen=True)
class ChainConfig:
    """Metropolis chain parameters; burn_in < steps, thin >= 1."""

    steps: int
    burn_in: int = 0
    seed: int = 0
    thin: int = 1

    def __post_init__(self):
        if self.steps < 1:
            raise DomainError("steps must be positive")
        if not 0 <= self.burn_in < self.steps:
            raise DomainError("burn_in must satisfy 0 <= burn_in < steps")
        if self.thin < 1:
            raise DomainError("thin must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must fit a 64-bit unsigned integer")


@dataclass(frozen=True)
class SampleSummary:
    """Recorded-state statistics of one (or one merged group of) chain(s).

    visit_frequencies maps occupation tuples to empirical probabilities
    (they sum to 1); irreducibility is "verified" / "failed" when the
    instance was small enough to enumerate and check connectivity,
    "unchecked" otherwise (an honest warning flag, not an error).
    """

    visit_frequencies: dict[tuple[int, ...], float]
    mean_occupation: tuple[float, ...]
    acceptance_rate: float
    sample_count: int
    rng_algorithm: str
    irreducibility: str

    def to_json_dict(self) -> dict:
        freqs = {";".join(map(str, state)): freq
                 for state, freq in sorted(self.visit_frequencies.items())}
        return {
            "rng_algorithm": self.rng_algorithm,
            "irreducibility": self.irreducibility,
            "sample_count": self.sample_count,
            "acceptance_rate": self.acceptance_rate,
            "mean_occupation": list(self.mean_occupation),
            "visit_frequencies": freqs,
        }

    def to_csv(self) -> str:
        lines = ["state,frequency"]
        for state, freq in sorted(self.visit_frequencies.items()):
            lines.append(f"{';'.join(map(str, state))},{freq:.17g}")
        return "\n".join(lines) + "\n"


def _move_candidates(counts: tuple[int, ...], units: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Candidate states from all feasible non-identity triples, one per triple.

    Duplicates are intentional: a candidate reachable through several
    triples has proportionally higher proposal probability.
    """
    g = len(counts)
    out = []
    scratch = list(counts)
    for i in range(g):
        if counts[i] == 0:
            continue
        for k in range(1, g - i):
            rise = units[i + k] - units[i]
            for j in range(k, g):
                if counts[j] == 0:
                    continue
                if units[j] - units[j - k] != rise:
                    continue  # demand not conserved on a non-uniform lattice
                scratch[i] -= 1
                scratch[i + k] += 1
                scratch[j] -= 1
                scratch[j - k] += 1
                cand = tuple(scratch)
                scratch[i] += 1
                scratch[i + k] -= 1
                scratch[j] += 1
                scratch[j - k] -= 1
                if min(cand) >= 0 and cand != counts:
                    out.append(cand)
    return out


def propose_pair_move(state: OccupationVector, levels, rng) -> OccupationVector:
    """One constraint-preserving proposal; returns the state itself when no move exists."""
    units, _ = integer_lattice(levels)
    if len(units) != len(state.counts):
        raise DomainError("levels and state must have equal length")
    cands = _move_candidates(state.counts, units)
    if not cands:
        return state
    return OccupationVector(cands[int(rng.integers(len(cands)))])


def _first_feasible(units: tuple[int, ...], n: int, demand: int) -> tuple[int, ...] | None:
    """First integer allocation meeting both constraints, by backtracking."""
    g = len(units)
    prefix = [0] * g

    def descend(idx: int, workers: int, dem: int) -> bool:
        if idx == 0:
            if units[0] * workers == dem:
                prefix[0] = workers
                return True
            return False
        ui, u_lo, u_hi = units[idx], units[0], units[idx - 1]
        k_hi = min(workers, (dem - workers * u_lo) // (ui - u_lo))
        k_lo = max(0, -((-(dem - workers * u_hi)) // (ui - u_hi)))
        for k in range(k_lo, k_hi + 1):
            prefix[idx] = k
            if descend(idx - 1, workers - k, dem - k * ui):
                return True
        prefix[idx] = 0
        return False

    if descend(g - 1, n, demand):
        return tuple(prefix)
    return None


def _check_irreducibility(params: EconomyParams, units, start: tuple[int, ...],
                          max_enumeration: int) -> str:
    try:
        enumeration = enumerate_feasible(params, max_vectors=max_enumeration)
    except InstanceTooLarge:
        return IRREDUCIBILITY_UNCHECKED
    all_states = {v.counts for v in enumeration.vectors}
    seen = {start}
    frontier = [start]
    while frontier:
        state = frontier.pop()
        for cand in _move_candidates(state, units):
            if cand not in seen:
                seen.add(cand)
                frontier.append(cand)
    return IRREDUCIBILITY_VERIFIED if seen == all_states else IRREDUCIBILITY_FAILED


def run_chain(params: EconomyParams, config: ChainConfig,
              max_enumeration: int = 200_000) -> SampleSummary:
    """Run one Metropolis chain and summarize the post-burn-in visits.

    Requires an integer-lattice instance with at least one feasible
    allocation (NoFeasibleState otherwise).  Identical (params, config)
    give a bit-identical summary.
    """
    params = validate(params)
    if params.n != int(params.n):
        raise DomainError(f"sampling needs an integral worker count, got {params.n}")
    n = int(params.n)
    units_all, _ = integer_lattice((*params.levels, params.D))
    units, demand = units_all[:-1], units_all[-1]

    start = _first_feasible(units, n, demand)
    if start is None:
        raise NoFeasibleState("no integer allocation satisfies both constraints")
    irreducibility = _check_irreducibility(params, units, start, max_enumeration)

    rng = np.random.Generator(np.random.PCG64(config.seed))

    # per-state cache: (candidates, multiplicity of each candidate, log weight)
    cache: dict[tuple[int, ...], tuple[list, Counter, float]] = {}

    def info(state: tuple[int, ...]):
        entry = cache.get(state)
        if entry is None:
            cands = _move_candidates(state, units)
            entry = (cands, Counter(cands), log_multinomial_weight(OccupationVector(state)))
            if len(cache) < _STATE_CACHE_CAP:
                cache[state] = entry
        return entry

    state = start
    visits: Counter = Counter()
    mean_acc = np.zeros(params.g)
    accepted = 0
    proposals = 0
    recorded = 0
    for step in range(config.steps):
        cands, mult, logw = info(state)
        if cands:
            proposals += 1
            cand = cands[int(rng.integers(len(cands)))]
            c_cands, c_mult, c_logw = info(cand)
            log_ratio = ((c_logw - logw)
                         + math.log(c_mult[state]) - math.log(len(c_cands))
                         - math.log(mult[cand]) + math.log(len(cands)))
            if log_ratio >= 0.0 or rng.random() < math.exp(log_ratio):
                state = cand
                accepted += 1
        assert sum(state) == n and sum(u * c for u, c in zip(units, state)) == demand
        if step >= config.burn_in and (step - config.burn_in) % config.thin == 0:
            visits[state] += 1
            mean_acc += state
            recorded += 1

    freqs = {s: cnt / recorded for s, cnt in visits.items()}
    return SampleSummary(
        visit_frequencies=freqs,
        mean_occupation=tuple(float(x) for x in mean_acc / recorded),
        acceptance_rate=accepted / proposals if proposals else 0.0,
        sample_count=recorded,
        rng_algorithm=RNG_ALGORITHM,
        irreducibility=irreducibility,
    )


def merge_summaries(summaries: list[SampleSummary]) -> SampleSummary:
    """Associative merge: frequencies and means averaged by sample count."""
    if not summaries:
        raise DomainError("nothing to merge")
    total = sum(s.sample_count for s in summaries)
    freqs: dict[tuple[int, ...], float] = {}
    for s in summaries:
        for state, f in s.visit_frequencies.items():
            freqs[state] = freqs.get(state, 0.0) + f * (s.sample_count / total)
    g = len(summaries[0].mean_occupation)
    mean = tuple(
        sum(s.mean_occupation[j] * s.sample_count for s in summaries) / total
        for j in range(g)
    )
    acceptance = sum(s.acceptance_rate * s.sample_count for s in summaries)
    flags = {s.irreducibility for s in summaries}
    if IRREDUCIBILITY_FAILED in flags:
        merged_irr = IRREDUCIBILITY_FAILED
    elif IRREDUCIBILITY_UNCHECKED in flags:
        merged_irr = IRREDUCIBILITY_UNCHECKED
    else:
        merged_irr = IRREDUCIBILITY_VERIFIED
    return SampleSummary(
        visit_frequencies=freqs,
        mean_occupation=mean,
        acceptance_rate=acceptance / total,
        sample_count=total,
        rng_algorithm=summaries[0].rng_algorithm,
        irreducibility=merged_irr,
    )
