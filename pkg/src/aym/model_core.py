"""Shared domain types and validation for the sectoral productivity model.

An economy has g sectors with output-per-worker levels a_1 < ... < a_g,
n workers to allocate, and an exogenous aggregate demand D that total
output must meet.  Equilibria allocate workers so that

    sum_i n_i = n        (worker conservation)
    sum_i a_i n_i = D    (demand / GDP constraint)

Both the discrete solvers and the continuous-productivity law build on the
types defined here.  All types are immutable value objects; share freely
across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    DomainError,
    EmptyLadder,
    InfeasibleDemand,
    NonMonotoneLevels,
)


@dataclass(frozen=True)
class EconomyParams:
    """Economy description.

    levels: sector productivities in productivity units, strictly increasing
        (a zero minimum is allowed for the zero-minimum binning mode).
    n: worker count; integral for enumeration/sampling, may be real for
        continuum work.
    D: aggregate demand in productivity*workers.
    a0: minimal productivity; defaults to the smallest level.
    """

    levels: tuple[float, ...]
    n: float
    D: float
    a0: float | None = None  # None resolves to the smallest level

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(float(a) for a in self.levels))
        object.__setattr__(self, "n", float(self.n))
        object.__setattr__(self, "D", float(self.D))
        if self.a0 is None:
            object.__setattr__(self, "a0", self.levels[0] if self.levels else 0.0)
        else:
            object.__setattr__(self, "a0", float(self.a0))

    @property
    def g(self) -> int:
        return len(self.levels)

    @property
    def mean_demand(self) -> float:
        """Demand per worker D/n."""
        return self.D / self.n


def make_ladder(a0: float, g: int, n: float, D: float) -> EconomyParams:
    """Arithmetic-ladder economy with levels a_i = i*a0 for i = 1..g."""
    if a0 <= 0:
        raise DomainError("ladder step a0 must be positive")
    if g < 1:
        raise EmptyLadder("ladder needs at least one sector")
    return EconomyParams(tuple(i * a0 for i in range(1, g + 1)), n, D, a0)


def validate(params: EconomyParams) -> EconomyParams:
    """Check all EconomyParams invariants; return the params unchanged.

    Idempotent.  Feasibility uses the closed interval, so D on the hull
    boundary is accepted (it forces a degenerate occupation).
    """
    if params.g == 0:
        raise EmptyLadder("levels must contain at least one sector")
    for lo, hi in zip(params.levels, params.levels[1:]):
        if not lo < hi:
            raise NonMonotoneLevels(f"levels must be strictly increasing, got {lo} before {hi}")
    if params.levels[0] < 0:
        raise DomainError("productivity levels must be non-negative")
    if not (params.n > 0 and math.isfinite(params.n)):
        raise DomainError(f"worker count must be positive and finite, got {params.n}")
    if not (params.D > 0 and math.isfinite(params.D)):
        raise DomainError(f"aggregate demand must be positive and finite, got {params.D}")
    lo, hi = params.levels[0] * params.n, params.levels[-1] * params.n
    if not (lo <= params.D <= hi):
        raise InfeasibleDemand(f"demand {params.D} outside feasible hull [{lo}, {hi}]")
    if params.a0 < 0:
        raise DomainError("minimal productivity a0 must be non-negative")
    return params


@dataclass(frozen=True)
class OccupationVector:
    """Integer worker allocation across sectors.

    counts[i] is the number of workers in sector i; all non-negative.
    """

    counts: tuple[int, ...]

    def __post_init__(self):
        coerced = []
        for k in self.counts:
            if int(k) != k:
                raise DomainError(f"occupation counts must be integers, got {k}")
            if k < 0:
                raise DomainError(f"occupation counts must be non-negative, got {k}")
            coerced.append(int(k))
        object.__setattr__(self, "counts", tuple(coerced))

    @property
    def total(self) -> int:
        """Total worker count n = sum of counts."""
        return sum(self.counts)

    def output(self, levels: Sequence[float]) -> float:
        """Total output Z = sum_i a_i n_i for the given sector levels."""
        if len(levels) != len(self.counts):
            raise DomainError("levels and counts must have equal length")
        return sum(a * k for a, k in zip(levels, self.counts))


@dataclass(frozen=True)
class LadderRatio:
    """Dimensionless demand ratios of the ladder economy.

    r = (D/n)/a0 drives the closed-form ladder occupation (requires r > 1
    for positive occupations); r_tilde = (D/n)/delta_a is its analogue for
    zero-minimum binning with bin width delta_a.
    """

    r: float | None
    r_tilde: float
    delta_a: float


def ladder_ratio(params: EconomyParams, delta_a: float | None = None) -> LadderRatio:
    """Build the LadderRatio for an economy; delta_a defaults to a0.

    With a0 = 0 an explicit positive delta_a is required (zero-minimum mode).
    """
    mean = params.mean_demand
    if params.a0 > 0:
        r = mean / params.a0
        if r <= 1:
            raise DomainError(f"demand ratio r = {r} must exceed 1 for a ladder equilibrium")
        width = params.a0 if delta_a is None else float(delta_a)
    else:
        r = None
        if delta_a is None:
            raise DomainError("zero-minimum mode needs an explicit bin width delta_a")
        width = float(delta_a)
    if width <= 0:
        raise DomainError("bin width delta_a must be positive")
    r_tilde = mean / width
    if r_tilde <= 0:
        raise DomainError("r_tilde must be positive")
    return LadderRatio(r=r, r_tilde=r_tilde, delta_a=width)


def integer_lattice(values: Sequence[float], rel_tol: float = 1e-9,
                    max_multiple: int = 10**6) -> tuple[tuple[int, ...], float]:
    """Express values as integer multiples of a common unit.

    Returns (integer multiples, unit).  Raises DomainError when a value is
    not recognizably rational, the set has no common unit (all zero), or
    the implied lattice is finer than max_multiple steps (a float is always
    rational, so the multiple cap is what rejects irrational inputs).
    """
    fracs = []
    for x in values:
        x = float(x)
        if not math.isfinite(x):
            raise DomainError(f"lattice values must be finite, got {x}")
        f = Fraction(x).limit_denominator(10**12)
        if abs(float(f) - x) > rel_tol * max(1.0, abs(x)):
            raise DomainError(f"value {x} is not on a recognizable integer lattice")
        fracs.append(f)
    unit = Fraction(0)
    for f in fracs:
        unit = _fraction_gcd(unit, f)
    if unit == 0:
        raise DomainError("cannot derive a lattice unit from all-zero values")
    units = tuple(int(f / unit) for f in fracs)
    if max(abs(u) for u in units) > max_multiple:
        raise DomainError(
            f"values share no common unit within {max_multiple} lattice steps")
    return units, float(unit)


def _fraction_gcd(a: Fraction, b: Fraction) -> Fraction:
    if b == 0:
        return abs(a)
    if a == 0:
        return abs(b)
    return Fraction(
        math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
        a.denominator * b.denominator,
    )


# --- JSON interchange (field names are part of the CLI contract) ---

def params_to_json(params: EconomyParams) -> str:
    payload = {
        "levels": list(params.levels),
        "n": params.n,
        "D": params.D,
        "a0": params.a0,
    }
    return json.dumps(payload, indent=2) + "\n"


def params_from_json(text: str) -> EconomyParams:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid economy JSON: {exc}") from exc
    try:
        return EconomyParams(
            levels=tuple(payload["levels"]),
            n=payload["n"],
            D=payload["D"],
            a0=payload.get("a0"),
        )
    except (KeyError, TypeError) as exc:
        raise DomainError(f"economy JSON needs fields levels, n, D: {exc}") from exc
