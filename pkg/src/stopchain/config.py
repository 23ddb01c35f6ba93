"""Global knobs: arithmetic mode, state budget, default seed, budget profiles."""

from fractions import Fraction

RATIONAL = "rational"
FLOAT = "float"

#: Guard for exact DP / window materialization; exceeding it raises, never truncates.
DEFAULT_STATE_BUDGET = 10**6

#: Every CLI run and example report is seeded; this is the documented default.
DEFAULT_SEED = 20240927

#: Sum/normalization tolerance for float-mode invariants.
FLOAT_TOL = 1e-12

#: Windows at most this large use direct dense solves; larger ones use
#: iterative partial sums (memory-lean path).
DENSE_SOLVE_LIMIT = 2000

#: Reported threshold for "consistent with recoverability" scan verdicts.
EPSILON_REPORT = 0.02

#: Default commitment radius for limit-event estimation on the split-rule walk.
COMMITMENT_RADIUS = 20

BUDGET_PROFILES = ("smoke", "desk", "extended")


def zero(mode):
    return Fraction(0) if mode == RATIONAL else 0.0


def one(mode):
    return Fraction(1) if mode == RATIONAL else 1.0


def as_number(value, mode):
    """Parse a JSON probability: 'num/den' strings in rational mode, floats otherwise."""
    if mode == RATIONAL:
        if isinstance(value, str):
            return Fraction(value)
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, Fraction):
            return value
        return Fraction(value).limit_denominator(10**12)
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def number_to_json(value):
    """Serialize a mass so it round-trips: Fractions as 'num/den', floats as-is."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return float(value)
