"""Chain core: transition functions, distributions, paths, n-step DP,
space-time lift, and window truncation.

State spaces are presented lazily through a successor oracle and never
materialized globally; anything global works on explicit finite windows with
escape-mass bookkeeping.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import config
from .config import FLOAT, RATIONAL
from .errors import BudgetExceededError, DomainError
from .states import StateRegistry
from ._mc.seeds import Pcg32


class TransitionFunction:
    """Locally finite stochastic kernel on an integer-encoded state space.

    `successors(key)` must return a deterministic, finite list of
    (key, mass) pairs with positive masses summing to one; the same list on
    every call. Rows are memoized on first access, which also pins the
    successor order used by samplers.
    """

    def __init__(self, successors, origin_key, *, mode=FLOAT, name="chain",
                 registry=None, kernel_spec=None, row_leftover=None):
        self._successors = successors
        self.mode = mode
        self.name = name
        self.registry = registry if registry is not None else StateRegistry()
        self.origin = self.registry.encode(origin_key)
        self._rows = {}
        self._kernel_spec = kernel_spec
        # Transformed chains carry unresolved mass per row; plain chains have none.
        self._row_leftover = row_leftover or {}

    def encode(self, key):
        return self.registry.encode(key)

    def decode(self, sid):
        return self.registry.decode(sid)

    def label(self, sid):
        return self.registry.label(sid)

    def support(self, x):
        """Successor row of state id `x` as a tuple of (id, mass) pairs."""
        row = self._rows.get(x)
        if row is None:
            key = self.registry.decode(x)
            raw = self._successors(key)
            if raw is None:
                raise DomainError(f"state {self.label(x)} outside chain domain")
            row = tuple((self.registry.encode(k), m) for k, m in raw)
            for _, m in row:
                if m <= 0:
                    raise DomainError(
                        f"nonpositive mass in row of {self.label(x)}")
            self._rows[x] = row
        return row

    def row_leftover(self, x):
        self.support(x)
        return self._row_leftover.get(x, config.zero(self.mode))

    def prob(self, x, y):
        for sid, m in self.support(x):
            if sid == y:
                return m
        return config.zero(self.mode)

    def kernel_spec(self):
        """Low-level stepper description for the compiled backend, or None."""
        return self._kernel_spec


@dataclass(frozen=True)
class Path:
    """Finite path prefix: states x_0..x_n observed from startTime t."""

    states: tuple
    start_time: int = 0

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def shifted(self, k):
        return Path(self.states[k:], self.start_time + k)

    def validate(self, chain):
        for a, b in zip(self.states, self.states[1:]):
            if chain.prob(a, b) <= 0:
                raise DomainError(
                    f"forbidden step {chain.label(a)} -> {chain.label(b)}")


@dataclass
class Distribution:
    """Finite sub-probability map plus explicit leftover (unresolved) mass."""

    masses: dict
    leftover: object
    mode: str = FLOAT

    def total(self):
        return sum(self.masses.values(), config.zero(self.mode)) + self.leftover

    def check(self, tol=config.FLOAT_TOL):
        total = self.total()
        if self.mode == RATIONAL:
            return total == 1 and all(m >= 0 for m in self.masses.values())
        return abs(total - 1.0) <= tol and all(m >= -tol for m in self.masses.values())

    def mass(self, sid):
        return self.masses.get(sid, config.zero(self.mode))

    def project(self, fn):
        """Push forward through `fn` on state ids; leftover is kept."""
        out = {}
        zero = config.zero(self.mode)
        for sid, m in self.masses.items():
            k = fn(sid)
            out[k] = out.get(k, zero) + m
        return Distribution(out, self.leftover, self.mode)

    def tv_distance(self, other):
        """Total variation against `other` on the union of resolved supports."""
        keys = set(self.masses) | set(other.masses)
        acc = sum(abs(float(self.mass(k)) - float(other.mass(k))) for k in keys)
        return 0.5 * (acc + abs(float(self.leftover) - float(other.leftover)))

    def as_labelled(self, chain):
        """Stable JSON form: sorted by label, masses round-trippable."""
        items = sorted(
            ((chain.label(sid), config.number_to_json(m))
             for sid, m in self.masses.items()),
            key=lambda kv: kv[0])
        return {"masses": items, "leftover": config.number_to_json(self.leftover)}


@dataclass
class RowReport:
    state: int
    total: object
    passed: bool
    deficit: object

    def as_json(self, chain):
        return {
            "state": chain.label(self.state),
            "sum": config.number_to_json(self.total),
            "pass": self.passed,
            "deficit": config.number_to_json(self.deficit),
        }


def row_check(chain, x):
    """Report the row sum of `x` and whether it satisfies stochasticity."""
    row = chain.support(x)
    total = sum((m for _, m in row), config.zero(chain.mode))
    if chain.mode == RATIONAL:
        passed = total == 1
    else:
        passed = abs(total - 1.0) <= config.FLOAT_TOL
    return RowReport(x, total, passed, config.one(chain.mode) - total)


def iterate_transition(chain, x, n, budget=config.DEFAULT_STATE_BUDGET):
    """Exact n-step law from `x` by forward DP over the lazy support.

    Locally finite range plus finite n means no truncation: leftover is 0.
    """
    if n < 0:
        raise DomainError("step count must be nonnegative")
    zero = config.zero(chain.mode)
    cur = {x: config.one(chain.mode)}
    for _ in range(n):
        nxt = {}
        for sid, m in cur.items():
            for t, p in chain.support(sid):
                nxt[t] = nxt.get(t, zero) + m * p
        if len(nxt) > budget:
            raise BudgetExceededError(
                f"{n}-step support exceeds the state budget", budget)
        cur = nxt
    return Distribution(cur, zero, chain.mode)


def select_successor(row, u):
    """Pick a successor from a uniform draw by cumulative scan.

    This is the selection contract mirrored by the compiled kernels: masses
    accumulate as doubles in row order, first prefix exceeding u wins.
    """
    acc = 0.0
    last = row[0][0]
    for sid, m in row:
        acc += float(m)
        last = sid
        if u < acc:
            return sid
    return last


def sample_path(chain, x, horizon, seed):
    """Simulate one path of length horizon+1; deterministic in (seed, x, horizon)."""
    if horizon < 0:
        raise DomainError("horizon must be nonnegative")
    rng = Pcg32(seed, 0)
    states = [x]
    cur = x
    for _ in range(horizon):
        cur = select_successor(chain.support(cur), rng.uniform())
        states.append(cur)
    return Path(tuple(states))


def space_time_lift(chain):
    """Kernel on (state, clock) pairs advancing the clock by one per step."""

    def successors(key):
        skey, t = key
        base = chain.support(chain.encode(skey))
        return [((chain.decode(sid), t + 1), m) for sid, m in base]

    return TransitionFunction(
        successors, (chain.decode(chain.origin), 0),
        mode=chain.mode, name=f"{chain.name}+clock")


@dataclass
class TruncatedChain:
    """Substochastic restriction of a chain to a finite ordered window."""

    chain: TransitionFunction
    window: tuple
    index: dict = field(init=False)
    rows: list = field(init=False)
    escape: list = field(init=False)

    def __post_init__(self):
        self.index = {sid: i for i, sid in enumerate(self.window)}
        if len(self.index) != len(self.window):
            raise DomainError("window contains repeated states")
        zero = config.zero(self.chain.mode)
        self.rows = []
        self.escape = []
        for sid in self.window:
            row = {}
            esc = self.chain.row_leftover(sid)
            for t, m in self.chain.support(sid):
                j = self.index.get(t)
                if j is None:
                    esc = esc + m
                else:
                    row[j] = row.get(j, zero) + m
            self.rows.append(row)
            self.escape.append(esc)

    def matrix(self):
        """Dense float copy of the substochastic window matrix."""
        n = len(self.window)
        mat = np.zeros((n, n))
        for i, row in enumerate(self.rows):
            for j, m in row.items():
                mat[i, j] = float(m)
        return mat

    def exact_rows(self):
        """Fraction rows for exact solves (rational-mode chains only)."""
        n = len(self.window)
        out = [[Fraction(0)] * n for _ in range(n)]
        for i, row in enumerate(self.rows):
            for j, m in row.items():
                out[i][j] = Fraction(m)
        return out

    def escape_mass(self, sid):
        return self.escape[self.index[sid]]


def truncate(chain, window_ids):
    if not window_ids:
        raise DomainError("window must be nonempty")
    return TruncatedChain(chain, tuple(window_ids))
