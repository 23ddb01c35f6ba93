"""Pure-Python Monte Carlo engine.

Works on chain/rule objects directly, so it covers arbitrary chains and
closure rules. It is also the fallback backend: the compiled kernels follow
the same stepping contract (one PCG32 draw per step, cumulative-scan
successor selection, per-trial substreams), so both backends produce
identical counters for identical seeds.
"""

from ..chain import select_successor
from .seeds import Pcg32


def transform_counts(chain, rule, x0, trials, horizon, seed):
    """Counts of the stopped state over `trials` paths; paths not stopping by
    `horizon` count as unresolved."""
    counts = {}
    unresolved = 0
    decode = chain.decode
    support = chain.support
    for t in range(trials):
        rng = Pcg32(seed, t)
        state = x0
        key = decode(state)
        mem = rule.initial_memory(key)
        stopped = False
        for _ in range(horizon):
            nxt = select_successor(support(state), rng.uniform())
            nkey = decode(nxt)
            mem, stopped = rule.update(mem, key, nkey)
            state, key = nxt, nkey
            if stopped:
                break
        if stopped:
            counts[state] = counts.get(state, 0) + 1
        else:
            unresolved += 1
    return counts, unresolved


def _iterate_times(rule, keys, upto):
    """Stop-epoch set of the iterated rule along `keys`, resolved through
    min(upto, last resolvable epoch); the trailing unresolved iterate, if the
    path ends first, contributes nothing below `upto`."""
    times = {0}
    mem = rule.initial_memory(keys[0])
    t = 0
    i = 1
    while i < len(keys) and t < upto:
        mem, stopped = rule.update(mem, keys[i - 1], keys[i])
        if stopped:
            t = i
            times.add(t)
            mem = rule.initial_memory(keys[i])
        i += 1
    return times


def recovery_counts(chain, rule, rho, x0, n, trials, horizon, seed):
    """(hits, misses, unresolved) for the event that n plus the recovery
    value on the shifted path lands on a stop epoch."""
    hits = misses = unresolved = 0
    decode = chain.decode
    support = chain.support
    for t in range(trials):
        rng = Pcg32(seed, t)
        keys = [decode(x0)]
        state = x0
        for _ in range(horizon):
            state = select_successor(support(state), rng.uniform())
            keys.append(decode(state))
        value = rho.evaluate(keys, n)
        if value is None or n + value > horizon:
            unresolved += 1
            continue
        target = n + value
        if target in _iterate_times(rule, keys, target):
            hits += 1
        else:
            misses += 1
    return hits, misses, unresolved


def commitment_counts(chain, rule, x0, trials, step_cap, radius, seed):
    """Iterate the rule until the first coordinate at a stop epoch reaches
    +-radius; (plus, minus, unresolved-at-cap) counts."""
    plus = minus = unresolved = 0
    decode = chain.decode
    support = chain.support

    def first_coord(key):
        return key[0] if isinstance(key, tuple) else key

    for t in range(trials):
        rng = Pcg32(seed, t)
        state = x0
        key = decode(state)
        mem = rule.initial_memory(key)
        steps = 0
        outcome = 0
        while steps < step_cap:
            nxt = select_successor(support(state), rng.uniform())
            nkey = decode(nxt)
            mem, stopped = rule.update(mem, key, nkey)
            state, key = nxt, nkey
            steps += 1
            if stopped:
                level = first_coord(key)
                if level >= radius:
                    outcome = 1
                    break
                if level <= -radius:
                    outcome = -1
                    break
                mem = rule.initial_memory(key)
        if outcome > 0:
            plus += 1
        elif outcome < 0:
            minus += 1
        else:
            unresolved += 1
    return plus, minus, unresolved


class PyBackend:
    """Fallback backend: the object engine under the backend interface."""

    name = "python"

    @staticmethod
    def supports(chain, rule=None, rho=None):
        return True

    transform_counts = staticmethod(transform_counts)
    recovery_counts = staticmethod(recovery_counts)
    commitment_counts = staticmethod(commitment_counts)
