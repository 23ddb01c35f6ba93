"""Built-in chain constructors and the JSON chain-spec loader.

Built-in generators present infinite spaces lazily. Each one whose sampling
loop is hot enough to matter also publishes a kernel spec so the compiled
backend can step it without Python dispatch; the float probabilities in the
spec are the exact doubles the pure-Python sampler uses, which keeps both
backends on identical streams.
"""

import json
import random as _stdlib_random

from . import config
from .config import FLOAT, RATIONAL
from .chain import TransitionFunction
from .errors import SpecError

CHAIN_SCHEMA = "stopchain/chain/1"


def deterministic_walk(mode=RATIONAL):
    """p(n, n+1) = 1 on the nonnegative integers."""
    one = config.one(mode)

    def successors(n):
        return [(n + 1, one)]

    return TransitionFunction(successors, 0, mode=mode, name="deterministic_walk")


def srw_zd(d, mode=FLOAT):
    """Simple symmetric nearest-neighbor walk on the d-dimensional lattice."""
    if d < 1:
        raise SpecError("srw_zd needs d >= 1")
    if mode == RATIONAL:
        from fractions import Fraction
        p = Fraction(1, 2 * d)
    else:
        p = 1.0 / (2 * d)

    if d == 1:
        def successors(x):
            return [(x + 1, p), (x - 1, p)]
        origin = 0
    else:
        def successors(x):
            out = []
            for i in range(d):
                up = list(x)
                up[i] += 1
                down = list(x)
                down[i] -= 1
                out.append((tuple(up), p))
                out.append((tuple(down), p))
            return out
        origin = (0,) * d

    spec = {"family": "srw_zd", "d": d, "p": float(p)} if d <= 3 else None
    return TransitionFunction(successors, origin, mode=mode, name=f"srw_z{d}",
                              kernel_spec=spec)


def lazy_birth_death(up, down, hold, mode=RATIONAL):
    """Birth-death walk on the nonnegative integers; the down-step mass folds
    into holding at 0."""
    up = config.as_number(up, mode)
    down = config.as_number(down, mode)
    hold = config.as_number(hold, mode)
    if up <= 0 or down < 0 or hold < 0:
        raise SpecError("birth-death masses must be positive up, nonnegative rest")
    total = up + down + hold
    if (mode == RATIONAL and total != 1) or (mode == FLOAT and abs(total - 1.0) > config.FLOAT_TOL):
        raise SpecError("birth-death masses must sum to 1")

    def successors(n):
        if n == 0:
            row = [(1, up)]
            if hold + down > 0:
                row.append((0, hold + down))
            return row
        row = [(n + 1, up)]
        if hold > 0:
            row.append((n, hold))
        if down > 0:
            row.append((n - 1, down))
        return row

    spec = {
        "family": "birth_death",
        "up": float(up), "hold": float(hold), "down": float(down),
        "p0_up": float(up), "p0_hold": float(hold + down),
    }
    return TransitionFunction(successors, 0, mode=mode, name="lazy_birth_death",
                              kernel_spec=spec)


def free_semigroup(probs, labels=None, mode=RATIONAL):
    """Right random walk on the free semigroup: words over len(probs) letters,
    each step appends letter g with mass probs[g]."""
    probs = [config.as_number(p, mode) for p in probs]
    if not probs or any(p <= 0 for p in probs):
        raise SpecError("semigroup letter masses must be positive")
    total = sum(probs)
    if (mode == RATIONAL and total != 1) or (mode == FLOAT and abs(total - 1.0) > config.FLOAT_TOL):
        raise SpecError("semigroup letter masses must sum to 1")
    if labels is None:
        labels = [chr(ord("a") + g) for g in range(len(probs))]

    def successors(word):
        return [(word + (g,), probs[g]) for g in range(len(probs))]

    chain = TransitionFunction(
        successors, (), mode=mode, name="free_semigroup",
        kernel_spec={"family": "semigroup", "probs": tuple(float(p) for p in probs)})
    chain.letter_labels = tuple(labels)
    return chain


def word_label(chain, word):
    if not word:
        return "e"
    return "".join(chain.letter_labels[g] for g in word)


def absorbing_flip(mode=RATIONAL):
    """Two-state factor: 0 absorbs; 1 flips to 0 or stays, each with mass 1/2."""
    half = config.as_number("1/2", mode)
    one = config.one(mode)

    def successors(d):
        if d == 0:
            return [(0, one)]
        return [(0, half), (1, half)]

    return TransitionFunction(successors, 0, mode=mode, name="absorbing_flip")


def product(first, second, origin=None, name=None):
    """Independent product chain on pairs; successor order is the cross
    product, outer factor first."""
    if first.mode != second.mode:
        raise SpecError("product factors must share an arithmetic mode")

    def successors(key):
        k1, k2 = key
        row1 = first.support(first.encode(k1))
        row2 = second.support(second.encode(k2))
        out = []
        for a, pa in row1:
            ka = first.decode(a)
            for b, pb in row2:
                out.append(((ka, second.decode(b)), pa * pb))
        return out

    if origin is None:
        origin = (first.decode(first.origin), second.decode(second.origin))
    spec = None
    f1, f2 = first.kernel_spec(), second.kernel_spec()
    if f1 is not None and f1["family"] == "birth_death" and second.name == "absorbing_flip":
        spec = dict(f1, family="product_bd_flip")
    return TransitionFunction(
        successors, origin, mode=first.mode,
        name=name or f"product({first.name},{second.name})", kernel_spec=spec)


def delayed_pair(up="3/8", down="1/8", hold="1/2", mode=RATIONAL):
    """Transient lazy birth-death paired with the absorbing flip factor."""
    return product(lazy_birth_death(up, down, hold, mode=mode),
                   absorbing_flip(mode=mode), name="delayed_pair")


def windowed_drift(seed, width=50, min_up=0.2):
    """Randomized local chain: inside [0, width) random nearest-neighbor rows
    with at least `min_up` upward mass; at and beyond `width` a one-way +1
    drift, so exits from the window are permanent and the chain is transient.
    """
    rng = _stdlib_random.Random(seed)
    rows = {}
    for x in range(width):
        up = rng.uniform(min_up, 0.9)
        rest = 1.0 - up
        hold = rng.uniform(0.0, rest)
        down = rest - hold
        row = [(x + 1, up)]
        if x == 0:
            hold = hold + down
            down = 0.0
        if hold > 0:
            row.append((x, hold))
        if down > 0:
            row.append((x - 1, down))
        rows[x] = row

    def successors(n):
        if n in rows:
            return rows[n]
        return [(n + 1, 1.0)]

    return TransitionFunction(successors, 0, mode=FLOAT,
                              name=f"windowed_drift[{seed}]")


def explicit_chain(rows, origin, mode, labels=None):
    """Chain from explicit integer-keyed rows: {state: [(state, mass), ...]}."""
    table = {}
    for x, row in rows.items():
        table[int(x)] = [(int(y), config.as_number(m, mode)) for y, m in row]

    def successors(n):
        row = table.get(n)
        if row is None:
            return None
        return row

    chain = TransitionFunction(successors, origin, mode=mode, name="explicit")
    if labels:
        for sid_key, label in labels.items():
            chain.registry.set_label(chain.encode(int(sid_key)), label)
    return chain


_GENERATORS = {
    "deterministic_walk": lambda params, mode: deterministic_walk(mode=mode),
    "srw_zd": lambda params, mode: srw_zd(int(params["d"]), mode=mode),
    "lazy_birth_death": lambda params, mode: lazy_birth_death(
        params["up"], params["down"], params["hold"], mode=mode),
    "free_semigroup": lambda params, mode: free_semigroup(
        params["probs"], labels=params.get("labels"), mode=mode),
    "absorbing_flip": lambda params, mode: absorbing_flip(mode=mode),
    "delayed_pair": lambda params, mode: delayed_pair(
        params.get("up", "3/8"), params.get("down", "1/8"),
        params.get("hold", "1/2"), mode=mode),
    "windowed_drift": lambda params, mode: windowed_drift(
        int(params["seed"]), int(params.get("width", 50))),
}


def chain_from_spec(spec):
    """Build a chain from a parsed JSON spec (rows or a named generator)."""
    if not isinstance(spec, dict):
        raise SpecError("chain spec must be a JSON object")
    schema = spec.get("schema", CHAIN_SCHEMA)
    if schema != CHAIN_SCHEMA:
        raise SpecError(f"unsupported chain schema {schema!r}")
    known = {"schema", "mode", "origin", "rows", "generator", "states"}
    unknown = set(spec) - known
    if unknown:
        raise SpecError(f"unknown chain spec fields: {sorted(unknown)}")
    mode = spec.get("mode", FLOAT)
    if mode not in (RATIONAL, FLOAT):
        raise SpecError(f"unknown arithmetic mode {mode!r}")
    gen = spec.get("generator")
    if gen is not None:
        name = gen.get("name")
        if name == "product":
            params = gen.get("params", {})
            first = chain_from_spec({"mode": mode, "generator": params["first"]})
            second = chain_from_spec({"mode": mode, "generator": params["second"]})
            return product(first, second)
        factory = _GENERATORS.get(name)
        if factory is None:
            raise SpecError(f"unknown generator {name!r}")
        return factory(gen.get("params", {}), mode)
    rows = spec.get("rows")
    if rows is None:
        raise SpecError("chain spec needs either rows or a generator")
    table = {int(r["from"]): [(y, m) for y, m in r["to"]] for r in rows}
    origin = int(spec.get("origin", 0))
    labels = spec.get("states")
    return explicit_chain(table, origin, mode, labels=labels)


def load_chain(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid chain JSON: {exc}") from exc
    return chain_from_spec(spec)
