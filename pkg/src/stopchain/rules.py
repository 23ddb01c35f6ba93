"""Stopping rules and recovery maps.

Every catalog rule is a finite-state machine over path steps: it exposes an
initial memory for a start state and an update that sees (memory, previous
key, new key) and reports the updated memory plus a stop flag. Rules never
stop at step 0. The same machines drive prefix decisions, exact DP, and both
Monte Carlo backends; memories are hashable so DP can key on (state, memory).

Recovery maps are bounded- or hitting-lookahead functionals evaluated on a
path suffix; the engine, not the map, forms n + value.
"""

import json

from .errors import SpecError, UnsupportedRuleError

RULE_SCHEMA = "stopchain/rule/1"
RECOVERY_SCHEMA = "stopchain/recovery/1"


def _first_coord(key):
    return key[0] if isinstance(key, tuple) else key


class Predicate:
    """Serializable state/step predicate used by passage-style rules."""

    def __init__(self, kind, value):
        self.kind = kind
        if kind == "keys":
            self.value = frozenset(value)
        elif kind in ("first_coord_in",):
            self.value = frozenset(int(v) for v in value)
        elif kind == "first_coord_eq":
            self.value = int(value)
        elif kind == "first_coord_mod":
            self.value = (int(value[0]), int(value[1]))
        elif kind == "increment_in":
            self.value = frozenset(int(v) for v in value)
        else:
            raise SpecError(f"unknown predicate kind {kind!r}")

    def test(self, prev_key, new_key):
        if self.kind == "keys":
            return new_key in self.value
        if self.kind == "first_coord_in":
            return _first_coord(new_key) in self.value
        if self.kind == "first_coord_eq":
            return _first_coord(new_key) == self.value
        if self.kind == "first_coord_mod":
            m, r = self.value
            return _first_coord(new_key) % m == r
        # increment_in: semigroup words grow by one letter per step
        return len(new_key) == len(prev_key) + 1 and new_key[-1] in self.value

    def spec(self):
        if self.kind == "keys":
            return {"kind": "keys", "value": sorted(
                (list(k) if isinstance(k, tuple) else k) for k in self.value)}
        if self.kind in ("first_coord_in", "increment_in"):
            return {"kind": self.kind, "value": sorted(self.value)}
        if self.kind == "first_coord_mod":
            return {"kind": self.kind, "value": list(self.value)}
        return {"kind": self.kind, "value": self.value}

    @staticmethod
    def from_spec(spec):
        if isinstance(spec, list):
            return Predicate("keys", [tuple(k) if isinstance(k, list) else k
                                      for k in spec])
        return Predicate(spec["kind"], [tuple(k) if isinstance(k, list) else k
                                        for k in spec["value"]]
                         if spec["kind"] == "keys" else spec["value"])


class StoppingRule:
    """Base: adapted stop/continue decision with finite auxiliary memory."""

    kind = None
    horizon_bound = None

    def initial_memory(self, start_key):
        raise NotImplementedError

    def update(self, mem, prev_key, new_key):
        raise NotImplementedError

    def has_memory(self):
        return True

    def spec(self):
        raise NotImplementedError

    def kernel_spec(self):
        return None

    def decide_prefix(self, keys):
        """Stop index of the rule on a key sequence, or None."""
        if not keys:
            return None
        mem = self.initial_memory(keys[0])
        for i in range(1, len(keys)):
            mem, stopped = self.update(mem, keys[i - 1], keys[i])
            if stopped:
                return i
        return None


class ConstRule(StoppingRule):
    kind = "const"

    def __init__(self, c):
        c = int(c)
        if c < 1:
            raise SpecError("const rule needs c >= 1")
        self.c = c
        self.horizon_bound = c

    def initial_memory(self, start_key):
        return 0

    def update(self, mem, prev_key, new_key):
        mem += 1
        return mem, mem == self.c

    def spec(self):
        return {"kind": "const", "c": self.c}

    def kernel_spec(self):
        return {"rule": "const", "c": self.c}


class FirstPassageRule(StoppingRule):
    """Stop at the first step (from step 1 on) entering the target set."""

    kind = "first_passage"

    def __init__(self, predicate):
        self.predicate = predicate

    def initial_memory(self, start_key):
        return ()

    def update(self, mem, prev_key, new_key):
        return mem, self.predicate.test(prev_key, new_key)

    def spec(self):
        return {"kind": "first_passage", "target": self.predicate.spec()}

    def kernel_spec(self):
        return {"rule": "first_passage", "pred": self.predicate.spec()}


class KthPassageRule(StoppingRule):
    kind = "kth_passage"

    def __init__(self, predicate, k):
        k = int(k)
        if k < 1:
            raise SpecError("kth passage needs k >= 1")
        self.predicate = predicate
        self.k = k

    def initial_memory(self, start_key):
        return 0

    def update(self, mem, prev_key, new_key):
        if self.predicate.test(prev_key, new_key):
            mem += 1
        return mem, mem == self.k

    def spec(self):
        return {"kind": "kth_passage", "target": self.predicate.spec(), "k": self.k}

    def kernel_spec(self):
        return {"rule": "kth_passage", "pred": self.predicate.spec(), "k": self.k}


class AdditiveIncreaseRule(StoppingRule):
    """Stop when the running additive functional strictly increases, i.e. at
    the first step landing on a state of positive weight."""

    kind = "additive_increase"

    def __init__(self, weights=None, positive=None):
        if positive is None:
            if weights is None:
                raise SpecError("additive rule needs weights or a positive set")
            positive = Predicate("keys", [k for k, w in weights.items() if w > 0])
        self.positive = positive

    def initial_memory(self, start_key):
        return ()

    def update(self, mem, prev_key, new_key):
        return mem, self.positive.test(prev_key, new_key)

    def spec(self):
        return {"kind": "additive_increase", "positive": self.positive.spec()}

    def kernel_spec(self):
        return {"rule": "first_passage", "pred": self.positive.spec()}


class IncrementRule(StoppingRule):
    """Semigroup rule: stop at step 1 when the first letter lies in A,
    otherwise at step `else_at`."""

    kind = "increment_rule"

    def __init__(self, letters, else_at=2):
        else_at = int(else_at)
        if else_at < 2:
            raise SpecError("increment rule needs else_at >= 2")
        self.letters = frozenset(int(g) for g in letters)
        self.else_at = else_at
        self.horizon_bound = else_at

    def initial_memory(self, start_key):
        # (step, first letter in A or undecided)
        return (0, None)

    def update(self, mem, prev_key, new_key):
        step, fast = mem
        step += 1
        if step == 1:
            fast = new_key[-1] in self.letters
            return (step, fast), fast
        return (step, fast), step == self.else_at

    def spec(self):
        return {"kind": "increment_rule", "letters": sorted(self.letters),
                "else_at": self.else_at}

    def kernel_spec(self):
        return {"rule": "increment", "letters": sorted(self.letters),
                "else_at": self.else_at}


class SplitRule(StoppingRule):
    """First-coordinate rule: from a start level at or above 0, stop one unit
    up on first touch or one unit down on second touch; mirrored below 0."""

    kind = "split"

    def initial_memory(self, start_key):
        level = _first_coord(start_key)
        sign = 1 if level >= 0 else -1
        # (straight target, doubled target, visits to the doubled side)
        return (level + sign, level - sign, 0)

    def update(self, mem, prev_key, new_key):
        straight, doubled, visits = mem
        c = _first_coord(new_key)
        if c == straight:
            return mem, True
        if c == doubled:
            if visits == 1:
                return mem, True
            return (straight, doubled, 1), False
        return mem, False

    def spec(self):
        return {"kind": "split"}

    def kernel_spec(self):
        return {"rule": "split"}


class DelayedRule(StoppingRule):
    """Pair-chain rule: when the flag coordinate starts at 0, stop at the next
    first-coordinate passage into A; when it starts at 1, let s be the time of
    the first passage and stop at the s-th passage."""

    kind = "delayed"

    def __init__(self, predicate):
        self.predicate = predicate

    def initial_memory(self, start_key):
        delayed = start_key[1] == 1
        # (delayed?, step, visit count, target count when known)
        return (delayed, 0, 0, None)

    def update(self, mem, prev_key, new_key):
        delayed, step, visits, target = mem
        step += 1
        hit = self.predicate.test(prev_key, new_key)
        if not delayed:
            return (delayed, step, visits, target), hit
        if hit:
            visits += 1
            if target is None:
                target = step
            return (delayed, step, visits, target), visits == target
        return (delayed, step, visits, target), False

    def spec(self):
        return {"kind": "delayed", "target": self.predicate.spec()}

    def kernel_spec(self):
        return {"rule": "delayed", "pred": self.predicate.spec()}


class MinRule(StoppingRule):
    kind = "min"

    def __init__(self, first, second):
        self.first = first
        self.second = second
        bounds = [b for b in (first.horizon_bound, second.horizon_bound)
                  if b is not None]
        self.horizon_bound = min(bounds) if bounds else None

    def initial_memory(self, start_key):
        return (self.first.initial_memory(start_key),
                self.second.initial_memory(start_key))

    def update(self, mem, prev_key, new_key):
        m1, s1 = self.first.update(mem[0], prev_key, new_key)
        m2, s2 = self.second.update(mem[1], prev_key, new_key)
        return (m1, m2), s1 or s2

    def spec(self):
        return {"kind": "min", "first": self.first.spec(),
                "second": self.second.spec()}

    def kernel_spec(self):
        # Only min-with-constant has a compiled form: a hard cap on the inner rule.
        for a, b in ((self.first, self.second), (self.second, self.first)):
            inner = b.kernel_spec()
            if isinstance(a, ConstRule) and inner is not None:
                return dict(inner, cap=a.c)
        return None


class ShiftRule(StoppingRule):
    """Wait k steps, then apply the inner rule to the shifted path."""

    kind = "shift"

    def __init__(self, inner, k):
        k = int(k)
        if k < 0:
            raise SpecError("shift needs k >= 0")
        self.inner = inner
        self.k = k
        if inner.horizon_bound is not None:
            self.horizon_bound = inner.horizon_bound + k

    def initial_memory(self, start_key):
        return (0, None) if self.k else (self.k, self.inner.initial_memory(start_key))

    def update(self, mem, prev_key, new_key):
        step, inner_mem = mem
        step += 1
        if step == self.k:
            return (step, self.inner.initial_memory(new_key)), False
        if step < self.k:
            return (step, None), False
        inner_mem, stopped = self.inner.update(inner_mem, prev_key, new_key)
        return (step, inner_mem), stopped

    def spec(self):
        return {"kind": "shift", "k": self.k, "inner": self.inner.spec()}


class ClosureRule(StoppingRule):
    """Arbitrary adapted decision function; Monte Carlo only."""

    kind = "closure"

    def __init__(self, decide, horizon_bound=None):
        self._decide = decide
        self.horizon_bound = horizon_bound

    def has_memory(self):
        return False

    def initial_memory(self, start_key):
        raise UnsupportedRuleError(
            "closure rules expose no finite memory; use Monte Carlo operations")

    def update(self, mem, prev_key, new_key):
        raise UnsupportedRuleError(
            "closure rules expose no finite memory; use Monte Carlo operations")

    def decide_prefix(self, keys):
        for i in range(1, len(keys)):
            if self._decide(keys[: i + 1]):
                return i
        return None

    def spec(self):
        return {"kind": "closure"}


def rule_from_spec(spec):
    if isinstance(spec, str):
        spec = _parse_inline(spec)
    kind = spec.get("kind")
    if kind == "const":
        return ConstRule(spec["c"])
    if kind == "first_passage":
        return FirstPassageRule(Predicate.from_spec(spec["target"]))
    if kind == "kth_passage":
        return KthPassageRule(Predicate.from_spec(spec["target"]), spec["k"])
    if kind == "additive_increase":
        return AdditiveIncreaseRule(positive=Predicate.from_spec(spec["positive"]))
    if kind == "increment_rule":
        return IncrementRule(spec["letters"], spec.get("else_at", 2))
    if kind == "split":
        return SplitRule()
    if kind == "delayed":
        return DelayedRule(Predicate.from_spec(spec["target"]))
    if kind == "min":
        return MinRule(rule_from_spec(spec["first"]), rule_from_spec(spec["second"]))
    if kind == "shift":
        return ShiftRule(rule_from_spec(spec["inner"]), spec["k"])
    raise SpecError(f"unknown stopping rule kind {kind!r}")


def _parse_inline(text):
    """Shorthand accepted on the command line: 'const:2', 'split',
    'first_passage:first_coord_eq:0', or inline JSON."""
    if text.startswith("{"):
        return json.loads(text)
    parts = text.split(":")
    if parts[0] == "const":
        return {"kind": "const", "c": int(parts[1])}
    if parts[0] == "split":
        return {"kind": "split"}
    if parts[0] == "first_passage":
        return {"kind": "first_passage",
                "target": {"kind": parts[1], "value": _inline_value(parts[1], parts[2])}}
    raise SpecError(f"cannot parse rule shorthand {text!r}")


def _inline_value(kind, raw):
    if kind == "first_coord_eq":
        return int(raw)
    if kind in ("first_coord_in", "increment_in"):
        return [int(v) for v in raw.split(",")]
    if kind == "first_coord_mod":
        m, r = raw.split(",")
        return [int(m), int(r)]
    raise SpecError(f"cannot parse predicate shorthand {kind}:{raw}")


class RecoveryMap:
    """Suffix functional; evaluate returns the map's value on the suffix
    starting at `start`, or None when the window does not determine it."""

    kind = None
    lookahead = None  # None means hitting-type: Monte Carlo with a horizon

    def evaluate(self, keys, start):
        raise NotImplementedError

    def spec(self):
        raise NotImplementedError

    def kernel_spec(self):
        return None


class ConstOneMap(RecoveryMap):
    kind = "const_one"
    lookahead = 0

    def evaluate(self, keys, start):
        return 1

    def spec(self):
        return {"kind": "const_one"}

    def kernel_spec(self):
        return {"rho": "const_one"}


class EqualsTauMap(RecoveryMap):
    """The stopping rule itself, read off the suffix."""

    kind = "equals_tau"

    def __init__(self, rule):
        self.rule = rule
        self.lookahead = rule.horizon_bound

    def evaluate(self, keys, start):
        if start >= len(keys):
            return None
        return self.rule.decide_prefix(keys[start:])

    def spec(self):
        return {"kind": "equals_tau"}

    def kernel_spec(self):
        inner = self.rule.kernel_spec()
        return None if inner is None else {"rho": "equals_tau"}


class RunDetectorMap(RecoveryMap):
    """First index beyond 3M closing a run of 2M+1 consecutive steps that
    satisfy the predicate."""

    kind = "run_detector"

    def __init__(self, window_bound, predicate):
        m = int(window_bound)
        if m < 1:
            raise SpecError("run detector needs M >= 1")
        self.m = m
        self.predicate = predicate

    def evaluate(self, keys, start):
        width = 2 * self.m + 1
        run = 0
        # run counts consecutive satisfied steps ending at the current index
        for k in range(1, len(keys) - start):
            if self.predicate.test(keys[start + k - 1], keys[start + k]):
                run += 1
            else:
                run = 0
            if k > 3 * self.m and run >= width:
                return k
        return None

    def spec(self):
        return {"kind": "run_detector", "M": self.m,
                "target": self.predicate.spec()}

    def kernel_spec(self):
        return {"rho": "run_detector", "m": self.m, "pred": self.predicate.spec()}


class NextPassageMap(RecoveryMap):
    """First passage of the suffix into the target set (>= 1)."""

    kind = "sigma"

    def __init__(self, predicate):
        self.predicate = predicate

    def evaluate(self, keys, start):
        for k in range(1, len(keys) - start):
            if self.predicate.test(keys[start + k - 1], keys[start + k]):
                return k
        return None

    def spec(self):
        return {"kind": "sigma", "target": self.predicate.spec()}

    def kernel_spec(self):
        return {"rho": "next_passage", "pred": self.predicate.spec()}


def recovery_from_spec(spec, rule=None):
    kind = spec.get("kind")
    if kind == "const_one":
        return ConstOneMap()
    if kind == "equals_tau":
        if rule is None:
            raise SpecError("equals_tau recovery needs the stopping rule")
        return EqualsTauMap(rule)
    if kind == "run_detector":
        return RunDetectorMap(spec["M"], Predicate.from_spec(spec["target"]))
    if kind == "sigma":
        return NextPassageMap(Predicate.from_spec(spec["target"]))
    raise SpecError(f"unknown recovery map kind {kind!r}")
