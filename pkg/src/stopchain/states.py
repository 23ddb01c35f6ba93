"""Integer-encoded states with a registry for structured keys.

Chains move over structured keys (lattice tuples, semigroup words, plain
ints); the registry assigns each key a stable-within-one-chain integer id so
tables and matrices can use uniform keys. Serialized output always goes
through `label`, never raw ids, so reports do not depend on traversal order.
"""

from .errors import DomainError, SpecError


def canonical_key(key):
    """Normalize a key for hashing: lists become tuples, recursively."""
    if isinstance(key, list):
        return tuple(canonical_key(k) for k in key)
    if isinstance(key, tuple):
        return tuple(canonical_key(k) for k in key)
    return key


def key_label(key):
    """Human-readable, JSON-stable rendering of a structured key."""
    if isinstance(key, tuple):
        return "(" + ",".join(key_label(k) for k in key) + ")"
    return str(key)


class StateRegistry:
    """Bidirectional key <-> id map. Ids are assigned on first sight."""

    def __init__(self):
        self._ids = {}
        self._keys = []
        self._labels = {}

    def __len__(self):
        return len(self._keys)

    def encode(self, key):
        key = canonical_key(key)
        sid = self._ids.get(key)
        if sid is None:
            sid = len(self._keys)
            self._ids[key] = sid
            self._keys.append(key)
        return sid

    def decode(self, sid):
        try:
            return self._keys[sid]
        except (IndexError, TypeError):
            raise DomainError(f"unknown state id {sid!r}")

    def has_key(self, key):
        return canonical_key(key) in self._ids

    def set_label(self, sid, label):
        if label in self._labels.values():
            existing = next(k for k, v in self._labels.items() if v == label)
            if existing != sid:
                raise SpecError(f"duplicate state label {label!r}")
        self._labels[sid] = label

    def label(self, sid):
        lbl = self._labels.get(sid)
        if lbl is not None:
            return lbl
        return key_label(self.decode(sid))
