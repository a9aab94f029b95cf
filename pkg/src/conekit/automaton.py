"""Finite labeled automata describing admissible switching sequences.

Every state is a valid start state; the automaton may be nondeterministic.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import AutomatonError, DanglingReference, DeadState

DEFAULT_MAX_CYCLE_LEN = 6


@dataclass(frozen=True)
class Automaton:
    states: tuple
    alphabet: tuple
    transitions: tuple  # sorted (src, symbol, dst) triples
    _out: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        out = defaultdict(list)
        for t in self.transitions:
            out[t[0]].append(t)
        object.__setattr__(self, "_out", dict(out))

    def outgoing(self, state) -> list:
        return self._out.get(state, [])

    def to_dict(self) -> dict:
        return {
            "states": list(self.states),
            "alphabet": list(self.alphabet),
            "transitions": [list(t) for t in self.transitions],
        }


def validate(raw: dict) -> Automaton:
    """Build an Automaton from its JSON form, enforcing well-formedness.

    ``raw`` is ``{"states": [...], "alphabet": [...], "transitions": [[i, s, j], ...]}``.
    Identifiers are coerced to strings.
    """
    try:
        states = [str(s) for s in raw["states"]]
        alphabet = [str(s) for s in raw["alphabet"]]
        triples = [tuple(str(v) for v in t) for t in raw.get("transitions", [])]
    except (KeyError, TypeError) as exc:
        raise AutomatonError(f"malformed automaton description: {exc}") from exc
    if not states:
        raise AutomatonError("automaton has no states")
    if len(set(states)) != len(states) or len(set(alphabet)) != len(alphabet):
        raise AutomatonError("duplicate state or symbol declaration")
    if len(set(triples)) != len(triples):
        raise AutomatonError("duplicate transition")
    known_q, known_s = set(states), set(alphabet)
    for t in triples:
        if len(t) != 3:
            raise AutomatonError(f"transition {t} is not a triple")
        i, s, j = t
        if i not in known_q or j not in known_q:
            raise DanglingReference(f"transition {t} names an undeclared state")
        if s not in known_s:
            raise DanglingReference(f"transition {t} names an undeclared symbol")
    sources = {t[0] for t in triples}
    dead = [q for q in states if q not in sources]
    if dead:
        raise DeadState(f"states without outgoing transitions: {dead}")
    order_q = {q: k for k, q in enumerate(states)}
    order_s = {s: k for k, s in enumerate(alphabet)}
    triples.sort(key=lambda t: (order_q[t[0]], order_s[t[1]], order_q[t[2]]))
    return Automaton(tuple(states), tuple(alphabet), tuple(triples))


def arbitrary_switching(alphabet: Sequence[str], state: str = "q") -> Automaton:
    """Single-state automaton accepting every word over ``alphabet``."""
    return validate(
        {
            "states": [state],
            "alphabet": list(alphabet),
            "transitions": [[state, s, state] for s in alphabet],
        }
    )


def admissible(a: Automaton, word: Iterable) -> bool:
    """True iff some path of ``a`` (from any start state) reads ``word``."""
    current = set(a.states)
    for sym in word:
        sym = str(sym)
        current = {j for q in current for (_, s, j) in a.outgoing(q) if s == sym}
        if not current:
            return False
    return True


def random_walk(
    a: Automaton,
    length: int,
    seed: Optional[int] = None,
    start: Optional[str] = None,
    rng: Optional[np.random.Generator] = None,
) -> tuple[list, list]:
    """Uniform random walk over outgoing transitions.

    Returns ``(states, symbols)`` with ``len(states) == length + 1``.
    """
    if length < 0:
        raise ValueError("length must be nonnegative")
    rng = np.random.default_rng(seed) if rng is None else rng
    q = a.states[rng.integers(len(a.states))] if start is None else str(start)
    if q not in a.states:
        raise DanglingReference(f"unknown start state {q!r}")
    states, symbols = [q], []
    for _ in range(length):
        out = a.outgoing(q)
        _, s, q = out[rng.integers(len(out))]
        states.append(q)
        symbols.append(s)
    return states, symbols


def simple_cycles(a: Automaton, max_len: int = DEFAULT_MAX_CYCLE_LEN) -> list[tuple[list, list]]:
    """Simple cycles of length at most ``max_len`` as ``(states, labels)``.

    ``states`` lists the visited states starting at the cycle's first state
    in declaration order (the closing return is implicit). Parallel edges
    with different labels give distinct cycles.
    """
    index = {q: k for k, q in enumerate(a.states)}
    found: list[tuple[list, list]] = []

    def dfs(root, q, path, labels):
        for _, s, j in a.outgoing(q):
            if j == root:
                found.append((list(path), labels + [s]))
            elif index[j] > index[root] and j not in path and len(path) < max_len:
                path.append(j)
                dfs(root, j, path, labels + [s])
                path.pop()

    if max_len < 1:
        return []
    for root in a.states:
        dfs(root, root, [root], [])
    return [c for c in found if len(c[1]) <= max_len]
