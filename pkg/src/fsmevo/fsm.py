"""Complete deterministic finite state machines over the ternary alphabet.

A machine is stored as a dense transition table ``delta`` of shape
``(states, len(ALPHABET))`` plus a boolean ``accepting`` vector.  States are
the integers ``0 .. states-1``; growing a machine appends index ``states``.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence, Union

import numpy as np

ALPHABET = "abc"
NSYM = len(ALPHABET)
SYMBOL_INDEX = {ch: i for i, ch in enumerate(ALPHABET)}

Symbol = Union[str, int]
Word = Union[str, Sequence[int]]


class FsmError(ValueError):
    """Raised for malformed machines or unparsable machine text."""


def symbol_index(c: Symbol) -> int:
    if isinstance(c, str):
        try:
            return SYMBOL_INDEX[c]
        except KeyError:
            raise FsmError(f"symbol {c!r} not in alphabet {ALPHABET!r}") from None
    if not 0 <= c < NSYM:
        raise FsmError(f"symbol index {c} out of range")
    return int(c)


def encode(word: Word) -> tuple[int, ...]:
    """Translate a string over ``ALPHABET`` into symbol indices."""
    return tuple(symbol_index(c) for c in word)


def decode(indices: Iterable[int]) -> str:
    return "".join(ALPHABET[i] for i in indices)


class Fsm:
    """Immutable complete DFA genome.

    ``delta[q, c]`` is the successor of state ``q`` on symbol index ``c``.
    Construction validates totality and index ranges; the arrays are copied
    and frozen, so instances can be shared freely.
    """

    __slots__ = ("delta", "accepting", "start")

    def __init__(self, delta, accepting, start: int = 0):
        delta = np.array(delta, dtype=np.int32, copy=True)
        accepting = np.array(accepting, dtype=np.bool_, copy=True)
        if delta.ndim != 2 or delta.shape[1] != NSYM:
            raise FsmError(f"transition table must have shape (states, {NSYM}), got {delta.shape}")
        n = delta.shape[0]
        if n < 1:
            raise FsmError("a machine needs at least one state")
        if accepting.shape != (n,):
            raise FsmError(f"accepting vector must have length {n}, got {accepting.shape}")
        if delta.min() < 0 or delta.max() >= n:
            raise FsmError("transition target outside the state range")
        if not 0 <= start < n:
            raise FsmError(f"start state {start} outside 0..{n - 1}")
        self._init(delta, accepting, int(start))

    def _init(self, delta: np.ndarray, accepting: np.ndarray, start: int) -> None:
        delta.flags.writeable = False
        accepting.flags.writeable = False
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "accepting", accepting)
        object.__setattr__(self, "start", start)

    @classmethod
    def _trusted(cls, delta: np.ndarray, accepting: np.ndarray, start: int = 0) -> "Fsm":
        # Skips validation; the caller hands over ownership of both arrays.
        m = object.__new__(cls)
        m._init(delta, accepting, start)
        return m

    def __setattr__(self, name, value):
        raise AttributeError("Fsm is immutable")

    @property
    def states(self) -> int:
        return self.delta.shape[0]

    @property
    def accepting_states(self) -> frozenset[int]:
        return frozenset(int(q) for q in np.flatnonzero(self.accepting))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Fsm):
            return NotImplemented
        return (
            self.start == other.start
            and np.array_equal(self.delta, other.delta)
            and np.array_equal(self.accepting, other.accepting)
        )

    def __hash__(self) -> int:
        return hash((self.start, self.delta.tobytes(), self.accepting.tobytes()))

    def __repr__(self) -> str:
        return f"Fsm(states={self.states}, start={self.start}, accepting={sorted(self.accepting_states)})"

    def to_text(self) -> str:
        return dumps(self)


def null_machine() -> Fsm:
    """The single-state machine that rejects every string."""
    return Fsm(np.zeros((1, NSYM), dtype=np.int32), [False])


def universal_machine() -> Fsm:
    """The single-state machine that accepts every string."""
    return Fsm(np.zeros((1, NSYM), dtype=np.int32), [True])


def step(m: Fsm, q: int, c: Symbol) -> int:
    return int(m.delta[q, symbol_index(c)])


def run(m: Fsm, word: Word, q: int | None = None) -> int:
    """Extended transition: the state reached after reading ``word``.

    Starts from ``m.start`` unless ``q`` is given.
    """
    state = m.start if q is None else q
    delta = m.delta
    for c in encode(word):
        state = delta[state, c]
    return int(state)


def accepts(m: Fsm, word: Word) -> bool:
    return bool(m.accepting[run(m, word)])


def state_count(m: Fsm) -> int:
    """Number of states in the genome, reachable or not."""
    return m.states


def reachable(m: Fsm) -> list[int]:
    """States reachable from the start, in breadth-first order with a < b < c."""
    seen = {m.start}
    order = [m.start]
    queue = deque(order)
    while queue:
        q = queue.popleft()
        for t in m.delta[q]:
            t = int(t)
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    return order


def _refine(m: Fsm, states: list[int]) -> dict[int, int]:
    """Moore partition refinement over ``states`` (closed under delta).

    Returns a block id for every state; equal ids mean Nerode-equivalent.
    """
    block = {q: int(m.accepting[q]) for q in states}
    nblocks = len(set(block.values()))
    while True:
        signatures: dict[tuple, int] = {}
        new_block = {}
        for q in states:
            sig = (block[q],) + tuple(block[int(t)] for t in m.delta[q])
            new_block[q] = signatures.setdefault(sig, len(signatures))
        if len(signatures) == nblocks:
            return new_block
        block, nblocks = new_block, len(signatures)


def minimize(m: Fsm) -> Fsm:
    """Return the canonical minimal machine recognising the same language.

    Unreachable states are dropped and Nerode-equivalent states merged.  The
    result is numbered in breadth-first order from the start (symbols in
    alphabet order), so two machines with the same language minimise to
    identical tables.
    """
    live = reachable(m)
    block = _refine(m, live)

    # BFS over the quotient machine assigns canonical numbers.
    numbering = {block[m.start]: 0}
    rep = {block[m.start]: m.start}
    queue = deque([m.start])
    while queue:
        q = queue.popleft()
        for t in m.delta[q]:
            b = block[int(t)]
            if b not in numbering:
                numbering[b] = len(numbering)
                rep[b] = int(t)
                queue.append(int(t))

    n = len(numbering)
    delta = np.empty((n, NSYM), dtype=np.int32)
    accepting = np.empty(n, dtype=np.bool_)
    for b, i in numbering.items():
        q = rep[b]
        accepting[i] = m.accepting[q]
        for c in range(NSYM):
            delta[i, c] = numbering[block[int(m.delta[q, c])]]
    return Fsm._trusted(delta, accepting, 0)


def equivalent(m1: Fsm, m2: Fsm) -> bool:
    """True iff both machines recognise the same language."""
    return minimize(m1) == minimize(m2)


def dumps(m: Fsm) -> str:
    """Serialise to the plain-text checkpoint format.

    One header line ``states=N start=i accepting=j,k`` followed by one line
    per state listing its successors in alphabet order.
    """
    acc = ",".join(str(q) for q in sorted(m.accepting_states))
    lines = [f"states={m.states} start={m.start} accepting={acc}"]
    lines += [" ".join(str(int(t)) for t in row) for row in m.delta]
    return "\n".join(lines) + "\n"


def loads(text: str) -> Fsm:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise FsmError("empty machine text")
    try:
        fields = dict(item.split("=", 1) for item in lines[0].split())
        n = int(fields["states"])
        start = int(fields["start"])
        acc_field = fields["accepting"]
    except (KeyError, ValueError) as exc:
        raise FsmError(f"bad header line {lines[0]!r}") from exc
    rows = lines[1:]
    if len(rows) != n:
        raise FsmError(f"header declares {n} states but {len(rows)} rows follow")
    try:
        delta = [[int(x) for x in row.split()] for row in rows]
        acc_ids = [int(x) for x in acc_field.split(",") if x]
    except ValueError as exc:
        raise FsmError("non-integer state index") from exc
    if any(len(row) != NSYM for row in delta):
        raise FsmError(f"every state row needs {NSYM} targets")
    if any(not 0 <= q < n for q in acc_ids):
        raise FsmError("accepting state outside the state range")
    accepting = np.zeros(n, dtype=np.bool_)
    accepting[acc_ids] = True
    return Fsm(np.array(delta, dtype=np.int32).reshape(n, NSYM), accepting, start)
