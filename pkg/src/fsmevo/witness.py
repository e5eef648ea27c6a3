"""Universal witness machines U_n and exact member counts by string length."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fsm import NSYM, Fsm


@dataclass(frozen=True)
class WitnessSpec:
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"universal witness needs n >= 3, got {self.n}")

    @classmethod
    def parse(cls, text: str) -> "WitnessSpec":
        """Accept ``U5``, ``u5`` or ``5``."""
        body = text.strip()
        if body[:1] in ("U", "u"):
            body = body[1:]
        try:
            return cls(int(body))
        except ValueError:
            raise ValueError(f"cannot parse language {text!r}; expected U<n> with n >= 3") from None

    @property
    def name(self) -> str:
        return f"U{self.n}"


@dataclass(frozen=True)
class CensusRow:
    max_len: int
    total_strings: int
    members: int

    @property
    def percent(self) -> float:
        return 100.0 * self.members / self.total_strings


def build_witness(spec: WitnessSpec | int) -> Fsm:
    """Build the n-state witness machine.

    ``a`` cycles q_i -> q_(i+1 mod n), ``b`` swaps q_0 and q_1, ``c`` sends
    q_(n-1) back to q_0; every other arc is a self-loop.  Only q_(n-1)
    accepts.
    """
    if not isinstance(spec, WitnessSpec):
        spec = WitnessSpec(spec)
    n = spec.n
    delta = np.empty((n, NSYM), dtype=np.int32)
    for i in range(n):
        delta[i, 0] = (i + 1) % n
        delta[i, 1] = {0: 1, 1: 0}.get(i, i)
        delta[i, 2] = 0 if i == n - 1 else i
    accepting = np.zeros(n, dtype=np.bool_)
    accepting[n - 1] = True
    return Fsm(delta, accepting, 0)


def total_strings_up_to(max_len: int) -> int:
    return (NSYM ** (max_len + 1) - 1) // (NSYM - 1)


def census(m: Fsm, max_len: int) -> list[CensusRow]:
    """Cumulative member counts for every length bound 0..max_len.

    Tracks how many strings of the current length end in each state; exact
    Python integers throughout.
    """
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    delta = [[int(t) for t in row] for row in m.delta]
    accepting = [q for q in range(m.states) if m.accepting[q]]
    counts = [0] * m.states
    counts[m.start] = 1
    rows = []
    members = 0
    total = 0
    for length in range(max_len + 1):
        members += sum(counts[q] for q in accepting)
        total += NSYM ** length
        rows.append(CensusRow(length, total, members))
        nxt = [0] * m.states
        for q, k in enumerate(counts):
            if k:
                for t in delta[q]:
                    nxt[t] += k
        counts = nxt
    return rows


def member_count_up_to(m: Fsm, max_len: int) -> int:
    return census(m, max_len)[-1].members
