import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from fsmevo.fsm import Fsm
from fsmevo.sampling import generate_bss
from fsmevo.witness import build_witness


def outcomes_by_enumeration(m: Fsm, max_len: int) -> np.ndarray:
    """Accept/reject of every string up to ``max_len``, in shortlex order.

    Tracks one state per string (no merging), so it is a true enumeration.
    """
    level = np.array([m.start])
    out = [m.accepting[level]]
    for _ in range(max_len):
        level = m.delta[level].ravel()
        out.append(m.accepting[level])
    return np.concatenate(out)


def python_accepts(delta, accepting, start, word) -> bool:
    q = start
    for ch in word:
        q = delta[q]["abc".index(ch)]
    return accepting[q]


def brute_force_min_states(m: Fsm, depth: int = 6) -> int:
    """Count Nerode classes of reachable states by residual signatures."""
    words = ["".join(p) for n in range(depth + 1) for p in itertools.product("abc", repeat=n)]
    delta = m.delta.tolist()
    acc = m.accepting.tolist()
    reached = set()
    for w in words:
        q = m.start
        for ch in w:
            q = delta[q]["abc".index(ch)]
        reached.add(q)
    sigs = {tuple(python_accepts(delta, acc, q, w) for w in words) for q in reached}
    return len(sigs)


@st.composite
def machines(draw, max_states=6):
    n = draw(st.integers(1, max_states))
    delta = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=3, max_size=3), min_size=n, max_size=n))
    accepting = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    start = draw(st.integers(0, n - 1))
    return Fsm(delta, accepting, start)


@pytest.fixture(scope="session")
def u3():
    return build_witness(3)


@pytest.fixture(scope="session")
def u4():
    return build_witness(4)


@pytest.fixture(scope="session")
def u5():
    return build_witness(5)


@pytest.fixture(scope="session")
def bss1000(u3):
    return generate_bss(u3, 1000)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for the acceptance summary, then assert."""

    def _record(criterion: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
        assert ok, f"{criterion}: {detail}"

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
