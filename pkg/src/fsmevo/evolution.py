"""Two-objective evolution of FSMs: fitness, dominance, mutation and the main loop.

Objectives are the linguistic fitness (correctly classified sample strings,
maximised) and the raw state count (minimised).  The population is kept as
a Pareto antichain, ordered by ascending state count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numba
import numpy as np

from .fsm import NSYM, Fsm, encode, null_machine
from .rng import RandomSource
from .sampling import SampleSet

MUTATION_MODES = ("random", "toggle")


class CompiledSamples:
    """Sample strings folded into a prefix trie for fast scoring.

    Node 0 is the empty string; every other node stores its parent and the
    symbol leading to it, with parents always numbered before children.
    ``label`` is +1 for positives, -1 for negatives, 0 for pure prefixes.
    """

    def __init__(self, samples: SampleSet):
        index = {(): 0}
        parent = [0]
        symbol = [0]
        label = [0]
        for words, lab in ((samples.accept, 1), (samples.reject, -1)):
            for word in words:
                key: tuple[int, ...] = ()
                node = 0
                for c in encode(word):
                    key = key + (c,)
                    nxt = index.get(key)
                    if nxt is None:
                        nxt = len(parent)
                        index[key] = nxt
                        parent.append(node)
                        symbol.append(c)
                        label.append(0)
                    node = nxt
                label[node] = lab
        self.samples = samples
        self.parent = np.array(parent, dtype=np.int32)
        self.symbol = np.array(symbol, dtype=np.int32)
        self.label = np.array(label, dtype=np.int8)
        self._scratch = np.empty(len(parent), dtype=np.int32)

    @property
    def size(self) -> int:
        return len(self.samples)

    def score(self, m: Fsm) -> int:
        return int(_trie_score(m.delta, m.accepting, m.start, self.parent, self.symbol, self.label, self._scratch))


@numba.njit(cache=True, nogil=True)
def _trie_score(delta, accepting, start, parent, symbol, label, scratch):
    score = 0
    scratch[0] = start
    for i in range(parent.shape[0]):
        if i > 0:
            scratch[i] = delta[scratch[parent[i]], symbol[i]]
        lab = label[i]
        if lab != 0:
            if accepting[scratch[i]]:
                if lab > 0:
                    score += 1
            elif lab < 0:
                score += 1
    return score


def fitness(m: Fsm, samples: SampleSet | CompiledSamples) -> int:
    """Correctly accepted positives plus correctly rejected negatives."""
    if not isinstance(samples, CompiledSamples):
        samples = CompiledSamples(samples)
    return samples.score(m)


@dataclass(frozen=True)
class Individual:
    machine: Fsm
    fitness: int
    states: int

    @classmethod
    def evaluate(cls, m: Fsm, samples: CompiledSamples) -> "Individual":
        return cls(m, samples.score(m), m.states)

    @property
    def objectives(self) -> tuple[int, int]:
        return self.fitness, self.states


def weakly_dominates(x: Individual, y: Individual) -> bool:
    return x.fitness >= y.fitness and x.states <= y.states


def dominates(x: Individual, y: Individual) -> bool:
    return weakly_dominates(x, y) and (x.fitness > y.fitness or x.states < y.states)


class Population:
    """Pareto antichain of individuals, kept sorted by state count."""

    def __init__(self, members: Iterable[Individual]):
        self.members = sorted(members, key=lambda ind: ind.states)
        if not self.members:
            raise ValueError("population must be nonempty")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def offer(self, mutant: Individual) -> bool:
        """Insert ``mutant`` unless strictly dominated; drop what it weakly dominates."""
        for ind in self.members:
            if dominates(ind, mutant):
                return False
        kept = [ind for ind in self.members if not weakly_dominates(mutant, ind)]
        kept.append(mutant)
        kept.sort(key=lambda ind: ind.states)
        self.members = kept
        return True

    def best(self) -> Individual:
        """Highest-fitness member (unique in an antichain)."""
        return max(self.members, key=lambda ind: ind.fitness)

    def front(self) -> list[tuple[int, int]]:
        return [(ind.fitness, ind.states) for ind in self.members]

    def is_antichain(self) -> bool:
        return not any(dominates(x, y) for x in self.members for y in self.members if x is not y)


def _mutate_arrays(delta: np.ndarray, accepting: np.ndarray, rng: RandomSource, mode: str):
    """One mutation applied in place where possible.

    Returns the (possibly reallocated) arrays.  Draw order is fixed: source
    state, symbol, existing/new coin, target (existing only), flagged state,
    then the accept flag (``random`` mode only).
    """
    n = delta.shape[0]
    q = rng.below(n)
    c = rng.below(NSYM)
    if rng.coin():
        t = rng.below(n)
    else:
        t = n
        delta = np.concatenate([delta, np.full((1, NSYM), n, dtype=delta.dtype)])
        accepting = np.concatenate([accepting, np.zeros(1, dtype=np.bool_)])
        n += 1
    delta[q, c] = t
    r = rng.below(n)
    if mode == "random":
        accepting[r] = rng.coin()
    else:
        accepting[r] = not accepting[r]
    return delta, accepting


def mutate(m: Fsm, rng: RandomSource, mode: str = "random") -> Fsm:
    """Redirect one random arc (to an existing or brand-new state) and reset one accept flag.

    A new state has all three arcs looping back to itself and starts
    non-accepting.  In ``random`` mode the chosen state's flag is set to a
    fresh fair coin; ``toggle`` flips it instead.
    """
    if mode not in MUTATION_MODES:
        raise ValueError(f"unknown mutation mode {mode!r}")
    delta, accepting = _mutate_arrays(m.delta.copy(), m.accepting.copy(), rng, mode)
    return Fsm._trusted(delta, accepting, m.start)


@dataclass(frozen=True)
class Checkpoint:
    generation: int
    best_fitness: int
    best_states: int
    population_size: int
    front: list[tuple[int, int]]


Observer = Callable[[Checkpoint], None]


def make_checkpoint(generation: int, pop: Population) -> Checkpoint:
    best = pop.best()
    return Checkpoint(generation, best.fitness, best.states, len(pop), pop.front())


def evolve(
    witness: Optional[Fsm],
    samples: SampleSet | CompiledSamples,
    generations: int,
    rng: RandomSource,
    observer: Optional[Observer] = None,
    checkpoints: Iterable[int] = (),
    mutation: str = "random",
    check_invariants: bool = False,
) -> Population:
    """Run the evolution loop for ``generations`` mutant-creation steps.

    Starts from the single-state reject-all machine.  Each step picks a
    member uniformly, applies ``1 + Poisson(1)`` mutations to a copy and
    offers the result to the population.  ``observer`` is called with a
    ``Checkpoint`` after every generation count listed in ``checkpoints``
    (0 meaning before the first step).

    If ``witness`` is given the sample labels are verified against it first.
    """
    if generations < 0:
        raise ValueError("generations must be non-negative")
    if mutation not in MUTATION_MODES:
        raise ValueError(f"unknown mutation mode {mutation!r}")
    compiled = samples if isinstance(samples, CompiledSamples) else CompiledSamples(samples)
    if witness is not None:
        compiled.samples.check_labels(witness)

    pop = Population([Individual.evaluate(null_machine(), compiled)])
    marks = sorted({g for g in checkpoints if 0 <= g <= generations})
    mark_i = 0

    def observe(g: int) -> None:
        nonlocal mark_i
        while mark_i < len(marks) and marks[mark_i] == g:
            if check_invariants:
                _verify(pop, compiled)
            if observer is not None:
                observer(make_checkpoint(g, pop))
            mark_i += 1

    observe(0)
    score = compiled.score
    for g in range(1, generations + 1):
        parent = pop.members[rng.below(len(pop.members))].machine
        delta = parent.delta.copy()
        accepting = parent.accepting.copy()
        for _ in range(1 + rng.poisson1()):
            delta, accepting = _mutate_arrays(delta, accepting, rng, mutation)
        child = Fsm._trusted(delta, accepting, parent.start)
        pop.offer(Individual(child, score(child), child.states))
        if check_invariants and not pop.is_antichain():
            raise AssertionError(f"population lost the antichain property at generation {g}")
        if mark_i < len(marks) and marks[mark_i] == g:
            observe(g)
    return pop


def _verify(pop: Population, compiled: CompiledSamples) -> None:
    if not pop.is_antichain():
        raise AssertionError("population is not an antichain")
    for ind in pop:
        if ind.fitness != compiled.score(ind.machine) or ind.states != ind.machine.states:
            raise AssertionError("cached objectives drifted from recomputation")
