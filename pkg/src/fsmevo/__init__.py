"""Evolving finite state machines towards the universal witness languages U_n."""

from .evolution import (
    Checkpoint,
    CompiledSamples,
    Individual,
    Population,
    dominates,
    evolve,
    fitness,
    mutate,
    weakly_dominates,
)
from .fsm import ALPHABET, Fsm, FsmError, accepts, dumps, equivalent, loads, minimize, null_machine, run, state_count, step
from .rng import RandomSource
from .sampling import InfeasibleSampleSet, SampleSet, generate_bss, generate_rle, load_samples, save_samples
from .witness import CensusRow, WitnessSpec, build_witness, census, member_count_up_to

__version__ = "0.1.0"
