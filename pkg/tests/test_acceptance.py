"""Exit criteria for the package, one test per criterion.

Criteria 5 and 6 run real evolution campaigns (minutes); both carry the
``slow`` marker so ``pytest -m "not slow"`` gives a quick pass.
"""

import itertools
import statistics
import time
from pathlib import Path

import pytest

from fsmevo.cli import main
from fsmevo.evolution import Individual, dominates, evolve, fitness, mutate, weakly_dominates
from fsmevo.fsm import accepts, equivalent, minimize, null_machine, state_count
from fsmevo.harness import Sampler, compare_samplers, config_from_mapping, run_campaign
from fsmevo.rng import RandomSource
from fsmevo.sampling import InfeasibleSampleSet, generate_bss, generate_rle
from fsmevo.witness import WitnessSpec, build_witness, census

TABLE1_MEMBERS = {
    3: [656, 1968, 5904, 17714, 53144, 159432, 478296, 1434890, 4304672, 12914016],
    4: [490, 1452, 4280, 12688, 37874, 113548, 340992, 1024128, 3074490, 9225836],
    5: [320, 1122, 3616, 11040, 32640, 95042, 276016, 806000, 2375360, 7065762],
}
TABLE1_TOTALS = [3280, 9841, 29524, 88573, 265720, 797161, 2391484, 7174453, 21523360, 64570081]


def test_c1_table1_exact(verdict):
    t0 = time.perf_counter()
    got = {n: [r.members for r in census(build_witness(n), 16)[7:]] for n in (3, 4, 5)}
    totals = [r.total_strings for r in census(build_witness(3), 16)[7:]]
    dp_time = time.perf_counter() - t0
    cells_ok = sum(got[n][i] == TABLE1_MEMBERS[n][i] for n in got for i in range(10))

    t0 = time.perf_counter()
    enum_ok = True
    for n in (3, 4, 5):
        m = build_witness(n)
        per_len = [sum(accepts(m, "".join(p)) for p in itertools.product("abc", repeat=k)) for k in range(11)]
        enum_ok &= list(itertools.accumulate(per_len)) == [r.members for r in census(m, 10)]
    enum_time = time.perf_counter() - t0

    ok = cells_ok == 30 and totals == TABLE1_TOTALS and dp_time < 1.0 and enum_ok and enum_time < 10.0
    verdict(
        "C1 Table 1 census",
        ok,
        f"{cells_ok}/30 member cells, totals {'match' if totals == TABLE1_TOTALS else 'DIFFER'}, "
        f"DP {dp_time:.3f}s, enumeration cross-check {'ok' if enum_ok else 'MISMATCH'} in {enum_time:.1f}s",
    )


def test_c2_witness_minimality(verdict):
    sizes = {n: state_count(minimize(build_witness(n))) for n in range(3, 13)}
    equiv = all(equivalent(build_witness(n), minimize(build_witness(n))) for n in range(3, 13))
    ok = all(sizes[n] == n for n in sizes) and equiv
    verdict("C2 witness minimality", ok, f"minimal sizes {sizes}, equivalent={equiv}")


def test_c3_baseline_fitness(verdict):
    sets = []
    for n, rle_lengths in ((3, (7, 11, 15)), (4, (8, 12, 16)), (5, (8, 12, 16))):
        w = build_witness(n)
        sets.append((f"U{n}/Bss", generate_bss(w, 1000)))
        for L in rle_lengths:
            for seed in range(3):
                sets.append((f"U{n}/Rle{L}/seed{seed}", generate_rle(w, L, 1000, RandomSource(seed, 1))))
    scores = {name: fitness(null_machine(), s) for name, s in sets}
    bad = {k: v for k, v in scores.items() if v != 500}
    verdict("C3 baseline fitness of the reject-all machine", not bad, f"{len(scores)} sample sets, off-500: {bad}")


def test_c4_feasibility_guard(verdict):
    outcomes = {}
    for n in (4, 5):
        w = build_witness(n)
        try:
            generate_rle(w, 7, 1000, RandomSource(0))
            outcomes[f"U{n}/Rle7"] = "accepted"
        except InfeasibleSampleSet:
            outcomes[f"U{n}/Rle7"] = "infeasible"
        s = generate_rle(w, 8, 1000, RandomSource(0))
        outcomes[f"U{n}/Rle8"] = f"{len(s.accept)}+{len(s.reject)}"
    ok = outcomes == {"U4/Rle7": "infeasible", "U4/Rle8": "500+500", "U5/Rle7": "infeasible", "U5/Rle8": "500+500"}
    verdict("C4 Rle feasibility guard", ok, str(outcomes))


@pytest.mark.slow
def test_c5_desk_scale_table2(tmp_path, verdict):
    base = config_from_mapping(
        {"language": "U3", "generations": 200_000, "seeds": 10, "base_seed": 0,
         "checkpoints": "0,100000,200000", "out": str(tmp_path / "c5")}
    )
    samplers = [Sampler.parse(s) for s in ("bss", "rle:7", "rle:11")]
    res = compare_samplers(WitnessSpec(3), samplers, base)
    bss, rle7, rle11 = (res[k].at(200_000).mean_best for k in ("Bss", "Rle7", "Rle11"))
    ok = 890 <= bss <= 990 and 810 <= rle7 <= 900 and bss > rle7 > rle11
    verdict(
        "C5 desk-scale Table 2 (U3, 10 seeds, G=2e5)",
        ok,
        f"Bss {bss:.2f} (want 890-990), Rle7 {rle7:.2f} (want 810-900), Rle11 {rle11:.2f}; "
        f"ordering {'holds' if bss > rle7 > rle11 else 'BROKEN'}",
    )


@pytest.mark.slow
def test_c6_convergence_spot_check(verdict):
    w = build_witness(3)
    samples = generate_bss(w, 1000)
    finals = []
    for seed in range(3):
        pop = evolve(w, samples, 2_000_000, RandomSource(seed))
        finals.append(pop.best().fitness)
    hits = sum(f == 1000 for f in finals)
    verdict("C6 convergence (U3/Bss, 3 seeds, G=2e6)", hits >= 2, f"final best fitness {finals}; {hits}/3 reached 1000")


def test_c7_property_suites(tmp_path, verdict):
    results = {}

    grid = [Individual(null_machine(), f, c) for f in (0, 3, 5) for c in (1, 2, 4)]
    laws = True
    for x in grid:
        laws &= weakly_dominates(x, x) and not dominates(x, x)
        for y in grid:
            if dominates(x, y):
                laws &= weakly_dominates(x, y) and not dominates(y, x)
            for z in grid:
                if weakly_dominates(x, y) and weakly_dominates(y, z):
                    laws &= weakly_dominates(x, z)
                if dominates(x, y) and dominates(y, z):
                    laws &= dominates(x, z)
    results["dominance laws"] = laws

    w = build_witness(3)
    samples = generate_bss(w, 100)
    anti, mono = True, True
    for seed in range(3):
        recs = []
        try:
            # check_invariants tests the antichain after every generation
            evolve(w, samples, 10_000, RandomSource(seed), observer=recs.append,
                   checkpoints=range(0, 10_001, 500), check_invariants=True)
        except AssertionError:
            anti = False
            continue
        best = [r.best_fitness for r in recs]
        mono &= best == sorted(best)
    results["antichain every generation (3 x 1e4)"] = anti
    results["best-fitness monotone"] = mono

    cfg = config_from_mapping({"language": "U3", "sampler": "rle:7", "samples": 100, "generations": 500,
                               "seeds": 3, "checkpoints": "0,250,500", "out": str(tmp_path / "orig")})
    run_campaign(cfg)
    main(["campaign", "--config", str(cfg.output_dir / "config.txt"), "--out", str(tmp_path / "replay")])
    files = lambda root: {p.relative_to(root): p.read_bytes() for p in Path(root).rglob("*") if p.is_file()}
    results["byte-identical replay"] = files(tmp_path / "orig") == files(tmp_path / "replay")

    rng = RandomSource(77)
    m = build_witness(4)
    deltas = set()
    for _ in range(2000):
        child = mutate(m, rng)
        deltas.add(child.states - m.states)
        m = child if child.states < 12 else build_witness(4)
    results["mutate state delta in {0,+1}"] = deltas <= {0, 1}

    rng = RandomSource(2025)
    mean = statistics.fmean(1 + rng.poisson1() for _ in range(100_000))
    results[f"1+Pois(1) mean {mean:.4f}"] = abs(mean - 2.0) <= 0.02

    enum_ok = True
    for n in (3, 4, 5):
        mm = build_witness(n)
        per_len = [sum(accepts(mm, "".join(p)) for p in itertools.product("abc", repeat=k)) for k in range(11)]
        enum_ok &= list(itertools.accumulate(per_len)) == [r.members for r in census(mm, 10)]
    results["census DP = enumeration to length 10"] = enum_ok

    failed = [k for k, v in results.items() if not v]
    verdict("C7 property suites", not failed, f"{len(results) - len(failed)}/{len(results)} ok" + (f"; failed {failed}" if failed else ""))
