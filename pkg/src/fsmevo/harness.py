"""Seeded multi-run campaigns, checkpoint trajectories and CSV reports."""

from __future__ import annotations

import csv
import io
import shutil
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .evolution import MUTATION_MODES, Checkpoint, CompiledSamples, evolve
from .rng import SAMPLING_STREAM, RandomSource
from .sampling import SampleSet, check_rle_feasible, generate_bss, generate_rle, load_samples, save_samples
from .witness import WitnessSpec, build_witness, census

TRAJECTORY_HEADER = ["seed", "generation", "best_fitness", "best_states", "population_size"]
SUMMARY_HEADER = ["generation", "mean_best", "min_best", "max_best", "stddev_best", "n_runs"]
CENSUS_HEADER = ["max_len", "total", "members", "percent"]
TABLE2_GENERATIONS = (100_000, 200_000, 500_000, 1_000_000, 2_000_000, 5_000_000, 10_000_000)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Sampler:
    kind: str  # "bss" or "rle"
    max_len: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "Sampler":
        t = text.strip().lower()
        if t == "bss":
            return cls("bss")
        if t.startswith("rle"):
            body = t[3:].lstrip(":_")
            try:
                n = int(body)
            except ValueError:
                raise ConfigError(f"bad sampler {text!r}; expected bss or rle:<n>") from None
            if n < 0:
                raise ConfigError("rle length bound must be non-negative")
            return cls("rle", n)
        raise ConfigError(f"bad sampler {text!r}; expected bss or rle:<n>")

    def __str__(self) -> str:
        return "bss" if self.kind == "bss" else f"rle:{self.max_len}"

    @property
    def label(self) -> str:
        return "Bss" if self.kind == "bss" else f"Rle{self.max_len}"


def default_checkpoints(generations: int) -> list[int]:
    """Table-2 style 1-2-5 marks plus ten log-spaced points per decade, 0 and G."""
    marks = {0, generations}
    decade = 1
    while decade <= generations:
        for k in range(10):
            marks.add(round(decade * 10 ** (k / 10)))
        for m in (1, 2, 5):
            marks.add(m * decade)
        decade *= 10
    return sorted(g for g in marks if g <= generations)


@dataclass
class ExperimentConfig:
    language: WitnessSpec
    sampler: Sampler
    generations: int
    total_samples: int = 1000
    seeds: list[int] = field(default_factory=lambda: list(range(30)))
    base_seed: int = 0
    checkpoints: list[int] = field(default_factory=list)
    output_dir: Path = Path("out")
    mutation: str = "random"
    samples_per: str = "seed"
    parallel: int = 1
    samples_file: Optional[Path] = None

    def __post_init__(self):
        if not self.checkpoints:
            self.checkpoints = default_checkpoints(self.generations)
        self.output_dir = Path(self.output_dir)
        self.validate()

    def validate(self) -> None:
        if self.generations < 0:
            raise ConfigError("generations must be non-negative")
        if self.total_samples < 0 or self.total_samples % 2:
            raise ConfigError("samples must be a non-negative even number")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be pairwise distinct")
        if any(not 0 <= s < 2**64 for s in self.seeds):
            raise ConfigError("seeds must be unsigned 64-bit integers")
        if list(self.checkpoints) != sorted(set(self.checkpoints)):
            raise ConfigError("checkpoints must be strictly ascending")
        if self.checkpoints and (self.checkpoints[0] < 0 or self.checkpoints[-1] > self.generations):
            raise ConfigError("checkpoints must lie within 0..generations")
        if self.mutation not in MUTATION_MODES:
            raise ConfigError(f"mutation must be one of {MUTATION_MODES}")
        if self.samples_per not in ("seed", "campaign"):
            raise ConfigError("samples_per must be seed or campaign")
        if self.parallel < 1:
            raise ConfigError("parallel must be at least 1")

    def to_text(self) -> str:
        items = [
            ("language", self.language.name),
            ("sampler", str(self.sampler)),
            ("samples", self.total_samples),
            ("generations", self.generations),
            ("base_seed", self.base_seed),
            ("seed_list", ",".join(map(str, self.seeds))),
            ("checkpoints", ",".join(map(str, self.checkpoints))),
            ("mutation", self.mutation),
            ("samples_per", self.samples_per),
        ]
        if self.samples_file is not None:
            items.append(("load_samples", self.samples_file))
        return "".join(f"{k} = {v}\n" for k, v in items)


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from None


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def config_from_mapping(values: dict) -> ExperimentConfig:
    """Build a config from string-ish settings (config file merged with CLI flags)."""
    v = {k: x for k, x in values.items() if x is not None}
    try:
        language = v["language"] if isinstance(v.get("language"), WitnessSpec) else WitnessSpec.parse(str(v["language"]))
        sampler = v.get("sampler", "bss")
        sampler = sampler if isinstance(sampler, Sampler) else Sampler.parse(str(sampler))
        generations = int(v["generations"])
        base_seed = int(v.get("base_seed", 0))
        if "seed_list" in v:
            seeds = parse_int_list(v["seed_list"]) if not isinstance(v["seed_list"], list) else v["seed_list"]
        else:
            seeds = [base_seed + i for i in range(int(v.get("seeds", 30)))]
        cps = v.get("checkpoints")
        checkpoints = parse_int_list(cps) if isinstance(cps, str) else list(cps or [])
        samples_file = v.get("load_samples")
        return ExperimentConfig(
            language=language,
            sampler=sampler,
            generations=generations,
            total_samples=int(v.get("samples", 1000)),
            seeds=seeds,
            base_seed=base_seed,
            checkpoints=checkpoints,
            output_dir=Path(v.get("out", "out")),
            mutation=str(v.get("mutation", "random")),
            samples_per=str(v.get("samples_per", "seed")),
            parallel=int(v.get("parallel", 1)),
            samples_file=Path(samples_file) if samples_file else None,
        )
    except KeyError as exc:
        raise ConfigError(f"missing required setting {exc.args[0]!r}") from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


@dataclass
class RunTrajectory:
    seed: int
    records: list[Checkpoint]

    def rows(self) -> list[list[int]]:
        return [[self.seed, r.generation, r.best_fitness, r.best_states, r.population_size] for r in self.records]


@dataclass
class SummaryRow:
    generation: int
    mean_best: float
    min_best: int
    max_best: int
    stddev_best: float
    n_runs: int

    def cells(self) -> list[str]:
        return [
            str(self.generation),
            f"{self.mean_best:.6f}",
            str(self.min_best),
            str(self.max_best),
            f"{self.stddev_best:.6f}",
            str(self.n_runs),
        ]


@dataclass
class CampaignSummary:
    config: ExperimentConfig
    rows: list[SummaryRow]
    trajectories: list[RunTrajectory]

    def at(self, generation: int) -> SummaryRow:
        for r in self.rows:
            if r.generation == generation:
                return r
        raise KeyError(generation)

    @property
    def final(self) -> SummaryRow:
        return self.rows[-1]


def summarize(trajectories: Sequence[RunTrajectory]) -> list[SummaryRow]:
    """Cross-seed statistics of best fitness per checkpoint (stddev uses n - 1)."""
    by_gen: dict[int, list[int]] = {}
    for traj in trajectories:
        for r in traj.records:
            by_gen.setdefault(r.generation, []).append(r.best_fitness)
    rows = []
    for g in sorted(by_gen):
        vals = by_gen[g]
        sd = statistics.stdev(vals) if len(vals) > 1 else 0.0
        rows.append(SummaryRow(g, statistics.fmean(vals), min(vals), max(vals), sd, len(vals)))
    return rows


def witness_samples(cfg: ExperimentConfig, seed: int) -> SampleSet:
    """The sample set used by run ``seed`` of the campaign."""
    if cfg.samples_file is not None:
        return load_samples(cfg.samples_file)
    witness = build_witness(cfg.language)
    if cfg.sampler.kind == "bss":
        return generate_bss(witness, cfg.total_samples)
    sample_seed = seed if cfg.samples_per == "seed" else cfg.seeds[0]
    return generate_rle(witness, cfg.sampler.max_len, cfg.total_samples, RandomSource(sample_seed, SAMPLING_STREAM))


def precheck(cfg: ExperimentConfig) -> None:
    """Fail before any run if the configured sampler cannot be satisfied."""
    if cfg.samples_file is None and cfg.sampler.kind == "rle":
        check_rle_feasible(build_witness(cfg.language), cfg.sampler.max_len, cfg.total_samples)


def run_seed(cfg: ExperimentConfig, seed: int, samples: Optional[SampleSet] = None, return_population=False):
    """Evolve one seed; returns its trajectory (and the final population if asked)."""
    witness = build_witness(cfg.language)
    if samples is None:
        samples = witness_samples(cfg, seed)
    records: list[Checkpoint] = []
    pop = evolve(
        witness,
        CompiledSamples(samples),
        cfg.generations,
        RandomSource(seed),
        observer=records.append,
        checkpoints=cfg.checkpoints,
        mutation=cfg.mutation,
    )
    traj = RunTrajectory(seed, records)
    return (traj, pop) if return_population else traj


def _run_seed_job(args):
    cfg, seed, samples = args
    return run_seed(cfg, seed, samples)


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def trajectory_path(out: Path, seed: int) -> Path:
    return out / "trajectories" / f"seed_{seed}.csv"


def run_campaign(cfg: ExperimentConfig, progress: bool = False) -> CampaignSummary:
    """Run every seed, persist trajectories and the summary under ``cfg.output_dir``.

    Layout::

        config.txt                 resolved configuration (replayable)
        samples/seed_<s>.csv       the sample set each run trained on
        trajectories/seed_<s>.csv  per-checkpoint trajectory of one run
        summary.csv                cross-seed statistics per checkpoint
    """
    precheck(cfg)
    out = cfg.output_dir
    created = not out.exists()
    try:
        (out / "trajectories").mkdir(parents=True, exist_ok=True)
        (out / "samples").mkdir(exist_ok=True)
        (out / "config.txt").write_text(cfg.to_text())

        sample_sets = {}
        shared = None
        for seed in cfg.seeds:
            if cfg.samples_file is not None or cfg.sampler.kind == "bss" or cfg.samples_per == "campaign":
                shared = shared or witness_samples(cfg, seed)
                sample_sets[seed] = shared
            else:
                sample_sets[seed] = witness_samples(cfg, seed)
            save_samples(sample_sets[seed], out / "samples" / f"seed_{seed}.csv")

        jobs = [(cfg, seed, sample_sets[seed]) for seed in cfg.seeds]
        trajectories: list[RunTrajectory] = []
        if cfg.parallel > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
                results = pool.map(_run_seed_job, jobs)
                for i, traj in enumerate(results, 1):
                    trajectories.append(traj)
                    _progress(progress, cfg, i)
        else:
            for i, job in enumerate(jobs, 1):
                trajectories.append(_run_seed_job(job))
                _progress(progress, cfg, i)

        for traj in trajectories:
            write_csv(trajectory_path(out, traj.seed), TRAJECTORY_HEADER, traj.rows())
        rows = summarize(trajectories)
        write_csv(out / "summary.csv", SUMMARY_HEADER, [r.cells() for r in rows])
    except BaseException:
        if created:
            shutil.rmtree(out, ignore_errors=True)
        raise
    return CampaignSummary(cfg, rows, trajectories)


def _progress(enabled: bool, cfg: ExperimentConfig, done: int) -> None:
    if enabled:
        end = "\n" if done == len(cfg.seeds) else ""
        print(f"\r{cfg.language.name} {cfg.sampler.label}: {done}/{len(cfg.seeds)} runs", end=end, file=sys.stderr, flush=True)


def read_trajectory(path: str | Path) -> RunTrajectory:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        records = [
            Checkpoint(int(r["generation"]), int(r["best_fitness"]), int(r["best_states"]), int(r["population_size"]), [])
            for r in reader
        ]
        seed = int(Path(path).stem.split("_", 1)[1])
    return RunTrajectory(seed, records)


def compare_samplers(
    language: WitnessSpec, samplers: Sequence[Sampler], base: ExperimentConfig, progress: bool = False
) -> dict[str, CampaignSummary]:
    """One campaign per sampler over a shared seed list, merged for plotting.

    Each campaign lands in ``<out>/<label>/``; the merged outputs are
    ``compare_long.csv`` (sampler, seed, generation, best_fitness) and
    ``compare_table.csv`` with one mean column per sampler.
    """
    out = base.output_dir
    cfgs = [replace(base, language=language, sampler=s, output_dir=out / s.label) for s in samplers]
    for cfg in cfgs:
        precheck(cfg)
    out.mkdir(parents=True, exist_ok=True)
    results = {}
    for cfg in cfgs:
        results[cfg.sampler.label] = run_campaign(cfg, progress=progress)

    long_rows = []
    for label, summary in results.items():
        for traj in summary.trajectories:
            long_rows += [[label, traj.seed, r.generation, r.best_fitness] for r in traj.records]
    write_csv(out / "compare_long.csv", ["sampler", "seed", "generation", "best_fitness"], long_rows)

    labels = list(results)
    gens = [r.generation for r in results[labels[0]].rows]
    table = [[g] + [f"{results[lab].at(g).mean_best:.2f}" for lab in labels] for g in gens]
    write_csv(out / "compare_table.csv", ["generation"] + [f"mean_{lab}" for lab in labels], table)
    return results


def census_rows(language: WitnessSpec, max_len: int) -> list[list]:
    """Census table rows; percent is rounded to a whole number."""
    rows = census(build_witness(language), max_len)
    return [[r.max_len, r.total_strings, r.members, round(r.percent)] for r in rows]


def census_report(language: WitnessSpec, max_len: int, path: Optional[str | Path] = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CENSUS_HEADER)
    w.writerows(census_rows(language, max_len))
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
