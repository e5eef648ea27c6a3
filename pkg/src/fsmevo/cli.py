"""Command line entry point: ``fsmevo census|sample|evolve|campaign|compare``.

Exit codes: 0 success, 2 configuration error, 3 infeasible sample set.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .fsm import dumps
from .harness import (
    TRAJECTORY_HEADER,
    ConfigError,
    Sampler,
    census_report,
    compare_samplers,
    config_from_mapping,
    read_config_file,
    run_campaign,
    run_seed,
    witness_samples,
    write_csv,
)
from .sampling import InfeasibleSampleSet, load_samples, save_samples
from .witness import WitnessSpec

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_experiment_flags(p: argparse.ArgumentParser, multi_seed: bool) -> None:
    p.add_argument("--config", type=Path, help="flat key = value config file; flags override it")
    p.add_argument("--language", help="target language, e.g. U3")
    p.add_argument("--samples", type=int, help="total sample strings D (default 1000)")
    p.add_argument("--generations", type=int, help="number of mutant-creation steps G")
    p.add_argument("--checkpoints", help="comma-separated generation numbers to record")
    p.add_argument("--mutation-flip", dest="mutation", choices=["random", "toggle"])
    p.add_argument("--out", help="output directory")
    p.add_argument("--load-samples", dest="load_samples", help="train on a saved sample set")
    if multi_seed:
        p.add_argument("--seeds", type=int, help="number of runs (seeds base_seed .. base_seed+k-1)")
        p.add_argument("--base-seed", dest="base_seed", type=int)
        p.add_argument("--samples-per", dest="samples_per", choices=["seed", "campaign"])
        p.add_argument("--parallel", type=int, help="worker processes")
    else:
        p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fsmevo", description="Evolve FSMs towards the universal witness languages U_n.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("census", help="exact member counts of U_n by maximum string length")
    p.add_argument("--language", required=True)
    p.add_argument("--max-len", dest="max_len", type=int, default=16)
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("sample", help="generate and save a sample set")
    p.add_argument("--language", required=True)
    p.add_argument("--sampler", default="bss", help="bss or rle:<n>")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--save-samples", dest="save_samples", required=True)

    p = sub.add_parser("evolve", help="single seeded run")
    p.add_argument("--sampler", help="bss or rle:<n>")
    _add_experiment_flags(p, multi_seed=False)
    p.add_argument("--save-samples", dest="save_samples")
    p.add_argument("--save-best", dest="save_best", help="write the best machine in text form")

    p = sub.add_parser("campaign", help="multi-seed campaign with summary")
    p.add_argument("--sampler", help="bss or rle:<n>")
    _add_experiment_flags(p, multi_seed=True)

    p = sub.add_parser("compare", help="one campaign per sampler, merged CSVs")
    p.add_argument("--sampler", action="append", dest="samplers", help="repeatable; bss or rle:<n>")
    _add_experiment_flags(p, multi_seed=True)
    return parser


def _resolve(args) -> dict:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config", "samplers")}
    if "seeds" in flags or "base_seed" in flags:
        values.pop("seed_list", None)
    values.update(flags)
    return values


def cmd_census(args) -> int:
    text = census_report(WitnessSpec.parse(args.language), args.max_len, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_sample(args) -> int:
    values = {"language": args.language, "sampler": args.sampler, "samples": args.samples, "generations": 0}
    cfg = config_from_mapping(values | {"seed_list": [args.seed]})
    samples = witness_samples(cfg, args.seed)
    save_samples(samples, args.save_samples)
    print(f"{len(samples.accept)} positives, {len(samples.reject)} negatives -> {args.save_samples}")
    return 0


def cmd_evolve(args) -> int:
    values = _resolve(args)
    seed = values.pop("seed", 0)
    values["seed_list"] = [seed]
    cfg = config_from_mapping(values)
    if cfg.samples_file is not None:
        samples = load_samples(cfg.samples_file)
    else:
        samples = witness_samples(cfg, seed)
    if args.save_samples:
        save_samples(samples, args.save_samples)
    traj, pop = run_seed(cfg, seed, samples, return_population=True)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / f"seed_{seed}.csv", TRAJECTORY_HEADER, traj.rows())
    else:
        w = sys.stdout
        w.write(",".join(TRAJECTORY_HEADER) + "\n")
        for row in traj.rows():
            w.write(",".join(map(str, row)) + "\n")
    if args.save_best:
        Path(args.save_best).write_text(dumps(pop.best().machine))
    return 0


def cmd_campaign(args) -> int:
    cfg = config_from_mapping(_resolve(args))
    summary = run_campaign(cfg, progress=True)
    for r in summary.rows:
        if r.generation in (cfg.checkpoints[0], cfg.generations) or r.generation % 100_000 == 0:
            print(f"{r.generation:>10}  mean {r.mean_best:8.2f}  min {r.min_best:5d}  max {r.max_best:5d}")
    return 0


def cmd_compare(args) -> int:
    values = _resolve(args)
    samplers = [Sampler.parse(s) for s in (args.samplers or ["bss", "rle:7", "rle:11", "rle:15"])]
    values.setdefault("sampler", str(samplers[0]))
    base = config_from_mapping(values)
    results = compare_samplers(base.language, samplers, base, progress=True)
    labels = list(results)
    print("generation  " + "  ".join(f"{lab:>9}" for lab in labels))
    for r in results[labels[0]].rows:
        if r.generation % 100_000 == 0 or r.generation == base.generations:
            print(f"{r.generation:>10}  " + "  ".join(f"{results[lab].at(r.generation).mean_best:9.2f}" for lab in labels))
    return 0


COMMANDS = {
    "census": cmd_census,
    "sample": cmd_sample,
    "evolve": cmd_evolve,
    "campaign": cmd_campaign,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InfeasibleSampleSet as exc:
        print(f"fsmevo: infeasible sample set: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, ValueError) as exc:
        print(f"fsmevo: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
