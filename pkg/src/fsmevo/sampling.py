"""Positive/negative training sets: balanced short strings and random length-bounded draws."""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .fsm import ALPHABET, NSYM, Fsm, accepts
from .rng import RandomSource
from .witness import member_count_up_to, total_strings_up_to

BSS_MAX_LEN = 32
RLE_MAX_DRAWS = 10**9


class InfeasibleSampleSet(ValueError):
    """The target language cannot supply the requested balanced sample."""


@dataclass(frozen=True)
class SampleSet:
    accept: tuple[str, ...]
    reject: tuple[str, ...]
    method: str
    target_total: int

    def __post_init__(self):
        if len(set(self.accept)) != len(self.accept) or len(set(self.reject)) != len(self.reject):
            raise ValueError("duplicate strings within a sample set")
        if set(self.accept) & set(self.reject):
            raise ValueError("a string appears in both accept and reject sets")

    def __len__(self) -> int:
        return len(self.accept) + len(self.reject)

    @property
    def max_length(self) -> int:
        return max((len(s) for s in self.accept + self.reject), default=0)

    def check_labels(self, witness: Fsm) -> None:
        """Raise if any string is mislabelled with respect to ``witness``."""
        for s in self.accept:
            if not accepts(witness, s):
                raise ValueError(f"positive example {s!r} is rejected by the witness")
        for s in self.reject:
            if accepts(witness, s):
                raise ValueError(f"negative example {s!r} is accepted by the witness")


def shortlex(max_len: int | None = None) -> Iterator[str]:
    """All strings over ``ALPHABET`` by length, then alphabetically."""
    for length in itertools.count() if max_len is None else range(max_len + 1):
        for letters in itertools.product(ALPHABET, repeat=length):
            yield "".join(letters)


def generate_bss(witness: Fsm, total: int) -> SampleSet:
    """Balanced short strings.

    Walks shortlex order and adds a member to the accept set only while it is
    not larger than the reject set, and a non-member to the reject set only
    while it is not smaller, stopping once ``total`` strings are held.
    """
    if total < 0:
        raise ValueError("total must be non-negative")
    if total > 0:
        check_feasible(witness, BSS_MAX_LEN, total, "Bss")
    acc: list[str] = []
    rej: list[str] = []
    if total > 0:
        for s in shortlex(BSS_MAX_LEN):
            if accepts(witness, s):
                if len(acc) <= len(rej):
                    acc.append(s)
            elif len(acc) >= len(rej):
                rej.append(s)
            if len(acc) + len(rej) >= total:
                break
        else:
            raise InfeasibleSampleSet(
                f"Bss found only {len(acc)} positives and {len(rej)} negatives up to length {BSS_MAX_LEN}"
            )
    return SampleSet(tuple(acc), tuple(rej), "bss", total)


def check_feasible(witness: Fsm, max_len: int, total: int, method: str = "Rle") -> None:
    """Raise unless the language and its complement each hold ``ceil(total/2)`` strings of length <= max_len."""
    members = member_count_up_to(witness, max_len)
    others = total_strings_up_to(max_len) - members
    half = (total + 1) // 2
    if members < half or others < half:
        raise InfeasibleSampleSet(
            f"{method}: only {members} members and {others} non-members of length <= {max_len}; "
            f"need {half} of each"
        )


def check_rle_feasible(witness: Fsm, max_len: int, total: int) -> None:
    check_feasible(witness, max_len, total, f"Rle{max_len}")


def length_cdf(max_len: int) -> list[float]:
    """Cumulative weights 3^L for L = 0..max_len (uniform over all strings)."""
    cdf = []
    acc = 0
    for length in range(max_len + 1):
        acc += NSYM**length
        cdf.append(float(acc))
    return cdf


def random_string(rng: RandomSource, cdf: list[float]) -> str:
    length = rng.choice_weighted(cdf)
    return "".join(ALPHABET[rng.below(NSYM)] for _ in range(length))


def generate_rle(witness: Fsm, max_len: int, total: int, rng: RandomSource) -> SampleSet:
    """Random strings of length at most ``max_len``, ``total/2`` of each label.

    Lengths are weighted by the number of strings of that length, so every
    string of length <= max_len is equally likely.  Repeats are redrawn.
    """
    if total % 2:
        raise ValueError("total must be even")
    check_rle_feasible(witness, max_len, total)
    half = total // 2
    cdf = length_cdf(max_len)
    acc: list[str] = []
    rej: list[str] = []
    seen: set[str] = set()
    draws = 0
    while len(acc) + len(rej) < total:
        draws += 1
        if draws > RLE_MAX_DRAWS:
            raise InfeasibleSampleSet(f"gave up after {RLE_MAX_DRAWS} draws")
        s = random_string(rng, cdf)
        if s in seen:
            continue
        if accepts(witness, s):
            if len(acc) < half:
                acc.append(s)
                seen.add(s)
        elif len(rej) < half:
            rej.append(s)
            seen.add(s)
    return SampleSet(tuple(acc), tuple(rej), f"rle:{max_len}", total)


def save_samples(samples: SampleSet, path: str | Path) -> None:
    """Write ``label,string`` rows; ``+`` for positives, ``-`` for negatives."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# method={samples.method} total={samples.target_total}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "string"])
        w.writerows(("+", s) for s in samples.accept)
        w.writerows(("-", s) for s in samples.reject)


def load_samples(path: str | Path) -> SampleSet:
    acc, rej = [], []
    method, total = "file", None
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    if lines and lines[0].startswith("#"):
        for item in lines[0][1:].split():
            key, _, val = item.partition("=")
            if key == "method":
                method = val
            elif key == "total":
                total = int(val)
        lines = lines[1:]
    for row in csv.reader(lines):
        if not row or row == ["label", "string"]:
            continue
        label = row[0]
        s = row[1] if len(row) > 1 else ""
        if label == "+":
            acc.append(s)
        elif label in ("-", "−"):
            rej.append(s)
        else:
            raise ValueError(f"bad label {label!r} in {path}")
    return SampleSet(tuple(acc), tuple(rej), method, len(acc) + len(rej) if total is None else total)
