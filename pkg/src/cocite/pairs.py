"""Journal-pair generation and observed co-citation frequencies."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Mapping, NamedTuple

from .corpus import Corpus, Publication, ReferenceRecord


class JournalPair(NamedTuple):
    """Canonical unordered pair of journal ids; self-pairs are permitted."""

    a: str
    b: str

    @classmethod
    def of(cls, x: str, y: str) -> "JournalPair":
        return cls(x, y) if x <= y else cls(y, x)


@dataclass
class JournalPairTable:
    """Sparse journal-pair frequency table."""

    counts: Counter = field(default_factory=Counter)

    @property
    def total_pairs(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, pair: JournalPair) -> int:
        return self.counts.get(pair, 0)

    def __len__(self) -> int:
        return len(self.counts)


def pub_pairs(pub: Publication, references: Mapping[str, ReferenceRecord]) -> list[JournalPair]:
    """All unordered journal pairs among a publication's references.

    Returns exactly n*(n-1)/2 pairs as a multiset: two references in the
    same journal contribute a self-pair, repeated journal combinations
    are repeated in the output.
    """
    if len(pub.refs) < 2:
        raise ValueError(f"publication {pub.pub_id!r} has fewer than two references")
    journals = []
    for rid in pub.refs:
        rec = references.get(rid)
        if rec is None:
            raise ValueError(f"reference {rid!r} cited by {pub.pub_id!r} has no journal record")
        journals.append(rec.journal_id)
    return [JournalPair.of(x, y) for x, y in combinations(journals, 2)]


def observed_frequencies(corpus: Corpus) -> JournalPairTable:
    """Journal-pair frequencies summed across every publication in the corpus."""
    table = JournalPairTable()
    for pub in corpus.publications:
        table.counts.update(pub_pairs(pub, corpus.references))
    return table


def write_pair_csv(table: JournalPairTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["journal_a", "journal_b", "frequency"])
        for pair in sorted(table.counts):
            w.writerow([pair.a, pair.b, table.counts[pair]])
