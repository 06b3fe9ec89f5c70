"""Model-misspecification diagnostics.

Two complementary views of how far a null model drifts from the data it
simulates: Kullback-Leibler divergence between observed and simulated
journal-pair distributions, and per-subject fold differences in the
citation composition before and after a single shuffle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus
from .pairs import JournalPairTable
from .shuffle import ShuffleOutcome

DEFAULT_EPSILON = 1e-12


@dataclass(frozen=True)
class DivergenceResult:
    corpus_tag: str
    background: str
    kld: float
    n_support: int
    epsilon: float
    year: int | None = None


def _mean_of(value) -> float:
    if isinstance(value, tuple):
        return float(value[0])
    return float(value)


def kl_divergence(obs: JournalPairTable, sim_mean: Mapping,
                  journal_filter: Iterable[str] | None = None,
                  epsilon: float = DEFAULT_EPSILON, *,
                  corpus_tag: str = "", background: str = "",
                  year: int | None = None) -> DivergenceResult:
    """D(observed || simulated) in bits over the filtered union support.

    Both tables are restricted to pairs whose journals are both in
    ``journal_filter``, padded with ``epsilon`` on every union-support
    bin, and normalized to probability distributions. ``sim_mean`` may
    map pairs to means or to (mean, sigma) tuples.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    keep = None if journal_filter is None else set(journal_filter)

    def admitted(pair) -> bool:
        return keep is None or (pair[0] in keep and pair[1] in keep)

    p_raw = {pair: float(c) for pair, c in obs.counts.items() if admitted(pair)}
    q_raw = {pair: _mean_of(v) for pair, v in sim_mean.items() if admitted(pair)}
    support = sorted(set(p_raw) | set(q_raw))
    if not support:
        raise ValueError("no journal pairs survive the filter; cannot compute divergence")
    p = [p_raw.get(pair, 0.0) + epsilon for pair in support]
    q = [q_raw.get(pair, 0.0) + epsilon for pair in support]
    p_total = sum(p)
    q_total = sum(q)
    kld = 0.0
    for pi, qi in zip(p, q):
        pn = pi / p_total
        qn = qi / q_total
        if pn != qn:
            kld += pn * math.log2(pn / qn)
    # Rounding can leave a tiny negative residue on near-identical inputs.
    return DivergenceResult(corpus_tag, background, max(kld, 0.0), len(support), epsilon, year)


@dataclass(frozen=True)
class CompositionRow:
    subject: str
    o: int
    s: int
    fold: int


def _fold(o: int, s: int) -> int:
    if o == s:
        return 1
    if o == 0 or s == 0:
        # One-sided null: the zero side counts as 1.
        return max(o, s)
    return round(max(o, s) / min(o, s))


def composition_fold(before: Corpus, after: ShuffleOutcome,
                     subjects: Iterable[str] | None = None,
                     include_deleted: bool = True) -> list[CompositionRow]:
    """Per-subject citation counts before (o) and after (s) one shuffle.

    By default the post-shuffle side counts every slot, including
    publications the error-correction step later deletes; this is the
    composition the shuffle itself produced. Pass include_deleted=False
    to count only surviving publications.
    """
    idx = after._plan.index
    if before is not idx.corpus and [p.pub_id for p in before.publications] != idx.c_pub_ids:
        raise ValueError("shuffle outcome was not produced from this corpus")
    o_counts = idx.subject_counts(idx.slot_ref)
    exclude = None if include_deleted else after._deleted_rows
    s_counts = idx.subject_counts(after._assignment, exclude_rows=exclude)
    known = {
        label: (int(o_counts[i]), int(s_counts[i]))
        for i, label in enumerate(idx.subject_ids)
    }
    labels = sorted(known) if subjects is None else sorted(set(subjects))
    rows = []
    for label in labels:
        o, s = known.get(label, (0, 0))
        rows.append(CompositionRow(label, o, s, _fold(o, s)))
    return rows


def write_composition_csv(rows: Sequence[CompositionRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subject", "o", "s", "fold"])
        for row in rows:
            w.writerow([row.subject, row.o, row.s, row.fold])


def write_divergence_csv(rows: Sequence[DivergenceResult], path: str | Path,
                         ratio: float | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["corpus", "year", "background", "kld", "n_support", "epsilon", "ratio"])
        for i, row in enumerate(rows):
            r = repr(ratio) if ratio is not None and i == len(rows) - 1 else ""
            w.writerow([row.corpus_tag, "" if row.year is None else row.year,
                        row.background, repr(row.kld), row.n_support,
                        repr(row.epsilon), r])
