"""Per-publication z-score statistics and novelty/conventionality labels."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Corpus, Publication, ReferenceRecord
from .pairs import JournalPair, pub_pairs
from .simulate import PairStats

CATEGORIES = ("LNLC", "LNHC", "HNLC", "HNHC")
NOVELTY_PERCENTILES = (10, 1)


@dataclass(frozen=True)
class ClassifyConfig:
    novelty_percentile: int = 10

    def __post_init__(self):
        if self.novelty_percentile not in NOVELTY_PERCENTILES:
            raise ValueError(
                f"novelty_percentile must be one of {NOVELTY_PERCENTILES}, "
                f"got {self.novelty_percentile!r}"
            )


@dataclass(frozen=True)
class PubSummary:
    """Positional statistics of one publication's pair z-scores."""

    pub_id: str
    z_median: float
    z_p10: float
    z_p1: float
    n_defined_pairs: int
    category: str | None = None


def index_pair_stats(stats: Iterable[PairStats]) -> dict[JournalPair, PairStats]:
    return {ps.pair: ps for ps in stats}


def pub_zstats(pub: Publication, references: Mapping[str, ReferenceRecord],
               stats: Mapping[JournalPair, PairStats]) -> PubSummary:
    """Median, 10th, and 1st percentile of a publication's z-score multiset.

    Every pair instance counts with its multiplicity; pairs with an
    undefined z are dropped. Percentiles interpolate linearly between
    closest order statistics.
    """
    zs = []
    for pair in pub_pairs(pub, references):
        ps = stats.get(pair)
        if ps is not None and ps.z is not None:
            zs.append(ps.z)
    if not zs:
        raise ValueError(f"publication {pub.pub_id!r} has no journal pair with a defined z-score")
    med, p10, p1 = np.percentile(np.asarray(zs, dtype=np.float64), [50.0, 10.0, 1.0])
    return PubSummary(pub.pub_id, float(med), float(p10), float(p1), len(zs))


def corpus_summaries(corpus: Corpus, stats: Mapping[JournalPair, PairStats]
                     ) -> tuple[list[PubSummary], int]:
    """Summaries for every publication with at least one defined pair.

    Returns (summaries, excluded) where excluded counts publications
    whose pairs all lack a defined z-score.
    """
    out: list[PubSummary] = []
    excluded = 0
    for pub in corpus.publications:
        try:
            out.append(pub_zstats(pub, corpus.references, stats))
        except ValueError:
            excluded += 1
    return out, excluded


def classify_corpus(summaries: Sequence[PubSummary],
                    cfg: ClassifyConfig = ClassifyConfig()
                    ) -> tuple[list[PubSummary], float]:
    """Label each publication with its 2x2 category.

    Conventionality is high when the publication's median z strictly
    exceeds the corpus median of medians; novelty is high when the
    configured low-tail percentile is strictly negative. Publications
    sitting exactly on a threshold land in the L category.
    """
    if not summaries:
        raise ValueError("no publication summaries to classify")
    threshold = float(np.median(np.asarray([s.z_median for s in summaries])))
    labeled = []
    for s in summaries:
        hc = s.z_median > threshold
        tail = s.z_p10 if cfg.novelty_percentile == 10 else s.z_p1
        hn = tail < 0.0
        labeled.append(replace(s, category=("HN" if hn else "LN") + ("HC" if hc else "LC")))
    return labeled, threshold


def write_summaries_csv(summaries: Sequence[PubSummary], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pub_id", "z_median", "z_p10", "z_p1", "category", "n_defined_pairs"])
        for s in summaries:
            w.writerow([s.pub_id, repr(s.z_median), repr(s.z_p10), repr(s.z_p1),
                        s.category or "", s.n_defined_pairs])


def read_summaries_csv(path: str | Path) -> list[PubSummary]:
    out: list[PubSummary] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        expected = ["pub_id", "z_median", "z_p10", "z_p1", "category", "n_defined_pairs"]
        if header != expected:
            raise ValueError(f"{path}: bad classification header {header!r}")
        for row in reader:
            out.append(PubSummary(row[0], float(row[1]), float(row[2]), float(row[3]),
                                  int(row[5]), row[4] or None))
    return out
