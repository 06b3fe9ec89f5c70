"""Corpus data model, TSV ingestion, validation filters, and summaries.

A corpus is a single-year slice of publications together with the
reference records their citations resolve to. Ingestion reads three
tab-separated files (publications, references, citations), applies the
completeness filters, collapses journal identifier aliases to the most
frequent form, and counts every dropped row by reason.
"""

from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

PUB_COLUMNS = ("pub_id", "year", "journal_id", "citations_8yr")
REF_COLUMNS = ("ref_id", "year", "journal_id", "subject")
CITE_COLUMNS = ("pub_id", "ref_id")

# Drop-reason keys used in IngestDiagnostics.dropped.
DROP_TOO_FEW_REFS = "publication_fewer_than_two_references"
DROP_PUB_YEAR = "publication_outside_slice_year"
DROP_PUB_NO_JOURNAL = "publication_missing_journal"
DROP_REF_NO_JOURNAL = "reference_missing_journal"
DROP_REF_NO_SUBJECT = "reference_missing_subject"
DROP_REF_YEAR_RANGE = "reference_year_out_of_range"
DROP_CITE_UNKNOWN_PUB = "citation_unresolved_pub"
DROP_CITE_UNKNOWN_REF = "citation_unresolved_ref"
DROP_CITE_DUPLICATE = "citation_duplicate_row"

_ISSN_SHAPE = re.compile(r"^\d{4}-?\d{3}[\dXx]$")


class IngestError(ValueError):
    """Unrecoverable defect in an input file, reported as path:line."""


@dataclass(frozen=True)
class ReferenceRecord:
    """A cited document with complete publication data."""

    ref_id: str
    year: int
    journal_id: str
    subject: str


@dataclass(frozen=True)
class Publication:
    """A citing article and the ordered references it cites."""

    pub_id: str
    year: int
    journal_id: str
    refs: tuple[str, ...]
    citations_8yr: int


@dataclass
class IngestDiagnostics:
    """Row-level accounting for one ingestion run."""

    dropped: Counter = field(default_factory=Counter)
    journal_aliases_collapsed: int = 0

    def total_dropped(self) -> int:
        return sum(self.dropped.values())


@dataclass
class Corpus:
    """A year slice of publications plus the references they resolve to.

    ``background_tag`` records which substitution pool the corpus stands
    for when it is used by the shuffling machinery: ``local`` for a
    disciplinary network, ``global`` for an enclosing universe.
    Immutable by convention once constructed; every analysis takes a
    corpus read-only.
    """

    slice_year: int
    publications: list[Publication]
    references: dict[str, ReferenceRecord]
    background_tag: str = "local"
    diagnostics: IngestDiagnostics | None = field(default=None, compare=False)

    def journals(self) -> set[str]:
        """Journal ids appearing on this corpus's references."""
        return {rec.journal_id for rec in self.references.values()}

    def n_citations(self) -> int:
        return sum(len(p.refs) for p in self.publications)


@dataclass(frozen=True)
class IngestConfig:
    slice_year: int | None = None
    background_tag: str = "local"
    ref_year_min: int | None = None
    ref_year_max: int | None = None


@dataclass(frozen=True)
class CorpusSummary:
    unique_publications: int
    unique_references: int
    total_references: int
    ratio: float


def _read_rows(path: Path, columns: tuple[str, ...]) -> Iterator[tuple[int, list[str]]]:
    """Yield (line_number, fields) for a TSV file, validating the header."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}:1: empty file, expected header {columns}") from None
        if tuple(header) != columns:
            raise IngestError(f"{path}:1: bad header {header!r}, expected {list(columns)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(columns):
                raise IngestError(
                    f"{path}:{lineno}: expected {len(columns)} columns, found {len(row)}"
                )
            yield lineno, row


def _parse_int(value: str, path: Path, lineno: int, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise IngestError(f"{path}:{lineno}: non-integer {what}: {value!r}") from None


def _alias_key(journal_id: str) -> str:
    """Equivalence key under which raw journal identifiers are aliases.

    ISSN-shaped identifiers that differ only in the trailing check
    character denote the same serial; anything else is its own key.
    """
    if _ISSN_SHAPE.match(journal_id):
        return journal_id.replace("-", "").upper()[:7]
    return journal_id


def _canonical_journal_map(raw_counts: Counter) -> tuple[dict[str, str], int]:
    """Map each raw journal id to the most frequent form of its alias class."""
    classes: dict[str, list[str]] = {}
    for raw in raw_counts:
        classes.setdefault(_alias_key(raw), []).append(raw)
    mapping: dict[str, str] = {}
    collapsed = 0
    for members in classes.values():
        canon = max(members, key=lambda r: (raw_counts[r], r))
        for raw in members:
            mapping[raw] = canon
            if raw != canon:
                collapsed += 1
    return mapping, collapsed


def ingest(pub_file: str | Path, ref_file: str | Path, cite_file: str | Path,
           config: IngestConfig = IngestConfig()) -> Corpus:
    """Read and validate a corpus from its three TSV files.

    Recoverable defects (incomplete references, citations that do not
    resolve, publications left with fewer than two references) drop the
    affected rows and are tallied in the returned corpus's diagnostics.
    Structural defects (malformed rows, duplicate identifiers) raise
    IngestError naming the file and line.
    """
    pub_path, ref_path, cite_path = Path(pub_file), Path(ref_file), Path(cite_file)
    diags = IngestDiagnostics()

    raw_refs: dict[str, tuple[int, str, str]] = {}
    ref_lines: dict[str, int] = {}
    journal_counts: Counter = Counter()
    for lineno, (ref_id, year_s, journal_id, subject) in _read_rows(ref_path, REF_COLUMNS):
        year = _parse_int(year_s, ref_path, lineno, "year")
        if ref_id in raw_refs:
            raise IngestError(
                f"{ref_path}:{lineno}: duplicate ref_id {ref_id!r} "
                f"(first seen at line {ref_lines[ref_id]})"
            )
        ref_lines[ref_id] = lineno
        if not journal_id:
            diags.dropped[DROP_REF_NO_JOURNAL] += 1
            continue
        if not subject:
            diags.dropped[DROP_REF_NO_SUBJECT] += 1
            continue
        if (config.ref_year_min is not None and year < config.ref_year_min) or (
            config.ref_year_max is not None and year > config.ref_year_max
        ):
            diags.dropped[DROP_REF_YEAR_RANGE] += 1
            continue
        raw_refs[ref_id] = (year, journal_id, subject)
        journal_counts[journal_id] += 1

    raw_pubs: dict[str, tuple[int, str, int]] = {}
    pub_order: list[str] = []
    pub_lines: dict[str, int] = {}
    for lineno, (pub_id, year_s, journal_id, cites_s) in _read_rows(pub_path, PUB_COLUMNS):
        year = _parse_int(year_s, pub_path, lineno, "year")
        cites = _parse_int(cites_s, pub_path, lineno, "citations_8yr")
        if cites < 0:
            raise IngestError(f"{pub_path}:{lineno}: negative citations_8yr: {cites}")
        if pub_id in raw_pubs:
            raise IngestError(
                f"{pub_path}:{lineno}: duplicate pub_id {pub_id!r} "
                f"(first seen at line {pub_lines[pub_id]})"
            )
        pub_lines[pub_id] = lineno
        if not journal_id:
            diags.dropped[DROP_PUB_NO_JOURNAL] += 1
            continue
        raw_pubs[pub_id] = (year, journal_id, cites)
        pub_order.append(pub_id)
        journal_counts[journal_id] += 1

    slice_year = config.slice_year
    if slice_year is None:
        years = {raw_pubs[p][0] for p in pub_order}
        if len(years) > 1:
            raise IngestError(
                f"{pub_path}: publications span years {sorted(years)}; "
                "set slice_year to select one"
            )
        slice_year = years.pop() if years else 0

    journal_map, collapsed = _canonical_journal_map(journal_counts)
    diags.journal_aliases_collapsed = collapsed

    references = {
        rid: ReferenceRecord(rid, year, journal_map[journal], subject)
        for rid, (year, journal, subject) in raw_refs.items()
    }

    pub_refs: dict[str, list[str]] = {p: [] for p in pub_order}
    seen_cites: set[tuple[str, str]] = set()
    for lineno, (pub_id, ref_id) in _read_rows(cite_path, CITE_COLUMNS):
        if pub_id not in pub_refs:
            diags.dropped[DROP_CITE_UNKNOWN_PUB] += 1
            continue
        if ref_id not in references:
            diags.dropped[DROP_CITE_UNKNOWN_REF] += 1
            continue
        if (pub_id, ref_id) in seen_cites:
            diags.dropped[DROP_CITE_DUPLICATE] += 1
            continue
        seen_cites.add((pub_id, ref_id))
        pub_refs[pub_id].append(ref_id)

    publications: list[Publication] = []
    for pub_id in pub_order:
        year, journal, cites = raw_pubs[pub_id]
        if year != slice_year:
            diags.dropped[DROP_PUB_YEAR] += 1
            continue
        refs = tuple(pub_refs[pub_id])
        if len(refs) < 2:
            diags.dropped[DROP_TOO_FEW_REFS] += 1
            continue
        publications.append(Publication(pub_id, year, journal_map[journal], refs, cites))

    return Corpus(
        slice_year=slice_year,
        publications=publications,
        references=references,
        background_tag=config.background_tag,
        diagnostics=diags,
    )


def export_corpus(corpus: Corpus, out_dir: str | Path) -> dict[str, Path]:
    """Write a corpus back out as the three TSV files.

    Publications keep corpus order, references are sorted by id, so
    identical corpora export byte-identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "publications": out / "publications.tsv",
        "references": out / "references.tsv",
        "citations": out / "citations.tsv",
    }
    with open(paths["publications"], "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(PUB_COLUMNS)
        for p in corpus.publications:
            w.writerow([p.pub_id, p.year, p.journal_id, p.citations_8yr])
    with open(paths["references"], "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(REF_COLUMNS)
        for rid in sorted(corpus.references):
            r = corpus.references[rid]
            w.writerow([r.ref_id, r.year, r.journal_id, r.subject])
    with open(paths["citations"], "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(CITE_COLUMNS)
        for p in corpus.publications:
            for rid in p.refs:
                w.writerow([p.pub_id, rid])
    return paths


def summarize(corpus: Corpus) -> CorpusSummary:
    """Publication/reference counts and the total-to-unique reference ratio."""
    cited: set[str] = set()
    total = 0
    for p in corpus.publications:
        cited.update(p.refs)
        total += len(p.refs)
    ratio = total / len(cited) if cited else 0.0
    return CorpusSummary(len(corpus.publications), len(cited), total, ratio)


def validate_corpus(corpus: Corpus) -> None:
    """Raise ValueError on any violated corpus invariant."""
    seen: set[str] = set()
    for p in corpus.publications:
        if p.pub_id in seen:
            raise ValueError(f"duplicate pub_id {p.pub_id!r}")
        seen.add(p.pub_id)
        if p.year != corpus.slice_year:
            raise ValueError(
                f"publication {p.pub_id!r} has year {p.year}, corpus slice is {corpus.slice_year}"
            )
        if len(p.refs) < 2:
            raise ValueError(f"publication {p.pub_id!r} has fewer than two references")
        if len(set(p.refs)) != len(p.refs):
            raise ValueError(f"publication {p.pub_id!r} cites a reference more than once")
        for rid in p.refs:
            if rid not in corpus.references:
                raise ValueError(f"publication {p.pub_id!r} cites unknown reference {rid!r}")
    for rid, rec in corpus.references.items():
        if rec.ref_id != rid:
            raise ValueError(f"reference map key {rid!r} does not match record id {rec.ref_id!r}")
        if not rec.journal_id:
            raise ValueError(f"reference {rid!r} has an empty journal id")
        if not rec.subject:
            raise ValueError(f"reference {rid!r} has an empty subject label")
