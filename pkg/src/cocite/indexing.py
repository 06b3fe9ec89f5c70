"""Array-backed corpus views shared by the shuffling and counting engines."""

from __future__ import annotations

import numpy as np

from .corpus import Corpus

# Dense journal-pair tables are used up to this many cells (n_journals
# squared); larger journal sets fall back to sorted sparse counting.
DENSE_PAIR_LIMIT = 1 << 22


class CorpusIndex:
    """Numeric view of an analyzed corpus inside a substitution pool.

    The pool supplies the reference universe and the citation slots that
    shuffling permutes; the analyzed corpus is the subset of publications
    whose statistics are read back out. For a local background the two
    coincide. Slot order is publication-major in pool order, which fixes
    the layout every deterministic contract builds on.
    """

    def __init__(self, corpus: Corpus, pool: Corpus | None = None):
        if pool is None:
            pool = corpus
        self.corpus = corpus
        self.pool = pool
        self.local = pool is corpus

        refs = pool.references
        self.ref_ids = sorted(refs)
        ref_index = {r: i for i, r in enumerate(self.ref_ids)}
        n_refs = len(self.ref_ids)
        self.journal_ids = sorted({rec.journal_id for rec in refs.values()})
        self.subject_ids = sorted({rec.subject for rec in refs.values()})
        self.n_journals = len(self.journal_ids)
        jindex = {j: i for i, j in enumerate(self.journal_ids)}
        sindex = {s: i for i, s in enumerate(self.subject_ids)}
        self.ref_year = np.fromiter((refs[r].year for r in self.ref_ids), np.int64, n_refs)
        self.ref_journal = np.fromiter(
            (jindex[refs[r].journal_id] for r in self.ref_ids), np.int64, n_refs
        )
        self.ref_subject = np.fromiter(
            (sindex[refs[r].subject] for r in self.ref_ids), np.int64, n_refs
        )

        self.pool_pub_ids = [p.pub_id for p in pool.publications]
        n_pool = len(self.pool_pub_ids)
        counts = np.fromiter((len(p.refs) for p in pool.publications), np.int64, n_pool)
        self.pool_pub_ptr = np.concatenate([np.zeros(1, np.int64), np.cumsum(counts)])
        try:
            flat = [ref_index[r] for p in pool.publications for r in p.refs]
        except KeyError as exc:
            raise ValueError(f"citation to unknown reference {exc.args[0]!r}") from None
        self.slot_ref = np.asarray(flat, dtype=np.int64)
        self.slot_pub = np.repeat(np.arange(n_pool, dtype=np.int64), counts)

        # Permutation groups: pool slots keyed by reference year, slot
        # order preserved within each group.
        if len(self.slot_ref):
            slot_year = self.ref_year[self.slot_ref]
            order = np.argsort(slot_year, kind="stable")
            yvals, starts = np.unique(slot_year[order], return_index=True)
            bounds = np.append(starts, len(order))
            self.group_years = [int(y) for y in yvals]
            self.group_slots = [order[bounds[i]: bounds[i + 1]] for i in range(len(yvals))]
            self._year_min = int(self.ref_year.min())
            self._n_year_bins = int(self.ref_year.max()) - self._year_min + 1
        else:
            self.group_years = []
            self.group_slots = []
            self._year_min = 0
            self._n_year_bins = 1

        # Analyzed-corpus read-back: flat slot ids in corpus order.
        self.c_pub_ids = [p.pub_id for p in corpus.publications]
        n_cpubs = len(self.c_pub_ids)
        if self.local:
            c_counts = counts
            self.c_pub_ptr = self.pool_pub_ptr
            self.c_slot_index = np.arange(len(self.slot_ref), dtype=np.int64)
        else:
            pub_row = {pid: i for i, pid in enumerate(self.pool_pub_ids)}
            rows = np.empty(n_cpubs, np.int64)
            for i, p in enumerate(corpus.publications):
                r = pub_row.get(p.pub_id)
                if r is None:
                    raise ValueError(
                        f"publication {p.pub_id!r} is not in the substitution pool"
                    )
                if pool.publications[r].refs != p.refs:
                    raise ValueError(
                        f"publication {p.pub_id!r} cites different references in the pool"
                    )
                rows[i] = r
            c_counts = counts[rows] if n_cpubs else np.zeros(0, np.int64)
            self.c_pub_ptr = np.concatenate([np.zeros(1, np.int64), np.cumsum(c_counts)])
            if n_cpubs:
                self.c_slot_index = np.concatenate(
                    [np.arange(self.pool_pub_ptr[r], self.pool_pub_ptr[r + 1]) for r in rows]
                )
            else:
                self.c_slot_index = np.zeros(0, np.int64)
        self.c_counts = c_counts
        self.c_slot_pub = np.repeat(np.arange(n_cpubs, dtype=np.int64), c_counts)
        self.c_citations = np.fromiter(
            (p.citations_8yr for p in corpus.publications), np.int64, n_cpubs
        )

        # Publications bucketed by reference count give rectangular slot
        # matrices, so duplicate detection and pair extraction vectorize.
        self._buckets: list[tuple[int, np.ndarray, np.ndarray]] = []
        if n_cpubs:
            for n in np.unique(c_counts):
                rows = np.nonzero(c_counts == n)[0]
                mat = self.c_slot_index[self.c_pub_ptr[rows][:, None] + np.arange(n)[None, :]]
                self._buckets.append((int(n), rows, mat))
        self._triu: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    @property
    def n_groups(self) -> int:
        return len(self.group_years)

    def _triu_idx(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        got = self._triu.get(n)
        if got is None:
            got = np.triu_indices(n, k=1)
            self._triu[n] = got
        return got

    def duplicate_pub_rows(self, assignment: np.ndarray) -> np.ndarray:
        """Analyzed publication rows holding the same reference twice."""
        hit = []
        for n, rows, mat in self._buckets:
            t = np.sort(assignment[mat], axis=1)
            dup = (t[:, 1:] == t[:, :-1]).any(axis=1)
            if dup.any():
                hit.append(rows[dup])
        if not hit:
            return np.zeros(0, np.int64)
        return np.sort(np.concatenate(hit))

    def pair_key_counts(
        self, assignment: np.ndarray, exclude_rows: np.ndarray | None = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Unique canonical pair keys and counts over analyzed publications.

        Keys encode (lo, hi) journal ranks as lo * n_journals + hi; keys
        are returned in ascending order.
        """
        excl_mask = None
        if exclude_rows is not None and len(exclude_rows):
            excl_mask = np.zeros(len(self.c_pub_ids), bool)
            excl_mask[exclude_rows] = True
        parts = []
        for n, rows, mat in self._buckets:
            sel = mat if excl_mask is None else mat[~excl_mask[rows]]
            if sel.shape[0] == 0:
                continue
            j = self.ref_journal[assignment[sel]]
            iu0, iu1 = self._triu_idx(n)
            a = j[:, iu0].reshape(-1)
            b = j[:, iu1].reshape(-1)
            lo = np.minimum(a, b)
            hi = np.maximum(a, b)
            parts.append(lo * self.n_journals + hi)
        if not parts:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        keys = np.concatenate(parts)
        if self.n_journals * self.n_journals <= DENSE_PAIR_LIMIT:
            table = np.bincount(keys, minlength=self.n_journals * self.n_journals)
            nz = np.nonzero(table)[0]
            return nz, table[nz]
        uk, counts = np.unique(keys, return_counts=True)
        return uk, counts.astype(np.int64)

    def key_to_pair(self, key: int) -> tuple[str, str]:
        i, j = divmod(int(key), self.n_journals)
        return self.journal_ids[i], self.journal_ids[j]

    def fixed_points(self, assignment: np.ndarray) -> int:
        """Analyzed-corpus citations that landed back on their original reference."""
        cs = self.c_slot_index
        return int((assignment[cs] == self.slot_ref[cs]).sum())

    def corpus_year_histogram(self, assignment: np.ndarray) -> np.ndarray:
        """Reference-year histogram per analyzed publication, flattened."""
        y = self.ref_year[assignment[self.c_slot_index]]
        key = self.c_slot_pub * self._n_year_bins + (y - self._year_min)
        return np.bincount(key, minlength=len(self.c_pub_ids) * self._n_year_bins)

    def subject_counts(
        self, assignment: np.ndarray, exclude_rows: np.ndarray | None = None
    ) -> np.ndarray:
        """Citation counts per subject over analyzed publications."""
        slots = self.c_slot_index
        if exclude_rows is not None and len(exclude_rows):
            mask = np.zeros(len(self.c_pub_ids), bool)
            mask[exclude_rows] = True
            slots = slots[~mask[self.c_slot_pub]]
        s = self.ref_subject[assignment[slots]]
        return np.bincount(s, minlength=len(self.subject_ids))
