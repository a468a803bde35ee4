"""Friendship mixing by gender pair, age gap and civil-status pair."""
import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .model import STATUSES, EdgeStore, MemberStore

REPORT_VERSION = 1
GENDER_PAIRS = ("MM", "FF", "MF")
# the ten unordered status pairs, (i, j) with i <= j in enum order
STATUS_PAIRS = tuple((STATUSES[i].value, STATUSES[j].value)
                     for i in range(len(STATUSES)) for j in range(i, len(STATUSES)))


def _resolve(store: MemberStore, edges: EdgeStore):
    """Store positions of both endpoints for analysable edges, plus skip count."""
    pairs = edges.pairs
    pos = store.positions(pairs.ravel()).reshape(-1, 2)
    ok = np.all(pos >= 0, axis=1)
    return pos[ok], int((~ok).sum())


def _gender_counts(genders, pos):
    # codes: male 0, female 1 -> sum 0 MM, 2 FF, 1 MF
    s = np.bincount(genders[pos[:, 0]] + genders[pos[:, 1]], minlength=3)
    return {"MM": int(s[0]), "FF": int(s[2]), "MF": int(s[1])}


def _gap_counts(ages, pos):
    gaps = np.abs(ages[pos[:, 0]] - ages[pos[:, 1]])
    return np.bincount(gaps, minlength=1).astype(np.int64) if gaps.size else np.zeros(0, np.int64)


def _status_counts(statuses, pos):
    k = len(STATUSES)
    lo = np.minimum(statuses[pos[:, 0]], statuses[pos[:, 1]])
    hi = np.maximum(statuses[pos[:, 0]], statuses[pos[:, 1]])
    grid = np.bincount(lo * k + hi, minlength=k * k).reshape(k, k)
    return {pair: int(grid[i, j])
            for pair, (i, j) in zip(STATUS_PAIRS,
                                    ((i, j) for i in range(k) for j in range(i, k)))}


def gender_mixing(store: MemberStore, edges: EdgeStore) -> dict:
    """``{"MM", "FF", "MF"}`` tie counts; edges with an unknown endpoint are skipped."""
    pos, _ = _resolve(store, edges)
    return _gender_counts(store.columns[2], pos)


def age_gap_histogram(store: MemberStore, edges: EdgeStore) -> np.ndarray:
    """Counts per absolute age gap, bins 0..max observed gap."""
    pos, _ = _resolve(store, edges)
    return _gap_counts(store.columns[1], pos)


def status_mixing(store: MemberStore, edges: EdgeStore) -> dict:
    pos, _ = _resolve(store, edges)
    return _status_counts(store.columns[3], pos)


def gap_share(hist, threshold) -> float:
    """Fraction of ties whose age gap is at most ``threshold`` years."""
    hist = np.asarray(hist)
    total = hist.sum() if hist.size else 0
    if total <= 0:
        raise ValueError("gap_share needs a non-empty histogram")
    return float(hist[: int(threshold) + 1].sum() / total)


@dataclass(frozen=True)
class MixingReport:
    gender_pairs: dict
    age_gap_histogram: np.ndarray
    status_pairs: dict
    total_edges_analyzed: int
    edges_skipped: int
    gap_thresholds: tuple = (5, 10)

    @property
    def mf_share(self):
        t = self.total_edges_analyzed
        return self.gender_pairs["MF"] / t if t else float("nan")

    def gap_shares(self):
        if not self.total_edges_analyzed:
            return {}
        return {str(t): gap_share(self.age_gap_histogram, t) for t in self.gap_thresholds}

    def to_dict(self):
        return {
            "version": REPORT_VERSION,
            "kind": "ties",
            "total_edges_analyzed": self.total_edges_analyzed,
            "edges_skipped": self.edges_skipped,
            "gender_pairs": dict(self.gender_pairs),
            "mf_share": None if not self.total_edges_analyzed else self.mf_share,
            "age_gap_histogram": self.age_gap_histogram.tolist(),
            "gap_share": self.gap_shares(),
            "status_pairs": [{"a": a, "b": b, "count": c}
                             for (a, b), c in self.status_pairs.items()],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def histogram_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["gap", "count"])
        writer.writerows(enumerate(self.age_gap_histogram.tolist()))
        return buf.getvalue()

    def scalars(self):
        out = {"edges_analyzed": self.total_edges_analyzed,
               "edges_skipped": self.edges_skipped}
        for k, v in self.gender_pairs.items():
            out[f"gender[{k}]"] = v
        if self.total_edges_analyzed:
            out["mf_share"] = self.mf_share
            for t, v in self.gap_shares().items():
                out[f"gap_share[<={t}]"] = v
        for (a, b), c in self.status_pairs.items():
            out[f"status[{a}-{b}]"] = c
        return out


def mixing_report(store: MemberStore, edges: EdgeStore, gap_thresholds=(5, 10)) -> MixingReport:
    pos, skipped = _resolve(store, edges)
    _, ages, genders, statuses = store.columns
    return MixingReport(
        gender_pairs=_gender_counts(genders, pos),
        age_gap_histogram=_gap_counts(ages, pos),
        status_pairs=_status_counts(statuses, pos),
        total_edges_analyzed=int(pos.shape[0]),
        edges_skipped=skipped,
        gap_thresholds=tuple(int(t) for t in gap_thresholds),
    )
