"""Census counts and shares over gender x age x civil status.

Counts are dense tables: every gender, every status and every age in the
table's age range has a cell, zero or not. Percentages are carried at full
double precision; rounding happens only when formatting.
"""
import csv
import io
import itertools
import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import AGE_MAX, AGE_MIN, GENDERS, STATUSES, AgeOutOfRange, MemberStore

DIMENSIONS = ("gender", "age", "status")
REPORT_VERSION = 1

# narrative age bands used for the optional banded view
AGE_BANDS = ((18, 25), (26, 40), (41, 65))


class EmptyPopulation(ValueError):
    pass


def _normalize_dims(dims):
    if isinstance(dims, str):
        dims = [d for d in dims.split(",") if d]
    dims = set(d.strip().lower() for d in dims)
    if not dims:
        raise ValueError("dims must be a non-empty subset of gender, age, status")
    unknown = dims - set(DIMENSIONS)
    if unknown:
        raise ValueError(f"unknown dimension(s): {sorted(unknown)}")
    return tuple(d for d in DIMENSIONS if d in dims)


@dataclass(frozen=True)
class CountTable:
    dims: tuple
    axes: tuple          # one label tuple per dimension
    counts: np.ndarray   # int64, shape == tuple(len(a) for a in axes)
    total: int

    def cell(self, *labels):
        idx = tuple(axis.index(lab) for axis, lab in zip(self.axes, labels))
        return int(self.counts[idx])

    def cells(self):
        """Yield ``(labels, count)`` for every cell in row-major order."""
        for idx in itertools.product(*(range(len(a)) for a in self.axes)):
            yield tuple(a[i] for a, i in zip(self.axes, idx)), int(self.counts[idx])

    def marginalize(self, keep):
        """Sum out every dimension not in ``keep``."""
        keep = _normalize_dims(keep)
        if not set(keep) <= set(self.dims):
            raise ValueError(f"{keep} is not a subset of {self.dims}")
        drop = tuple(i for i, d in enumerate(self.dims) if d not in keep)
        axes = tuple(a for d, a in zip(self.dims, self.axes) if d in keep)
        return CountTable(keep, axes, self.counts.sum(axis=drop), self.total)


@dataclass(frozen=True)
class PercentTable:
    dims: tuple
    axes: tuple
    percents: np.ndarray
    total: int

    def cell(self, *labels):
        idx = tuple(axis.index(lab) for axis, lab in zip(self.axes, labels))
        return float(self.percents[idx])


def _axis_labels(dim, ages):
    if dim == "gender":
        return tuple(g.value for g in GENDERS)
    if dim == "status":
        return tuple(s.value for s in STATUSES)
    return tuple(range(ages[0], ages[1] + 1)) if ages else ()


def cross_tabulate(store: MemberStore, dims, age_range=None) -> CountTable:
    """Dense count table of ``store`` over ``dims``.

    ``age_range`` fixes the age axis as an inclusive ``(lo, hi)``; by
    default it spans the observed ages. Every record must have an age in
    [18, 65].
    """
    dims = _normalize_dims(dims)
    _, ages, genders, statuses = store.columns
    if ages.size and (ages.min() < AGE_MIN or ages.max() > AGE_MAX):
        raise AgeOutOfRange(
            f"store holds ages outside [{AGE_MIN}, {AGE_MAX}]; filter with store.strict()")
    if age_range is None:
        age_range = (int(ages.min()), int(ages.max())) if ages.size else None
    elif ages.size and (ages.min() < age_range[0] or ages.max() > age_range[1]):
        raise ValueError(f"ages fall outside requested range {age_range}")
    axes = tuple(_axis_labels(d, age_range) for d in dims)
    shape = tuple(len(a) for a in axes)
    codes = {"gender": genders,
             "age": ages - (age_range[0] if age_range else 0),
             "status": statuses}
    if 0 in shape or not len(store):
        counts = np.zeros(shape, dtype=np.int64)
    else:
        flat = np.ravel_multi_index(tuple(codes[d] for d in dims), shape)
        counts = np.bincount(flat, minlength=int(np.prod(shape))).reshape(shape)
    return CountTable(dims, axes, counts.astype(np.int64), len(store))


def percentages(table: CountTable, total=None) -> PercentTable:
    n = table.total if total is None else total
    if n <= 0:
        raise EmptyPopulation("percentages are undefined for an empty population")
    if table.counts.size and table.counts.max() > n:
        raise ValueError("cell count exceeds population total")
    return PercentTable(table.dims, table.axes, 100.0 * table.counts / n, n)


def age_band_view(table: CountTable, bands=AGE_BANDS) -> CountTable:
    """Collapse the per-year age axis into inclusive ``bands``."""
    if "age" not in table.dims:
        raise ValueError("table has no age dimension")
    ax = table.dims.index("age")
    ages = np.array(table.axes[ax], dtype=np.int64)
    parts = []
    for lo, hi in bands:
        sel = (ages >= lo) & (ages <= hi)
        parts.append(np.compress(sel, table.counts, axis=ax).sum(axis=ax, keepdims=True))
    counts = np.concatenate(parts, axis=ax) if parts else table.counts
    labels = tuple(f"{lo}-{hi}" for lo, hi in bands)
    axes = table.axes[:ax] + (labels,) + table.axes[ax + 1:]
    return CountTable(table.dims, axes, counts, table.total)


# all seven non-empty dimension subsets, singles first
REPORT_DIMS = tuple(
    combo for k in (1, 2, 3) for combo in itertools.combinations(DIMENSIONS, k))


@dataclass(frozen=True)
class DemographicReport:
    total: int
    counts: dict        # dims tuple -> CountTable
    percentages: dict   # dims tuple -> PercentTable (empty when total == 0)

    def to_dict(self):
        tables = {}
        for dims, table in self.counts.items():
            pct = self.percentages.get(dims)
            cells = []
            for labels, count in table.cells():
                cell = dict(zip(dims, labels))
                cell["count"] = count
                if pct is not None:
                    cell["percent"] = pct.cell(*labels)
                cells.append(cell)
            tables["x".join(dims)] = {"dims": list(dims), "cells": cells}
        return {"version": REPORT_VERSION, "kind": "demographics",
                "N": self.total, "tables": tables}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["table", "gender", "age", "status", "count", "percent"])
        for name, table in self.to_dict()["tables"].items():
            for cell in table["cells"]:
                pct = cell.get("percent")
                writer.writerow([name, cell.get("gender", ""), cell.get("age", ""),
                                 cell.get("status", ""), cell["count"],
                                 "" if pct is None else repr(pct)])
        return buf.getvalue()

    def scalars(self):
        """Flat ``name -> number`` view used for side-by-side comparison."""
        out = {"N": self.total}
        for dims in REPORT_DIMS[:3]:
            for labels, count in self.counts[dims].cells():
                key = f"{dims[0]}={labels[0]}"
                out[f"count[{key}]"] = count
                if dims in self.percentages:
                    out[f"percent[{key}]"] = self.percentages[dims].cell(*labels)
        return out


def demographic_report(store: MemberStore, dims=None, age_range=None) -> DemographicReport:
    """Counts and shares for every requested dimension subset.

    ``dims`` limits the report to subsets of the given dimensions; by
    default all seven subsets of gender/age/status are produced.
    """
    wanted = set(_normalize_dims(dims)) if dims else set(DIMENSIONS)
    full = cross_tabulate(store, tuple(wanted), age_range=age_range)
    counts, pcts = {}, {}
    for combo in REPORT_DIMS:
        if set(combo) <= wanted:
            table = full.marginalize(combo)
            counts[combo] = table
            if len(store):
                pcts[combo] = percentages(table)
    return DemographicReport(len(store), counts, pcts)


# ----------------------------------------------------- population arithmetic

class Penetration(NamedTuple):
    percent: float
    rounded: int

    def __str__(self):
        return f"{self.rounded}%"


def project_population(pop_base, rate, years):
    """Compound growth ``round(pop_base * (1 + rate) ** years)``."""
    if rate < 0:
        raise ValueError("rate must be >= 0")
    if years < 0:
        raise ValueError("years must be >= 0")
    return int(round(pop_base * (1.0 + rate) ** years))


def penetration(osn_count, projected_pop) -> Penetration:
    """Share of a projected population present on the network, in percent."""
    if projected_pop <= 0:
        raise EmptyPopulation("projected population must be positive")
    pct = 100.0 * osn_count / projected_pop
    return Penetration(pct, int(round(pct)))
