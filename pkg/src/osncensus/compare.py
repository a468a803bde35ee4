"""Side-by-side analysis of two communities under one configuration."""
import json
import math
from dataclasses import asdict, dataclass, field

from . import demographics, graphmetrics, ties
from .model import AGE_MAX, AGE_MIN, EdgeStore, MemberStore, load_edges, load_members

REPORT_VERSION = 1


class DatasetError(Exception):
    def __init__(self, label, cause):
        super().__init__(f"[{label}] {cause}")
        self.label = label
        self.cause = cause


@dataclass(frozen=True)
class Dataset:
    label: str
    members: MemberStore
    edges: EdgeStore
    source: dict = field(default_factory=dict)


def load_dataset(label, users_path, friends_path) -> Dataset:
    try:
        members = load_members(users_path, mode="lenient")
        edges = load_edges(friends_path)
    except (OSError, ValueError) as exc:
        raise DatasetError(label, exc) from exc
    return Dataset(label, members, edges,
                   {"users": str(users_path), "friends": str(friends_path)})


@dataclass(frozen=True)
class AnalysisConfig:
    scope: str = "members-only"
    path_mode: str = "auto"
    sources: int = graphmetrics.DEFAULT_SOURCES
    seed: int = 0
    exact_cap: int = graphmetrics.EXACT_CAP
    min_count: int = graphmetrics.FIT_MIN_COUNT
    gap_thresholds: tuple = (5, 10)
    # fixed so both columns share an age axis
    age_range: tuple = (AGE_MIN, AGE_MAX)


@dataclass(frozen=True)
class CommunityReport:
    label: str
    demographics: demographics.DemographicReport
    ties: ties.MixingReport
    graph: graphmetrics.GraphMetricsReport
    excluded_out_of_range: int

    def scalars(self):
        out = {}
        for prefix, rep in (("demographics", self.demographics), ("ties", self.ties),
                            ("graph", self.graph)):
            out.update({f"{prefix}.{k}": v for k, v in rep.scalars().items()})
        return out


def analyze(dataset: Dataset, config: AnalysisConfig) -> CommunityReport:
    """All three analyses for one dataset; errors carry the dataset label."""
    try:
        strict = dataset.members.strict()
        demo = demographics.demographic_report(strict, age_range=config.age_range)
        mix = ties.mixing_report(dataset.members, dataset.edges, config.gap_thresholds)
        graph = graphmetrics.graph_metrics(
            dataset.members, dataset.edges, scope=config.scope, path_mode=config.path_mode,
            sources=config.sources, seed=config.seed, exact_cap=config.exact_cap,
            min_count=config.min_count)
    except (ValueError, KeyError) as exc:
        raise DatasetError(dataset.label, exc) from exc
    return CommunityReport(dataset.label, demo, mix, graph,
                           len(dataset.members) - len(strict))


def _delta(a, b):
    if isinstance(a, bool) or isinstance(b, bool):
        a, b = int(a), int(b)
    return b - a


@dataclass(frozen=True)
class CompareReport:
    a: CommunityReport
    b: CommunityReport
    deltas: dict
    config: AnalysisConfig
    provenance: dict

    def to_dict(self):
        def column(rep):
            return {
                "label": rep.label,
                "excluded_out_of_range": rep.excluded_out_of_range,
                "demographics": rep.demographics.to_dict(),
                "ties": rep.ties.to_dict(),
                "graph": rep.graph.to_dict(),
            }

        return {
            "version": REPORT_VERSION,
            "kind": "compare",
            "a": column(self.a),
            "b": column(self.b),
            "deltas": {k: (None if isinstance(v, float) and math.isnan(v) else v)
                       for k, v in self.deltas.items()},
            "config": asdict(self.config),
            "provenance": self.provenance,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def compare(dataset_a: Dataset, dataset_b: Dataset, config=None) -> CompareReport:
    """Analyse both datasets identically; ``deltas[k] = b[k] - a[k]`` for every
    scalar metric present in both."""
    config = config or AnalysisConfig()
    ra = analyze(dataset_a, config)
    rb = analyze(dataset_b, config)
    sa, sb = ra.scalars(), rb.scalars()
    deltas = {k: _delta(sa[k], sb[k]) for k in sa if k in sb}
    provenance = {
        "a": {"label": dataset_a.label, **dataset_a.source},
        "b": {"label": dataset_b.label, **dataset_b.source},
        "seed": config.seed,
        "path_mode": config.path_mode,
        "scope": config.scope,
    }
    return CompareReport(ra, rb, deltas, config, provenance)
