"""Structure of the friendship graph: degrees, path lengths, power-law fit.

The graph is stored as CSR adjacency over a dense vertex index (vertex
``i`` is account ``ids[i]``, ids ascending). That keeps every property of
a symmetric 0/1 adjacency matrix with an empty diagonal without ever
materialising an N x N array.
"""
import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .model import EdgeStore, MemberStore

REPORT_VERSION = 1
EXACT_CAP = 10_000
DEFAULT_SOURCES = 1_000
SMALL_WORLD_MAX_PATH = 6.0
SCALE_FREE_MIN_R2 = 0.9
SCALE_FREE_ALPHA = (1.5, 4.0)
# bins holding fewer ties than this are Poisson noise and bend the fit
FIT_MIN_COUNT = 3


class UnknownVertex(KeyError):
    pass


@dataclass(frozen=True)
class SocialGraph:
    ids: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    dropped_external: int = 0

    @property
    def n(self):
        return int(self.ids.shape[0])

    @property
    def m(self):
        return int(self.indices.shape[0] // 2)

    def degrees(self):
        return np.diff(self.indptr)

    def index_of(self, account_id):
        i = int(np.searchsorted(self.ids, account_id))
        if i >= self.n or self.ids[i] != account_id:
            raise UnknownVertex(account_id)
        return i

    def neighbors(self, account_id):
        i = self.index_of(account_id)
        return self.ids[self.indices[self.indptr[i]:self.indptr[i + 1]]]


def _csr(n, pairs):
    src = np.concatenate((pairs[:, 0], pairs[:, 1]))
    dst = np.concatenate((pairs[:, 1], pairs[:, 0]))
    order = np.lexsort((dst, src))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst[order].astype(np.int64)


def build_graph(store: MemberStore, edges: EdgeStore, scope="members-only") -> SocialGraph:
    """Adjacency over members (``members-only``) or over members plus every
    edge endpoint (``all-endpoints``). Under ``members-only`` edges touching
    an unknown account are dropped and counted."""
    member_ids = np.unique(store.columns[0])
    pairs = edges.pairs
    if scope == "members-only":
        ids = member_ids
        if ids.size:
            at = np.minimum(np.searchsorted(ids, pairs), ids.size - 1)
            keep = np.all(ids[at] == pairs, axis=1)
        else:
            keep = np.zeros(len(pairs), dtype=bool)
        dropped = int((~keep).sum())
        pairs = pairs[keep]
    elif scope == "all-endpoints":
        ids = np.union1d(member_ids, edges.endpoints())
        dropped = 0
    else:
        raise ValueError("scope must be 'members-only' or 'all-endpoints'")
    local = np.searchsorted(ids, pairs)
    indptr, indices = _csr(ids.size, local.reshape(-1, 2))
    return SocialGraph(ids, indptr, indices, dropped)


@dataclass(frozen=True)
class DegreeStats:
    min: int
    mean: float
    max: int


def degree_stats(g: SocialGraph) -> DegreeStats:
    if g.n == 0:
        raise ValueError("degree statistics need at least one vertex")
    deg = g.degrees()
    return DegreeStats(int(deg.min()), 2 * g.m / g.n, int(deg.max()))


def degree_histogram(g: SocialGraph) -> np.ndarray:
    """``hist[k]`` = number of vertices with degree ``k``."""
    if g.n == 0:
        raise ValueError("degree histogram needs at least one vertex")
    return np.bincount(g.degrees())


def bfs_from(g: SocialGraph, source) -> np.ndarray:
    """Hop distances from account ``source`` to every vertex (vertex order);
    :data:`~osncensus.kernels.UNREACHABLE` marks vertices in other components."""
    return kernels.bfs(g.indptr, g.indices, g.index_of(source))


@dataclass(frozen=True)
class PathStats:
    mode: str
    sources: int
    seed: int | None
    min: int
    mean: float
    max: int
    reachable_pairs: int
    unreachable_pairs: int
    components: int
    giant_size: int
    giant_mean: float
    giant_max: int

    @property
    def padrino_mean(self):
        """Mean number of intermediaries on a shortest path (hops - 1)."""
        return self.mean - 1.0

    def to_dict(self):
        d = asdict(self)
        d["padrino_mean"] = self.padrino_mean
        return d


def path_stats(g: SocialGraph, mode="exact", sources=DEFAULT_SOURCES, seed=None,
               exact_cap=EXACT_CAP) -> PathStats:
    """Shortest-path statistics over ordered reachable pairs ``u != v``.

    ``exact`` runs a BFS from every vertex (refused above ``exact_cap``);
    ``sampled`` runs one from each of ``sources`` distinct vertices drawn
    uniformly with ``seed``; ``auto`` picks exact when ``n <= exact_cap``.
    """
    if g.m == 0:
        raise ValueError("path statistics need at least one edge")
    if mode == "auto":
        mode = "exact" if g.n <= exact_cap else "sampled"
    if mode == "exact":
        if g.n > exact_cap:
            raise ValueError(f"exact mode refused for n={g.n} > cap {exact_cap}; use sampled")
        src = np.arange(g.n, dtype=np.int64)
        seed = None
    elif mode == "sampled":
        if seed is None:
            raise ValueError("sampled mode requires a seed")
        rng = np.random.default_rng(seed)
        src = rng.choice(g.n, size=min(int(sources), g.n), replace=False).astype(np.int64)
    else:
        raise ValueError("mode must be 'exact', 'sampled' or 'auto'")

    sums, counts, maxs, mins = kernels.source_path_sums(g.indptr, g.indices, src)
    reached = counts > 0
    total = int(counts.sum())

    adj = csr_matrix((np.ones(g.indices.size, dtype=np.int8), g.indices, g.indptr),
                     shape=(g.n, g.n))
    n_comp, labels = connected_components(adj, directed=False)
    sizes = np.bincount(labels)
    giant = int(np.argmax(sizes))
    in_giant = labels[src] == giant
    g_counts = int(counts[in_giant].sum())

    return PathStats(
        mode=mode,
        sources=int(src.size),
        seed=seed,
        min=int(mins[reached].min()) if total else 0,
        mean=float(sums.sum() / total) if total else math.nan,
        max=int(maxs.max()) if total else 0,
        reachable_pairs=total,
        unreachable_pairs=int(src.size * (g.n - 1) - total),
        components=int(n_comp),
        giant_size=int(sizes[giant]),
        giant_mean=float(sums[in_giant].sum() / g_counts) if g_counts else math.nan,
        giant_max=int(maxs[in_giant].max()) if g_counts else 0,
    )


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    log_c: float
    r2: float
    points: int
    min_count: int

    def predict_log10(self, degree):
        return self.log_c - self.alpha * np.log10(degree)


def loglog_points(hist, min_count=1):
    """``(degrees, counts)`` of bins with degree >= 1 and count >= ``min_count``."""
    if isinstance(hist, dict):
        k = np.array(sorted(hist), dtype=float)
        c = np.array([hist[x] for x in sorted(hist)], dtype=float)
    else:
        c = np.asarray(hist, dtype=float)
        k = np.arange(c.size, dtype=float)
    keep = (k >= 1) & (c > 0) & (c >= min_count)
    return k[keep], c[keep]


def fit_power_law(hist, min_count=FIT_MIN_COUNT) -> PowerLawFit:
    """Least-squares line through ``(log10 k, log10 count(k))``.

    ``hist`` is either an array indexed by degree or a ``{degree: count}``
    mapping. Degree-0 and empty bins are excluded, as are bins below
    ``min_count``. ``alpha`` is minus the slope, ``log_c`` the intercept.
    """
    k, c = loglog_points(hist, min_count)
    if k.size < 2 or np.unique(k).size < 2:
        raise ValueError("power-law fit needs at least two usable bins")
    x = np.log10(k)
    y = np.log10(c)
    xm, ym = x.mean(), y.mean()
    sxx = ((x - xm) ** 2).sum()
    slope = ((x - xm) * (y - ym)).sum() / sxx
    intercept = ym - slope * xm
    ss_res = ((y - (intercept + slope * x)) ** 2).sum()
    ss_tot = ((y - ym) ** 2).sum()
    if ss_tot <= 1e-300:
        r2 = 1.0 if ss_res <= 1e-18 else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return PowerLawFit(float(-slope), float(intercept), float(r2), int(k.size), int(min_count))


@dataclass(frozen=True)
class Classification:
    small_world: bool
    scale_free: bool


def classify(path_mean, fit: PowerLawFit, max_path=SMALL_WORLD_MAX_PATH,
             min_r2=SCALE_FREE_MIN_R2, alpha_range=SCALE_FREE_ALPHA) -> Classification:
    """Small-world iff mean path <= ``max_path``; scale-free iff the fit has
    ``r2 >= min_r2`` and ``alpha`` within ``alpha_range``."""
    if path_mean is None or fit is None or (isinstance(path_mean, float) and math.isnan(path_mean)):
        raise ValueError("classification needs both a mean path length and a power-law fit")
    lo, hi = alpha_range
    return Classification(
        small_world=bool(path_mean <= max_path),
        scale_free=bool(fit.r2 >= min_r2 and lo <= fit.alpha <= hi),
    )


@dataclass(frozen=True)
class GraphMetricsReport:
    n: int
    m: int
    scope: str
    dropped_external: int
    degree: DegreeStats | None
    degree_histogram: np.ndarray
    paths: PathStats | None
    power_law: PowerLawFit | None
    small_world: bool | None
    scale_free: bool | None

    def to_dict(self):
        return {
            "version": REPORT_VERSION,
            "kind": "graph",
            "n": self.n,
            "m": self.m,
            "scope": self.scope,
            "dropped_external_edges": self.dropped_external,
            "degree": None if self.degree is None else asdict(self.degree),
            "degree_histogram": self.degree_histogram.tolist(),
            "paths": None if self.paths is None else self.paths.to_dict(),
            "power_law": None if self.power_law is None else asdict(self.power_law),
            "small_world": self.small_world,
            "scale_free": self.scale_free,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def degree_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["degree", "count"])
        writer.writerows(enumerate(self.degree_histogram.tolist()))
        return buf.getvalue()

    def loglog_csv(self):
        k, c = loglog_points(self.degree_histogram)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["degree", "count", "log10_degree", "log10_count"])
        for kk, cc in zip(k, c):
            writer.writerow([int(kk), int(cc), repr(math.log10(kk)), repr(math.log10(cc))])
        return buf.getvalue()

    def scalars(self):
        out = {"n": self.n, "m": self.m}
        if self.degree is not None:
            out.update({"degree_min": self.degree.min, "degree_mean": self.degree.mean,
                        "degree_max": self.degree.max})
        if self.paths is not None:
            p = self.paths
            out.update({"path_min": p.min, "path_mean": p.mean, "path_max": p.max,
                        "padrino_mean": p.padrino_mean, "components": p.components,
                        "giant_size": p.giant_size, "giant_path_mean": p.giant_mean,
                        "giant_path_max": p.giant_max})
        if self.power_law is not None:
            out.update({"alpha": self.power_law.alpha, "log_c": self.power_law.log_c,
                        "r2": self.power_law.r2})
        for flag in ("small_world", "scale_free"):
            value = getattr(self, flag)
            if value is not None:
                out[flag] = int(value)
        return out


def graph_metrics(store: MemberStore, edges: EdgeStore, scope="members-only",
                  path_mode="auto", sources=DEFAULT_SOURCES, seed=0,
                  exact_cap=EXACT_CAP, min_count=FIT_MIN_COUNT) -> GraphMetricsReport:
    g = build_graph(store, edges, scope=scope)
    if g.n == 0:
        return GraphMetricsReport(0, 0, scope, g.dropped_external, None,
                                  np.zeros(0, np.int64), None, None, None, None)
    hist = degree_histogram(g)
    paths = path_stats(g, path_mode, sources, seed, exact_cap) if g.m else None
    try:
        fit = fit_power_law(hist, min_count=min_count)
    except ValueError:
        fit = None
    small = scale = None
    if paths is not None:
        small = bool(paths.mean <= SMALL_WORLD_MAX_PATH)
    if fit is not None:
        lo, hi = SCALE_FREE_ALPHA
        scale = bool(fit.r2 >= SCALE_FREE_MIN_R2 and lo <= fit.alpha <= hi)
    return GraphMetricsReport(g.n, g.m, scope, g.dropped_external, degree_stats(g), hist,
                              paths, fit, small, scale)
