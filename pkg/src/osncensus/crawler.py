"""Cooperative crawler for the mock OSN service.

The walk proceeds in rings. Ring 0 is every member returned by the
locale search (plus optional seed accounts). Members of an expanded ring
have their profile and their full friend list harvested; friends not yet
seen form the next ring. The last ring is profiled but not expanded.

    policy        expanded rings    profiled-only ring
    locale-only   0                 1 (friends outside the locale)
    one-hop       0, 1              2

Within a ring, ``workers`` threads pull ids from one shared queue and
claim them against a shared visited set, so no id is profiled twice. Each
worker keeps its own partial stores; a single merge at the end builds the
canonical output. Ring-by-ring processing makes the result independent of
the worker count and of scheduling.
"""
import http.client
import json
import logging
import queue
import threading
import time
from dataclasses import asdict, dataclass, field
from urllib.parse import quote, urlsplit

from .model import MemberStore, canonicalize_edges, validate_record
from .osn import page_count  # noqa: F401  (re-exported: crawler owns the paging rule)

log = logging.getLogger(__name__)

POLICIES = {"locale-only": 0, "one-hop": 1}


class CrawlError(RuntimeError):
    """Fatal crawl failure, e.g. the endpoint cannot be reached."""


class ConflictingRecord(ValueError):
    def __init__(self, account_id):
        super().__init__(f"conflicting records for account {account_id}")
        self.account_id = account_id


class NotFound(Exception):
    pass


class RequestFailed(Exception):
    pass


@dataclass
class CrawlStats:
    locale: str
    policy: str
    workers: int
    pages_fetched: int = 0
    search_pages: int = 0
    friend_pages: int = 0
    profiles_fetched: int = 0
    missing_profiles: int = 0
    requests: int = 0
    retries: int = 0
    failures: int = 0
    members: int = 0
    edges: int = 0
    rings: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


class _Client:
    """Keep-alive JSON client; one per worker thread."""

    def __init__(self, endpoint, timeout, attempts, backoff, stats, lock):
        url = urlsplit(endpoint if "://" in endpoint else "http://" + endpoint)
        self.host = url.hostname
        self.port = url.port or 80
        self.prefix = url.path.rstrip("/")
        self.timeout = timeout
        self.attempts = attempts
        self.backoff = backoff
        self._stats = stats
        self._lock = lock
        self._conn = None

    def _count(self, **incs):
        with self._lock:
            for name, inc in incs.items():
                setattr(self._stats, name, getattr(self._stats, name) + inc)

    def close(self):
        if self._conn is not None:
            self._conn.close()
            self._conn = None

    def get(self, path):
        err = None
        for attempt in range(self.attempts):
            if attempt:
                self._count(retries=1)
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                if self._conn is None:
                    self._conn = http.client.HTTPConnection(self.host, self.port,
                                                            timeout=self.timeout)
                self._count(requests=1)
                self._conn.request("GET", self.prefix + path)
                resp = self._conn.getresponse()
                body = resp.read()
            except (OSError, http.client.HTTPException) as exc:
                self.close()
                err = exc
                continue
            if resp.status == 200:
                return json.loads(body)
            if resp.status == 404:
                raise NotFound(path)
            err = RequestFailed(f"GET {path} -> {resp.status}")
        raise RequestFailed(f"GET {path} failed after {self.attempts} attempts: {err}")


class _Worker:
    def __init__(self, client):
        self.client = client
        self.records = []
        self.pairs = []
        self.discovered = set()


def _run_pool(items, workers, handle, make_client):
    """Drain ``items`` through ``workers`` threads; returns the worker states."""
    todo = queue.SimpleQueue()
    for item in items:
        todo.put(item)
    states = [_Worker(make_client()) for _ in range(workers)]
    errors = []

    def loop(state):
        try:
            while True:
                try:
                    item = todo.get_nowait()
                except queue.Empty:
                    return
                handle(state, item)
        except BaseException as exc:  # surfaced after join
            errors.append(exc)
        finally:
            state.client.close()

    threads = [threading.Thread(target=loop, args=(s,), daemon=True) for s in states]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if errors:
        raise errors[0]
    return states


def merge_worker_outputs(partials):
    """Union of ``(MemberStore, EdgeStore)`` partials, canonical order.

    The same account may appear in several partials only with identical
    fields; otherwise :class:`ConflictingRecord` is raised.
    """
    records = {}
    pair_blocks = []
    for members, edges in partials:
        for rec in members:
            prev = records.setdefault(rec.account_id, rec)
            if prev != rec:
                raise ConflictingRecord(rec.account_id)
        pair_blocks.extend(edges.pairs.tolist())
    merged_edges, _ = canonicalize_edges(pair_blocks)
    return MemberStore(records[k] for k in sorted(records)), merged_edges


def crawl(endpoint, locale, workers=16, policy="locale-only", seeds=(),
          attempts=3, backoff=0.05, timeout=10.0):
    """Harvest member and friendship stores for ``locale`` from ``endpoint``.

    Returns ``(MemberStore, EdgeStore, CrawlStats)``. Raises
    :class:`CrawlError` when the first search page cannot be fetched.
    Other failed requests are retried ``attempts`` times, then skipped and
    counted in ``stats.failures``.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {sorted(POLICIES)}")
    started = time.perf_counter()
    stats = CrawlStats(locale=locale, policy=policy, workers=workers)
    lock = threading.Lock()

    def make_client():
        return _Client(endpoint, timeout, attempts, backoff, stats, lock)

    def count(**incs):
        with lock:
            for name, inc in incs.items():
                setattr(stats, name, getattr(stats, name) + inc)

    search_path = f"/search?locale={quote(locale)}&page="

    # ---- locale search
    probe = make_client()
    try:
        first = probe.get(search_path + "0")
    except (RequestFailed, NotFound) as exc:
        raise CrawlError(f"endpoint {endpoint} unreachable: {exc}") from exc
    finally:
        probe.close()
    count(search_pages=1, pages_fetched=1)
    ring0 = {e["account_id"] for e in first["entries"]}

    def fetch_search(state, k):
        try:
            page = state.client.get(search_path + str(k))
        except (RequestFailed, NotFound) as exc:
            log.warning("search page %d skipped: %s", k, exc)
            count(failures=1)
            return
        count(search_pages=1, pages_fetched=1)
        state.discovered.update(e["account_id"] for e in page["entries"])

    for state in _run_pool(range(1, first["total_pages"]), workers, fetch_search, make_client):
        ring0 |= state.discovered
    ring0 |= {int(s) for s in seeds}

    # ---- ring walk
    visited = set()
    max_expand = POLICIES[policy]
    partials = []

    def claim(account_id):
        with lock:
            if account_id in visited:
                return False
            visited.add(account_id)
            return True

    def harvest(state, account_id, expand):
        if not claim(account_id):
            return
        try:
            raw = state.client.get(f"/profile/{account_id}")
            state.records.append(validate_record(raw, mode="lenient"))
            count(profiles_fetched=1)
        except NotFound:
            count(missing_profiles=1)
            return
        except RequestFailed as exc:
            log.warning("profile %d skipped: %s", account_id, exc)
            count(failures=1)
            return
        if not expand:
            return
        k, pages = 0, 1
        while k < pages:
            try:
                page = state.client.get(f"/friends/{account_id}?page={k}")
            except (RequestFailed, NotFound) as exc:
                log.warning("friends %d page %d skipped: %s", account_id, k, exc)
                count(failures=1)
                if k == 0:
                    return
                k += 1
                continue
            count(friend_pages=1, pages_fetched=1)
            pages = page["total_pages"]
            for friend in page["entries"]:
                state.pairs.append((account_id, friend))
                state.discovered.add(friend)
            k += 1

    ring = sorted(ring0)
    depth = 0
    while ring:
        expand = depth <= max_expand
        states = _run_pool(ring, workers,
                           lambda st, aid: harvest(st, aid, expand), make_client)
        stats.rings.append(len(ring))
        for st in states:
            partials.append((MemberStore(st.records), canonicalize_edges(st.pairs)[0]))
        if not expand:
            break
        found = set().union(*(st.discovered for st in states))
        ring = sorted(found - visited)
        depth += 1

    members, edges = merge_worker_outputs(partials)
    stats.members = len(members)
    stats.edges = len(edges)
    log.info("crawl of %r: %d members, %d edges in %.2fs", locale, stats.members,
             stats.edges, time.perf_counter() - started)
    return members, edges, stats
