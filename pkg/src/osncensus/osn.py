"""Mock online social network service.

Serves a frozen member/friendship snapshot over HTTP/1.1 with JSON bodies:

``GET /search?locale=NAME&page=K``
    ``{"locale", "page", "page_size", "total_pages", "total", "entries":
    [{"account_id", "username"}, ...]}``; members whose locale matches,
    ascending account id.
``GET /profile/ID``
    the six member fields: ``{"account_id", "username", "age", "gender"
    ("M"|"F"), "civil_status" ("single"|"married"|"iar"|"unknown"),
    "locale"}``.
``GET /friends/ID?page=K``
    ``{"account_id", "page", "page_size", "total_pages", "total",
    "entries": [friend ids ascending]}``.

Errors come back as ``{"error": message}`` with status 400 (malformed or
out-of-range page, unknown route) or 404 (unknown account id).
"""
import json
import logging
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from .model import EdgeStore, MemberStore

log = logging.getLogger(__name__)

DEFAULT_PAGE_SIZE = 10


class PageOutOfRange(IndexError):
    pass


class ProtocolError(Exception):
    def __init__(self, status, message):
        super().__init__(message)
        self.status = status


def page_count(n_items, page_size):
    """``(pages, last_page_size)``; an empty list still has one empty page."""
    if page_size < 1:
        raise ValueError("page_size must be >= 1")
    pages = max(1, -(-n_items // page_size))
    return pages, n_items - (pages - 1) * page_size


@dataclass(frozen=True)
class SearchPage:
    page: int
    total_pages: int
    page_size: int
    total: int
    entries: tuple


def paginate(items, page_size, k) -> SearchPage:
    pages, _ = page_count(len(items), page_size)
    if not 0 <= k < pages:
        raise PageOutOfRange(f"page {k} outside [0, {pages})")
    lo = k * page_size
    return SearchPage(k, pages, page_size, len(items), tuple(items[lo:lo + page_size]))


class Snapshot:
    """Immutable view of a member store and its friendships.

    Friend lists cover every edge endpoint, including accounts that are
    absent from the member store; their profiles answer 404.
    """

    def __init__(self, members: MemberStore, edges: EdgeStore, page_size=DEFAULT_PAGE_SIZE):
        if page_size < 1:
            raise ValueError("page_size must be >= 1")
        self.members = members
        self.edges = edges
        self.page_size = page_size
        by_locale = {}
        for rec in sorted(members, key=lambda r: r.account_id):
            by_locale.setdefault(rec.locale, []).append(rec)
        self._locales = {loc: tuple(recs) for loc, recs in by_locale.items()}
        self._friends = {a: tuple(f) for a, f in edges.adjacency().items()}

    def locales(self):
        return sorted(self._locales)

    def search(self, locale, k) -> dict:
        recs = self._locales.get(str(locale).strip().lower(), ())
        page = paginate(recs, self.page_size, k)
        return {
            "locale": locale,
            "page": page.page,
            "page_size": page.page_size,
            "total_pages": page.total_pages,
            "total": page.total,
            "entries": [{"account_id": r.account_id, "username": r.username}
                        for r in page.entries],
        }

    def profile(self, account_id) -> dict:
        rec = self.members.get(account_id)
        if rec is None:
            raise KeyError(account_id)
        return rec.to_dict()

    def friends(self, account_id, k) -> dict:
        if account_id not in self.members and account_id not in self._friends:
            raise KeyError(account_id)
        page = paginate(self._friends.get(account_id, ()), self.page_size, k)
        return {
            "account_id": account_id,
            "page": page.page,
            "page_size": page.page_size,
            "total_pages": page.total_pages,
            "total": page.total,
            "entries": list(page.entries),
        }

    def route(self, path) -> dict:
        """Resolve a request target to a response body or raise ProtocolError."""
        url = urlsplit(path)
        query = parse_qs(url.query)
        parts = [p for p in url.path.split("/") if p]

        def page_arg():
            raw = query.get("page", ["0"])[-1]
            try:
                return int(raw)
            except ValueError:
                raise ProtocolError(400, f"malformed page {raw!r}") from None

        def account_arg(raw):
            try:
                return int(raw)
            except ValueError:
                raise ProtocolError(400, f"malformed account id {raw!r}") from None

        try:
            if parts == ["search"]:
                if "locale" not in query:
                    raise ProtocolError(400, "missing locale")
                return self.search(query["locale"][-1], page_arg())
            if len(parts) == 2 and parts[0] == "profile":
                return self.profile(account_arg(parts[1]))
            if len(parts) == 2 and parts[0] == "friends":
                return self.friends(account_arg(parts[1]), page_arg())
        except PageOutOfRange as exc:
            raise ProtocolError(400, str(exc)) from None
        except KeyError as exc:
            raise ProtocolError(404, f"unknown account {exc.args[0]}") from None
        raise ProtocolError(400, f"unknown route {url.path!r}")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "osncensus-mock/0.1"
    # one buffered write per response, no Nagle stalls on keep-alive
    disable_nagle_algorithm = True
    wbufsize = 1 << 16

    def do_GET(self):
        try:
            status, body = 200, self.server.snapshot.route(self.path)
        except ProtocolError as exc:
            status, body = exc.status, {"error": str(exc)}
        payload = json.dumps(body, separators=(",", ":")).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, fmt, *args):
        log.debug("%s " + fmt, self.address_string(), *args)


class OSNServer(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, snapshot: Snapshot, host="127.0.0.1", port=0):
        self.snapshot = snapshot
        super().__init__((host, port), _Handler)

    @property
    def url(self):
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

    def start(self):
        """Serve from a daemon thread; returns self for chaining."""
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self.shutdown()
        self.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
