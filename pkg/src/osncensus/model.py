"""Member and friendship stores and their CSV persistence.

The member store holds one row per harvested account; the friendship
store holds undirected ties as canonical ``(a, b)`` pairs with ``a < b``.
"""
import csv
import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

import numpy as np

AGE_MIN = 18
AGE_MAX = 65

MEMBER_HEADER = ("account_id", "username", "age", "gender", "civil_status", "locale")
EDGE_HEADER = ("a", "b")


class Gender(enum.Enum):
    MALE = "M"
    FEMALE = "F"

    @property
    def code(self):
        return _GENDER_CODES[self]


class CivilStatus(enum.Enum):
    SINGLE = "single"
    MARRIED = "married"
    IAR = "iar"
    UNKNOWN = "unknown"

    @property
    def code(self):
        return _STATUS_CODES[self]


GENDERS = tuple(Gender)
STATUSES = tuple(CivilStatus)
_GENDER_CODES = {g: i for i, g in enumerate(GENDERS)}
_STATUS_CODES = {s: i for i, s in enumerate(STATUSES)}

_GENDER_TOKENS = {
    "m": Gender.MALE, "male": Gender.MALE,
    "f": Gender.FEMALE, "female": Gender.FEMALE,
}
_STATUS_TOKENS = {
    "single": CivilStatus.SINGLE,
    "married": CivilStatus.MARRIED,
    "iar": CivilStatus.IAR,
    "inarelationship": CivilStatus.IAR,
    "in a relationship": CivilStatus.IAR,
    "unknown": CivilStatus.UNKNOWN,
    "unk": CivilStatus.UNKNOWN,
}


class RecordError(ValueError):
    """A raw member record failed validation."""


class MissingField(RecordError):
    pass


class BadAge(RecordError):
    pass


class AgeOutOfRange(RecordError):
    pass


class UnknownGender(RecordError):
    pass


class UnknownStatus(RecordError):
    pass


class StoreFormatError(ValueError):
    """Malformed store file. ``line`` is 1-based, the header being line 1."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = f"{path}:{line}: " if line is not None else ""
        super().__init__(where + message)


class DuplicateKey(StoreFormatError):
    pass


@dataclass(frozen=True)
class MemberRecord:
    account_id: int
    username: str
    age: int
    gender: Gender
    civil_status: CivilStatus
    locale: str

    @property
    def age_in_range(self):
        """False for ages admitted in lenient mode outside the analysis range."""
        return AGE_MIN <= self.age <= AGE_MAX

    def to_row(self):
        return (str(self.account_id), self.username, str(self.age),
                self.gender.value, self.civil_status.value, self.locale)

    def to_dict(self):
        return {
            "account_id": self.account_id,
            "username": self.username,
            "age": self.age,
            "gender": self.gender.value,
            "civil_status": self.civil_status.value,
            "locale": self.locale,
        }


class FriendshipEdge(NamedTuple):
    a: int
    b: int


def _parse_int(value, field):
    if isinstance(value, bool):
        raise BadAge(f"{field} must be an integer, got {value!r}")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise BadAge(f"{field} must be an integer, got {value!r}")


def validate_record(raw: Mapping, mode: str = "lenient") -> MemberRecord:
    """Build a :class:`MemberRecord` from a field map.

    ``raw`` must carry all six keys of :data:`MEMBER_HEADER`. In
    ``strict`` mode ages outside [18, 65] raise :class:`AgeOutOfRange`;
    in ``lenient`` mode they are kept and show up as
    ``record.age_in_range == False``.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"mode must be 'strict' or 'lenient', not {mode!r}")
    missing = [k for k in MEMBER_HEADER if k not in raw]
    if missing:
        raise MissingField(f"missing field(s): {', '.join(missing)}")

    try:
        account_id = _parse_int(raw["account_id"], "account_id")
    except BadAge as exc:
        raise RecordError(str(exc)) from None
    if account_id <= 0:
        raise RecordError(f"account_id must be positive, got {account_id}")

    username = str(raw["username"]).strip()
    if not username:
        raise RecordError("username must be non-empty")

    age = _parse_int(raw["age"], "age")
    if mode == "strict" and not AGE_MIN <= age <= AGE_MAX:
        raise AgeOutOfRange(f"age {age} outside [{AGE_MIN}, {AGE_MAX}]")

    gender = raw["gender"]
    if not isinstance(gender, Gender):
        gender = _GENDER_TOKENS.get(str(gender).strip().lower())
        if gender is None:
            raise UnknownGender(f"unknown gender token {raw['gender']!r}")

    status = raw["civil_status"]
    if not isinstance(status, CivilStatus):
        status = _STATUS_TOKENS.get(str(status).strip().lower())
        if status is None:
            raise UnknownStatus(f"unknown civil status token {raw['civil_status']!r}")

    locale = str(raw["locale"]).strip().lower()
    return MemberRecord(account_id, username, age, gender, status, locale)


class MemberStore:
    """Ordered, id-unique collection of member records."""

    def __init__(self, records: Iterable[MemberRecord] = ()):
        self._records = tuple(records)
        self._index = {}
        for pos, rec in enumerate(self._records):
            if rec.account_id in self._index:
                raise DuplicateKey(f"duplicate account_id {rec.account_id}")
            self._index[rec.account_id] = pos

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __contains__(self, account_id):
        return account_id in self._index

    def __getitem__(self, account_id) -> MemberRecord:
        return self._records[self._index[account_id]]

    def __eq__(self, other):
        if not isinstance(other, MemberStore):
            return NotImplemented
        return self._records == other._records

    def __repr__(self):
        return f"MemberStore(N={len(self)})"

    @property
    def records(self):
        return self._records

    def get(self, account_id, default=None):
        pos = self._index.get(account_id)
        return default if pos is None else self._records[pos]

    def sorted(self):
        """Copy ordered by ascending account id."""
        return MemberStore(sorted(self._records, key=lambda r: r.account_id))

    def by_locale(self, locale):
        return MemberStore(r for r in self._records if r.locale == locale)

    def strict(self):
        """Copy keeping only records inside the analysis age range."""
        return MemberStore(r for r in self._records if r.age_in_range)

    @cached_property
    def columns(self):
        """Column arrays (ids, ages, gender codes, status codes) in store order."""
        n = len(self._records)
        ids = np.fromiter((r.account_id for r in self._records), np.int64, n)
        ages = np.fromiter((r.age for r in self._records), np.int64, n)
        genders = np.fromiter((r.gender.code for r in self._records), np.int64, n)
        statuses = np.fromiter((r.civil_status.code for r in self._records), np.int64, n)
        return ids, ages, genders, statuses

    def positions(self, account_ids):
        """Store positions for ``account_ids``; -1 where the id is absent."""
        ids = self.columns[0]
        account_ids = np.asarray(account_ids, dtype=np.int64)
        if ids.size == 0:
            return np.full(account_ids.shape, -1, dtype=np.int64)
        order = np.argsort(ids, kind="stable")
        sorted_ids = ids[order]
        at = np.searchsorted(sorted_ids, account_ids)
        at = np.minimum(at, sorted_ids.size - 1)
        hit = sorted_ids[at] == account_ids
        return np.where(hit, order[at], -1)


class Dropped(NamedTuple):
    duplicates: int
    self_loops: int

    @property
    def total(self):
        return self.duplicates + self.self_loops


class EdgeStore:
    """Canonical, deduplicated undirected ties, kept sorted by (a, b)."""

    def __init__(self, pairs=None):
        if pairs is None:
            pairs = np.empty((0, 2), dtype=np.int64)
        pairs = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        if pairs.size:
            if np.any(pairs[:, 0] >= pairs[:, 1]):
                raise ValueError("EdgeStore pairs must satisfy a < b")
            order = np.lexsort((pairs[:, 1], pairs[:, 0]))
            pairs = pairs[order]
            same = np.all(pairs[1:] == pairs[:-1], axis=1)
            if np.any(same):
                raise ValueError("EdgeStore pairs must be unique")
        pairs.setflags(write=False)
        self._pairs = pairs

    @property
    def pairs(self):
        return self._pairs

    def __len__(self):
        return self._pairs.shape[0]

    def __iter__(self):
        for a, b in self._pairs.tolist():
            yield FriendshipEdge(a, b)

    def __eq__(self, other):
        if not isinstance(other, EdgeStore):
            return NotImplemented
        return np.array_equal(self._pairs, other._pairs)

    def __repr__(self):
        return f"EdgeStore(|E|={len(self)})"

    def endpoints(self):
        return np.unique(self._pairs)

    def external_mask(self, members: MemberStore):
        """Per edge: True if either endpoint is missing from ``members``."""
        pos = members.positions(self._pairs.ravel()).reshape(-1, 2)
        return np.any(pos < 0, axis=1)

    def restricted_to(self, members: MemberStore):
        return EdgeStore(self._pairs[~self.external_mask(members)])

    def adjacency(self):
        """Dict id -> sorted friend id list."""
        adj = {}
        for a, b in self._pairs.tolist():
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        for friends in adj.values():
            friends.sort()
        return adj


def canonicalize_edges(pairs) -> tuple[EdgeStore, Dropped]:
    """Canonicalise arbitrary id pairs into an :class:`EdgeStore`.

    Self-pairs are dropped, each pair is ordered ``a < b`` and repeats of
    the same unordered pair are collapsed.

    >>> store, dropped = canonicalize_edges([(2, 1), (1, 2), (3, 3)])
    >>> store.pairs.tolist(), dropped
    ([[1, 2]], Dropped(duplicates=1, self_loops=1))
    """
    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    loops = arr[:, 0] == arr[:, 1]
    arr = np.sort(arr[~loops], axis=1)
    uniq = np.unique(arr, axis=0) if arr.size else arr
    dropped = Dropped(int(arr.shape[0] - uniq.shape[0]), int(loops.sum()))
    return EdgeStore(uniq), dropped


# ------------------------------------------------------------- CSV files

def save_members(store: MemberStore, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MEMBER_HEADER)
        for rec in store:
            writer.writerow(rec.to_row())


def load_members(path, mode: str = "lenient") -> MemberStore:
    records = []
    seen = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != MEMBER_HEADER:
            raise StoreFormatError(f"expected header {','.join(MEMBER_HEADER)}",
                                   line=1, path=path)
        for row in reader:
            line = reader.line_num
            if len(row) != len(MEMBER_HEADER):
                raise StoreFormatError(
                    f"expected {len(MEMBER_HEADER)} fields, got {len(row)}",
                    line=line, path=path)
            try:
                rec = validate_record(dict(zip(MEMBER_HEADER, row)), mode=mode)
            except RecordError as exc:
                raise StoreFormatError(str(exc), line=line, path=path) from exc
            if rec.account_id in seen:
                raise DuplicateKey(
                    f"duplicate account_id {rec.account_id} "
                    f"(first seen on line {seen[rec.account_id]})",
                    line=line, path=path)
            seen[rec.account_id] = line
            records.append(rec)
    return MemberStore(records)


def save_edges(store: EdgeStore, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(EDGE_HEADER) + "\n")
        for a, b in store.pairs.tolist():
            fh.write(f"{a},{b}\n")


def load_edges(path) -> EdgeStore:
    pairs = []
    seen = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != EDGE_HEADER:
            raise StoreFormatError("expected header a,b", line=1, path=path)
        for row in reader:
            line = reader.line_num
            try:
                a, b = (int(x) for x in row)
            except ValueError:
                raise StoreFormatError(f"malformed edge row {row!r}",
                                       line=line, path=path) from None
            if a >= b:
                raise StoreFormatError(f"edge ({a},{b}) is not canonical (a < b)",
                                       line=line, path=path)
            if (a, b) in seen:
                raise DuplicateKey(f"duplicate edge ({a},{b})", line=line, path=path)
            seen.add((a, b))
            pairs.append((a, b))
    return EdgeStore(np.array(pairs, dtype=np.int64).reshape(-1, 2))


def save_store(store, path):
    """Write either store type to its CSV format."""
    if isinstance(store, MemberStore):
        save_members(store, path)
    elif isinstance(store, EdgeStore):
        save_edges(store, path)
    else:
        raise TypeError(f"cannot save {type(store).__name__}")
