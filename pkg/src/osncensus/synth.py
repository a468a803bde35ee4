"""Synthetic populations and friendship graphs with known ground truth.

Every generator is a pure function of its parameters and seed. A single
config seed is split into independent streams (population, structure,
mixing) so that changing the graph model never perturbs the population.

JSON form of :class:`SynthConfig`::

    {
      "n": 5000,
      "model": {"kind": "ba", "m": 4},          # or {"kind": "er", "mean_degree": 10}
      "gender_split": 0.513,                    # fraction female
      "age_distribution": null,                 # null -> geometric decay, or {"18": p, ...}
      "age_decay": 0.93,
      "status_distribution": {"single": 0.544, "married": 0.159, "iar": 0.156, "unknown": 0.141},
      "locales": {"laguna": 1.0},
      "mixing": {"gender_heterophily_bias": 0.5, "age_gap_scale": null, "sweeps": 10},
      "first_id": 1,
      "seed": 0
    }

``mixing`` may be null to skip rewiring; ``age_gap_scale`` null means
no age preference.
"""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .model import (AGE_MAX, AGE_MIN, STATUSES, EdgeStore,
                    Gender, MemberRecord, MemberStore)

_TOL = 1e-9

DEFAULT_STATUS = {"single": 0.544, "married": 0.159, "iar": 0.156, "unknown": 0.141}


class ConfigError(ValueError):
    pass


class UnresolvedEndpoint(ValueError):
    pass


@dataclass(frozen=True)
class ERModel:
    mean_degree: float = 10.0
    kind: str = field(default="er", init=False)


@dataclass(frozen=True)
class BAModel:
    m: int = 4
    kind: str = field(default="ba", init=False)


@dataclass(frozen=True)
class Mixing:
    gender_heterophily_bias: float = 0.5
    age_gap_scale: float = math.inf
    sweeps: float = 10.0

    @property
    def neutral(self):
        return self.gender_heterophily_bias == 0.5 and math.isinf(self.age_gap_scale)


def geometric_age_distribution(decay=0.93):
    ages = np.arange(AGE_MIN, AGE_MAX + 1)
    w = decay ** (ages - AGE_MIN)
    return {int(a): float(p) for a, p in zip(ages, w / w.sum())}


@dataclass(frozen=True)
class SynthConfig:
    n: int
    model: ERModel | BAModel = field(default_factory=BAModel)
    gender_split: float = 0.513
    age_distribution: dict | None = None
    age_decay: float = 0.93
    status_distribution: dict = field(default_factory=lambda: dict(DEFAULT_STATUS))
    locales: dict = field(default_factory=lambda: {"laguna": 1.0})
    mixing: Mixing | None = None
    first_id: int = 1
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def ages(self):
        """(ages, probabilities) arrays of the effective age distribution."""
        dist = self.age_distribution or geometric_age_distribution(self.age_decay)
        ages = np.array(sorted(int(a) for a in dist), dtype=np.int64)
        probs = np.array([dist[a] if a in dist else dist[str(a)] for a in ages.tolist()],
                         dtype=float)
        return ages, probs

    def statuses(self):
        return np.array([float(self.status_distribution.get(s.value, 0.0)) for s in STATUSES])

    def validate(self):
        if self.n < 0:
            raise ConfigError("n must be >= 0")
        if not 0.0 <= self.gender_split <= 1.0:
            raise ConfigError("gender_split must lie in [0, 1]")
        if self.age_distribution is not None:
            ages = [int(a) for a in self.age_distribution]
            if any(a < AGE_MIN or a > AGE_MAX for a in ages):
                raise ConfigError(f"ages must lie in [{AGE_MIN}, {AGE_MAX}]")
        elif not 0.0 < self.age_decay <= 1.0:
            raise ConfigError("age_decay must lie in (0, 1]")
        _check_distribution("age_distribution", self.ages()[1])
        unknown = set(self.status_distribution) - {s.value for s in STATUSES}
        if unknown:
            raise ConfigError(f"unknown status keys: {sorted(unknown)}")
        _check_distribution("status_distribution", self.statuses())
        if not self.locales:
            raise ConfigError("at least one locale is required")
        _check_distribution("locales", np.array(list(self.locales.values()), dtype=float))
        if isinstance(self.model, BAModel):
            if self.model.m < 1:
                raise ConfigError("BA requires m >= 1")
            if self.n and self.n <= self.model.m:
                raise ConfigError("BA requires n > m")
        elif isinstance(self.model, ERModel):
            if self.n >= 2 and not 0 <= self.model.mean_degree <= self.n - 1:
                raise ConfigError("ER mean_degree must lie in [0, n-1]")
        else:
            raise ConfigError(f"unknown model {self.model!r}")
        if self.mixing is not None:
            if not 0.0 <= self.mixing.gender_heterophily_bias <= 1.0:
                raise ConfigError("gender_heterophily_bias must lie in [0, 1]")
            if not self.mixing.age_gap_scale > 0:
                raise ConfigError("age_gap_scale must be > 0")
        if self.first_id < 1:
            raise ConfigError("first_id must be >= 1")

    def to_dict(self):
        d = asdict(self)
        if self.mixing is not None and math.isinf(self.mixing.age_gap_scale):
            d["mixing"]["age_gap_scale"] = None
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        model = d.pop("model", {"kind": "ba"})
        kind = model.get("kind", "ba").lower()
        if kind == "ba":
            model = BAModel(m=int(model.get("m", 4)))
        elif kind == "er":
            model = ERModel(mean_degree=float(model.get("mean_degree", 10.0)))
        else:
            raise ConfigError(f"unknown model kind {kind!r}")
        mixing = d.pop("mixing", None)
        if mixing is not None:
            scale = mixing.get("age_gap_scale")
            mixing = Mixing(
                gender_heterophily_bias=float(mixing.get("gender_heterophily_bias", 0.5)),
                age_gap_scale=math.inf if scale is None else float(scale),
                sweeps=float(mixing.get("sweeps", 10.0)),
            )
        ages = d.pop("age_distribution", None)
        if ages is not None:
            ages = {int(a): float(p) for a, p in ages.items()}
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(model=model, mixing=mixing, age_distribution=ages, **d)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _check_distribution(name, probs):
    if probs.size == 0 or np.any(probs < 0) or abs(probs.sum() - 1.0) > _TOL:
        raise ConfigError(f"{name} must be non-negative and sum to 1 (got {probs.sum()!r})")


def _streams(seed):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)]


def generate_population(config: SynthConfig) -> MemberStore:
    n = config.n
    rng = _streams(config.seed)[0]
    female = rng.random(n) < config.gender_split
    ages, age_p = config.ages()
    age = rng.choice(ages, size=n, p=age_p) if n else np.empty(0, np.int64)
    status = rng.choice(len(STATUSES), size=n, p=config.statuses()) if n else []
    names = list(config.locales)
    loc_p = np.array([config.locales[k] for k in names], dtype=float)
    loc = rng.choice(len(names), size=n, p=loc_p) if n else []
    records = []
    for i in range(n):
        aid = config.first_id + i
        records.append(MemberRecord(
            account_id=aid,
            username=f"user{aid}",
            age=int(age[i]),
            gender=Gender.FEMALE if female[i] else Gender.MALE,
            civil_status=STATUSES[int(status[i])],
            locale=names[int(loc[i])],
        ))
    return MemberStore(records)


def _pair_from_index(t):
    """Map linear indices over {(i, j): i < j} (ordered by j, then i) to pairs."""
    t = np.asarray(t, dtype=np.int64)
    j = np.floor((1.0 + np.sqrt(1.0 + 8.0 * t.astype(np.float64))) / 2.0).astype(np.int64)
    # float rounding can be off by one either way for large t
    j -= (j * (j - 1) // 2 > t)
    j += ((j + 1) * j // 2 <= t)
    i = t - j * (j - 1) // 2
    return np.column_stack((i, j))


def generate_er(n, mean_degree, seed, first_id=1) -> EdgeStore:
    """G(n, p) with p = mean_degree / (n - 1), by geometric skipping over pairs."""
    if n < 2:
        raise ConfigError("ER requires n >= 2")
    if not 0 <= mean_degree <= n - 1:
        raise ConfigError("mean_degree must lie in [0, n-1]")
    p = mean_degree / (n - 1)
    n_pairs = n * (n - 1) // 2
    if p == 0:
        return EdgeStore()
    if p >= 1.0:
        idx = np.arange(n_pairs, dtype=np.int64)
    else:
        rng = np.random.default_rng(seed)
        chunk = int(n_pairs * p + 6 * math.sqrt(n_pairs * p) + 64)
        parts = []
        last = -1
        while last < n_pairs:
            gaps = rng.geometric(p, size=chunk)
            pos = last + np.cumsum(gaps)
            parts.append(pos)
            last = int(pos[-1])
        idx = np.concatenate(parts)
        idx = idx[idx < n_pairs]
    return EdgeStore(_pair_from_index(idx) + first_id)


def generate_ba(n, m, seed, first_id=1) -> EdgeStore:
    """Preferential attachment grown from the complete graph on ``m`` vertices."""
    if m < 1:
        raise ConfigError("BA requires m >= 1")
    if n <= m:
        raise ConfigError("BA requires n > m")
    size = int(1.25 * (n - m) * m) + 1024
    while True:
        # a fresh generator each time: the buffer prefix is identical, so the
        # result does not depend on how large the buffer had to be
        uniforms = np.random.default_rng(seed).random(size)
        edges, used = kernels.ba_attach(n, m, uniforms)
        if used >= 0:
            break
        size *= 2
    return EdgeStore(edges + first_id)


def apply_mixing(edges: EdgeStore, store: MemberStore, mixing: Mixing, seed) -> EdgeStore:
    """Rewire ``edges`` toward the requested gender/age mixing.

    Double-edge swaps keep every vertex degree. A swap is accepted by a
    Metropolis rule on the edge log-weight
    ``log(bias)`` for cross-gender ties (``log(1 - bias)`` otherwise) minus
    ``|age gap| / age_gap_scale``.
    """
    pairs = edges.pairs
    if len(pairs) == 0:
        return EdgeStore(pairs)
    pos = store.positions(pairs.ravel()).reshape(-1, 2)
    if np.any(pos < 0):
        bad = pairs[np.any(pos < 0, axis=1)][0]
        raise UnresolvedEndpoint(f"edge ({bad[0]},{bad[1]}) has an endpoint outside the store")
    if len(pairs) < 2 or mixing.sweeps <= 0:
        return EdgeStore(pairs)
    ids, ages, genders, _ = store.columns
    bias = min(max(mixing.gender_heterophily_bias, 1e-12), 1 - 1e-12)
    inv_scale = 0.0 if math.isinf(mixing.age_gap_scale) else 1.0 / mixing.age_gap_scale
    work = np.sort(pos, axis=1).astype(np.int64)
    n_prop = int(round(mixing.sweeps * len(pairs)))
    uniforms = np.random.default_rng(seed).random((n_prop, 4))
    kernels.metropolis_swaps(work, len(store), genders, ages.astype(np.float64),
                             math.log(bias), math.log(1 - bias), inv_scale, uniforms)
    return EdgeStore(np.sort(ids[work], axis=1))


def generate(config: SynthConfig) -> tuple[MemberStore, EdgeStore]:
    """Population plus friendship graph for ``config``."""
    members = generate_population(config)
    _, s_graph, s_mix = (int(s.generate_state(1)[0]) for s in
                         np.random.SeedSequence(config.seed).spawn(3))
    n = config.n
    if n < 2:
        return members, EdgeStore()
    if isinstance(config.model, BAModel):
        edges = generate_ba(n, config.model.m, s_graph, first_id=config.first_id)
    else:
        edges = generate_er(n, config.model.mean_degree, s_graph, first_id=config.first_id)
    if config.mixing is not None and not config.mixing.neutral:
        edges = apply_mixing(edges, members, config.mixing, s_mix)
    return members, edges
