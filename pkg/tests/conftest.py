import sys

import numpy as np
import pytest

from osncensus import kernels
from osncensus.model import CivilStatus, Gender, MemberRecord, MemberStore

BACKENDS = {
    "numba": dict(bfs=kernels.bfs_numba, source_path_sums=kernels.source_path_sums_numba,
                  ba_attach=kernels.ba_attach_numba,
                  metropolis_swaps=kernels.metropolis_swaps_numba),
    "numpy": dict(bfs=kernels.bfs_numpy, source_path_sums=kernels.source_path_sums_numpy,
                  ba_attach=kernels.ba_attach_numpy,
                  metropolis_swaps=kernels.metropolis_swaps_numpy),
}


@pytest.fixture(params=sorted(BACKENDS))
def backend(request, monkeypatch):
    """Run the test once per kernel flavour by patching the dispatch names."""
    for name, fn in BACKENDS[request.param].items():
        monkeypatch.setattr(kernels, name, fn)
    return request.param


def member(aid, age=25, gender="M", status="single", locale="laguna"):
    return MemberRecord(aid, f"user{aid}", age, Gender(gender), CivilStatus(status), locale)


def random_store(rng, n, first_id=1, ages=(18, 65)):
    genders = rng.integers(0, 2, n)
    statuses = rng.integers(0, 4, n)
    age = rng.integers(ages[0], ages[1] + 1, n)
    return MemberStore(
        MemberRecord(first_id + i, f"u{first_id + i}", int(age[i]),
                     (Gender.MALE, Gender.FEMALE)[genders[i]],
                     tuple(CivilStatus)[statuses[i]], "laguna")
        for i in range(n))


def random_pairs(rng, n, m, first_id=1):
    """Up to ``m`` distinct canonical pairs over ids first_id..first_id+n-1."""
    a = rng.integers(0, n, m)
    b = rng.integers(0, n, m)
    keep = a != b
    pairs = np.sort(np.column_stack((a[keep], b[keep])), axis=1)
    return np.unique(pairs, axis=0) + first_id if pairs.size else pairs.reshape(0, 2)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.RESULTS:
        terminalreporter.write_line(line)
