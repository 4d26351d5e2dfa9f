import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from trivote.model import CandidateSet, ElectionInstance, validate_instance

FIXTURES = Path(__file__).parent / "fixtures"

# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda s: (int(s.rstrip("abcd")), s)):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:<3} {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / name


def build(rows, m, k, names=None):
    """rows: (approved, disapproved) index lists."""
    return validate_instance(rows, m, k, names)


A, B, C, D, E = range(5)


@pytest.fixture
def example1():
    return build([([A, B, D], [E]), ([A, B], [D, E]), ([A], [D, E]), ([B, C], [D, E])], 5, 2)


@pytest.fixture
def example2():
    return build([([0], [1]), ([0], [1])], 2, 2, ["c1", "c2"])


@pytest.fixture
def remark3():
    return build([([], []), ([], []), ([A], [B, C]), ([B], [A, C]), ([C], [A, B])], 3, 2)


@pytest.fixture
def p1():
    # v1 +{x,y} -{z}; v2 +{x} 0{y} -{z}; v3 +{z} 0{x,y}
    return build([([0, 1], [2]), ([0], [2]), ([2], [])], 3, 1, ["x", "y", "z"])


def random_instance(rng: random.Random, max_n=10, max_m=6, decisive=False, k=None) -> ElectionInstance:
    n = rng.randint(1, max_n)
    m = rng.randint(1, max_m)
    k = k if k is not None else rng.randint(1, m)
    rows = []
    for _ in range(n):
        classes = [rng.randrange(2) * 2 if decisive else rng.randrange(3) for _ in range(m)]
        rows.append(([c for c in range(m) if classes[c] == 0], [c for c in range(m) if classes[c] == 2]))
    return validate_instance(rows, m, k)


def random_committee(rng: random.Random, instance: ElectionInstance) -> CandidateSet:
    return instance.committee(rng.sample(range(instance.m), instance.k))


@st.composite
def instances(draw, max_n=8, max_m=5, decisive=False):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, m))
    classes = st.sampled_from((0, 2)) if decisive else st.integers(0, 2)
    rows = []
    for _ in range(n):
        cls = draw(st.lists(classes, min_size=m, max_size=m))
        rows.append(([c for c in range(m) if cls[c] == 0], [c for c in range(m) if cls[c] == 2]))
    return validate_instance(rows, m, k)


@st.composite
def instance_and_committee(draw, **kwargs):
    inst = draw(instances(**kwargs))
    members = draw(st.permutations(range(inst.m)))[: inst.k]
    return inst, inst.committee(members)
