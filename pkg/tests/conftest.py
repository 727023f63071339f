import numpy as np
import pytest
from hypothesis import strategies as st

from bernoulli_drd.model import validate_instance


@pytest.fixture
def pair_instance():
    """One region over two fair tests."""
    return validate_instance(2, [0.5, 0.5], [[0, 1]])


@st.composite
def instances(draw, max_tests=8, max_regions=4, unit_cost=True):
    n = draw(st.integers(1, max_tests))
    theta = draw(st.lists(st.floats(0.05, 0.95), min_size=n, max_size=n))
    regions = draw(st.lists(
        st.frozensets(st.integers(0, n - 1), min_size=1, max_size=n),
        min_size=1, max_size=max_regions, unique=True))
    cost = None
    if not unit_cost:
        cost = draw(st.lists(st.floats(0.25, 4.0), min_size=n, max_size=n))
    return validate_instance(n, theta, [sorted(r) for r in regions], cost=cost)


@st.composite
def instance_and_observation(draw, max_tests=8, max_regions=4):
    inst = draw(instances(max_tests, max_regions))
    n = inst.num_tests
    order = draw(st.permutations(range(n)))
    k = draw(st.integers(0, n))
    outcomes = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    return inst, [(t, outcomes[t]) for t in order[:k]]


def obs_vector(inst, pairs):
    x = np.full(inst.num_tests, -1, dtype=np.int8)
    for t, v in pairs:
        x[t] = v
    return x
