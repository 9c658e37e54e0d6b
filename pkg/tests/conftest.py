import numpy as np
import pytest

from catscreen import CategoricalDesign, ResponseVector


@pytest.fixture
def tiny_perfect():
    """x alternates with y exactly."""
    design = CategoricalDesign.from_levels(np.array([[0], [1], [0], [1]]))
    y = ResponseVector.binary([0, 1, 0, 1])
    return design, y


@pytest.fixture
def tiny_three_level():
    """The hand-counted 4-observation example used across modules."""
    design = CategoricalDesign.from_levels(np.array([[0], [1], [2], [2]]))
    y = ResponseVector.binary([0, 0, 1, 1])
    return design, y


def random_categorical(rng, n=None, p=3, kmax=5, random_scores=True):
    """A random small categorical dataset with a non-constant binary y."""
    n = int(rng.integers(8, 200)) if n is None else n
    ks = rng.integers(2, kmax + 1, size=p)
    levels = np.column_stack([rng.integers(0, k, size=n) for k in ks])
    if random_scores:
        scores = [np.sort(rng.normal(size=k)) for k in ks]
    else:
        scores = None
    while True:
        y = rng.integers(0, 2, size=n)
        if 0 < y.sum() < n:
            break
    design = CategoricalDesign.from_levels(levels, level_scores=scores)
    return design, ResponseVector.binary(y)
