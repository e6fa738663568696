import itertools

import numpy as np
import pytest

from corebench import GenericEnvironment, TextImageProfile

AM_FAMILY = [(), (0,), (1,), (2,), (0, 1)]


@pytest.fixture
def am_env() -> GenericEnvironment:
    """The two-slot spectrum story: two unit bidders, one package bidder."""
    return GenericEnvironment([1.0, 1.0, 1.0], AM_FAMILY)


@pytest.fixture
def am_profile() -> TextImageProfile:
    return TextImageProfile(2, [1.0, 1.0], [1.0])


def random_downward_closed_env(rng: np.random.Generator, n_max: int = 8) -> GenericEnvironment:
    """Random environment closed under removing winners (so VCG payments are >= 0)."""
    n = int(rng.integers(2, n_max + 1))
    family = {()}
    for _ in range(int(rng.integers(1, 4))):
        size = int(rng.integers(1, min(n, 5) + 1))
        top = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        for r in range(len(top) + 1):
            family.update(itertools.combinations(top, r))
    values = np.round(rng.uniform(0.0, 4.0, n), 3)
    return GenericEnvironment(values, family, downward_closed=True)


def random_small_profile(rng: np.random.Generator, max_agents: int = 12) -> TextImageProfile:
    """Random profile small enough for the LP oracle, values on a coarse grid."""
    k = int(rng.integers(1, 7))
    n_texts = int(rng.integers(1, 9))
    n_images = int(rng.integers(0, min(4, max_agents - n_texts) + 1))
    texts = np.round(rng.uniform(0.0, 2.0, n_texts), 3)
    images = np.round(rng.uniform(0.0, 3.0, n_images), 3)
    return TextImageProfile(k, texts, images)
