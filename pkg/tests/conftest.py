import numpy as np
import pytest

import flagf


@pytest.fixture(scope="session")
def get_space():
    """Cached PhiSpace builder keyed by (n, k, m_blocks)."""
    cache = {}

    def build(n, k, m_blocks=1):
        key = (n, k, m_blocks)
        if key not in cache:
            spec = flagf.build_automorphism(n, m_blocks, k)
            cache[key] = flagf.build_phi_space(spec)
        return cache[key]

    return build


@pytest.fixture(scope="session")
def get_split(get_space):
    cache = {}

    def build(n, k):
        if (n, k) not in cache:
            cache[(n, k)] = flagf.build_split(get_space(n, k))
        return cache[(n, k)]

    return build


@pytest.fixture(scope="session")
def get_f_structures(get_space):
    cache = {}

    def build(n, k):
        if (n, k) not in cache:
            cache[(n, k)] = flagf.generate_f_structures(get_space(n, k))
        return cache[(n, k)]

    return build


@pytest.fixture(scope="session")
def get_products(get_space):
    cache = {}

    def build(n, k):
        if (n, k) not in cache:
            cache[(n, k)] = flagf.generate_product_structures(get_space(n, k))
        return cache[(n, k)]

    return build


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
