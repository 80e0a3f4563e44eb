import numpy as np
import pytest

from sicrep.whsic import known_fiducial, search_fiducial, sic_from_fiducial

# fixed search seed for every non-tabulated dimension used by the suite
SIC_SEED = 2024

_cache = {}


def get_sic(d, seed=SIC_SEED):
    key = (d, seed)
    if key not in _cache:
        if d == 2 and seed == SIC_SEED:
            _cache[key] = sic_from_fiducial(known_fiducial(2))
        else:
            psi, _ = search_fiducial(d, seed)
            _cache[key] = sic_from_fiducial(psi)
    return _cache[key]


@pytest.fixture(scope="session")
def sic2():
    return get_sic(2)


@pytest.fixture(scope="session", params=[2, 3, 4, 5, 6])
def sic(request):
    return get_sic(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
