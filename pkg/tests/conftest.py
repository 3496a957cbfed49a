import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def random_tensor(rng, n1, n2, n3, scale=1.0):
    return scale * rng.standard_normal((n1, n2, n3))


def rel_err(actual, expected):
    denom = np.linalg.norm(np.asarray(expected).ravel())
    diff = np.linalg.norm((np.asarray(actual) - np.asarray(expected)).ravel())
    return diff / denom if denom > 0 else diff
