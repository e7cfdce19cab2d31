import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_dft(x):
    """Direct O(N^2) unitary DFT sum."""
    x = np.asarray(x, dtype=complex)
    n = x.size
    idx = np.arange(n)
    return np.array([np.sum(x * np.exp(-2j * np.pi * idx * k / n)) for k in range(n)]) / np.sqrt(n)


def cn(rng, size, var=1.0):
    """Circular complex normal samples with E|V|^2 = var."""
    return np.sqrt(var / 2) * (rng.standard_normal(size) + 1j * rng.standard_normal(size))
