import numpy as np
import pytest

import msdsim

ETA0 = 2 * np.pi * 1.6  # rad/us for the default drive amplitude
WIDTH = 0.408


@pytest.fixture(scope="session")
def transfer_default():
    """Default population-transfer waveform (t1 = 0.75, t2 = 0.25)."""
    return msdsim.transfer_waveform(1.6, 0.75, 0.25, WIDTH)


@pytest.fixture(scope="session")
def transfer_delayed():
    """Robustness-test waveform with the channel-1 delay moved to 0.9 us."""
    return msdsim.transfer_waveform(1.6, 0.9, 0.25, WIDTH)


@pytest.fixture(scope="session")
def superposition_default():
    """Equal-superposition waveform (t3 = 1.15, t4 = 0.25)."""
    return msdsim.superposition_waveform(1.6, 1.15, 0.25, WIDTH)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2
