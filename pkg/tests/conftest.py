import numpy as np
import pytest

from mimodist import RngStream, ScenarioConfig, sample_channel


def make_instance(seed, M=8, K=3, **cfg_kwargs):
    """One scenario plus a channel realization drawn from it."""
    cfg = ScenarioConfig(M=M, K=K, trials=1, seed=seed, **cfg_kwargs)
    chan = sample_channel(cfg, RngStream(seed, 0))
    return cfg, chan


@pytest.fixture
def rng_np():
    return np.random.default_rng(1234)
