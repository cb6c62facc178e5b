import numpy as np
import pytest

from aoi_harq.harq import HarqModel, ModelKind, TerminalChannel, sample_attempts


@pytest.fixture(scope="session")
def mc_attempts():
    """10^6 attempt-count draws per model at the hardest channel (p0 = 1),
    shared by the Monte-Carlo convergence tests."""

    def draw(model):
        rng = np.random.default_rng(20240817)
        ch = TerminalChannel(1.0)
        return np.array(
            [sample_attempts(model, ch, rng) for _ in range(1_000_000)],
            dtype=np.int64,
        )

    return {
        "m1": draw(HarqModel(ModelKind.RECIPROCAL_DECAY)),
        "m2": draw(HarqModel(ModelKind.EXPONENTIAL_DECAY, 0.5)),
    }
