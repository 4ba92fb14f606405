import os

# give numba a real thread pool even on single-core machines, so the
# worker-count tests exercise more than one thread
os.environ.setdefault("NUMBA_NUM_THREADS", "4")

import numpy as np  # noqa: E402
import pytest  # noqa: E402
from hypothesis import HealthCheck, settings  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def natural_images():
    """Three bundled photographs, 512-ish px, as uint8 arrays."""
    data = pytest.importorskip("skimage.data")
    return {"camera": data.camera(), "moon": data.moon(), "coins": data.coins()}


@pytest.fixture(scope="session")
def docs():
    from projwarp.corpus import document_corpus
    return document_corpus(5, 128, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_image(rng, h, w):
    return rng.integers(0, 256, size=(h, w)).astype(np.uint8)
