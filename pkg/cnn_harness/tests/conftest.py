import numpy as np
import pytest

from cnn_harness import TensorRecord


def toy_records(n_per_class=10, seed=0, amp=2.0, noise=0.2):
    """40-class separable dataset: each class plants a constant block in
    one band and one quadrant."""
    rng = np.random.default_rng(seed)
    recs = []
    for cls in range(40):
        band = cls % 10
        q = cls // 10
        for _ in range(n_per_class):
            d = rng.normal(0, noise, size=(32, 32, 10)).astype(np.float32)
            d[8 * q:8 * q + 8, 8 * q:8 * q + 8, band] += amp
            recs.append(TensorRecord(d, subject=1, video=cls,
                                     valence=5.0, arousal=5.0))
    return recs


@pytest.fixture(scope="session")
def toy_dataset():
    return toy_records()
