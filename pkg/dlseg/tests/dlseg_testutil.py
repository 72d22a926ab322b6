"""Shared helpers for the model package test suite."""

import numpy as np


def synthetic_pairs(n, size=32, seed=0):
    """Random nested-rectangle zone masks with intensity-coded images."""
    rng = np.random.default_rng(seed)
    images, masks = [], []
    for _ in range(n):
        mask = np.zeros((size, size), dtype=np.int64)
        r0 = int(rng.integers(2, size // 4))
        r1 = int(rng.integers(3 * size // 4, size - 2))
        c0 = int(rng.integers(size // 4, size // 2 - 2))
        c1 = int(rng.integers(size // 2 + 2, 3 * size // 4))
        mask[r0:r1, c0:c1] = 1
        mask[r0 + 2 : r1 - 2, c0 + 1 : c1 - 1] = 2
        mask[r0 + 4 : r1 - 4, c0 + 2 : c1 - 2] = 3
        img = mask * 60.0 + 20.0 + rng.normal(0, 3.0, mask.shape)
        images.append(((img / 255.0) - 0.3) / 0.25)
        masks.append(mask)
    return (
        np.stack(images).astype(np.float32)[:, None, :, :],
        np.stack(masks),
    )
