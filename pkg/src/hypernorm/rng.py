"""Counter-mode random streams: every draw is keyed by ``(seed, counter...)``."""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def stream(seed: int, *counter: int) -> np.random.Generator:
    """Independent generator for ``(seed, *counter)``; no global state."""
    return np.random.default_rng([int(seed) & _MASK, *(int(c) & _MASK for c in counter)])


def sample_values(rng: np.random.Generator, shape, mode: str = "complex", amplitude: float = 1.0) -> np.ndarray:
    """Draw an array with ``|entry| <= amplitude``.

    ``complex`` uses a complex Gaussian clamped radially; ``nonnegative``,
    ``real`` and ``sign`` derive from it by modulus, real part and sign.
    """
    if mode == "zero_one":
        p = rng.uniform(0.3, 1.0)
        return (rng.random(shape) < p).astype(complex)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * (amplitude / 2)
    r = np.abs(z)
    z = np.where(r > amplitude, z * (amplitude / np.where(r > 0, r, 1)), z)
    if mode == "complex":
        return z
    if mode == "nonnegative":
        return np.abs(z).astype(complex)
    if mode == "real":
        return np.clip(z.real, -amplitude, amplitude).astype(complex)
    if mode == "sign":
        return np.where(z.real >= 0, amplitude, -amplitude).astype(complex)
    raise ValueError(f"unknown sampling mode {mode!r}")


def sample_weights(rng: np.random.Generator, n: int, probability: bool) -> np.ndarray:
    w = rng.uniform(0.25, 1.0, n)
    return w / w.sum() if probability else w
