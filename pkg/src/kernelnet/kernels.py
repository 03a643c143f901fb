"""Compactly supported kernel functions.

Every kernel profile maps a scaled distance v to a weight in [0, 1] and
vanishes for |v| > 1, so an observation can only influence estimation
points within one bandwidth of it.
"""

from dataclasses import dataclass

import numpy as np


def boxcar(v):
    v = np.asarray(v, dtype=float)
    return np.where(np.abs(v) <= 1.0, 1.0, 0.0)


def triangular(v):
    v = np.asarray(v, dtype=float)
    return np.maximum(0.0, 1.0 - np.abs(v))


def epanechnikov(v):
    # 1 - v^2 on the support, clipped so the range stays within [0, 1]
    v = np.asarray(v, dtype=float)
    return np.maximum(0.0, 1.0 - v * v)


PROFILES = {
    "boxcar": boxcar,
    "triangular": triangular,
    "epanechnikov": epanechnikov,
}


@dataclass(frozen=True)
class KernelSpec:
    """A kernel shape plus its bandwidth (the support radius)."""

    kind: str = "boxcar"
    bandwidth: float = 0.15

    def __post_init__(self):
        if self.kind not in PROFILES:
            raise ValueError(
                f"unknown kernel kind {self.kind!r}; choose from {sorted(PROFILES)}"
            )
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth}")

    def profile(self, v):
        return PROFILES[self.kind](v)


def kernel_weight(spec: KernelSpec, x, xi) -> float:
    """Weight of an observation at xi for the estimation point x.

    Computed as K(||x - xi||_2 / bandwidth); exactly 0 whenever the
    distance exceeds the bandwidth.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if x.shape != xi.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {xi.shape}")
    return float(spec.profile(np.linalg.norm(x - xi) / spec.bandwidth))


def grid_weights(spec: KernelSpec, points: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Vector of kernel weights of one observation against all grid points."""
    if points.shape[1] != xi.shape[0]:
        raise ValueError(
            f"dimension mismatch: grid has p={points.shape[1]}, point has p={xi.shape[0]}"
        )
    dist = np.linalg.norm(points - xi, axis=1)
    return spec.profile(dist / spec.bandwidth)
