"""Finite-sample confidence bounds for kernel estimates.

The radius around an estimate with kernel mass k that holds with
probability at least 1 - delta is

    radius = L*h + 2*sigma*factor(k) / k,

where L is the Lipschitz constant of the latent map, h the kernel
bandwidth, sigma a sub-Gaussian noise proxy, and factor(k) a
self-normalized deviation term:

    factor(k) = sqrt(log(2^(d/2) / delta))            for k <= 1,
    factor(k) = sqrt(k * log((1 + k)^(d/2) / delta))  for k > 1.

All logarithms are natural. Zero mass means no data and therefore no
bound; the sentinel is +inf so exports serialize it as a literal "inf".
"""

import math
from dataclasses import dataclass

import numpy as np

NO_BOUND = math.inf


@dataclass(frozen=True)
class BoundParams:
    """Constants feeding the confidence radius.

    lipschitz: bound on the latent map's rate of change (>= 0).
    noise_proxy: sub-Gaussian scale of the observation noise (> 0).
    delta: failure probability in (0, 1).
    dim: output dimension d (>= 1).
    """

    lipschitz: float
    noise_proxy: float
    delta: float
    dim: int = 1

    def __post_init__(self):
        if not 0 <= self.lipschitz < math.inf:
            raise ValueError(f"lipschitz must be finite and >= 0, got {self.lipschitz}")
        if not self.noise_proxy > 0:
            raise ValueError(f"noise_proxy must be > 0, got {self.noise_proxy}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not (isinstance(self.dim, (int, np.integer)) and self.dim >= 1):
            raise ValueError(f"dim must be an integer >= 1, got {self.dim}")


def deviation_factor(mass, delta: float, dim: int):
    """Self-normalized deviation term as a function of kernel mass.

    Accepts a scalar or array mass >= 0. The two branches coincide at
    mass = 1. Mass 0 is allowed and falls into the first branch.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    scalar = np.ndim(mass) == 0
    m = np.atleast_1d(np.asarray(mass, dtype=float))
    if np.any(m < 0):
        raise ValueError("mass must be >= 0")
    log_delta = math.log(delta)
    small = math.sqrt(0.5 * dim * math.log(2.0) - log_delta)
    large = np.sqrt(m * (0.5 * dim * np.log1p(m) - log_delta))
    out = np.where(m <= 1.0, small, large)
    return float(out[0]) if scalar else out


def confidence_radius(params: BoundParams, bandwidth: float, mass):
    """Radius of the high-probability error ball, +inf where mass is 0."""
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth}")
    scalar = np.ndim(mass) == 0
    m = np.atleast_1d(np.asarray(mass, dtype=float))
    factor = deviation_factor(m, params.delta, params.dim)
    base = params.lipschitz * bandwidth
    out = np.full(m.shape, NO_BOUND)
    pos = m > 0
    out[pos] = base + 2.0 * params.noise_proxy * factor[pos] / m[pos]
    return float(out[0]) if scalar else out


@dataclass
class SelfNormTrace:
    """Running sums of a scalar-weighted noise process.

    noise_sum accumulates sum_n v_n * eta_n (a d-vector), weight_sq_sum
    accumulates sum_n v_n^2.
    """

    noise_sum: np.ndarray
    weight_sq_sum: float = 0.0
    steps: int = 0

    @classmethod
    def zeros(cls, dim: int) -> "SelfNormTrace":
        return cls(noise_sum=np.zeros(dim))

    def fold(self, v: float, eta: np.ndarray) -> "SelfNormTrace":
        self.noise_sum = self.noise_sum + v * eta
        self.weight_sq_sum += v * v
        self.steps += 1
        return self


def self_normalized_bound(weight_sq_sum, params: BoundParams):
    """Threshold 2*sigma^2 * log((V+1)^(d/2) / delta) * (V+1) for V >= 0."""
    scalar = np.ndim(weight_sq_sum) == 0
    v = np.atleast_1d(np.asarray(weight_sq_sum, dtype=float))
    if np.any(v < 0):
        raise ValueError("weight_sq_sum must be >= 0")
    sig2 = params.noise_proxy**2
    out = 2.0 * sig2 * (0.5 * params.dim * np.log1p(v) - math.log(params.delta)) * (v + 1.0)
    return float(out[0]) if scalar else out


def self_normalized_violated(trace: SelfNormTrace, params: BoundParams) -> bool:
    """True iff the squared norm of the weighted noise sum exceeds its threshold.

    Equality does not count as a violation (the guarantee is non-strict).
    """
    lhs = float(trace.noise_sum @ trace.noise_sum)
    return lhs > self_normalized_bound(trace.weight_sq_sum, params)
