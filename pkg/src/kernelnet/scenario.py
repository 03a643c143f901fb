"""Synthetic phenomena, per-agent sampling, and named experiment presets.

The latent map is a sum of isotropic Gaussian bumps per output
coordinate. Agents draw explanatory points from their own normal
distribution (local scope) and observe the map's value plus Gaussian
noise; samples landing outside the region of interest are kept, since
they still carry kernel mass for boundary grid points.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import Grid, Observation


@dataclass(frozen=True)
class GaussianBump:
    """One unnormalized component amplitude * exp(-||x - center||^2 / (2 scale))."""

    center: np.ndarray
    scale: float
    amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.scale > 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")


@dataclass(frozen=True)
class Phenomenon:
    """Latent map R^p -> R^d: one bump list per output coordinate.

    lipschitz is the constant declared to the bound formulas; it must
    dominate the numerical estimate from lipschitz_estimate.
    """

    components: tuple  # tuple of tuples of GaussianBump, length d
    lipschitz: float

    def __post_init__(self):
        comps = tuple(tuple(c) for c in self.components)
        if not comps or any(len(c) == 0 for c in comps):
            raise ValueError("each output coordinate needs at least one bump")
        object.__setattr__(self, "components", comps)
        if not self.lipschitz >= 0:
            raise ValueError("lipschitz must be >= 0")

    @classmethod
    def scalar(cls, bumps, lipschitz: float) -> "Phenomenon":
        """Single-output phenomenon from a flat bump list."""
        return cls(components=(tuple(bumps),), lipschitz=lipschitz)

    @property
    def output_dim(self) -> int:
        return len(self.components)

    @property
    def input_dim(self) -> int:
        return self.components[0][0].center.shape[0]

    def evaluate(self, xi) -> np.ndarray:
        """Value at a single point, shape (d,)."""
        xi = np.asarray(xi, dtype=float)
        out = np.empty(self.output_dim)
        for c, bumps in enumerate(self.components):
            acc = 0.0
            for b in bumps:
                diff = xi - b.center
                acc += b.amplitude * math.exp(-(diff @ diff) / (2.0 * b.scale))
            out[c] = acc
        return out

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Values at an (N, p) array of points, shape (N, d)."""
        points = np.asarray(points, dtype=float)
        out = np.zeros((points.shape[0], self.output_dim))
        for c, bumps in enumerate(self.components):
            for b in bumps:
                r2 = ((points - b.center) ** 2).sum(axis=1)
                out[:, c] += b.amplitude * np.exp(-r2 / (2.0 * b.scale))
        return out


def lipschitz_estimate(ph: Phenomenon, grid: Grid, refine: int = 4) -> float:
    """Numerical Lipschitz constant over the grid's box.

    Maximizes the Jacobian spectral norm over a lattice refined by the
    given factor; derivatives come from central finite differences, so
    the result is independent of the bump formulas.
    """
    if refine < 1:
        raise ValueError("refine must be >= 1")
    axes = [
        np.linspace(lo, hi, max(2, int(round((hi - lo) / grid.step)) * refine + 1))
        if hi > lo
        else np.array([lo])
        for lo, hi in zip(grid.lower, grid.upper)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    eps = 1e-6 * max(1.0, float(np.max(grid.upper - grid.lower)))
    p = pts.shape[1]
    jac = np.empty((pts.shape[0], ph.output_dim, p))
    for a in range(p):
        shift = np.zeros(p)
        shift[a] = eps
        jac[:, :, a] = (ph.evaluate_many(pts + shift) - ph.evaluate_many(pts - shift)) / (
            2.0 * eps
        )
    spectral = np.linalg.svd(jac, compute_uv=False)[:, 0]
    return float(spectral.max())


@dataclass(frozen=True)
class AgentSampler:
    """Where one agent looks (normal explanatory draws) and how noisy it is."""

    mean: np.ndarray
    spread: float
    noise_sigma: float

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        if not self.spread > 0:
            raise ValueError("spread must be > 0")
        if not self.noise_sigma > 0:
            raise ValueError("noise_sigma must be > 0")


def sample_observation(
    sampler: AgentSampler, ph: Phenomenon, rng: np.random.Generator, agent: int, t: int
) -> Observation:
    """Draw xi ~ N(mean, spread^2 I), y = m(xi) + N(0, noise_sigma^2 I_d)."""
    xi = rng.normal(sampler.mean, sampler.spread)
    eta = rng.normal(0.0, sampler.noise_sigma, size=ph.output_dim)
    return Observation(xi=xi, y=ph.evaluate(xi) + eta, t=t, agent=agent)


def agent_samplers(
    n_agents: int,
    lower,
    upper,
    noise_sigma: float,
    spread: float | None = None,
    jitter: float = 0.1,
    rng: np.random.Generator | None = None,
) -> list:
    """Place agent sampling means on a jittered sub-lattice covering the box.

    The lattice has ceil(n_agents^(1/p)) cells per axis; means sit at
    cell centers (plus a small uniform jitter) so the union of the
    agents' effective scopes covers the whole region. spread defaults to
    one cell size.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    p = lower.shape[0]
    side = max(1, math.ceil(n_agents ** (1.0 / p) - 1e-9))
    cells = (upper - lower) / side
    axes = [lower[a] + cells[a] * (np.arange(side) + 0.5) for a in range(p)]
    mesh = np.meshgrid(*axes, indexing="ij")
    lattice = np.column_stack([m.ravel() for m in mesh])
    picks = np.round(np.linspace(0, lattice.shape[0] - 1, n_agents)).astype(int)
    means = lattice[picks]
    if rng is not None and jitter > 0:
        means = means + rng.uniform(-jitter, jitter, size=means.shape) * cells
    if spread is None:
        spread = float(np.max(cells))
    return [AgentSampler(mean=m, spread=spread, noise_sigma=noise_sigma) for m in means]


# Shipped preset: three Gaussian surfaces over [-2, 2]^2, amplitudes scaled
# so the numerical Lipschitz estimate (~0.295) stays under the declared 0.3.
PRESETS = {
    "three-gaussians": {
        "scenario": {
            "bumps": [
                {"center": [0.0, 0.0], "scale": 0.5, "amplitude": 0.34},
                {"center": [1.0, 2.0], "scale": 0.55, "amplitude": 0.34},
                {"center": [2.0, -2.0], "scale": 0.7, "amplitude": 0.34},
            ],
            "noise_sigma": math.sqrt(0.05),
            "lower": [-2.0, -2.0],
            "upper": [2.0, 2.0],
            "step": 0.25,
            "jitter": 0.1,
        },
        "kernel": {"kind": "boxcar", "bandwidth": 0.15},
        "bounds": {"lipschitz": 0.3, "noise_proxy": math.sqrt(0.05), "delta": 0.001},
    }
}
