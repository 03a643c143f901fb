"""Per-agent sufficient statistics and the pooled reference estimator.

An agent never retains raw samples: each incoming observation is folded
into per-grid-point running sums (weighted outputs and kernel mass), and
the ratio of the two sums is the kernel regression estimate.
"""

from dataclasses import dataclass

import numpy as np

from .kernels import KernelSpec, grid_weights


@dataclass
class Observation:
    """One noisy sample: explanatory point xi, outcome y, drawn by `agent` at step t."""

    xi: np.ndarray
    y: np.ndarray
    t: int
    agent: int


@dataclass(frozen=True)
class Grid:
    """Finite lattice of estimation points tiling a box, endpoints included.

    Points are stored in lexicographic order, so indices are stable across
    runs and can be used as keys in exchanged summaries.
    """

    lower: np.ndarray
    upper: np.ndarray
    step: float
    points: np.ndarray  # (n_points, p), read-only

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def input_dim(self) -> int:
        return self.points.shape[1]

    def index_of(self, x, tol: float = 1e-9) -> int:
        """Index of the grid point equal to x (within tol), else ValueError."""
        x = np.asarray(x, dtype=float)
        dists = np.linalg.norm(self.points - x, axis=1)
        i = int(np.argmin(dists))
        if dists[i] > tol:
            raise ValueError(f"{x} is not a grid point (closest is {self.points[i]})")
        return i


def make_grid(lower, upper, step: float) -> Grid:
    """Build the lattice with the given step, axis by axis.

    Each axis runs from lower to upper inclusive; if the step does not
    divide the extent the last partial cell is dropped. A step larger
    than an axis extent leaves a single point on that axis.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    if lower.shape != upper.shape:
        raise ValueError("lower and upper must have the same dimension")
    if np.any(upper < lower):
        raise ValueError("upper must be >= lower component-wise")
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step}")
    axes = []
    for lo, hi in zip(lower, upper):
        n = int(np.floor((hi - lo) / step * (1 + 1e-12))) + 1
        axes.append(lo + step * np.arange(n))
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.column_stack([m.ravel() for m in mesh])
    points.setflags(write=False)
    return Grid(lower=lower, upper=upper, step=float(step), points=points)


@dataclass
class LocalStats:
    """Running kernel sums of one agent over all grid points.

    numerator[i] is the kernel-weighted sum of outputs at grid point i,
    denominator[i] the accumulated kernel mass. denominator <= count
    always holds because individual weights never exceed 1.
    """

    numerator: np.ndarray  # (n_points, d)
    denominator: np.ndarray  # (n_points,)
    count: int = 0

    @classmethod
    def zeros(cls, n_points: int, output_dim: int) -> "LocalStats":
        return cls(
            numerator=np.zeros((n_points, output_dim)),
            denominator=np.zeros(n_points),
        )

    @property
    def output_dim(self) -> int:
        return self.numerator.shape[1]

    def apply(self, idx: np.ndarray, weights: np.ndarray, y: np.ndarray) -> None:
        """Fold one observation given its nonzero weights at indices idx."""
        if idx.size:
            self.numerator[idx] += weights[:, None] * y
            self.denominator[idx] += weights
        self.count += 1


def local_update(stats: LocalStats, grid: Grid, spec: KernelSpec, obs: Observation) -> LocalStats:
    """Fold one observation into the running sums at every grid point.

    Grid points farther than one bandwidth from obs.xi are untouched.
    """
    if obs.y.shape != (stats.output_dim,):
        raise ValueError(
            f"output dimension mismatch: expected {stats.output_dim}, got {obs.y.shape}"
        )
    w = grid_weights(spec, grid.points, obs.xi)
    nz = np.flatnonzero(w)
    stats.apply(nz, w[nz], obs.y)
    return stats


def local_estimate(stats: LocalStats, x_index: int):
    """Estimate at one grid point, or None if no kernel mass has accumulated."""
    den = stats.denominator[x_index]
    if den > 0:
        return stats.numerator[x_index] / den
    return None


def pooled_estimate(xi_mat: np.ndarray, y_mat: np.ndarray, x, spec: KernelSpec):
    """Single-pool kernel estimate from raw sample arrays.

    Returns (estimate or None, kernel mass). This is the batch
    recomputation used as the reference for the distributed aggregate.
    """
    x = np.asarray(x, dtype=float)
    if xi_mat.shape[0] == 0:
        return None, 0.0
    w = spec.profile(np.linalg.norm(xi_mat - x, axis=1) / spec.bandwidth)
    mass = float(w.sum())
    if mass > 0:
        return (w @ y_mat) / mass, mass
    return None, mass


def centralized_estimate(observations, x, spec: KernelSpec):
    """Kernel estimate over the union of all given observations at point x.

    The result is what a single processing centre holding every raw
    sample would compute; the tuple-based aggregate must match it.
    Returns (estimate or None, kernel mass).
    """
    if len(observations) == 0:
        return None, 0.0
    # np.stack rejects ragged input, enforcing shared p and d
    xi_mat = np.stack([np.asarray(o.xi, dtype=float) for o in observations])
    y_mat = np.stack([np.asarray(o.y, dtype=float) for o in observations])
    return pooled_estimate(xi_mat, y_mat, x, spec)
