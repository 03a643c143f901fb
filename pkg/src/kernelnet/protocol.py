"""Tuple exchange between agents and the aggregated network estimator.

Agents never ship raw samples. A summary tuple freezes one agent's
running sums (numerator, mass) at one grid point at one time stamp;
stores keep the newest tuple per (origin, grid point); the aggregated
estimate at a point is the ratio of summed numerators to summed masses
over everything stored there, which reproduces exactly what a single
pool of all the underlying raw samples would give.
"""

from dataclasses import dataclass

import numpy as np

from .confidence import BoundParams, confidence_radius
from .core import Grid, LocalStats, Observation
from .kernels import KernelSpec, grid_weights


@dataclass(frozen=True)
class SummaryTuple:
    """Frozen (numerator, mass) summary of one origin agent at one grid point.

    The stamp is the origin's local time when the sums were frozen; it
    orders overwrites and never weights data. Relays must forward tuples
    unchanged, so the numerator array is marked read-only.
    """

    origin: int
    x_index: int
    stamp: int
    numerator: np.ndarray  # (d,)
    mass: float

    def __post_init__(self):
        if self.mass < 0:
            raise ValueError("mass must be >= 0")
        if self.stamp < 1:
            raise ValueError("stamp must be >= 1")
        num = np.asarray(self.numerator, dtype=float)
        num.setflags(write=False)
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "mass", float(self.mass))

    def to_json_dict(self) -> dict:
        return {
            "origin": self.origin,
            "x_index": self.x_index,
            "stamp": self.stamp,
            "kappa": self.mass,
            "psi": self.numerator.tolist(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SummaryTuple":
        return cls(
            origin=d["origin"],
            x_index=d["x_index"],
            stamp=d["stamp"],
            numerator=np.asarray(d["psi"], dtype=float),
            mass=d["kappa"],
        )


@dataclass(frozen=True)
class Message:
    """A summary tuple in flight, delivered to every neighbor of the sender."""

    sender: int
    payload: SummaryTuple

    def to_json_dict(self) -> dict:
        return {"sender": self.sender, "tuple": self.payload.to_json_dict()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "Message":
        return cls(sender=d["sender"], payload=SummaryTuple.from_json_dict(d["tuple"]))


class TupleStore:
    """Newest-wins container of summary tuples, one slot per (origin, grid point)."""

    def __init__(self):
        self._by_x: dict[int, dict[int, SummaryTuple]] = {}
        self._keys: list[tuple[int, int]] = []  # insertion order, for uniform picks

    def __len__(self) -> int:
        return len(self._keys)

    def ingest(self, tup: SummaryTuple) -> bool:
        """Insert or overwrite; a stale stamp (strictly older) is discarded.

        Keys by the tuple's origin, never by whoever relayed it.
        Returns True iff the store changed slot content.
        """
        slot = self._by_x.setdefault(tup.x_index, {})
        current = slot.get(tup.origin)
        if current is None:
            slot[tup.origin] = tup
            self._keys.append((tup.origin, tup.x_index))
            return True
        if tup.stamp >= current.stamp:
            slot[tup.origin] = tup
            return True
        return False

    def get(self, origin: int, x_index: int) -> SummaryTuple | None:
        return self._by_x.get(x_index, {}).get(origin)

    def tuples_at(self, x_index: int):
        return self._by_x.get(x_index, {}).values()

    def entries(self):
        for x_index, slot in self._by_x.items():
            yield from slot.values()

    def by_point(self):
        """Iterate (x_index, {origin: tuple}) groups."""
        return self._by_x.items()

    def random_tuple(self, rng: np.random.Generator) -> SummaryTuple | None:
        """Uniform pick over all stored tuples; None when empty."""
        if not self._keys:
            return None
        origin, x_index = self._keys[int(rng.integers(len(self._keys)))]
        return self._by_x[x_index][origin]


@dataclass(frozen=True)
class SendPolicy:
    """Per-round broadcast behavior of one agent.

    Each round the agent sends at most one message: with probability
    p_local a fresh summary of its own data (grid point chosen by the
    point selector), otherwise with probability p_acquired a uniformly
    chosen stored tuple (relay), otherwise nothing.
    """

    p_local: float = 0.5
    p_acquired: float = 0.5
    point_selector: str = "round_robin"

    def __post_init__(self):
        for name in ("p_local", "p_acquired"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.point_selector not in ("round_robin", "uniform"):
            raise ValueError(f"unknown point_selector {self.point_selector!r}")


COMMUNICATION_OFF = SendPolicy(p_local=0.0, p_acquired=0.0)


@dataclass
class AgentState:
    """One agent: its running sums, its tuple store, and its random streams.

    Observation draws and policy draws use separate substreams so runs
    that differ only in the send policy see identical data.
    """

    id: int
    stats: LocalStats
    store: TupleStore
    obs_rng: np.random.Generator
    policy_rng: np.random.Generator
    rr_next: int = 0


def make_tuple(agent: AgentState, x_index: int, t: int) -> SummaryTuple:
    """Freeze the agent's current sums at one grid point (mass may be 0)."""
    return SummaryTuple(
        origin=agent.id,
        x_index=x_index,
        stamp=t,
        numerator=agent.stats.numerator[x_index].copy(),
        mass=float(agent.stats.denominator[x_index]),
    )


def select_broadcast(
    agent: AgentState, grid: Grid, policy: SendPolicy, t: int
) -> Message | None:
    """Choose this round's outgoing message, if any (at most one).

    A fresh local tuple takes precedence over a relay; the local draw is
    consumed every round so the stream stays aligned across policies.
    """
    rng = agent.policy_rng
    if rng.random() < policy.p_local:
        if policy.point_selector == "round_robin":
            x_index = agent.rr_next % grid.n_points
            agent.rr_next = (agent.rr_next + 1) % grid.n_points
        else:
            x_index = int(rng.integers(grid.n_points))
        tup = make_tuple(agent, x_index, t)
        agent.store.ingest(tup)
        return Message(sender=agent.id, payload=tup)
    if rng.random() < policy.p_acquired:
        tup = agent.store.random_tuple(rng)
        if tup is not None:
            return Message(sender=agent.id, payload=tup)
    return None


def aggregate(agent: AgentState, x_index: int, params: BoundParams, bandwidth: float):
    """Network estimate and confidence radius at one grid point.

    Sums the agent's live local sums with every stored tuple from other
    origins at that point. Returns (estimate or None, radius, mass);
    the radius is +inf exactly when the merged mass is 0.
    """
    num = agent.stats.numerator[x_index].copy()
    mass = float(agent.stats.denominator[x_index])
    for tup in agent.store.tuples_at(x_index):
        if tup.origin != agent.id:
            num += tup.numerator
            mass += tup.mass
    if mass > 0:
        return num / mass, float(confidence_radius(params, bandwidth, mass)), mass
    return None, confidence_radius(params, bandwidth, 0.0), mass


def aggregate_grid(agent: AgentState, params: BoundParams, bandwidth: float):
    """Vectorized aggregate over every grid point.

    Returns (estimates with NaN rows where mass is 0, radii, masses).
    """
    num = agent.stats.numerator.copy()
    mass = agent.stats.denominator.copy()
    for x_index, slot in agent.store.by_point():
        for origin, tup in slot.items():
            if origin != agent.id:
                num[x_index] += tup.numerator
                mass[x_index] += tup.mass
    est = np.full_like(num, np.nan)
    pos = mass > 0
    est[pos] = num[pos] / mass[pos, None]
    return est, confidence_radius(params, bandwidth, mass), mass


def agent_round(
    agent: AgentState,
    grid: Grid,
    spec: KernelSpec,
    obs: Observation,
    inbox: list,
    policy: SendPolicy,
    t: int,
) -> Message | None:
    """One synchronous round for one agent.

    In order: fold the fresh observation, ingest every delivered
    message, refresh the agent's own stored tuples at the grid points
    the observation touched, then select at most one broadcast.
    """
    if obs.y.shape != (agent.stats.output_dim,):
        raise ValueError(
            f"output dimension mismatch: expected {agent.stats.output_dim}, got {obs.y.shape}"
        )
    w = grid_weights(spec, grid.points, obs.xi)
    touched = np.flatnonzero(w)
    agent.stats.apply(touched, w[touched], obs.y)
    for msg in inbox:
        agent.store.ingest(msg.payload)
    for x_index in touched:
        agent.store.ingest(make_tuple(agent, int(x_index), t))
    return select_broadcast(agent, grid, policy, t)
