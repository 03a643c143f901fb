"""Undirected agent graphs and random connected topology generation."""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Topology:
    """Unweighted undirected graph on agents 0..n_agents-1."""

    n_agents: int
    edges: frozenset = field(default_factory=frozenset)  # pairs (i, j), i < j

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("n_agents must be >= 1")
        norm = set()
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < self.n_agents and 0 <= j < self.n_agents):
                raise ValueError(f"edge ({i}, {j}) out of range")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))
        adj = {k: set() for k in range(self.n_agents)}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "_adjacency", adj)

    def neighbors(self, k: int) -> set:
        if not 0 <= k < self.n_agents:
            raise ValueError(f"unknown agent id {k}")
        return set(self._adjacency[k])


def is_connected(top: Topology) -> bool:
    """True iff every node is reachable from node 0 (singleton counts)."""
    seen = {0}
    stack = [0]
    adj = top._adjacency
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == top.n_agents


def random_connected_topology(
    n_agents: int, edge_prob: float, seed: int, max_draws: int = 10_000
) -> Topology:
    """Erdos-Renyi graph conditioned on connectivity.

    Draws G(n, edge_prob) repeatedly from a seeded stream until the draw
    is connected; deterministic for fixed (n_agents, edge_prob, seed).
    """
    if n_agents < 1:
        raise ValueError("n_agents must be >= 1")
    if not 0 <= edge_prob <= 1:
        raise ValueError(f"edge_prob must lie in [0, 1], got {edge_prob}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    pairs = [(i, j) for i in range(n_agents) for j in range(i + 1, n_agents)]
    for _ in range(max_draws):
        mask = rng.random(len(pairs)) < edge_prob
        top = Topology(n_agents, frozenset(p for p, m in zip(pairs, mask) if m))
        if is_connected(top):
            return top
    raise RuntimeError(
        f"no connected graph after {max_draws} draws "
        f"(n={n_agents}, edge_prob={edge_prob}); increase edge_prob"
    )


def save_edgelist(top: Topology, path) -> None:
    """Write one '0-indexed i j' pair per line, sorted for stable output."""
    with open(path, "w") as fh:
        for i, j in sorted(top.edges):
            fh.write(f"{i} {j}\n")


def load_edgelist(path, n_agents: int | None = None) -> Topology:
    """Read an edge list; n_agents defaults to the largest id + 1."""
    edges = set()
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            i, j = (int(tok) for tok in line.split())
            edges.add((i, j))
    if n_agents is None:
        n_agents = max((max(i, j) for i, j in edges), default=0) + 1
    return Topology(n_agents, frozenset(edges))
