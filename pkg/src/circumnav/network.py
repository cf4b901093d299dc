"""Directed-ring communication, full measurement sharing and fault injection."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, TopologyError


@dataclass(frozen=True)
class RingTopology:
    """Counterclockwise directed ring: agent ``i`` follows ``(i + 1) % n``."""

    n: int

    def __post_init__(self):
        if self.n < 3:
            raise TopologyError(f"ring needs n >= 3 agents, got {self.n}")

    def successor(self, i: int) -> int:
        return (i + 1) % self.n


@dataclass(frozen=True)
class FaultSchedule:
    """``entries`` are ``(agent, t_start, t_end)`` with 0-based agent indices
    and closed time intervals."""

    entries: tuple[tuple[int, float, float], ...] = ()
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.noise < 0.0:
            raise ConfigError("measurement noise amplitude must be >= 0", key="faults.noise")
        for agent, t0, t1 in self.entries:
            if agent < 0:
                raise ConfigError(f"fault entry has negative agent index {agent}", key="faults.faulty")
            if t1 < t0:
                raise ConfigError(f"fault interval [{t0}, {t1}] is reversed", key="faults.faulty")

    def faulty_at(self, t: float) -> frozenset[int]:
        return frozenset(a for a, t0, t1 in self.entries if t0 <= t <= t1)

    def check(self, n: int, times) -> None:
        """Every step keeps at least 3 valid agents and every agent index exists."""
        for agent, _, _ in self.entries:
            if agent >= n:
                raise ConfigError(f"fault entry names agent {agent + 1} but n={n}", key="faults.faulty")
        for t in times:
            if n - len(self.faulty_at(t)) < 3:
                raise ConfigError(f"fewer than 3 valid agents at t={t}", key="faults.faulty")


@dataclass(frozen=True)
class Broadcast:
    """The packet every agent receives: all positions, distances and flags."""

    px: tuple[float, ...]
    py: tuple[float, ...]
    d_b: tuple[float, ...]
    valid: tuple[bool, ...]

    def valid_arrays(self):
        idx = [i for i, ok in enumerate(self.valid) if ok]
        return ([self.px[i] for i in idx], [self.py[i] for i in idx],
                [self.d_b[i] for i in idx])


@dataclass(frozen=True)
class AgentView:
    agent_id: int
    shared: Broadcast = field(repr=False)
    successor: int
    successor_p: tuple[float, float]

    @property
    def own_valid(self) -> bool:
        return self.shared.valid[self.agent_id]


def measurement_noise(faults: FaultSchedule, step: int, n: int) -> np.ndarray:
    """Uniform ``[-noise, noise]`` draws for one step; a pure function of (seed, step)."""
    if faults.noise == 0.0:
        return np.zeros(n)
    rng = np.random.default_rng([faults.seed, step])
    return rng.uniform(-faults.noise, faults.noise, n)


def exchange(px, py, d_b, topo: RingTopology, faults: FaultSchedule, t: float,
             step: int = 0) -> list[AgentView]:
    """Distribute measurements around the ring.

    ``px``, ``py`` and ``d_b`` are the agents' GPS positions and noiseless
    sensor readings. Noise is added once, before distribution, so every
    agent sees the same packet.
    """
    n = topo.n
    if not (len(px) == len(py) == len(d_b) == n):
        raise TopologyError(f"expected {n} agent states, got {len(px)}")
    noise = measurement_noise(faults, step, n)
    faulty = faults.faulty_at(t)
    shared = Broadcast(
        tuple(float(x) for x in px),
        tuple(float(y) for y in py),
        tuple(float(d) + float(e) for d, e in zip(d_b, noise)),
        tuple(i not in faulty for i in range(n)),
    )
    views = []
    for i in range(n):
        j = topo.successor(i)
        views.append(AgentView(i, shared, j, (shared.px[j], shared.py[j])))
    return views


def incidence_ring(n: int) -> np.ndarray:
    """Transposed incidence matrix ``B^T`` of the directed ring.

    Row ``i`` holds ``+1`` at column ``i`` and ``-1`` at ``(i + 1) % n`` so that
    ``(-B^T beta)_i = beta_{i+1} - beta_i``.
    """
    if n < 2:
        raise TopologyError(f"ring incidence matrix needs n >= 2, got {n}")
    bt = np.eye(n)
    for i in range(n):
        bt[i, (i + 1) % n] -= 1.0
    return bt
