"""Network state, seeded randomness, and shared configuration.

The model: N nodes on a complete network, each node independently active
with probability p (node 0 is forced active and starts informed). Time is
synchronous rounds; informed active nodes push one message per round. A
protocol run ends when every active node is informed.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "Algorithm",
    "ConfigError",
    "RngStream",
    "ProtocolConfig",
    "NetworkState",
    "sample_active",
    "informed_count",
    "is_complete",
    "phase1_steps",
    "default_segment_length",
    "default_max_steps",
]


class ConfigError(ValueError):
    """Raised for invalid protocol or experiment configuration."""


class Algorithm(enum.Enum):
    NAIVE = "naive"
    CYCLIC = "cyclic"
    IMPROVED_CYCLIC = "improved_cyclic"
    ORACLE = "oracle"

    @classmethod
    def parse(cls, name: str) -> "Algorithm":
        cleaned = name.strip().lower().replace("-", "_")
        if cleaned == "improved":
            cleaned = "improved_cyclic"
        try:
            return cls(cleaned)
        except ValueError:
            raise ConfigError(f"unknown algorithm {name!r}; expected one of "
                              f"{[a.value for a in cls]}") from None


# Substream domains carved out of each trial stream. Every algorithm draws
# the active set from domain 0 and its protocol randomness from domain 1,
# so runs sharing (seed, stream_id) see the same active set and the same
# phase-1 draws regardless of which algorithm is executed.
_DOMAIN_ACTIVE = 0
_DOMAIN_PROTOCOL = 1


@dataclass(frozen=True)
class RngStream:
    """Deterministic per-trial randomness, independent across stream_ids."""

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not (0 <= int(self.stream_id) < 2 ** 64):
            raise ConfigError(f"stream_id must be a 64-bit unsigned integer, got {self.stream_id}")

    def _generator(self, domain: int) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=int(self.seed),
                                     spawn_key=(int(self.stream_id), domain))
        return np.random.Generator(np.random.PCG64(seq))

    def active_generator(self) -> np.random.Generator:
        """Generator used exclusively to sample the active set."""
        return self._generator(_DOMAIN_ACTIVE)

    def protocol_generator(self) -> np.random.Generator:
        """Generator used for all in-protocol random choices."""
        return self._generator(_DOMAIN_PROTOCOL)


def phase1_steps(N: int, p: float, slack: float) -> int:
    """Length of the randomized warm-up phase: ceil((1+slack) ln N / ln(1+p))."""
    if N <= 1:
        return 0
    return math.ceil((1.0 + slack) * math.log(N) / math.log(1.0 + p))


def default_segment_length(N: int) -> int:
    """Derived segment length round(sqrt(ln N)), at least 1."""
    if N <= 1:
        return 1
    return max(1, round(math.sqrt(math.log(N))))


def default_max_steps(N: int, p: float) -> int:
    """Termination cap, generous enough for any sane configuration."""
    if N <= 1:
        return 1
    return max(1, math.ceil(64.0 * math.log(N) / math.log(1.0 + p)))


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything a single trial needs besides its RngStream."""

    algorithm: Algorithm
    N: int
    p: float
    phase1_slack: float = 0.2
    epsilon: float = 0.1
    segment_length_override: Optional[int] = None
    max_steps: Optional[int] = None
    record_trajectory: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.algorithm, Algorithm):
            raise ConfigError(f"algorithm must be an Algorithm, got {self.algorithm!r}")
        if int(self.N) < 1:
            raise ConfigError(f"N must be a positive integer, got {self.N}")
        if not (0.0 < float(self.p) <= 1.0):
            raise ConfigError(f"p must lie in (0, 1], got {self.p}")
        if float(self.phase1_slack) < 0.0:
            raise ConfigError(f"phase1_slack must be >= 0, got {self.phase1_slack}")
        if not (0.0 < float(self.epsilon) < 0.5):
            raise ConfigError(f"epsilon must lie in (0, 1/2), got {self.epsilon}")
        if self.segment_length_override is not None:
            ell = int(self.segment_length_override)
            if ell < 1:
                raise ConfigError(f"segment_length_override must be >= 1, got {ell}")
            if ell > int(self.N):
                raise ConfigError(f"segment_length_override {ell} exceeds N={self.N}")
        if self.max_steps is not None and int(self.max_steps) < 1:
            raise ConfigError(f"max_steps must be >= 1, got {self.max_steps}")

    @property
    def segment_length(self) -> int:
        if self.segment_length_override is not None:
            return int(self.segment_length_override)
        return default_segment_length(self.N)

    @property
    def step_cap(self) -> int:
        if self.max_steps is not None:
            return int(self.max_steps)
        return default_max_steps(self.N, self.p)


@dataclass
class NetworkState:
    """Ground truth for one trial: activity and knowledge bitmaps plus a clock.

    Invariants: informed is a subset of active; node 0 is active and informed;
    informed only grows; clock advances by one per protocol step.
    """

    node_count: int
    active: np.ndarray
    informed: np.ndarray
    clock: int = 0

    def copy(self) -> "NetworkState":
        return NetworkState(self.node_count, self.active.copy(),
                            self.informed.copy(), self.clock)


def sample_active(N: int, p: float, rng: RngStream) -> NetworkState:
    """Sample the active set: node 0 forced active and informed, others i.i.d."""
    if int(N) < 1:
        raise ConfigError(f"N must be a positive integer, got {N}")
    if not (0.0 < float(p) <= 1.0):
        raise ConfigError(f"p must lie in (0, 1], got {p}")
    gen = rng.active_generator()
    active = gen.random(int(N)) < float(p)
    active[0] = True
    informed = np.zeros(int(N), dtype=bool)
    informed[0] = True
    return NetworkState(node_count=int(N), active=active, informed=informed, clock=0)


def informed_count(state: NetworkState) -> int:
    return int(np.count_nonzero(state.informed))


def is_complete(state: NetworkState) -> bool:
    """True once every active node is informed."""
    return bool(np.all(state.informed[state.active]))
