"""Step functions and full-run drivers for the four broadcast algorithms.

All protocols push one message per informed active node per synchronous
round. Completion time is the first round at which every active node is
informed. Runs that hit the configured step cap report an explicit
cap_hit failure instead of a completion time.

The three real protocols share a common randomized warm-up (phase 1) so
that trials with equal (seed, stream_id) are pathwise coupled: identical
active sets and identical phase-1 trajectories.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from .core import (
    Algorithm,
    ConfigError,
    NetworkState,
    ProtocolConfig,
    RngStream,
    informed_count,
    phase1_steps,
    sample_active,
)

__all__ = [
    "TraceResult",
    "SegmentStatus",
    "SegmentView",
    "step_naive",
    "run_naive",
    "run_cyclic",
    "run_improved_cyclic",
    "run_oracle",
    "run",
    "longest_uninformed_run",
    "segment_view",
]

_UNSET = np.iinfo(np.int64).max


@dataclass
class TraceResult:
    """Per-trial record of one protocol run."""

    config: ProtocolConfig
    n_active: int
    completion_time: int
    cap_hit: bool = False
    phase1_end: Optional[int] = None
    threshold_times: Dict[str, Optional[int]] = field(default_factory=dict)
    trajectory: Optional[List[int]] = None

    @property
    def completed(self) -> bool:
        return not self.cap_hit


class _ThresholdTracker:
    """First-passage times of the informed count over the stage thresholds.

    Thresholds are epsilon*p*N and (1-epsilon)*p*N; either may be unreachable
    in a given trial (the active count is random), in which case the entry
    stays None.
    """

    def __init__(self, config: ProtocolConfig) -> None:
        self.low = config.epsilon * config.p * config.N
        self.high = (1.0 - config.epsilon) * config.p * config.N
        self.t_low: Optional[int] = None
        self.t_high: Optional[int] = None

    def observe(self, t: int, k: int) -> None:
        if self.t_low is None and k >= self.low:
            self.t_low = t
        if self.t_high is None and k >= self.high:
            self.t_high = t

    def as_dict(self) -> Dict[str, Optional[int]]:
        return {"t_eps": self.t_low, "t_one_minus_eps": self.t_high}


def step_naive(state: NetworkState, gen: np.random.Generator) -> NetworkState:
    """One random-push round: every informed node targets a uniform node.

    Targets are drawn as a single batch in node-index order; self-sends are
    allowed and simply wasted. Active, uninformed targets become informed.
    """
    k = informed_count(state)
    targets = gen.integers(0, state.node_count, size=k)
    hits = state.active[targets] & ~state.informed[targets]
    state.informed[targets[hits]] = True
    state.clock += 1
    return state


def _run_phase1(state: NetworkState, gen: np.random.Generator, n: int,
                tracker: _ThresholdTracker, steps: int, cap: int,
                trajectory: Optional[List[int]]) -> int:
    """Advance the random-push warm-up; returns the informed count."""
    k = informed_count(state)
    limit = min(steps, cap)
    while k < n and state.clock < limit:
        step_naive(state, gen)
        k = informed_count(state)
        tracker.observe(state.clock, k)
        if trajectory is not None:
            trajectory.append(k)
    return k


def _finish(config: ProtocolConfig, n: int, complete: bool, t: int,
            tracker: _ThresholdTracker, phase1_end: Optional[int],
            trajectory: Optional[List[int]]) -> TraceResult:
    return TraceResult(
        config=config,
        n_active=n,
        completion_time=t,
        cap_hit=not complete,
        phase1_end=phase1_end,
        threshold_times=tracker.as_dict(),
        trajectory=trajectory,
    )


def run_naive(config: ProtocolConfig, rng: RngStream) -> TraceResult:
    """Random push only: every informed node targets a uniform random node."""
    if config.algorithm is not Algorithm.NAIVE:
        raise ConfigError(f"run_naive got algorithm {config.algorithm}")
    state = sample_active(config.N, config.p, rng)
    gen = rng.protocol_generator()
    n = int(np.count_nonzero(state.active))
    tracker = _ThresholdTracker(config)
    tracker.observe(0, 1)
    trajectory: Optional[List[int]] = [1] if config.record_trajectory else None
    cap = config.step_cap
    k = _run_phase1(state, gen, n, tracker, steps=cap, cap=cap,
                    trajectory=trajectory)
    return _finish(config, n, k >= n, state.clock, tracker, None, trajectory)


def _cyclic_phase2(state: NetworkState, n: int, tracker: _ThresholdTracker,
                   cap: int, trajectory: Optional[List[int]]) -> int:
    """Deterministic cyclic sweeps from every informed node.

    A node informed at phase-2 age s (or joining later at age 0) targets
    (own index + age) mod N each round, walking forward around the ring.
    """
    N = state.node_count
    ages = np.zeros(N, dtype=np.int64)
    k = informed_count(state)
    while k < n and state.clock < cap:
        senders = np.flatnonzero(state.informed)
        ages[senders] += 1
        targets = (senders + ages[senders]) % N
        hits = state.active[targets] & ~state.informed[targets]
        state.informed[targets[hits]] = True
        state.clock += 1
        k = informed_count(state)
        tracker.observe(state.clock, k)
        if trajectory is not None:
            trajectory.append(k)
    return k


def run_cyclic(config: ProtocolConfig, rng: RngStream) -> TraceResult:
    """Random push warm-up, then deterministic cyclic sweeps."""
    if config.algorithm is not Algorithm.CYCLIC:
        raise ConfigError(f"run_cyclic got algorithm {config.algorithm}")
    state = sample_active(config.N, config.p, rng)
    gen = rng.protocol_generator()
    n = int(np.count_nonzero(state.active))
    tracker = _ThresholdTracker(config)
    tracker.observe(0, 1)
    trajectory: Optional[List[int]] = [1] if config.record_trajectory else None
    cap = config.step_cap
    scheduled = phase1_steps(config.N, config.p, config.phase1_slack)
    k = _run_phase1(state, gen, n, tracker, steps=scheduled, cap=cap,
                    trajectory=trajectory)
    phase1_end = state.clock
    if k < n:
        k = _cyclic_phase2(state, n, tracker, cap, trajectory)
    return _finish(config, n, k >= n, state.clock, tracker, phase1_end,
                   trajectory)


class SegmentStatus(enum.Enum):
    GOOD = "good"
    BAD = "bad"


@dataclass
class SegmentView:
    """Census snapshot of the ring partitioned into consecutive segments.

    A segment is good when, after the intra-segment broadcast completes, its
    informed count reaches ceil(segment_size * p / 2); that requires at least
    one informed node to seed the broadcast, so status is computable from the
    pre-broadcast state. wave_front holds, per good segment, the index of the
    first segment its sweep will cover (-1 for bad segments).
    """

    segment_length: int
    segment_count: int
    status: np.ndarray            # SegmentStatus values, object dtype
    informed_count: np.ndarray    # post-broadcast informed count per segment
    active_count: np.ndarray
    wave_front: np.ndarray

    def good_mask(self) -> np.ndarray:
        return self.status == SegmentStatus.GOOD


def _segment_census(active: np.ndarray, informed: np.ndarray, ell: int,
                    p: float):
    """Per-segment counts and goodness for the improved protocol."""
    N = len(active)
    S = (N + ell - 1) // ell
    seg_of = np.arange(N) // ell
    seg_start = np.arange(S) * ell
    seg_len = np.minimum(ell, N - seg_start)
    seeded = np.bincount(seg_of, weights=informed.astype(np.float64),
                         minlength=S).astype(np.int64)
    act = np.bincount(seg_of, weights=active.astype(np.float64),
                      minlength=S).astype(np.int64)
    threshold = np.ceil(seg_len * p / 2.0).astype(np.int64)
    # after the intra-segment broadcast every active node in a seeded segment
    # is informed, so the census is (seeded) and (enough actives)
    post_informed = np.where(seeded >= 1, act, seeded)
    good = (seeded >= 1) & (post_informed >= threshold)
    return S, seg_start, seg_len, seeded, act, good


def segment_view(state: NetworkState, segment_length: int,
                 p: float) -> SegmentView:
    if segment_length < 1 or segment_length > state.node_count:
        raise ConfigError(f"segment_length {segment_length} invalid for "
                          f"N={state.node_count}")
    S, _, _, seeded, act, good = _segment_census(
        state.active, state.informed, segment_length, p)
    status = np.where(good, SegmentStatus.GOOD, SegmentStatus.BAD)
    fronts = np.where(good, (np.arange(S) + 1) % S, -1)
    return SegmentView(
        segment_length=segment_length,
        segment_count=S,
        status=status,
        informed_count=np.where(seeded >= 1, act, seeded),
        active_count=act,
        wave_front=fronts,
    )


def _improved_phase2_offsets(active: np.ndarray, informed: np.ndarray,
                             ell: int, p: float, budget: int):
    """Segment broadcast plus coalescing forward waves.

    Returns (au_positions, cover_offsets) where cover_offsets[i] is the
    phase-2 step at which active uninformed node au_positions[i] becomes
    informed, or _UNSET for nodes the waves never reached within budget.

    Mechanics, in phase-2 steps:
      2a. Within each segment holding g0 >= 1 informed nodes, the informed
          round-robin the segment's non-informed positions; the position of
          rank r is covered at step r // g0 + 1, so the segment finishes at
          ceil((L - g0) / g0). The schedule is fixed at the census; a node
          reached by a wave before its slot is informed at the wave's step.
      2b. Every good segment launches one wave of size = its active count.
          A wave starts covering the next segment the step after its own
          broadcast finishes, covering min(size, remaining) consecutive
          positions per step; completing a segment recruits that segment's
          active nodes. A wave that completes a segment already claimed by
          another wave merges into the claimant's live root (ties: earliest
          cover-start, then larger wave, then lower origin). Bad segments
          never transmit on their own.
    """
    N = len(active)
    S, seg_start, seg_len, seeded, act, good = _segment_census(
        active, informed, ell, p)

    au = np.flatnonzero(active & ~informed)
    cover = np.full(len(au), _UNSET, dtype=np.int64)
    if len(au) == 0:
        return au, cover

    # 2a schedule: rank positions within each segment among non-informed slots
    unpos = np.flatnonzero(~informed)
    useg = unpos // ell
    counts = np.bincount(useg, minlength=S)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    rank = np.arange(len(unpos)) - starts[useg]
    g0 = seeded[useg]
    rounds = np.where(g0 >= 1, rank // np.maximum(g0, 1) + 1, _UNSET)
    cover = rounds[active[unpos]].astype(np.int64)
    broadcast_len = np.where(
        seeded >= 1,
        (seg_len - seeded + np.maximum(seeded, 1) - 1) // np.maximum(seeded, 1),
        0,
    )

    remaining = int(np.count_nonzero(cover == _UNSET))
    assigned = cover[cover != _UNSET]
    # waves may preempt scheduled local deliveries, so they must keep
    # sweeping until every pending local slot has passed
    pending_max = int(assigned.max()) if len(assigned) else 0
    if S == 1:
        return au, cover

    origin = np.flatnonzero(good)
    W = len(origin)
    if W == 0:
        return au, cover  # nothing can reach the rest

    front = (origin + 1) % S
    size = act[origin].copy()
    progress = np.zeros(W, dtype=np.int64)
    cover_start = broadcast_len[origin].copy()  # covering begins next step
    alive = np.ones(W, dtype=bool)
    merged_into = np.arange(W)
    claimed_by = np.full(S, -1, dtype=np.int64)
    claimed_by[origin] = np.arange(W)

    t = 0
    while (remaining > 0 or t < pending_max) and t < budget:
        t += 1
        moving = np.flatnonzero(alive & (cover_start < t))
        if len(moving) == 0:
            if not alive.any():
                break
            continue  # all waves still broadcasting locally
        f = front[moving]
        lo = seg_start[f] + progress[moving]
        hi = np.minimum(lo + size[moving], seg_start[f] + seg_len[f])
        li = np.searchsorted(au, lo)
        ri = np.searchsorted(au, hi)
        for j in np.flatnonzero(ri > li):
            block = cover[li[j]:ri[j]]
            # a wave pass preempts local deliveries still pending at t
            late = block > t
            if late.any():
                remaining -= int((block[late] == _UNSET).sum())
                block[late] = t
        progress[moving] += size[moving]
        finished = moving[progress[moving] >= seg_len[f]]
        if len(finished):
            ff = front[finished]
            # per contested segment: earliest cover-start, largest, lowest origin
            order = np.lexsort((origin[finished], -size[finished],
                                cover_start[finished], ff))
            for row in order:
                w = int(finished[row])
                s_id = int(ff[row])
                if claimed_by[s_id] == -1:
                    claimed_by[s_id] = w
                    size[w] += act[s_id]
                    continue
                root = int(claimed_by[s_id])
                while not alive[root]:
                    root = int(merged_into[root])
                if root != w:
                    size[root] += size[w]
                    alive[w] = False
                    merged_into[w] = root
            survivors = finished[alive[finished]]
            front[survivors] = (front[survivors] + 1) % S
            progress[survivors] = 0
    return au, cover


def run_improved_cyclic(config: ProtocolConfig, rng: RngStream) -> TraceResult:
    """Warm-up, intra-segment broadcast, then coalescing forward waves."""
    if config.algorithm is not Algorithm.IMPROVED_CYCLIC:
        raise ConfigError(f"run_improved_cyclic got algorithm {config.algorithm}")
    state = sample_active(config.N, config.p, rng)
    gen = rng.protocol_generator()
    n = int(np.count_nonzero(state.active))
    tracker = _ThresholdTracker(config)
    tracker.observe(0, 1)
    trajectory: Optional[List[int]] = [1] if config.record_trajectory else None
    cap = config.step_cap
    scheduled = phase1_steps(config.N, config.p, config.phase1_slack)
    k = _run_phase1(state, gen, n, tracker, steps=scheduled, cap=cap,
                    trajectory=trajectory)
    phase1_end = state.clock
    if k >= n:
        return _finish(config, n, True, state.clock, tracker, phase1_end,
                       trajectory)
    if state.clock >= cap:
        return _finish(config, n, False, state.clock, tracker, phase1_end,
                       trajectory)

    budget = cap - phase1_end
    au, cover = _improved_phase2_offsets(
        state.active, state.informed, config.segment_length, config.p, budget)

    covered = cover <= budget  # analytic 2a offsets can land beyond the cap
    offsets = np.sort(cover[covered])
    complete = bool(covered.all())
    duration = int(offsets[-1]) if complete and len(offsets) else 0
    last = duration if complete else budget
    # replay the informed-count trajectory from the cover offsets
    if len(offsets):
        counts = np.bincount(np.minimum(offsets, last), minlength=last + 1)
    else:
        counts = np.zeros(last + 1, dtype=np.int64)
    running = k + np.cumsum(counts)
    for s in range(1, last + 1):
        tracker.observe(phase1_end + s, int(running[s]))
        if trajectory is not None:
            trajectory.append(int(running[s]))
    state.informed[au[covered]] = True
    state.clock = phase1_end + last
    return _finish(config, n, complete, state.clock, tracker, phase1_end,
                   trajectory)


def run_oracle(config: ProtocolConfig, rng: RngStream) -> TraceResult:
    """Coordinated ideal: informed nodes target distinct fresh nodes.

    Each round the k informed nodes are assigned min(k, untargeted) distinct
    never-before-targeted nodes; active targets become informed. Targets are
    consumed in a pre-shuffled uniform order, which by exchangeability of the
    active labels yields the same law as any other coordinated assignment.
    """
    if config.algorithm is not Algorithm.ORACLE:
        raise ConfigError(f"run_oracle got algorithm {config.algorithm}")
    state = sample_active(config.N, config.p, rng)
    gen = rng.protocol_generator()
    n = int(np.count_nonzero(state.active))
    tracker = _ThresholdTracker(config)
    tracker.observe(0, 1)
    trajectory: Optional[List[int]] = [1] if config.record_trajectory else None
    cap = config.step_cap
    N = config.N
    fresh = gen.permutation(np.arange(1, N)) if N > 1 else np.empty(0, np.int64)
    k, pos = 1, 0
    while k < n and state.clock < cap:
        m = min(k, len(fresh) - pos)
        if m == 0:
            break
        batch = fresh[pos:pos + m]
        hits = batch[state.active[batch]]
        state.informed[hits] = True
        pos += m
        k += len(hits)
        state.clock += 1
        tracker.observe(state.clock, k)
        if trajectory is not None:
            trajectory.append(k)
    return _finish(config, n, k >= n, state.clock, tracker, None, trajectory)


_RUNNERS: Dict[Algorithm, Callable[[ProtocolConfig, RngStream], TraceResult]] = {
    Algorithm.NAIVE: run_naive,
    Algorithm.CYCLIC: run_cyclic,
    Algorithm.IMPROVED_CYCLIC: run_improved_cyclic,
    Algorithm.ORACLE: run_oracle,
}


def run(config: ProtocolConfig, rng: RngStream) -> TraceResult:
    """Dispatch to the configured algorithm's runner."""
    return _RUNNERS[config.algorithm](config, rng)


def longest_uninformed_run(state: NetworkState) -> int:
    """Longest cyclically-contiguous block holding no informed node.

    Inactive nodes count as blockers: a sweep must step through them one
    round at a time whether or not they can relay.
    """
    informed_idx = np.flatnonzero(state.informed)
    if len(informed_idx) == 0:
        return state.node_count
    gaps = np.diff(informed_idx) - 1
    wrap = state.node_count - informed_idx[-1] + informed_idx[0] - 1
    longest = int(wrap)
    if len(gaps):
        longest = max(longest, int(gaps.max()))
    return longest
