"""Deterministic discrete-event core.

The simulator keeps an integer-microsecond clock and a binary-heap event
queue.  Events that share a timestamp are ordered by kind rank (channel
state settles before slot decisions, slot decisions before timers, and
beacons go last so same-instant bookkeeping is finished before a beacon
reads it), then by insertion sequence number.  Every random draw comes
from a named per-entity stream seeded from (root seed, stream id), so a
draw depends only on the stream's own history, never on how events from
different entities interleave.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import Counter
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Callable, Optional

import numpy as np

# Rank of each event kind for same-timestamp ordering.
KIND_RANK = {
    "tx-end": 0,
    "txop-end": 1,
    "cfp-end": 2,
    "slot-boundary": 3,
    "timer": 4,
    "beacon": 5,
}

EVENT_KINDS = tuple(KIND_RANK)


class SchedulingError(ValueError):
    """Event rejected: non-integer time, time in the past, or unknown kind."""


@dataclass(slots=True)
class SimEvent:
    """One scheduled occurrence.

    ``target`` names the entity the event belongs to; it is what shows up
    in the trace next to the timestamp and kind.
    """

    time: int
    seq: int
    kind: str
    target: str
    fn: Optional[Callable[[], None]] = None
    cancelled: bool = False

    def cancel(self) -> None:
        """Mark the event dead; it will never fire nor appear in the trace."""
        self.cancelled = True


@dataclass
class TraceSummary:
    """What run_until saw: counts, an optional hash, optional raw records."""

    processed: int
    by_kind: dict[str, int]
    trace_hash: Optional[str] = None
    records: Optional[list[tuple[int, str, str]]] = None


class Simulator:
    """Event queue, clock, and RNG stream registry for one run."""

    def __init__(self, root_seed: int, keep_trace: bool = False,
                 hash_trace: bool = False):
        self.root_seed = root_seed
        self.now: int = 0
        self._heap: list[tuple[int, int, int, SimEvent]] = []
        self._seq = itertools.count()
        self._streams: dict[str, np.random.Generator] = {}
        self._processed = 0
        self._by_kind: Counter[str] = Counter()
        self._hasher = hashlib.sha256() if hash_trace else None
        self._records: Optional[list[tuple[int, str, str]]] = [] if keep_trace else None

    # -- events --------------------------------------------------------

    def schedule(self, time: int, kind: str, target: str,
                 fn: Optional[Callable[[], None]] = None) -> SimEvent:
        """Queue an event; past timestamps and unknown kinds are rejected."""
        if not isinstance(time, (int, np.integer)):
            raise SchedulingError(f"event time must be an integer microsecond count, got {time!r}")
        time = int(time)
        if time < self.now:
            raise SchedulingError(f"cannot schedule at {time} us; clock is already at {self.now} us")
        rank = KIND_RANK.get(kind)
        if rank is None:
            raise SchedulingError(f"unknown event kind {kind!r}")
        ev = SimEvent(time, next(self._seq), kind, target, fn)
        heappush(self._heap, (time, rank, ev.seq, ev))
        return ev

    def run_until(self, t_end: int) -> TraceSummary:
        """Process every live event with time <= t_end, then pin the clock there."""
        heap = self._heap
        while heap and heap[0][0] <= t_end:
            _, _, _, ev = heappop(heap)
            if ev.cancelled:
                continue
            self.now = ev.time
            self._processed += 1
            self._by_kind[ev.kind] += 1
            if self._hasher is not None:
                self._hasher.update(b"%d %s %s\n" % (ev.time, ev.kind.encode(), ev.target.encode()))
            if self._records is not None:
                self._records.append((ev.time, ev.kind, ev.target))
            if ev.fn is not None:
                ev.fn()
        self.now = t_end
        return self.trace_summary()

    def trace_summary(self) -> TraceSummary:
        return TraceSummary(
            processed=self._processed,
            by_kind=dict(self._by_kind),
            trace_hash=self._hasher.hexdigest() if self._hasher is not None else None,
            records=self._records,
        )

    # -- random streams -------------------------------------------------

    def fork_rng(self, stream_id: str) -> np.random.Generator:
        """Create the named draw stream; a duplicate id is a hard error."""
        if stream_id in self._streams:
            raise ValueError(f"rng stream {stream_id!r} already exists")
        gen = make_stream(self.root_seed, stream_id)
        self._streams[stream_id] = gen
        return gen


def make_stream(root_seed: int, stream_id: str) -> np.random.Generator:
    """Generator keyed purely by (root seed, stream id).

    The id string is hashed so stream identity does not depend on fork
    order, and PCG64 gives independent sequences for distinct keys.
    """
    key = int.from_bytes(hashlib.sha256(stream_id.encode()).digest()[:8], "big")
    seed_seq = np.random.SeedSequence(entropy=(int(root_seed), key))
    return np.random.Generator(np.random.PCG64(seed_seq))
