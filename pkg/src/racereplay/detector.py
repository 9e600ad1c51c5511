"""Replay & detect phase: on-the-fly segment comparison during replay.

A segment is the run of memory operations a thread performs between two
successive synchronisation operations; empty spans produce no segment.
While replaying, each thread's open segment collects load/store addresses
in two multilevel bitmaps. When a sync op closes a segment it is compared
against every stored segment whose vector clock is concurrent with it;
a non-empty conflict-witness set is a data race and, unless asked for all
races, ends the run. The closed segment is then stored and obsolete
segments are discarded: after the sync op's clock update, the horizon is
the componentwise minimum over all threads' live clocks, and any stored
segment whose clock is strictly below it in every component can never be
concurrent with anything later.

With ``probe=True`` a second, causally-propagated matrix-clock horizon is
tracked side by side and the live segment counts under both discard
policies are sampled at every segment close.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .bitmap import MultilevelBitmap, race_witnesses
from .clocks import (MatrixClockTracker, Ordering, VectorClockTracker,
                     column_min, vc_compare, vc_strictly_below)
from .machine import ACQUIRE_KINDS, EventKind
from .program import Program
from .replay import DIVERGED, STOPPED, ReplayResult, replay_execution
from .tracefile import SyncTrace

RACE = "race"
CLEAN = "clean"
DIVERGED_NO_RACE = "diverged"


@dataclass
class Segment:
    tid: int
    index: int
    loads: MultilevelBitmap
    stores: MultilevelBitmap
    clock: tuple = ()
    first_ordinal: int = -1
    last_ordinal: int = -1
    closed_at: int = -1  # value of the sync-event counter at close time

    def note_access(self, ordinal: int):
        if self.first_ordinal < 0:
            self.first_ordinal = ordinal
        self.last_ordinal = max(self.last_ordinal, ordinal)

    @property
    def key(self):
        return (self.tid, self.index)


@dataclass(frozen=True)
class RaceSide:
    tid: int
    segment: int
    clock: tuple
    kind: str  # "load" or "store": access type on the smallest witness


@dataclass
class RaceReport:
    witnesses: tuple  # ascending witness addresses
    side1: RaceSide
    side2: RaceSide
    instructions: Optional[tuple] = None  # filled by the identification phase

    @property
    def witness(self) -> int:
        return self.witnesses[0]

    def pair_key(self):
        """Unordered identity used for oracle equivalence checks."""
        segs = frozenset(((self.side1.tid, self.side1.segment),
                          (self.side2.tid, self.side2.segment)))
        return segs, frozenset(self.witnesses)


@dataclass
class DetectStats:
    segments_created: int = 0
    segments_max_live: int = 0
    segments_compared: int = 0
    segments_discarded: int = 0
    mem_events: int = 0
    sync_events: int = 0


@dataclass
class DetectResult:
    status: str
    reports: list
    stats: DetectStats
    replay: ReplayResult
    probe_rows: list = field(default_factory=list)
    discarded: list = field(default_factory=list)
    segments: Optional[list] = None  # every closed segment, when requested

    @property
    def report(self) -> Optional[RaceReport]:
        return self.reports[0] if self.reports else None


def _access_kind(seg: Segment, addr: int) -> str:
    return "store" if addr in seg.stores else "load"


def _make_report(a: Segment, b: Segment, witnesses) -> RaceReport:
    first, second = sorted((a, b), key=lambda s: s.key)
    w = witnesses[0]
    return RaceReport(
        witnesses=tuple(witnesses),
        side1=RaceSide(first.tid, first.index, first.clock, _access_kind(first, w)),
        side2=RaceSide(second.tid, second.index, second.clock, _access_kind(second, w)),
    )


class _DetectorState:
    def __init__(self, program: Program, *, all_races: bool, gc: bool,
                 probe: bool, keep_discarded: bool, keep_segments: bool = False):
        n = program.n_threads
        self.program = program
        self.all_races = all_races
        self.gc = gc
        self.probe = probe
        self.keep_discarded = keep_discarded
        self.all_segments: Optional[list] = [] if keep_segments else None
        self.clocks = VectorClockTracker(n, program.n_objects)
        self.matrix = MatrixClockTracker(n, program.n_objects) if probe else None
        self.open: list[Optional[Segment]] = [None] * n
        self.closed_count = [0] * n
        # stored[tid] maps segment index -> Segment, insertion == index order.
        self.stored = [dict() for _ in range(n)]
        self.ghosts = [dict() for _ in range(n)] if probe else None
        self.reports: list[RaceReport] = []
        self.stats = DetectStats()
        self.probe_rows: list[tuple] = []
        self.discarded: list = []

    # -- events ---------------------------------------------------------------

    def on_event(self, machine, event) -> bool:
        if event.kind is EventKind.SYNC:
            self.stats.sync_events += 1
            return self._on_sync(event)
        self.stats.mem_events += 1
        seg = self.open[event.tid]
        if seg is None:
            seg = self.open[event.tid] = Segment(
                event.tid, self.closed_count[event.tid],
                MultilevelBitmap(), MultilevelBitmap())
        (seg.stores if event.kind is EventKind.STORE else seg.loads).insert(event.addr)
        seg.note_access(event.ordinal)
        return False

    def _on_sync(self, event) -> bool:
        tid = event.tid
        race_found = self._close_open_segment(tid)
        # Clock updates happen at the sync op itself, after the segment ends.
        self.clocks.apply_sync(tid, event.obj, event.sync in ACQUIRE_KINDS)
        if self.matrix is not None:
            self.matrix.apply_sync(tid, event.obj, event.sync in ACQUIRE_KINDS,
                                   self.clocks.threads[tid])
        if self.gc or self.probe:
            self._collect_garbage(tid)
        return race_found and not self.all_races

    def _close_open_segment(self, tid: int) -> bool:
        seg = self.open[tid]
        self.open[tid] = None
        if seg is None:
            return False
        seg.clock = self.clocks.threads[tid]
        seg.closed_at = self.stats.sync_events
        self.closed_count[tid] += 1
        if self.all_segments is not None:
            self.all_segments.append(seg)
        found = self._scan_for_races(seg)
        self.stored[tid][seg.index] = seg
        if self.ghosts is not None:
            self.ghosts[tid][seg.index] = seg
        self.stats.segments_created += 1
        self._note_live()
        return found

    def _scan_for_races(self, seg: Segment) -> bool:
        """Compare against stored segments in ascending (tid, index) order."""
        for tid in range(self.program.n_threads):
            if tid == seg.tid:
                continue  # same-thread segments are always ordered
            for other in self.stored[tid].values():
                if vc_compare(other.clock, seg.clock) is not Ordering.CONCURRENT:
                    continue
                self.stats.segments_compared += 1
                witnesses = race_witnesses(seg.loads, seg.stores,
                                           other.loads, other.stores)
                if witnesses:
                    self.reports.append(_make_report(other, seg, witnesses))
                    if not self.all_races:
                        return True
        return False

    # -- discard ----------------------------------------------------------------

    def _collect_garbage(self, closing_tid: int):
        if self.gc:
            horizon = column_min(self.clocks.snapshot())
            dropped = self._drop_below(self.stored, horizon)
            self.stats.segments_discarded += dropped
        if self.probe:
            logical = self.matrix.horizon(closing_tid)
            self._drop_below(self.ghosts, logical)
            self.probe_rows.append((self.stats.sync_events,
                                    self._live(self.stored),
                                    self._live(self.ghosts)))

    def _drop_below(self, store, horizon) -> int:
        dropped = 0
        for per_thread in store:
            dead = [idx for idx, seg in per_thread.items()
                    if vc_strictly_below(seg.clock, horizon)]
            for idx in dead:
                seg = per_thread.pop(idx)
                dropped += 1
                if self.keep_discarded and store is self.stored:
                    self.discarded.append((self.stats.sync_events, seg))
        return dropped

    @staticmethod
    def _live(store) -> int:
        return sum(len(per_thread) for per_thread in store)

    def _note_live(self):
        live = self._live(self.stored)
        if live > self.stats.segments_max_live:
            self.stats.segments_max_live = live

    # -- end of stream ------------------------------------------------------------

    def finish(self):
        """Close remaining open segments at thread exit, in thread order."""
        for tid in range(self.program.n_threads):
            if self.open[tid] is not None:
                if self._close_open_segment(tid) and not self.all_races:
                    return


def detect(program: Program, trace: SyncTrace, *, all_races: bool = False,
           gc: bool = True, probe: bool = False, keep_discarded: bool = False,
           keep_segments: bool = False, replay_seed: int = 0) -> DetectResult:
    """Replay under the trace and report the first data race, if any."""
    if probe and not gc:
        raise ValueError("probe mode compares the discard policies and needs gc=True")
    state = _DetectorState(program, all_races=all_races, gc=gc, probe=probe,
                           keep_discarded=keep_discarded,
                           keep_segments=keep_segments)
    replay = replay_execution(program, trace, observer=state.on_event,
                              replay_seed=replay_seed)
    if replay.verdict != STOPPED or all_races:
        state.finish()
    if state.reports:
        status = RACE
    elif replay.verdict == DIVERGED:
        status = DIVERGED_NO_RACE
    else:
        status = CLEAN
    return DetectResult(status=status, reports=state.reports, stats=state.stats,
                        replay=replay, probe_rows=state.probe_rows,
                        discarded=state.discarded, segments=state.all_segments)
