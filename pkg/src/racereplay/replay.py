"""Replay phase: re-execute a program under the recorded sync order.

A thread whose next step is a synchronisation operation is stalled until
every recorded sync op with a smaller timestamp has executed; equal
timestamps may run in any order. Memory and register operations are never
stalled. Tie-breaking among simultaneously eligible threads uses the
machine scheduler with a fixed replay seed, so replays are deterministic.

The verdict is DIVERGED when a thread attempts more sync ops than were
recorded, when the machine gets stuck (a sync op stalls forever), or when
the run ends with recorded ops unexecuted. Observers see every event and
may stop the run early; an observer stop is reported as STOPPED and is
not a divergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .errors import DeadlockError, MismatchError
from .machine import Event, EventKind, ExecutionHooks, Machine
from .program import Program
from .tracefile import SyncTrace

OK = "OK"
DIVERGED = "DIVERGED"
STOPPED = "STOPPED"


@dataclass
class ReplayResult:
    verdict: str
    memory: dict
    events: list
    steps: int
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict == OK


class _ReplayHooks(ExecutionHooks):
    def __init__(self, stamps, observer):
        self.stamps = stamps
        self.observer = observer
        self.done = [0] * len(stamps)  # sync ops executed per thread
        self.over_budget: set[int] = set()
        # Global stall frontier: smallest recorded timestamp not yet executed.
        all_stamps = sorted(ts for per_thread in stamps for ts in per_thread)
        self.order = sorted(set(all_stamps))
        self.remaining = {}
        for ts in all_stamps:
            self.remaining[ts] = self.remaining.get(ts, 0) + 1
        self.frontier = 0

    def _frontier_stamp(self):
        while self.frontier < len(self.order) and self.remaining[self.order[self.frontier]] == 0:
            self.frontier += 1
        if self.frontier < len(self.order):
            return self.order[self.frontier]
        return None

    def permits(self, machine: Machine, tid: int) -> bool:
        if machine.next_sync(tid) is None:
            return True
        k = self.done[tid]
        if k >= len(self.stamps[tid]):
            self.over_budget.add(tid)
            return False
        horizon = self._frontier_stamp()
        return horizon is None or self.stamps[tid][k] <= horizon

    def on_event(self, machine: Machine, event: Event):
        if event.kind is EventKind.SYNC:
            ts = self.stamps[event.tid][self.done[event.tid]]
            self.done[event.tid] += 1
            self.remaining[ts] -= 1
        if self.observer is not None:
            return self.observer(machine, event)
        return None

    def unexecuted(self) -> int:
        return sum(self.remaining.values())


def replay_execution(program: Program, trace: SyncTrace,
                     observer: Optional[Callable] = None,
                     replay_seed: int = 0) -> ReplayResult:
    """Drive an execution equivalent to the recorded one.

    ``observer(machine, event)`` is called for every event (memory events
    included); returning truthy stops the run.
    """
    if trace.digest != program.digest():
        raise MismatchError("trace does not match program (digest mismatch)")
    if trace.n_threads != program.n_threads:
        raise MismatchError("trace thread count does not match program")
    hooks = _ReplayHooks(trace.stamps, observer)
    machine = Machine(program, replay_seed, hooks)
    try:
        result = machine.run()
    except DeadlockError as dead:
        stuck = "; ".join(f"thread {tid}: {why}" for tid, why in dead.blocked)
        extra = ""
        if hooks.over_budget:
            who = ", ".join(str(t) for t in sorted(hooks.over_budget))
            extra = f" (threads past recorded sync count: {who})"
        return ReplayResult(DIVERGED, dead.memory, dead.events, dead.steps,
                            detail=f"stuck: {stuck}{extra}")
    if result.stopped:
        return ReplayResult(STOPPED, result.memory, result.events, result.steps)
    left = hooks.unexecuted()
    if left:
        return ReplayResult(DIVERGED, result.memory, result.events, result.steps,
                            detail=f"{left} recorded sync ops never executed")
    return ReplayResult(OK, result.memory, result.events, result.steps)
