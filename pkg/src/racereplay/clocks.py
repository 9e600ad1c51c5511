"""Logical clocks: scalar (record/replay ordering), vector (concurrency
tests between segments), and matrix horizons (segment discard).

Vector clocks are plain tuples of per-thread counters; all operations are
pure functions. The update discipline ties clocks to synchronisation
operations only: a release-like op publishes the thread's clock into the
object's clock, an acquire-like op joins the object's clock into the
thread's, and every sync op then increments the thread's own component,
which is what delimits segments.

Two discard horizons are supported. The *snooped* horizon is the
columnwise minimum over every thread's live vector clock, read directly at
a segment end. The *logical* horizon is the columnwise minimum of a matrix
clock propagated only along synchronisation edges, i.e. what the ending
thread can know causally; it is never above the snooped horizon.
"""

from __future__ import annotations

from enum import IntEnum


class Ordering(IntEnum):
    EQUAL = 0
    BEFORE = 1
    AFTER = 2
    CONCURRENT = 3


def lamport_advance(thread_ts: int, object_ts: int) -> int:
    """Scalar clock value for a sync op: max of the two chains, plus one."""
    return max(thread_ts, object_ts) + 1


def vc_zero(n: int):
    return (0,) * n


def vc_join(a, b):
    if len(a) != len(b):
        raise ValueError("vector clock length mismatch")
    return tuple(map(max, a, b))


def vc_compare(a, b) -> Ordering:
    if len(a) != len(b):
        raise ValueError("vector clock length mismatch")
    less = greater = False
    for x, y in zip(a, b):
        if x < y:
            less = True
        elif x > y:
            greater = True
    if less and greater:
        return Ordering.CONCURRENT
    if less:
        return Ordering.BEFORE
    if greater:
        return Ordering.AFTER
    return Ordering.EQUAL


def vc_strictly_below(a, b) -> bool:
    """True when every component of a is strictly below b (discard test)."""
    return all(x < y for x, y in zip(a, b))


def column_min(rows):
    """Per-thread discard horizon: componentwise minimum over matrix rows."""
    return tuple(map(min, *rows)) if len(rows) > 1 else tuple(rows[0])


def snoop(current_clocks):
    """Snapshot all live thread clocks; returns (matrix rows, horizon)."""
    rows = tuple(tuple(c) for c in current_clocks)
    return rows, column_min(rows)


class VectorClockTracker:
    """Per-execution vector clock state for threads and sync objects."""

    def __init__(self, n_threads: int, n_objects: int):
        self.n = n_threads
        self.threads = [vc_zero(n_threads) for _ in range(n_threads)]
        self.objects = [vc_zero(n_threads) for _ in range(n_objects)]

    def apply_sync(self, tid: int, obj: int, acquire: bool):
        """Apply one sync op; returns the thread clock before the op
        (the ending segment's clock)."""
        before = self.threads[tid]
        if acquire:
            clock = vc_join(before, self.objects[obj])
        else:
            self.objects[obj] = vc_join(self.objects[obj], before)
            clock = before
        bumped = list(clock)
        bumped[tid] += 1
        self.threads[tid] = tuple(bumped)
        return before

    def snapshot(self):
        return tuple(self.threads)


class MatrixClockTracker:
    """Causally-propagated knowledge matrices, one per thread and object.

    Row j of thread i's matrix is the latest clock of thread j that has
    causally reached thread i. ``horizon(i)`` is what thread i could
    safely discard by on its own knowledge alone.
    """

    def __init__(self, n_threads: int, n_objects: int):
        z = vc_zero(n_threads)
        self.threads = [[z] * n_threads for _ in range(n_threads)]
        self.objects = [[z] * n_threads for _ in range(n_objects)]

    def apply_sync(self, tid: int, obj: int, acquire: bool, own_clock):
        mine = self.threads[tid]
        theirs = self.objects[obj]
        if acquire:
            self.threads[tid] = mine = [vc_join(a, b) for a, b in zip(mine, theirs)]
        mine[tid] = tuple(own_clock)
        if not acquire:
            self.objects[obj] = [vc_join(a, b) for a, b in zip(theirs, mine)]

    def horizon(self, tid: int):
        return column_min(self.threads[tid])
