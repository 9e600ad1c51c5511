"""Canonical programs used by the test suite and as demo inputs.

All builders return program text. The shared counter pair (unsynchronised
and lock-protected) is the smallest program with a write-write race; the
remaining builders stress specific subsystems: alternation for trace
compression and discard-horizon comparisons, all-threads contention for
segment discard, and a bounded producer/consumer for live-segment bounds.
"""

from __future__ import annotations

SHARED = 0x00001000


def shared_counter(locked: bool = False, addr: int = SHARED) -> str:
    """Two workers add 6 and 7 to one shared word initialised to 5.

    Unsynchronised, the final value is 18, 11 or 12 depending on the
    interleaving and the store/store (or load/store) conflict is a data
    race; with ``locked=True`` both updates hold a common mutex and the
    final value is always 18.
    """
    lock, unlock = ("  LOCK m\n", "  UNLOCK m\n") if locked else ("", "")
    return (
        f"mutex m\n"
        f"mem 0x{addr:08X} 5\n"
        f"thread 0:\n"
        f"  CREATE 1\n"
        f"  CREATE 2\n"
        f"  JOIN 1\n"
        f"  JOIN 2\n"
        f"  EXIT\n"
        f"thread 1:\n"
        f"{lock}"
        f"  LOAD r0 0x{addr:08X}\n"
        f"  ADDI r0 6\n"
        f"  STORE r0 0x{addr:08X}\n"
        f"{unlock}"
        f"  EXIT\n"
        f"thread 2:\n"
        f"{lock}"
        f"  LOAD r0 0x{addr:08X}\n"
        f"  ADDI r0 7\n"
        f"  STORE r0 0x{addr:08X}\n"
        f"{unlock}"
        f"  EXIT\n"
    )


def ping_pong(iterations: int, slack: int = 1, base: int = 0x00002000) -> str:
    """Main and one worker trade semaphore tokens, each bumping a private
    counter per turn. Race-free; every thread keeps progressing, so discard
    horizons advance throughout.

    ``slack`` is the initial token count: 1 gives strict alternation (both
    threads' clocks are always fully published at every segment end), while
    2+ lets the threads overlap, which is what makes direct clock snooping
    see more than causal propagation can.
    """
    if slack < 1:
        raise ValueError("slack must be positive")

    def turns(me: str, other: str, addr: int) -> list:
        out = []
        for _ in range(iterations):
            out += [f"SEM_WAIT {me}", f"LOAD r0 0x{addr:08X}", "ADDI r0 1",
                    f"STORE r0 0x{addr:08X}", f"SEM_POST {other}"]
        return out

    lines = [f"sem a {slack}", "sem b 0",
             f"mem 0x{base:08X} 0", f"mem 0x{base + 0x100:08X} 0",
             "thread 0:", "  CREATE 1"]
    lines += [f"  {ins}" for ins in turns("a", "b", base)]
    lines += ["  JOIN 1", "  EXIT", "thread 1:"]
    lines += [f"  {ins}" for ins in turns("b", "a", base + 0x100)]
    lines += ["  EXIT"]
    return "\n".join(lines) + "\n"


def contended_counter(threads: int = 4, iterations: int = 150,
                      addr: int = 0x00003000) -> str:
    """All threads (main included) repeatedly update one lock-protected
    counter. Race-free; heavy segment churn with fast knowledge spread."""
    if threads < 2:
        raise ValueError("need at least two threads")

    def body(tid: int) -> list:
        out = []
        for _ in range(iterations):
            out += ["LOCK m", f"LOAD r0 0x{addr:08X}", "ADDI r0 1",
                    f"STORE r0 0x{addr:08X}", "UNLOCK m"]
        return out

    lines = ["mutex m", f"mem 0x{addr:08X} 0", "thread 0:"]
    lines += [f"  CREATE {tid}" for tid in range(1, threads)]
    lines += [f"  {ins}" for ins in body(0)]
    lines += [f"  JOIN {tid}" for tid in range(1, threads)]
    lines += ["  EXIT"]
    for tid in range(1, threads):
        lines.append(f"thread {tid}:")
        lines += [f"  {ins}" for ins in body(tid)]
        lines.append("  EXIT")
    return "\n".join(lines) + "\n"


def producer_consumer(iterations: int = 100, capacity: int = 4,
                      base: int = 0x00004000) -> str:
    """Bounded handoff: a worker produces into a small ring of addresses,
    main consumes. Backpressure keeps the producer at most ``capacity``
    items ahead, so live segment counts stay bounded."""
    slots = [base + 4 * i for i in range(capacity)]
    produce = []
    consume = []
    for i in range(iterations):
        addr = slots[i % capacity]
        produce += ["SEM_WAIT slots", f"SET r0 {i % 97}",
                    f"STORE r0 0x{addr:08X}", "SEM_POST items"]
        consume += ["SEM_WAIT items", f"LOAD r1 0x{addr:08X}", "SEM_POST slots"]
    lines = [f"sem slots {capacity}", "sem items 0", "thread 0:", "  CREATE 1"]
    lines += [f"  {ins}" for ins in consume]
    lines += ["  JOIN 1", "  EXIT", "thread 1:"]
    lines += [f"  {ins}" for ins in produce]
    lines += ["  EXIT"]
    return "\n".join(lines) + "\n"
