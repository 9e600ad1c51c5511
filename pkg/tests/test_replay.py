"""Replay: fidelity for race-free programs, divergence signalling."""

import pytest

from _helpers import per_object_sync_sequences, replay_events

from racereplay import workloads
from racereplay.errors import MismatchError
from racereplay.generator import generate_program
from racereplay.program import parse_program
from racereplay.record import record_execution
from racereplay.replay import DIVERGED, OK, replay_execution
from racereplay.tracefile import SyncTrace


def test_race_free_replay_matches_record():
    prog = parse_program(workloads.shared_counter(locked=True))
    for seed in range(10):
        rec = record_execution(prog, seed)
        events, result = replay_events(prog, rec.trace, replay_seed=99)
        assert result.verdict == OK
        assert result.memory[0x1000] == 18
        assert (per_object_sync_sequences(events)
                == per_object_sync_sequences(rec.events))


def test_generated_race_free_fidelity():
    for i in range(15):
        text = generate_program(seed=500 + i, threads=2 + i % 3,
                                ops_per_thread=20 + i, lock_density=1.0)
        prog = parse_program(text)
        rec = record_execution(prog, seed=i)
        events, result = replay_events(prog, rec.trace, replay_seed=7)
        assert result.verdict == OK
        assert result.memory == rec.memory
        assert (per_object_sync_sequences(events)
                == per_object_sync_sequences(rec.events))


def test_no_sync_program_replays_trivially():
    prog = parse_program("thread 0:\n  SET r0 1\n  STORE r0 0x00000010\n  EXIT\n")
    rec = record_execution(prog, 3)
    result = replay_execution(prog, rec.trace)
    assert result.verdict == OK
    assert result.memory == rec.memory


def test_digest_mismatch_rejected():
    prog_a = parse_program(workloads.shared_counter())
    prog_b = parse_program(workloads.shared_counter(locked=True))
    trace = record_execution(prog_a, 0).trace
    with pytest.raises(MismatchError, match="digest"):
        replay_execution(prog_b, trace)


def test_replay_determinism():
    prog = parse_program(workloads.shared_counter())
    rec = record_execution(prog, 11)
    a, ra = replay_events(prog, rec.trace, replay_seed=5)
    b, rb = replay_events(prog, rec.trace, replay_seed=5)
    assert a == b
    assert ra.memory == rb.memory


def _two_thread_program():
    return parse_program(
        "thread 0:\n  CREATE 1\n  JOIN 1\n  EXIT\nthread 1:\n  EXIT\n")


def test_crafted_unreachable_order_diverges():
    # Honest stamps would be CREATE=1, START=2, EXIT=3, JOIN=4. Demanding
    # JOIN before the child's START can never be satisfied by the machine,
    # so the replay stalls and reports divergence.
    prog = _two_thread_program()
    trace = SyncTrace(seed=0, digest=prog.digest(),
                      stamps=[[1, 2], [3, 4]])
    result = replay_execution(prog, trace)
    assert result.verdict == DIVERGED
    assert "stuck" in result.detail


def test_crafted_extra_recorded_ops_diverge():
    # Trace promises three sync ops for the child, which only has two.
    prog = _two_thread_program()
    trace = SyncTrace(seed=0, digest=prog.digest(),
                      stamps=[[1, 4], [2, 3, 5]])
    result = replay_execution(prog, trace)
    assert result.verdict == DIVERGED
    assert "never executed" in result.detail


def test_crafted_missing_recorded_ops_diverge():
    # Trace records only one sync op for the child; its EXIT goes over
    # budget, the parent can never join, and the replay reports the stall.
    prog = _two_thread_program()
    trace = SyncTrace(seed=0, digest=prog.digest(), stamps=[[1, 3], [2]])
    result = replay_execution(prog, trace)
    assert result.verdict == DIVERGED
    assert "past recorded sync count" in result.detail


def test_equal_stamps_may_run_any_order():
    # Two workers lock distinct mutexes: their op stamps coincide, and the
    # replay must still complete under any tie-breaking seed.
    text = ("mutex m\nmutex n\n"
            "thread 0:\n  CREATE 1\n  CREATE 2\n  JOIN 1\n  JOIN 2\n  EXIT\n"
            "thread 1:\n  LOCK m\n  UNLOCK m\n  EXIT\n"
            "thread 2:\n  LOCK n\n  UNLOCK n\n  EXIT\n")
    prog = parse_program(text)
    rec = record_execution(prog, 1)
    for replay_seed in range(6):
        assert replay_execution(prog, rec.trace,
                                replay_seed=replay_seed).verdict == OK
