"""Bitmap kernels: both backends against reference sets."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from racereplay._kernels import bitmap_py

BACKENDS = {"py": bitmap_py}
try:
    from racereplay._kernels import bitmap_ext
    BACKENDS["ext"] = bitmap_ext
except ImportError:
    pass


@pytest.fixture(params=sorted(BACKENDS), ids=sorted(BACKENDS))
def impl(request):
    return BACKENDS[request.param]


def filled(impl, addresses):
    bm = impl.BitmapCore()
    for a in addresses:
        bm.insert(a)
    return bm


def test_zero_address(impl):
    bm = filled(impl, [0x00000000])
    assert bm.contains(0)
    assert bm.node_counts() == (1, 1, 1)
    assert bm.addresses() == [0]


def test_max_address(impl):
    # 0xFFFFFFFF splits to root 511, mid 511, leaf bit 16383 under 9/9/14.
    bm = filled(impl, [0xFFFFFFFF])
    assert bm.contains(0xFFFFFFFF)
    assert not bm.contains(0xFFFFFFFE)
    assert bm.addresses() == [0xFFFFFFFF]


def test_level_split_arithmetic(impl):
    # Independently derived: 0x00804001 = bits {23, 14, 0}, so it shares no
    # mid table with 0x00800000 (root 1, mid 0) and no leaf with 0x00804000.
    bm = filled(impl, [0x00804001])
    assert bm.contains(0x00804001)
    for near in (0x00804000, 0x00804002, 0x00800001, 0x00004001):
        assert not bm.contains(near)
    assert bm.node_counts() == (1, 1, 1)
    bm.insert(0x00800000)  # same root, different mid
    assert bm.node_counts() == (1, 1, 2)
    bm.insert(0x00004001)  # different root
    assert bm.node_counts() == (1, 2, 3)


def test_insert_idempotent(impl):
    bm = impl.BitmapCore()
    for _ in range(5):
        bm.insert(0x1234)
    assert len(bm) == 1


def test_out_of_range_rejected(impl):
    bm = impl.BitmapCore()
    with pytest.raises(ValueError):
        bm.insert(1 << 32)
    with pytest.raises(ValueError):
        bm.insert(-1)


def test_fresh_bitmap_contains_nothing(impl):
    bm = impl.BitmapCore()
    assert not bm.contains(0)
    assert not bm.contains(0x5000)
    assert bm.is_empty()
    assert bm.first_common(impl.BitmapCore()) is None


def test_membership_against_reference_set(impl):
    rng = random.Random(20260101)
    reference = set()
    bm = impl.BitmapCore()
    for _ in range(100_000):
        a = rng.getrandbits(32)
        reference.add(a)
        bm.insert(a)
    assert len(bm) == len(reference)
    for a in list(reference)[:2000]:
        assert bm.contains(a)
    misses = 0
    for _ in range(2000):
        a = rng.getrandbits(32)
        assert bm.contains(a) == (a in reference)
        misses += a not in reference
    assert misses  # the probe actually exercised negatives
    assert bm.addresses() == sorted(reference)


def test_first_common_matches_reference(impl):
    rng = random.Random(7)
    xs = {rng.getrandbits(32) for _ in range(10_000)}
    ys = {rng.getrandbits(32) for _ in range(10_000)}
    ys |= set(list(xs)[:50])  # guarantee overlap
    bx, by = filled(impl, xs), filled(impl, ys)
    assert bx.first_common(by) == min(xs & ys)
    assert by.first_common(bx) == min(xs & ys)


def test_first_common_disjoint(impl):
    bx = filled(impl, [0x100])
    by = filled(impl, [0x104])
    assert bx.first_common(by) is None
    assert filled(impl, [0x100]).first_common(filled(impl, [0x100])) == 0x100


def test_race_witnesses_forced_cases(impl):
    empty = impl.BitmapCore()
    # store vs load on the same address races
    assert impl.race_witnesses(empty, filled(impl, [0x100]),
                               filled(impl, [0x100]), empty) == [0x100]
    # read-read does not
    assert impl.race_witnesses(filled(impl, [0x100]), empty,
                               filled(impl, [0x100]), empty) == []


def _reference_witnesses(la, sa, lb, sb):
    return sorted(((la | sa) & sb) | ((lb | sb) & sa))


def test_race_witnesses_against_brute_force(impl):
    rng = random.Random(99)
    pool = [rng.getrandbits(32) for _ in range(600)]
    for trial in range(40):
        sets = [set(rng.choices(pool, k=rng.randrange(1, 120))) for _ in range(4)]
        la, sa, lb, sb = sets
        got = impl.race_witnesses(filled(impl, la), filled(impl, sa),
                                  filled(impl, lb), filled(impl, sb))
        assert got == _reference_witnesses(la, sa, lb, sb)


def test_race_witnesses_symmetric(impl):
    rng = random.Random(5)
    pool = list(range(0x1000, 0x1100, 4))
    for _ in range(30):
        sets = [filled(impl, rng.choices(pool, k=12)) for _ in range(4)]
        la, sa, lb, sb = sets
        assert (impl.race_witnesses(la, sa, lb, sb)
                == impl.race_witnesses(lb, sb, la, sa))


def test_node_accounting_dense_region(impl):
    # 10k addresses inside one 16 KiB-aligned span touch exactly one
    # mid table and one leaf.
    base = 0x40000000  # 16 KiB aligned (low 14 bits clear)
    rng = random.Random(3)
    bm = impl.BitmapCore()
    for _ in range(10_000):
        bm.insert(base + rng.randrange(1 << 14))
    assert bm.node_counts() == (1, 1, 1)
    assert bm.payload_bytes() == 2048 * 3


def test_payload_grows_per_node(impl):
    bm = impl.BitmapCore()
    assert bm.node_counts() == (1, 0, 0)
    bm.insert(0)
    one = bm.payload_bytes()
    bm.insert(1 << 14)  # same root, new leaf
    assert bm.payload_bytes() == one + 2048
    bm.insert(1 << 23)  # new mid and leaf
    assert bm.payload_bytes() == one + 3 * 2048


def test_dump_lines_format(impl):
    bm = filled(impl, [0xFFFFFFFF, 0x10, 0x2000])
    assert bm.dump_lines() == ["0x00000010", "0x00002000", "0xFFFFFFFF"]


@settings(max_examples=200, deadline=None)
@given(st.sets(st.integers(min_value=0, max_value=0xFFFFFFFF), max_size=200))
def test_roundtrip_property(addresses):
    for impl in BACKENDS.values():
        bm = filled(impl, addresses)
        assert bm.addresses() == sorted(addresses)
        assert len(bm) == len(addresses)


@settings(max_examples=100, deadline=None)
@given(st.sets(st.integers(min_value=0, max_value=0xFFFF), max_size=60),
       st.sets(st.integers(min_value=0, max_value=0xFFFF), max_size=60))
def test_first_common_property(xs, ys):
    expected = min(xs & ys) if xs & ys else None
    for impl in BACKENDS.values():
        assert filled(impl, xs).first_common(filled(impl, ys)) == expected


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend unavailable")
def test_backend_parity_random_workload():
    rng = random.Random(123)
    a_py, a_ext = bitmap_py.BitmapCore(), BACKENDS["ext"].BitmapCore()
    for _ in range(5000):
        addr = rng.getrandbits(32)
        a_py.insert(addr)
        a_ext.insert(addr)
    assert a_py.addresses() == a_ext.addresses()
    assert a_py.node_counts() == a_ext.node_counts()
    assert len(a_py) == len(a_ext)
