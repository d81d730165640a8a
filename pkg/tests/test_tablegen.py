import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexshell.complex import Quadrangulation
from hexshell.errors import OutOfMemoryBudget, TableFormatError
from hexshell.fixtures import named
from hexshell.flips import IdAllocator
from hexshell.iso import signature
from hexshell.search import insert_buffer_layer
from hexshell.tablegen import ShellingTable, audit_bucket, generate_shellings, verify_greedy_completeness
from hexshell.verify import verify_mesh, verify_shelling

from conftest import random_shelling

COUNTS = {1: 1, 2: 2, 3: 5, 4: 17, 5: 74, 6: 489}


def test_depth_must_be_positive():
    with pytest.raises(ValueError):
        generate_shellings(0)


def test_counts(table6):
    assert len(table6) == 489
    assert {d: table6.counts[d] for d in COUNTS} == COUNTS


def test_python_generation_counts():
    t = generate_shellings(5, backend="python")
    assert {d: t.counts[d] for d in range(1, 6)} == {d: COUNTS[d] for d in range(1, 6)}


def test_entries_are_sorted_by_signature(table6):
    sigs = [table6.signature_bytes(i) for i in range(len(table6))]
    assert sigs == sorted(sigs)


def test_every_entry_is_a_valid_shelling(table6):
    for i in range(len(table6)):
        B = table6.boundary(i)
        H = table6.shelling(i)
        assert table6.signature_bytes(i) == signature(B).to_bytes()
        assert B.n_vertices == table6.n_boundary_vertices(i)
        assert 1 <= len(H) <= 6
        assert verify_mesh(H, B).ok
        assert verify_shelling(H).ok


def test_buckets_hold_distinct_boundaries(table6):
    for sig in {table6.signature_bytes(i) for i in range(len(table6))}:
        assert audit_bucket(table6, sig)


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.integers(1, 6))
def test_lookup_of_random_shelling(table6, seed, n):
    Q, hexes = random_shelling(seed, n)
    H = table6.lookup(Q)
    assert H is not None and len(H) <= len(hexes)
    assert verify_mesh(H, Q).ok


def test_lookup_misses_unmeshable_boundary(table6):
    assert table6.lookup(named("trapezohedron")) is None
    assert table6.lookup(named("pyramid")) is None


def test_roundtrip(table6, tmp_path):
    path = tmp_path / "t6.bin"
    table6.write(path)
    t = ShellingTable.read(path)
    assert t.depth == 6 and len(t) == len(table6)
    assert t.to_bytes() == table6.to_bytes()
    for i in (0, 100, 488):
        assert t.boundary_quads(i) == table6.boundary_quads(i)
        assert t.shelling(i) == table6.shelling(i)


@pytest.mark.parametrize("mutate, message", [
    (lambda b: b"XXXX" + b[4:], "magic"),
    (lambda b: b[:4] + b"\x09\x00" + b[6:], "version"),
    (lambda b: b[:40] + bytes([b[40] ^ 1]) + b[41:], "checksum"),
    (lambda b: b[:10], "magic"),
    (lambda b: b[:-1], "checksum"),
])
def test_corrupt_tables_are_rejected(table6, mutate, message):
    with pytest.raises(TableFormatError, match=message):
        ShellingTable.from_bytes(mutate(table6.to_bytes()))


def test_entry_budget():
    with pytest.raises(OutOfMemoryBudget) as exc:
        generate_shellings(6, max_entries=50)
    part = exc.value.partial
    assert part is not None and not part.authoritative
    assert len(part) > 50


def test_greedy_completeness_small():
    rep = verify_greedy_completeness(4)
    assert rep.ok and rep.checked > 0


def test_rejected_boundaries_are_not_in_table(table6):
    assert table6.rejected
    for quads, d in table6.rejected[:50]:
        Q = Quadrangulation(quads, validate=False)
        assert table6.lookup(Q) is None
        assert 2 <= d <= 6


@settings(max_examples=30)
@given(st.integers(0, 488))
def test_buffer_layer_with_stored_shelling(table6, i):
    B = table6.boundary(i)
    alloc = IdAllocator(B.n_vertices)
    layer, copy, corr = insert_buffer_layer(B, alloc)
    start = alloc.next
    vb = table6.n_boundary_vertices(i)
    inner = [tuple(corr(v) if v < vb else start + v for v in h) for h in table6.shelling(i)]
    assert verify_mesh(layer + inner, B).ok
