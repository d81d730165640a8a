from collections import Counter

import pytest
from hypothesis import given

from hexshell.complex import HEX_FACES, Quadrangulation, cube_boundary, quad_key
from hexshell.errors import WouldCreateNonSimpleBoundary
from hexshell.fixtures import named
from hexshell.flips import (
    COMPLEMENT,
    FLIP_MASK,
    KINDS,
    N_FRESH,
    PATTERNS,
    IdAllocator,
    apply_hex,
    classify_mask,
    closing_hex,
    enumerate_flips,
    hex_attachment,
    is_disk,
    perform_flip,
    site_corners,
)

from conftest import shellings


def flip_all(Q):
    out = []
    for s in enumerate_flips(Q):
        try:
            out.append((s, *perform_flip(Q, s, IdAllocator(max(Q.vertices) + 1))))
        except WouldCreateNonSimpleBoundary:
            pass
    return out


def test_cube_site_counts():
    # one site per face, edge, corner, U-strip, 4-face belt and 5-face cap
    counts = Counter(s.kind for s in enumerate_flips(cube_boundary()))
    assert counts == {"D1": 6, "D2": 12, "D3C": 8, "D3S": 12, "D4": 12, "D5": 6}


def test_sites_are_sorted_and_unique():
    Q = named("pyramid")
    sites = enumerate_flips(Q)
    assert [s.sort_key() for s in sites] == sorted(s.sort_key() for s in sites)
    assert len({(s.kind, s.quads) for s in sites}) == len(sites)


def test_pattern_deltas():
    assert {k: PATTERNS[k].delta for k in KINDS} == {"D1": 4, "D2": 2, "D3C": 0, "D3S": 0, "D4": -2, "D5": -4}
    for k in KINDS:
        added = sum(1 << f for f in PATTERNS[k].added_disk)
        assert classify_mask(added) == COMPLEMENT[k]


def test_fresh_counts_match_patterns():
    assert N_FRESH == {k: len(PATTERNS[k].fresh_corners) for k in KINDS}


def test_disk_masks():
    # of the 64 face subsets of the cube, 56 are disks
    disks = [m for m in range(64) if is_disk(m)]
    assert all(classify_mask(m) in KINDS for m in disks)
    assert not is_disk(0) and not is_disk(63)
    assert not is_disk((1 << 4) | (1 << 5))  # opposite faces
    assert not is_disk(0b001111)  # a belt of four is an annulus
    assert len(disks) == 56
    assert Counter(classify_mask(m) for m in disks) == {"D1": 6, "D2": 12, "D3C": 8, "D3S": 12, "D4": 12, "D5": 6}
    for k in KINDS:
        assert classify_mask(FLIP_MASK[k]) == k


def test_cube_d1_adds_four_quads():
    Q = cube_boundary()
    site = next(s for s in enumerate_flips(Q) if s.kind == "D1")
    Q2, h = perform_flip(Q, site, IdAllocator(8))
    assert (len(Q2), Q2.n_vertices) == (10, 12)
    assert Quadrangulation(Q2.quads).n_vertices == 12  # validates
    assert sorted(set(h.corners) - set(Q.vertices)) == [8, 9, 10, 11]


def test_site_corners_matches_perform_flip():
    Q = named("trapezohedron")
    for s in enumerate_flips(Q):
        c, nxt = site_corners(s, 10)
        assert nxt == 10 + N_FRESH[s.kind]
        try:
            _, h = perform_flip(Q, s, IdAllocator(10))
        except WouldCreateNonSimpleBoundary:
            continue
        assert h.corners == c


def test_d5_on_cube_is_rejected():
    # removing five faces of the cube leaves a boundary doubling the sixth
    Q = cube_boundary()
    for s in enumerate_flips(Q):
        if s.kind == "D5":
            with pytest.raises(WouldCreateNonSimpleBoundary):
                perform_flip(Q, s, IdAllocator(8))


def test_closing_hex_on_cube():
    c = closing_hex(cube_boundary())
    assert c is not None
    assert {quad_key([c[i] for i in f]) for f in HEX_FACES} == cube_boundary().quad_keys()
    assert closing_hex(named("trapezohedron")) is None


def test_hex_attachment_of_flip_hex():
    Q = named("pyramid")
    for s, Q2, h in flip_all(Q):
        att = hex_attachment(Q, h.corners)
        assert att is not None
        mask, idx = att
        assert classify_mask(mask) == s.kind
        assert sorted(idx) == list(s.quads)


@given(shellings(max_hex=5))
def test_flips_keep_a_quad_sphere(sh):
    Q, _ = sh
    for s, Q2, h in flip_all(Q):
        Quadrangulation(Q2.quads)  # raises if not a sphere
        assert len(Q2) == len(Q) + PATTERNS[s.kind].delta


@given(shellings(max_hex=5))
def test_complementary_flip_undoes(sh):
    Q, _ = sh
    for s, Q2, h in flip_all(Q)[:12]:
        att = hex_attachment(Q2, h.corners)
        assert att is not None
        mask, idx = att
        assert classify_mask(mask) == COMPLEMENT[s.kind]
        if mask == 63:
            continue
        back = apply_hex(Q2, h.corners, mask, idx)
        assert back.same_quads(Q)
