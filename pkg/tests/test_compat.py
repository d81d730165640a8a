import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hexshell.compat import PartialMesh, add_hex, is_compatible, undo
from hexshell.complex import boundary_of
from hexshell.errors import IncompatibleHex, NonLifoUndo
from hexshell.verify import R_DISTINCT, R_FACE_COUNT, R_INTERSECTION, verify_mesh

from conftest import shellings
from oracles import lattice_cell, random_local_instance

H0 = tuple(range(8))
# glued to the x=1 face (corners 1, 3, 5, 7) of H0
H_RIGHT = (1, 8, 3, 9, 5, 10, 7, 11)
LOCAL_RULES = {R_DISTINCT, R_INTERSECTION, R_FACE_COUNT}


def local_violations(hexes):
    rep = verify_mesh(hexes, [])
    return [v for v in rep.violations if v[0] in LOCAL_RULES]


def test_relation_sizes_of_one_hex():
    M = PartialMesh([H0])
    assert (len(M.E), len(M.D_Q), len(M.D_H)) == (12, 12, 4)


def test_face_neighbour_is_compatible():
    M = PartialMesh([H0])
    assert M.is_compatible(H_RIGHT)
    M.add_hex(H_RIGHT)
    assert len(M.E) == 20


def test_rotated_gluing_is_compatible():
    # a quarter turn maps the face quad onto itself
    rotated = (3, 8, 7, 9, 1, 10, 5, 11)
    assert PartialMesh([H0]).is_compatible(rotated)


def test_mismatched_face_is_incompatible():
    # the same four vertices in a different cyclic order: 1-7 is an edge here
    # but a diagonal of H0
    bad = (1, 8, 7, 9, 3, 10, 5, 11)
    assert not PartialMesh([H0]).is_compatible(bad)


def test_shared_edge_and_vertex_are_compatible():
    edge = (0, 1, 8, 9, 10, 11, 12, 13)
    vertex = (7, 8, 9, 10, 11, 12, 13, 14)
    assert PartialMesh([H0]).is_compatible(edge)
    assert PartialMesh([H0]).is_compatible(vertex)


def test_shared_diagonal_is_incompatible():
    # 0 and 3 span a face diagonal of H0 but an edge here
    h = (0, 3, 8, 9, 10, 11, 12, 13)
    assert not PartialMesh([H0]).is_compatible(h)


def test_interior_diagonal_is_incompatible():
    h = (0, 7, 8, 9, 10, 11, 12, 13)
    assert not PartialMesh([H0]).is_compatible(h)


def test_third_hex_on_a_face_is_incompatible():
    M = PartialMesh([H0, H_RIGHT])
    third = (1, 12, 3, 13, 5, 14, 7, 15)
    assert not M.is_compatible(third)


def test_duplicate_hex_is_incompatible():
    assert not PartialMesh([H0]).is_compatible(H0)


def test_add_rejects_incompatible():
    with pytest.raises(IncompatibleHex):
        PartialMesh([H0]).add_hex(H0)


def test_undo_is_lifo():
    M = PartialMesh()
    t1 = add_hex(M, H0)
    t2 = add_hex(M, H_RIGHT)
    with pytest.raises(NonLifoUndo):
        undo(M, t1)
    undo(M, t2)
    undo(M, t1)
    assert M.rel == {} and M.quads == {} and M.hexes == []


def test_undo_restores_snapshot():
    M = PartialMesh([H0])
    before = M.snapshot()
    tok = M.add_hex(H_RIGHT)
    M.undo(tok)
    assert M.snapshot() == before
    assert is_compatible(M, H_RIGHT)


def random_hex_near(rng, pool, n_fresh_start):
    """Hexahedron reusing a random subset of ``pool`` at random corners."""
    k = rng.randint(0, 8)
    shared = rng.sample(pool, min(k, len(pool)))
    corners = shared + list(range(n_fresh_start, n_fresh_start + 8 - len(shared)))
    rng.shuffle(corners)
    return tuple(corners)


@given(st.integers(0, 2**32 - 1))
def test_compat_never_accepts_what_verify_rejects(seed):
    rng = random.Random(seed)
    hexes = [H0]
    M = PartialMesh(hexes)
    nxt = 8
    for _ in range(3):
        pool = sorted({v for h in hexes for v in h})
        h = random_hex_near(rng, pool, nxt)
        nxt += 8
        if M.is_compatible(h):
            M.add_hex(h)
            hexes.append(h)
            assert local_violations(hexes) == []


@given(shellings(max_hex=7))
def test_compat_accepts_flip_built_meshes(sh):
    Q, hexes = sh
    M = PartialMesh()
    for h in hexes:
        assert M.is_compatible(h)
        M.add_hex(h)
    assert verify_mesh(hexes, Q).ok
    assert sorted(map(sorted, boundary_of(hexes))) == sorted(map(sorted, Q.quads))


@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_compat_agrees_with_verify_on_lattice_instances(seed, n):
    hexes = random_local_instance(random.Random(seed), n)
    M = PartialMesh()
    accepted = True
    for h in hexes:
        if not M.is_compatible(h):
            accepted = False
            break
        M.add_hex(h)
    assert accepted == (local_violations(hexes) == [])


def test_repeated_corner_is_incompatible():
    assert not PartialMesh().is_compatible((0, 0, 1, 2, 3, 4, 5, 6))


def test_grid_of_cells_is_compatible():
    M = PartialMesh()
    for x in range(2):
        for y in range(2):
            for z in range(2):
                M.add_hex(lattice_cell(x, y, z))
    assert len(M) == 8
    assert len(M.E) == 54
