import pytest
from hypothesis import given

from hexshell.complex import HEX_FACES, boundary_of, cube_boundary
from hexshell.verify import (
    R_ATTACH,
    R_BOUNDARY,
    R_DISTINCT,
    R_FACE_COUNT,
    R_INTERSECTION,
    is_common_face,
    verify_mesh,
    verify_shelling,
)

from conftest import shellings
from oracles import lattice_cell

H0 = tuple(range(8))


def rules(rep):
    return {v[0] for v in rep.violations}


def test_single_cube():
    rep = verify_mesh([H0], cube_boundary())
    assert rep.ok and bool(rep)


def test_wrong_boundary():
    rep = verify_mesh([H0], list(HEX_FACES[:5]) + [(0, 1, 3, 2)])
    assert rules(rep) == {R_BOUNDARY}


def test_repeated_vertex():
    rep = verify_mesh([(0, 0, 1, 2, 3, 4, 5, 6)], [])
    assert R_DISTINCT in rules(rep)


def test_bad_intersection_is_reported_with_elements():
    rep = verify_mesh([H0, (0, 7, 8, 9, 10, 11, 12, 13)], [])
    assert rep.violations[0][:2] == (R_INTERSECTION, (0, 1))


def test_three_hexes_on_a_face():
    a = (1, 8, 3, 9, 5, 10, 7, 11)
    b = (1, 12, 3, 13, 5, 14, 7, 15)
    assert R_FACE_COUNT in rules(verify_mesh([H0, a, b], []))


@pytest.mark.parametrize("other, ok", [
    ((1, 8, 3, 9, 5, 10, 7, 11), True),   # face
    ((1, 8, 7, 9, 3, 10, 5, 11), False),  # same vertex set, wrong cycle
    ((0, 1, 8, 9, 10, 11, 12, 13), True),  # edge
    ((0, 3, 8, 9, 10, 11, 12, 13), False),  # face diagonal
    ((7, 8, 9, 10, 11, 12, 13, 14), True),  # corner
    ((0, 1, 2, 8, 9, 10, 11, 12), False),  # three vertices
])
def test_is_common_face(other, ok):
    assert is_common_face(H0, other) == ok


def test_grid_mesh():
    cells = [lattice_cell(x, y, z) for x in range(2) for y in range(2) for z in range(2)]
    assert verify_mesh(cells, boundary_of(cells)).ok
    assert verify_shelling(cells).ok


def test_shelling_rejects_disconnected_step():
    far = tuple(v + 100 for v in H0)
    rep = verify_shelling([H0, far])
    assert rules(rep) == {R_ATTACH}


def test_shelling_rejects_corner_only_contact():
    # two grid cells meeting at a single vertex
    rep = verify_shelling([lattice_cell(0, 0, 0), lattice_cell(1, 1, 1)])
    assert rules(rep) == {R_ATTACH}


def test_grid_order_matters_for_shelling():
    # the far corner cell first, then its antipode: not attached
    cells = [lattice_cell(0, 0, 0), lattice_cell(1, 1, 0), lattice_cell(1, 0, 0)]
    assert not verify_shelling(cells).ok
    assert verify_shelling([cells[0], cells[2], cells[1]]).ok


def test_empty_shelling_is_valid():
    assert verify_shelling([]).ok


@given(shellings(max_hex=8))
def test_flip_sequences_are_shellings(sh):
    Q, hexes = sh
    assert verify_mesh(hexes, Q).ok
    assert verify_shelling(hexes).ok
