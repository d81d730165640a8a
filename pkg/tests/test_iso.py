import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hexshell.complex import Quadrangulation, cube_boundary, quad_key
from hexshell.fixtures import named
from hexshell.iso import (
    Signature,
    VertexMap,
    are_isomorphic,
    automorphism_group,
    canonical_form,
    compute_symmetry,
    fnv1a64,
    signature,
)

from conftest import shellings
from oracles import brute_force_automorphisms, full_permutation_automorphisms


def relabel(Q, rng):
    perm = list(Q.vertices)
    rng.shuffle(perm)
    m = dict(zip(Q.vertices, perm))
    quads = [tuple(m[v] for v in q) for q in Q.quads]
    rng.shuffle(quads)
    return Quadrangulation(quads), m


def preserves(Q, sigma):
    keys = Q.quad_keys()
    return {quad_key([sigma(v) for v in q]) for q in Q.quads} == keys


def as_dict(s):
    return dict(s.forward)


def test_fnv1a64_reference_values():
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C


def test_vertex_map_bind_and_invert():
    s = VertexMap()
    assert s.bind(1, 2) and s.bind(2, 3)
    assert s.bind(1, 2)  # same binding again
    assert not s.bind(1, 4)  # 1 already maps to 2
    assert not s.bind(5, 3)  # 3 already an image
    inv = s.invert()
    assert inv(3) == 2 and s.compose(inv).is_identity()
    s.unbind(2)
    assert 2 not in s and len(s) == 1


def test_vertex_map_apply():
    s = VertexMap({0: 1, 1: 0})
    assert s.apply((0, 1, 0)) == (1, 0, 1)


def test_cube_group_matches_permutation_oracle():
    Q = cube_boundary()
    G = automorphism_group(Q)
    assert len(G) == 48
    assert G[0].is_identity()
    oracle = full_permutation_automorphisms(Q)
    assert sorted(map(sorted, (as_dict(g).items() for g in G))) == sorted(map(sorted, (m.items() for m in oracle)))


@pytest.mark.parametrize("name, order", [("trapezohedron", 16), ("pyramid", 16), ("buffer20", None), ("buffer22", None)])
def test_fixture_groups_match_oracle(name, order):
    Q = named(name)
    G = automorphism_group(Q)
    oracle = brute_force_automorphisms(Q)
    assert {tuple(sorted(as_dict(g).items())) for g in G} == {tuple(sorted(m.items())) for m in oracle}
    assert all(preserves(Q, g) for g in G)
    if order is not None:
        assert len(G) == order


@given(shellings(max_hex=5))
def test_group_matches_oracle_on_random_boundaries(sh):
    Q, _ = sh
    G = automorphism_group(Q)
    oracle = brute_force_automorphisms(Q)
    assert len(G) == len(oracle)
    assert {tuple(sorted(as_dict(g).items())) for g in G} == {tuple(sorted(m.items())) for m in oracle}


def test_compute_symmetry_rejects_non_placement():
    Q = cube_boundary()
    q = Q.quads[0]
    assert compute_symmetry(Q, 0, q) is not None
    assert compute_symmetry(Q, 0, (q[0], q[2], q[1], q[3])) is None
    assert compute_symmetry(Q, 0, (q[0], q[1], q[2], 99)) is None


def test_compute_symmetry_between_copies():
    Q = named("trapezohedron")
    R, m = relabel(Q, random.Random(3))
    i = 0
    image = tuple(m[v] for v in Q.quads[i])
    s = compute_symmetry(Q, i, image, R)
    assert s is not None and all(s(v) == m[v] for v in Q.vertices)


@given(shellings(max_hex=6), st.randoms(use_true_random=False))
def test_relabeled_copies_are_isomorphic(sh, rnd):
    Q, _ = sh
    R, _ = relabel(Q, rnd)
    s = are_isomorphic(Q, R)
    assert s is not None
    assert {quad_key([s(v) for v in q]) for q in Q.quads} == R.quad_keys()
    assert canonical_form(Q)[0] == canonical_form(R)[0]
    assert signature(Q) == signature(R)


@given(shellings(max_hex=5), shellings(max_hex=5))
def test_canonical_form_decides_isomorphism(a, b):
    Qa, Qb = a[0], b[0]
    same = canonical_form(Qa)[0] == canonical_form(Qb)[0]
    assert same == (are_isomorphic(Qa, Qb) is not None)


def test_canonical_relabeling_maps_onto_form():
    Q = named("pyramid")
    form, label = canonical_form(Q)
    assert sorted(label.values()) == list(range(Q.n_vertices))
    relabeled = {quad_key([label[v] for v in q]) for q in Q.quads}
    assert relabeled == {quad_key(q) for q in form}


def test_non_isomorphic_with_equal_size():
    # both have 8 quads and 10 vertices but different valence histograms
    a = named("trapezohedron")
    from hexshell.fixtures import enumerate_quadrangulations

    others = [Q for Q in enumerate_quadrangulations(8, min_faces=8) if signature(Q) != signature(a)]
    assert others
    assert all(are_isomorphic(a, Q) is None for Q in others)


def test_signature_roundtrip_and_order():
    s = signature(named("pyramid"))
    t = Signature.from_bytes(s.to_bytes())
    assert t == s and t.to_bytes() == s.to_bytes()
    assert s.hash64 == fnv1a64(s.to_bytes())
    assert s.valence_histogram == ((3, 8), (4, 10))
    assert s.valence_pair_edge_counts == (((3, 4), 24), ((4, 4), 8))
    c = signature(cube_boundary())
    assert (c < s) != (s < c)


def test_pyramid_apex_quad_images():
    Q = named("pyramid")
    i = Q.quads.index(next(q for q in Q.quads if 0 in q))
    apex_quad = Q.quads[i]
    # side quads touching the base have valences 3,4,3,4 against 4,4,3,4
    side = next(q for q in Q.quads if 1 in q and 14 in q)
    for k in range(4):
        rot = side[k:] + side[:k]
        assert compute_symmetry(Q, i, rot) is None
        assert compute_symmetry(Q, i, rot[::-1]) is None
    # the base centre plays the apex's role: this is the extra involution
    base = next(q for q in Q.quads if 9 in q)
    images = [base[k:] + base[:k] for k in range(4)]
    images += [im[::-1] for im in images]
    found = [s for s in (compute_symmetry(Q, i, im) for im in images) if s is not None]
    assert found and all(s(0) == 9 for s in found)
    assert apex_quad not in images
