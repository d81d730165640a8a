import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexshell.complex import Quadrangulation, boundary_of, cube_boundary
from hexshell.errors import BudgetExhausted, NotFound, OddQuadCount
from hexshell.fixtures import named
from hexshell.flips import IdAllocator
from hexshell.iso import are_isomorphic, automorphism_group
from hexshell.search import SearchLimits, insert_buffer_layer, search_exhaustive, search_with_table, search_with_table_deepening
from hexshell.verify import verify_mesh, verify_shelling

from conftest import needs_native, random_shelling, shellings
from oracles import mesh_orbit_key

BACKENDS = ["python", pytest.param("native", marks=needs_native)]


def corners(sol):
    return [h.corners for h in sol.hexes]


def test_limits_validation():
    with pytest.raises(ValueError):
        SearchLimits(0)
    with pytest.raises(ValueError):
        SearchLimits(3, v_max=5)
    assert SearchLimits(3).resolved_v_max(8) == 8 + 12 + 1
    assert SearchLimits(3, v_max=20).resolved_v_max(8) == 20


@pytest.mark.parametrize("backend", BACKENDS)
def test_cube_has_one_solution(backend):
    sols = search_exhaustive(cube_boundary(), SearchLimits(1), "all", backend=backend)
    assert len(sols) == 1 and len(sols[0]) == 1
    assert sols[0].stats.solutions == 1


def test_odd_quad_count_is_rejected():
    with pytest.raises(OddQuadCount):
        search_exhaustive(Quadrangulation([(0, 2, 1, 3), (0, 3, 1, 4), (0, 4, 1, 2)]), SearchLimits(2))


def test_mode_is_checked():
    with pytest.raises(ValueError):
        search_exhaustive(cube_boundary(), SearchLimits(1), "some")


def test_box_in_both_modes():
    box = boundary_of([tuple(range(8)), (1, 8, 3, 9, 5, 10, 7, 11)])
    sols = search_exhaustive(box, SearchLimits(2), "all", sbdd=False)
    assert len(sols) == 2  # one per insertion order
    assert len(search_exhaustive(box, SearchLimits(2), "all")) == 1
    assert len(search_exhaustive(box, SearchLimits(2), "first", sbdd=False)) == 1


def test_trapezohedron_has_no_small_mesh():
    assert search_exhaustive(named("trapezohedron"), SearchLimits(6), "all") == []


def test_node_budget_keeps_partial_results():
    Q, _ = random_shelling(4, 4)
    with pytest.raises(BudgetExhausted) as exc:
        search_exhaustive(Q, SearchLimits(6, node_budget=3), "all", sbdd=False, backend="python")
    assert exc.value.stats.nodes > 3
    assert isinstance(exc.value.partial, list)


def test_vertex_limit_prunes():
    Q, hexes = random_shelling(6, 4)
    tight = SearchLimits(5, v_max=Q.n_vertices + 2)
    free = SearchLimits(5)
    a = search_exhaustive(Q, tight, "all", backend="python")
    b = search_exhaustive(Q, free, "all", backend="python")
    assert len(a) <= len(b)
    if a:
        assert a[0].stats.vmax_prunes > 0


@given(shellings(max_hex=4))
def test_solutions_are_valid_meshes_and_shellings(sh):
    Q, hexes = sh
    sols = search_exhaustive(Q, SearchLimits(len(hexes)), "all")
    assert sols, "the generating shelling must be found"
    for s in sols:
        assert len(s) <= len(hexes)
        assert verify_mesh(corners(s), Q).ok
        assert verify_shelling(list(reversed(corners(s)))).ok


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_sbdd_keeps_every_orbit(seed, n):
    Q, hexes = random_shelling(seed, n)
    G = automorphism_group(Q)
    lim = SearchLimits(len(hexes) + 1)
    on = search_exhaustive(Q, lim, "all", sbdd=True)
    off = search_exhaustive(Q, lim, "all", sbdd=False)
    assert min(map(len, on)) == min(map(len, off))
    assert {mesh_orbit_key(s.hexes, G, Q.vertices) for s in on} == \
        {mesh_orbit_key(s.hexes, G, Q.vertices) for s in off}
    assert len(on) <= len(off)


def test_python_parallel_matches_sequential():
    Q, _ = random_shelling(11, 4)
    lim = SearchLimits(5)
    seq = search_exhaustive(Q, lim, "all", backend="python")
    par = search_exhaustive(Q, lim, "all", backend="python", workers=2)
    assert [corners(s) for s in seq] == [corners(s) for s in par]
    assert seq[0].stats.nodes == par[0].stats.nodes


def test_ids_are_mapped_back_to_input_labels():
    Q, hexes = random_shelling(2, 3)
    labels = set(Q.vertices)
    for s in search_exhaustive(Q, SearchLimits(3), "all"):
        bnd = {v for h in s.hexes for v in h.corners} & labels
        assert bnd == labels
        assert verify_mesh(corners(s), Q.quads).ok


def test_buffer_layer_on_pyramid():
    cav = named("pyramid")
    alloc = IdAllocator(cav.n_vertices)
    layer, copy, corr = insert_buffer_layer(cav, alloc)
    assert len(layer) == len(cav)
    assert are_isomorphic(cav, copy) is not None
    assert all(corr(v) >= cav.n_vertices for v in cav.vertices)
    # the layer is a shell: its boundary is the cavity plus the copy
    bnd = Quadrangulation(boundary_of(layer), validate=False)
    assert bnd.quad_keys() == cav.quad_keys() | copy.quad_keys()
    assert verify_mesh(layer, list(cav.quads) + list(copy.quads)).ok


def test_table_search_hits_at_root(table6):
    Q, hexes = random_shelling(21, 5)
    s = search_with_table(Q, table6, SearchLimits(1))
    assert s.method in ("table-direct", "table-buffer")
    assert s.stats.table_hits == 1 and s.stats.nodes == 1
    assert verify_mesh(corners(s), Q).ok


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6))
def test_table_search_one_flip_beyond_table(table6, seed):
    Q, hexes = random_shelling(seed, 7)
    s = search_with_table(Q, table6, SearchLimits(2))
    assert verify_mesh(corners(s), Q).ok


def test_table_search_reports_unreachable(table6):
    with pytest.raises(NotFound) as exc:
        search_with_table(named("trapezohedron"), table6, SearchLimits(2))
    assert exc.value.stats.nodes > 1


@pytest.mark.parametrize("seed", range(3))
def test_deepening_finds_shallow_hit_first(table6, seed):
    Q, _ = random_shelling(seed, 7)
    s = search_with_table_deepening(Q, table6, SearchLimits(3))
    assert verify_mesh(corners(s), Q).ok
    # the plain DFS at the same bound dives below the first hit
    assert s.stats.nodes <= search_with_table(Q, table6, SearchLimits(3)).stats.nodes


def test_deepening_reports_unreachable(table6):
    with pytest.raises(NotFound):
        search_with_table_deepening(named("trapezohedron"), table6, SearchLimits(3))
