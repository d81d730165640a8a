import pytest
from hypothesis import given

from hexshell.complex import cube_boundary
from hexshell.errors import UnderflowExit
from hexshell.flips import IdAllocator, enumerate_flips, perform_flip
from hexshell.iso import automorphism_group
from hexshell.sbdd import (
    BRANCH,
    NoGoodSequence,
    cavity_after,
    contains_no_good,
    record_enter,
    record_exit,
    try_reverse_shell,
    visited_symmetric_counterpart,
)

from conftest import shellings


def d1_hexes():
    Q = cube_boundary()
    return [perform_flip(Q, s, IdAllocator(8))[1].corners for s in enumerate_flips(Q) if s.kind == "D1"]


def test_sequence_markers():
    S = NoGoodSequence()
    a, b, c = d1_hexes()[:3]
    record_enter(S, a)
    record_enter(S, b)
    assert list(S) == [a, BRANCH, b, BRANCH]
    assert S.no_goods() == []
    record_exit(S)
    # b roots an explored subtree now
    assert list(S) == [a, BRANCH, b]
    assert S.no_goods() == [b]
    record_enter(S, c)
    assert list(S.entries()) == [(a, True), (b, False), (c, True)]
    record_exit(S)
    record_exit(S)
    assert list(S) == [a]
    with pytest.raises(UnderflowExit):
        record_exit(S)


def test_initial_no_goods():
    h = d1_hexes()[0]
    assert NoGoodSequence([h]).no_goods() == [h]


def test_symmetric_sibling_is_dominated():
    Q = cube_boundary()
    G = automorphism_group(Q)
    h0, h1 = d1_hexes()[:2]
    S = NoGoodSequence()
    S.record_enter(h0)
    S.record_exit()
    assert visited_symmetric_counterpart(S, [h1], G, Q)
    # without symmetries the sibling is new
    assert not visited_symmetric_counterpart(S, [h1], G[:1], Q)


def test_identity_with_empty_surplus_is_not_domination():
    Q = cube_boundary()
    h0 = d1_hexes()[0]
    S = NoGoodSequence([h0])
    ident = automorphism_group(Q)[:1]
    assert ident[0].is_identity()
    assert not visited_symmetric_counterpart(S, [h0], ident, Q)


def test_empty_sequence_dominates_nothing():
    Q = cube_boundary()
    assert not visited_symmetric_counterpart(NoGoodSequence(), [d1_hexes()[0]], automorphism_group(Q), Q)


def test_contains_no_good():
    Q = cube_boundary()
    h0, h1 = d1_hexes()[:2]
    S = NoGoodSequence([h0])
    ident = automorphism_group(Q)[0]
    assert contains_no_good(S, [h1, h0], ident)
    assert not contains_no_good(S, [h1], ident)


def test_cavity_after():
    Q = cube_boundary()
    assert cavity_after(Q, [tuple(range(8))]) is None
    h = d1_hexes()[0]
    cav = cavity_after(Q, [h])
    assert len(cav) == 10


def test_reverse_shell_needs_positive_budget():
    with pytest.raises(ValueError):
        try_reverse_shell(cube_boundary(), [], M=0)


@given(shellings(max_hex=5))
def test_reverse_shell_finds_flip_order(sh):
    Q, hexes = sh
    # hexes were created from the cube in order; peeling them off Q
    # in reverse reaches the first cube, which then closes the cavity
    assert try_reverse_shell(Q, list(reversed(hexes)), M=10 ** 6) is True


def test_reverse_shell_fails_on_foreign_hex():
    far = tuple(range(100, 108))
    assert try_reverse_shell(cube_boundary(), [far]) is False
