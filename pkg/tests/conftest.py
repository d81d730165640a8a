import os
import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hexshell import _backend
from hexshell.complex import cube_boundary
from hexshell.errors import WouldCreateNonSimpleBoundary
from hexshell.flips import IdAllocator, enumerate_flips, perform_flip

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

needs_native = pytest.mark.skipif(not _backend.HAVE_NATIVE, reason="compiled engine not built")


def random_shelling(seed: int, n_hex: int, *, shrink_bias: float = 0.0):
    """Flip from the cube ``n_hex`` times at random.

    Returns ``(boundary, hexes)`` where ``hexes`` is a valid mesh of the
    final boundary, listed in shelling order (cube first).
    """
    from hexshell.compat import PartialMesh

    rng = random.Random(seed)
    Q = cube_boundary()
    mesh = PartialMesh([tuple(range(8))])
    nxt = 8
    for _ in range(n_hex - 1):
        sites = enumerate_flips(Q)
        rng.shuffle(sites)
        if shrink_bias and rng.random() < shrink_bias:
            sites.sort(key=lambda s: -len(s.quads))
        for s in sites:
            alloc = IdAllocator(nxt)
            try:
                Q2, h = perform_flip(Q, s, alloc)
            except WouldCreateNonSimpleBoundary:
                continue
            if mesh.is_compatible(h.corners):
                mesh.add_hex(h.corners)
                Q, nxt = Q2, alloc.next
                break
        else:
            break
    return Q, list(mesh.hexes)


@st.composite
def shellings(draw, max_hex=6):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, max_hex))
    return random_shelling(seed, n)


@pytest.fixture(scope="session")
def table6():
    from hexshell.tablegen import generate_shellings

    return generate_shellings(6, record_rejected=True)


@pytest.fixture(scope="session")
def table7():
    from hexshell.tablegen import generate_shellings

    return generate_shellings(7)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
