import subprocess
import sys

import pytest

from hexshell.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from hexshell.complex import cube_boundary
from hexshell.fixtures import named
from hexshell.io import read_hexmesh, write_hexmesh, write_quadrangulation
from hexshell.tablegen import ShellingTable
from hexshell.verify import verify_mesh


@pytest.fixture
def cube_file(tmp_path):
    p = tmp_path / "cube.quads"
    write_quadrangulation(p, cube_boundary().quads)
    return p


def test_usage_errors(capsys):
    assert main([]) == EXIT_USAGE
    assert main(["gen-table", "--depth", "0", "--out", "x"]) == EXIT_USAGE
    assert main(["mesh", "--input", "a", "--out", "o", "--mode", "some"]) == EXIT_USAGE


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == EXIT_OK
    assert "gen-table" in capsys.readouterr().out


def test_gen_table(tmp_path, capsys):
    out = tmp_path / "t4.bin"
    assert main(["gen-table", "--depth", "4", "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["1: 1", "2: 2", "3: 5", "4: 17"]
    assert len(ShellingTable.read(out)) == 17


def test_gen_table_entry_budget(tmp_path, capsys):
    out = tmp_path / "t.bin"
    assert main(["gen-table", "--depth", "6", "--out", str(out), "--max-entries", "10"]) == EXIT_FAIL
    assert "error" in capsys.readouterr().err
    assert not out.exists()


def test_mesh_cube_all(cube_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["mesh", "--input", str(cube_file), "--hmax", "1", "--mode", "all", "--out", str(out)]) == EXIT_OK
    line = capsys.readouterr().out.strip()
    assert line.startswith("cube: solutions=1 size=1 ")
    hexes, bnd = read_hexmesh(out / "cube.hexmesh")
    assert len(hexes) == 1 and verify_mesh(hexes, bnd).ok


def test_mesh_unsolvable_and_odd(tmp_path, capsys):
    trap = tmp_path / "trap.quads"
    write_quadrangulation(trap, named("trapezohedron").quads)
    odd = tmp_path / "odd.quads"
    write_quadrangulation(odd, [(0, 2, 1, 3), (0, 3, 1, 4), (0, 4, 1, 2)])
    code = main(["mesh", "--input", str(trap), str(odd), "--hmax", "3", "--out", str(tmp_path / "o")])
    assert code == EXIT_FAIL
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("trap: unsolved (no mesh found)")
    assert out[1].startswith("odd: unsolved")


def test_mesh_with_table(tmp_path, capsys):
    tbl = tmp_path / "t5.bin"
    assert main(["gen-table", "--depth", "5", "--out", str(tbl)]) == EXIT_OK
    box = tmp_path / "box.quads"
    from hexshell.complex import boundary_of

    write_quadrangulation(box, boundary_of([tuple(range(8)), (1, 8, 3, 9, 5, 10, 7, 11)]))
    capsys.readouterr()
    assert main(["mesh", "--input", str(box), "--table", str(tbl), "--out", str(tmp_path / "o")]) == EXIT_OK
    assert capsys.readouterr().out.startswith("box: solutions=1 size=2 ")


def test_mesh_parallel_inputs(tmp_path, capsys, cube_file):
    other = tmp_path / "cube2.quads"
    other.write_text(cube_file.read_text())
    args = ["mesh", "--input", str(cube_file), str(other), "--workers", "2", "--out", str(tmp_path / "o")]
    assert main(args) == EXIT_OK
    assert sorted(line.split(":")[0] for line in capsys.readouterr().out.splitlines()) == ["cube", "cube2"]


def test_verify(tmp_path, capsys):
    good = tmp_path / "good.hexmesh"
    write_hexmesh(good, [tuple(range(8))], cube_boundary().quads)
    assert main(["verify", "--mesh", str(good)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "ok: 1 hexahedra"
    bad = tmp_path / "bad.hexmesh"
    write_hexmesh(bad, [tuple(range(8)), (0, 7, 8, 9, 10, 11, 12, 13)], cube_boundary().quads)
    assert main(["verify", "--mesh", str(bad)]) == EXIT_FAIL
    out = capsys.readouterr().out
    assert "intersection:" in out and "boundary:" in out


def test_verify_with_separate_boundary(tmp_path, capsys, cube_file):
    m = tmp_path / "m.hexmesh"
    write_hexmesh(m, [tuple(range(8))])
    assert main(["verify", "--mesh", str(m)]) == EXIT_USAGE
    assert main(["verify", "--mesh", str(m), "--boundary", str(cube_file)]) == EXIT_OK


def test_stats(tmp_path, capsys, cube_file):
    m = tmp_path / "m.hexmesh"
    write_hexmesh(m, [tuple(range(8))], cube_boundary().quads)
    assert main(["stats", "--input", str(cube_file), str(m)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "cube.quads: F=6 V=8 |Aut|=48 valences[3:8] pairs[3-3:12]"
    assert lines[1] == "m.hexmesh: |H|=1 V=8 edges=12 valence[1:100.0%] F=6"


def test_missing_input_file(tmp_path, capsys):
    assert main(["stats", "--input", str(tmp_path / "nope")]) == EXIT_FAIL
    assert "error" in capsys.readouterr().err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hexshell.cli", "stats", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "--input" in r.stdout
