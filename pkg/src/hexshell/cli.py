"""Command line: ``hexshell gen-table | mesh | verify | stats``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections import Counter
from pathlib import Path

from .complex import build_quadrangulation
from .errors import BudgetExhausted, HexShellError, NotFound, OddQuadCount, OutOfMemoryBudget
from .io import parse_hexmesh, read_quadrangulations, write_hexmesh

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hexshell", description="Combinatorial hexahedral meshing by quad flips.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-table", help="enumerate shellable boundaries up to a depth")
    g.add_argument("--depth", type=_positive, required=True)
    g.add_argument("--workers", type=_positive, default=1)
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--max-entries", type=int, default=None)

    m = sub.add_parser("mesh", help="find hex meshes of quad spheres")
    m.add_argument("--input", type=Path, required=True, nargs="+")
    m.add_argument("--table", type=Path, default=None)
    m.add_argument("--hmax", type=_positive, default=None)
    m.add_argument("--vmax", type=int, default=None)
    m.add_argument("--mode", choices=("first", "all"), default="first")
    m.add_argument("--timeout", type=float, default=None)
    m.add_argument("--workers", type=_positive, default=1)
    m.add_argument("--no-sbdd", action="store_true")
    m.add_argument("--out", type=Path, required=True)

    v = sub.add_parser("verify", help="check a hex mesh against a boundary")
    v.add_argument("--mesh", type=Path, required=True)
    v.add_argument("--boundary", type=Path, default=None)

    s = sub.add_parser("stats", help="describe quad spheres or hex meshes")
    s.add_argument("--input", type=Path, required=True, nargs="+")
    return p


# -- gen-table -----------------------------------------------------------------


def cmd_gen_table(args) -> int:
    from .tablegen import generate_shellings

    def progress(info):
        logging.getLogger("hexshell").info("depth %d: %d entries (%.1fs)", info["depth"], info["count"], info["time"])

    try:
        table = generate_shellings(args.depth, args.workers, max_entries=args.max_entries, progress=progress)
    except OutOfMemoryBudget as e:
        print(f"error: {e}", file=sys.stderr)
        if e.partial is not None:
            for d, c in sorted(e.partial.counts.items()):
                print(f"{d}: {c}")
        return EXIT_FAIL
    for d in range(1, args.depth + 1):
        print(f"{d}: {table.counts[d]}")
    try:
        table.write(args.out)
    except OSError as e:
        print(f"error: cannot write {args.out}: {e}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# -- mesh ----------------------------------------------------------------------


def _solve(job):
    """Solve one input; returns ``(name, solutions, stats dict, error)``."""
    from .search import SearchLimits, search_exhaustive, search_with_table_deepening

    name, quads, opts = job
    table = opts["table"]
    t0 = time.monotonic()
    try:
        Q = build_quadrangulation(quads)
        if table is not None:
            limits = SearchLimits(opts["hmax"] or 40, opts["vmax"], opts["timeout"])
            sols = [search_with_table_deepening(Q, table, limits, sbdd=opts["sbdd"])]
        else:
            sols = _deepening(Q, opts, search_exhaustive, SearchLimits)
    except (OddQuadCount, NotFound, BudgetExhausted) as e:
        return name, quads, [], {"time": time.monotonic() - t0}, str(e)
    except HexShellError as e:
        return name, quads, [], {"time": time.monotonic() - t0}, f"invalid input: {e}"
    st = sols[0].stats.as_dict() if sols else {}
    st["time"] = time.monotonic() - t0
    return name, quads, [[tuple(h.corners) for h in s.hexes] for s in sols], st, None if sols else "no mesh found"


def _deepening(Q, opts, search_exhaustive, SearchLimits):
    # grow h_max so that mode=first returns a smallest mesh
    h_max = opts["hmax"] or 12
    deadline = None if opts["timeout"] is None else time.monotonic() + opts["timeout"]
    start = h_max if opts["mode"] == "all" else 1
    for h in range(start, h_max + 1):
        left = None if deadline is None else max(0.0, deadline - time.monotonic())
        sols = search_exhaustive(Q, SearchLimits(h, opts["vmax"], left), opts["mode"], sbdd=opts["sbdd"])
        if sols:
            return sols
    return []


def cmd_mesh(args) -> int:
    from .tablegen import ShellingTable

    table = ShellingTable.read(args.table) if args.table is not None else None
    opts = {"table": table, "hmax": args.hmax, "vmax": args.vmax, "mode": args.mode,
            "timeout": args.timeout, "sbdd": not args.no_sbdd}
    jobs = []
    for path in args.input:
        records = read_quadrangulations(path)
        for i, quads in enumerate(records):
            name = path.stem if len(records) == 1 else f"{path.stem}_{i}"
            jobs.append((name, quads, opts))
    args.out.mkdir(parents=True, exist_ok=True)
    if args.workers > 1 and len(jobs) > 1:
        import multiprocessing as mp

        with mp.get_context("fork").Pool(args.workers) as pool:
            results = pool.imap(_solve, jobs)
            failed = sum(_report(r, args.out) for r in results)
    else:
        failed = sum(_report(_solve(j), args.out) for j in jobs)
    return EXIT_FAIL if failed else EXIT_OK


def _report(result, out_dir) -> bool:
    """Print one stats line and write the meshes; True if unsolved."""
    name, quads, sols, st, err = result
    if err is not None:
        print(f"{name}: unsolved ({err}) time={st['time']:.2f}s")
        return True
    for k, hexes in enumerate(sols):
        suffix = "" if len(sols) == 1 else f"_{k}"
        write_hexmesh(out_dir / f"{name}{suffix}.hexmesh", hexes, quads)
    sizes = sorted({len(h) for h in sols})
    print(f"{name}: solutions={len(sols)} size={','.join(map(str, sizes))} "
          f"nodes={st.get('nodes', 0)} time={st['time']:.2f}s")
    return False


# -- verify --------------------------------------------------------------------


def cmd_verify(args) -> int:
    from .verify import verify_mesh

    hexes, boundary = parse_hexmesh(args.mesh.read_text())
    if args.boundary is not None:
        records = read_quadrangulations(args.boundary)
        if len(records) != 1:
            print(f"error: {args.boundary} holds {len(records)} quad spheres, expected 1", file=sys.stderr)
            return EXIT_USAGE
        boundary = records[0]
    if boundary is None:
        print("error: no boundary given and the mesh file has none", file=sys.stderr)
        return EXIT_USAGE
    rep = verify_mesh(hexes, boundary)
    for rule, elements, text in rep.violations:
        print(f"{rule}: {text} {list(elements)}")
    if rep.ok:
        print(f"ok: {len(hexes)} hexahedra")
    return EXIT_OK if rep.ok else EXIT_FAIL


# -- stats ---------------------------------------------------------------------


def _sig_text(sig) -> str:
    hist = " ".join(f"{v}:{c}" for v, c in sig.valence_histogram)
    pairs = " ".join(f"{a}-{b}:{c}" for (a, b), c in sig.valence_pair_edge_counts)
    return f"valences[{hist}] pairs[{pairs}]"


def quad_stats_line(quads) -> str:
    from .iso import automorphism_group, signature

    Q = build_quadrangulation(quads)
    aut = len(automorphism_group(Q))
    return f"F={len(Q.quads)} V={Q.n_vertices} |Aut|={aut} {_sig_text(signature(Q))}"


def mesh_stats_line(hexes) -> str:
    edges = Counter()
    for c in hexes:
        for i in range(8):
            for k in (1, 2, 4):
                j = i ^ k
                if i < j:
                    a, b = c[i], c[j]
                    edges[(a, b) if a < b else (b, a)] += 1
    vals = Counter(edges.values())
    total = sum(vals.values())
    hist = " ".join(f"{v}:{100.0 * n / total:.1f}%" for v, n in sorted(vals.items()))
    n_vertices = len({v for c in hexes for v in c})
    return f"|H|={len(hexes)} V={n_vertices} edges={total} valence[{hist}]"


def cmd_stats(args) -> int:
    for path in args.input:
        text = path.read_bytes()
        if text.lstrip().startswith(b"hexmesh"):
            hexes, boundary = parse_hexmesh(text.decode("ascii"))
            line = mesh_stats_line(hexes)
            if boundary is not None:
                line += f" F={len(boundary)}"
            print(f"{path.name}: {line}")
            continue
        records = read_quadrangulations(path)
        for i, quads in enumerate(records):
            label = path.name if len(records) == 1 else f"{path.name}[{i}]"
            print(f"{label}: {quad_stats_line(quads)}")
    return EXIT_OK


COMMANDS = {"gen-table": cmd_gen_table, "mesh": cmd_mesh, "verify": cmd_verify, "stats": cmd_stats}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (HexShellError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
