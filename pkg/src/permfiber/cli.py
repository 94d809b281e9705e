"""Command-line front end: build complexes, run verifications, export
reports and CSV/JSON artifacts.

Commands: perm, simplex, fiber, suite.  Exit code 0 means every
requested check passed, 1 means some check failed, 2 means the input
was invalid.  Reports are deterministic: identical inputs produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .complexes import (
    complex_to_json,
    homology_dims,
    is_surjective,
    mapping_cone,
    page_dims,
    verify_chain_map,
    verify_d_squared,
)
from .fiber import (
    DEFAULT_FIBER_CAP,
    build_fiber,
    fiber_to_simplex,
    koszul_check,
    load_graph,
    perm_to_fiber,
    push_forward_well_defined,
)
from .polytopes import DEFAULT_PERM_CAP, build_perm, build_simplex, perm_to_simplex

CAP_ENV_VAR = "PERMFIBER_CAP"
CHECK_TOKENS = ("d2", "homology", "maps", "koszul")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2


class InvalidInput(Exception):
    pass


def _default_cap(fallback: int) -> int:
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise InvalidInput(f"{CAP_ENV_VAR} must be an integer, got {raw!r}")


def _parse_checks(raw: str, allowed=CHECK_TOKENS) -> tuple:
    if raw.strip() == "all":
        return tuple(allowed)
    tokens = tuple(t.strip() for t in raw.split(",") if t.strip())
    for t in tokens:
        if t not in allowed:
            raise InvalidInput(
                f"unknown check {t!r}; allowed: {', '.join(allowed)} or 'all'")
    if not tokens:
        raise InvalidInput("empty --checks")
    return tokens


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Collector:
    """Accumulates report lines and the CSV tables of a run."""

    def __init__(self):
        self.lines: list = []
        self.dims_rows: list = []     # object,degree,dim
        self.pages_rows: list = []    # object,r,p,q,dim
        self.checks_rows: list = []   # object,check,pass
        self.failed = False
        self.json_docs: dict = {}

    def say(self, line: str) -> None:
        self.lines.append(line)

    def check(self, obj: str, name: str, passed: bool, detail: str = "") -> None:
        word = "pass" if passed else "FAIL"
        suffix = f" ({detail})" if detail else ""
        self.say(f"check {name}: {word}{suffix}")
        self.checks_rows.append(f"{obj},{name},{str(passed).lower()}")
        if not passed:
            self.failed = True

    def dims(self, obj: str, complex_) -> None:
        for r in complex_.degrees():
            self.dims_rows.append(f"{obj},{r},{complex_.dim(r)}")

    def pages(self, obj: str, filtered, max_r: int) -> None:
        for r in range(max_r + 1):
            table = page_dims(filtered, r)
            cells = " ".join(f"({p},{q}):{d}" for (p, q), d in sorted(table.dims.items()))
            self.say(f"E{r}: {cells}")
            for (p, q), d in sorted(table.dims.items()):
                self.pages_rows.append(f"{obj},{r},{p},{q},{d}")

    def write_outputs(self, out_dir: Path) -> None:
        if self.dims_rows:
            _atomic_write(out_dir / "dims.csv",
                          "\n".join(["object,degree,dim"] + self.dims_rows) + "\n")
        if self.pages_rows:
            _atomic_write(out_dir / "pages.csv",
                          "\n".join(["object,r,p,q,dim"] + self.pages_rows) + "\n")
        if self.checks_rows:
            _atomic_write(out_dir / "checks.csv",
                          "\n".join(["object,check,pass"] + self.checks_rows) + "\n")
        for name, doc in sorted(self.json_docs.items()):
            _atomic_write(out_dir / f"{name}.json",
                          json.dumps(doc, indent=1, sort_keys=True) + "\n")


def _homology_detail(h: dict) -> str:
    nonzero = {r: d for r, d in sorted(h.items()) if d}
    return " ".join(f"H_{r}={d}" for r, d in nonzero.items()) or "zero"


def _run_perm_checks(col: Collector, name: str, perm, checks, pages: int,
                     simplex=None) -> None:
    col.say(f"object: {name}")
    col.dims(name, perm.complex)
    col.say("dims: " + " ".join(f"r={r}:{perm.complex.dim(r)}"
                                for r in perm.complex.degrees()))
    d2_ok = True
    if "d2" in checks:
        rep = verify_d_squared(perm.complex)
        d2_ok = rep.passed
        col.check(name, "d2", rep.passed,
                  "" if rep.passed else f"fails at degree {rep.degree}")
    if "homology" in checks:
        if not d2_ok:
            col.check(name, "homology", False, "skipped: d2 failed")
        else:
            h = homology_dims(perm.complex)
            want = {r: (1 if r == 0 else 0) for r in perm.complex.degrees()}
            col.check(name, "homology", h == want, _homology_detail(h))
    if pages >= 0:
        col.pages(name, perm.filtered, pages)
    if "koszul" in checks:
        from math import comb
        e1 = page_dims(perm.filtered, 1)
        e2 = page_dims(perm.filtered, 2)
        n = perm.n
        e1_ok = e1.dims == {(p, -1): comb(n, p) for p in range(1, n + 1)}
        e2_ok = e2.dims == {(1, -1): 1}
        col.check(name, "koszul", e1_ok and e2_ok,
                  "E1 binomial row at q=-1, E2 single class at p=1")
    if "maps" in checks:
        f = perm_to_simplex(perm.n, perm=perm, simplex=simplex)
        rep = verify_chain_map(f)
        surj = is_surjective(f)
        cone_ok = False
        if rep.passed:
            cone_ok = all(v == 0 for v in homology_dims(mapping_cone(f)).values())
        col.check(name, "maps", rep.passed and surj and cone_ok,
                  f"blow-down [{f.note}], surjective={str(surj).lower()}, "
                  f"cone acyclic={str(cone_ok).lower()}")


def _run_fiber_checks(col: Collector, name: str, fib, checks, pages: int) -> None:
    n = fib.n
    col.say(f"object: {name}")
    col.dims(name, fib.complex)
    col.say("dims by blocks: " + " ".join(
        f"k={-r}:{fib.complex.dim(r)}" for r in sorted(fib.complex.degrees(),
                                                       reverse=True)))
    d2_ok = True
    if "d2" in checks:
        rep = verify_d_squared(fib.complex)
        d2_ok = rep.passed
        col.check(name, "d2", rep.passed,
                  "" if rep.passed else f"fails at degree {rep.degree}")
    if "homology" in checks:
        if not d2_ok:
            col.check(name, "homology", False, "skipped: d2 failed")
        else:
            h = homology_dims(fib.complex)
            want = {r: (1 if r == -n else 0) for r in fib.complex.degrees()}
            col.check(name, "homology", h == want, _homology_detail(h))
    if pages >= 0:
        col.pages(name, fib.filtered, pages)
    if "koszul" in checks:
        rep = koszul_check(fib)
        col.check(name, "koszul", rep.passed,
                  f"homology {_homology_detail(rep.homology)}; {rep.note}")
    if "maps" in checks:
        perm = build_perm(n, cap=max(n, DEFAULT_PERM_CAP))
        simplex = build_simplex(n)
        p2f = perm_to_fiber(fib, perm=perm)
        f2s = fiber_to_simplex(fib, simplex=simplex)
        p2s = perm_to_simplex(n, perm=perm, simplex=simplex)
        ok_p2f = verify_chain_map(p2f).passed and is_surjective(p2f)
        ok_f2s = verify_chain_map(f2s).passed and is_surjective(f2s)
        cones_ok = False
        factor_ok = False
        if ok_p2f and ok_f2s:
            cones_ok = (
                all(v == 0 for v in homology_dims(mapping_cone(p2f)).values())
                and all(v == 0 for v in homology_dims(mapping_cone(f2s)).values()))
            from .complexes import compose
            comp = compose(f2s, p2f)
            factor_ok = all(comp.matrix(r) == p2s.matrix(r)
                            for r in perm.complex.degrees())
        welldef_ok = all(push_forward_well_defined(fib, lab).passed
                         for lab in sorted(fib.trees))
        col.check(name, "maps", ok_p2f and ok_f2s and cones_ok and factor_ok
                  and welldef_ok,
                  f"chain maps={str(ok_p2f and ok_f2s).lower()}, "
                  f"cones acyclic={str(cones_ok).lower()}, "
                  f"factorization={str(factor_ok).lower()}, "
                  f"well-defined={str(welldef_ok).lower()}")


def cmd_perm(args) -> int:
    cap = args.cap if args.cap is not None else _default_cap(DEFAULT_PERM_CAP)
    if not 1 <= args.n <= cap:
        raise InvalidInput(f"--n must satisfy 1 <= n <= cap ({cap}), got {args.n}")
    checks = _parse_checks(args.checks)
    col = Collector()
    perm = build_perm(args.n, cap=cap)
    _run_perm_checks(col, f"P{args.n}", perm, checks, args.pages)
    col.json_docs[f"P{args.n}"] = complex_to_json(perm.complex, perm.filtered.levels)
    return _finish(col, args)


def cmd_simplex(args) -> int:
    if args.n < 1:
        raise InvalidInput(f"--n must be at least 1, got {args.n}")
    checks = _parse_checks(args.checks, allowed=("d2", "homology"))
    col = Collector()
    simplex = build_simplex(args.n)
    name = f"D{args.n - 1}"
    col.say(f"object: {name}")
    col.dims(name, simplex.complex)
    col.say("dims: " + " ".join(f"r={r}:{simplex.complex.dim(r)}"
                                for r in simplex.complex.degrees()))
    if "d2" in checks:
        rep = verify_d_squared(simplex.complex)
        col.check(name, "d2", rep.passed)
    if "homology" in checks:
        h = homology_dims(simplex.complex)
        want = {r: (1 if r == 0 else 0) for r in simplex.complex.degrees()}
        col.check(name, "homology", h == want, _homology_detail(h))
    col.json_docs[name] = complex_to_json(simplex.complex)
    return _finish(col, args)


def cmd_fiber(args) -> int:
    cap = args.cap if args.cap is not None else _default_cap(DEFAULT_FIBER_CAP)
    path = Path(args.graph)
    if not path.exists():
        raise InvalidInput(f"graph file not found: {path}")
    try:
        graph = load_graph(path)
    except ValueError as exc:
        raise InvalidInput(f"bad graph file {path}: {exc}")
    if graph.n > cap:
        raise InvalidInput(f"graph has {graph.n} edges, above the cap {cap}")
    checks = _parse_checks(args.checks)
    col = Collector()
    fib = build_fiber(graph, cap=cap)
    name = path.stem
    _run_fiber_checks(col, name, fib, checks, args.pages)
    col.json_docs[name] = complex_to_json(fib.complex, fib.filtered.levels)
    return _finish(col, args)


def cmd_suite(args) -> int:
    cap = args.cap if args.cap is not None else _default_cap(DEFAULT_FIBER_CAP)
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise InvalidInput(f"corpus directory not found: {corpus}")
    manifest_path = corpus / "manifest.json"
    if not manifest_path.exists():
        raise InvalidInput(f"missing manifest: {manifest_path}")
    with open(manifest_path, encoding="utf-8") as handle:
        manifest = json.load(handle)
    graph_files = sorted(p for p in corpus.glob("*.edges"))
    if not graph_files:
        raise InvalidInput(f"no .edges files in {corpus}")
    col = Collector()
    for path in graph_files:
        name = path.stem
        entry = manifest.get(name)
        if entry is None:
            col.say(f"object: {name}")
            col.check(name, "manifest", False, "no manifest entry for this graph")
            continue
        try:
            graph = load_graph(path)
        except ValueError as exc:
            col.say(f"object: {name}")
            col.check(name, "load", False, str(exc))
            continue
        if graph.n > cap:
            col.say(f"object: {name}")
            col.check(name, "load", False,
                      f"graph has {graph.n} edges, above the cap {cap}")
            continue
        fib = build_fiber(graph, cap=cap)
        _run_fiber_checks(col, name, fib, CHECK_TOKENS, pages=-1)
        got = {str(r): fib.complex.dim(r) for r in fib.complex.degrees()}
        want = {str(k): int(v) for k, v in entry.get("dims", {}).items()}
        if got == want:
            col.check(name, "dims-manifest", True)
        else:
            diffs = sorted(set(got) | set(want))
            detail = "; ".join(
                f"degree {r}: got {got.get(r, 0)}, manifest {want.get(r, 0)}"
                for r in diffs if got.get(r) != want.get(r))
            col.check(name, "dims-manifest", False, detail)
    stale = sorted(set(manifest) - {p.stem for p in graph_files})
    for name in stale:
        col.say(f"object: {name}")
        col.check(name, "manifest", False, "manifest entry has no graph file")
    for n in range(1, min(6, cap) + 1):
        perm = build_perm(n, cap=max(n, cap))
        _run_perm_checks(col, f"P{n}", perm, CHECK_TOKENS, pages=-1)
    return _finish(col, args)


def _finish(col: Collector, args) -> int:
    result = "FAIL" if col.failed else "PASS"
    col.say(f"result: {result}")
    out = getattr(args, "out", None)
    if out:
        col.write_outputs(Path(out))
    print("\n".join(col.lines))
    return EXIT_CHECK_FAILED if col.failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permfiber",
        description="Exact verification of permutohedron, simplex and "
                    "graph-contraction fiber chain complexes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("perm", help="permutohedron complex on n letters")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pages", type=int, default=2,
                   help="largest spectral page to report (default 2)")
    p.add_argument("--checks", default="all",
                   help="comma list of d2,homology,maps,koszul or 'all'")
    p.add_argument("--out", help="directory for CSV/JSON exports")
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=cmd_perm)

    p = sub.add_parser("simplex", help="simplex complex on n vertices")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--checks", default="all",
                   help="comma list of d2,homology or 'all'")
    p.add_argument("--out", help="directory for CSV/JSON exports")
    p.set_defaults(func=cmd_simplex)

    p = sub.add_parser("fiber", help="contraction fiber of a graph edge list")
    p.add_argument("--graph", required=True, help="edge list file, 'u v' per line")
    p.add_argument("--pages", type=int, default=2)
    p.add_argument("--checks", default="all",
                   help="comma list of d2,homology,maps,koszul or 'all'")
    p.add_argument("--out", help="directory for CSV/JSON exports")
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=cmd_fiber)

    p = sub.add_parser("suite", help="run every check over a corpus directory")
    p.add_argument("--corpus", required=True,
                   help="directory of .edges files plus manifest.json")
    p.add_argument("--out", help="directory for CSV exports")
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
