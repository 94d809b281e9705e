"""Fibers of total graph contraction: flow-chart trees, the fiber
chain complex with its width filtration, and the maps relating it to
the permutohedron and simplex complexes.

A connected multigraph with edges 1..n is contracted one edge at a
time; reading a contraction sequence as a flow chart gives a rooted
tree on the n events.  Grouping events into the blocks of a TO
partition alpha (blocks applied left to right, least block last, so
the least block labels the root) and contracting the tree edges inside
each block yields the element t_alpha.  The fiber complex is spanned
by the distinct nondegenerate t_alpha, each carried with a mod-2 order
on its blocks, modelled as a canonical block order plus a parity sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .complexes import (
    ChainComplex,
    ChainMap,
    FilteredComplex,
    homology_dims,
    page_dims,
    verify_d_squared,
)
from .linalg import SparseMatrix
from .polytopes import (
    PermComplex,
    SimplexComplex,
    blowdown_coefficient,
    build_perm,
    build_simplex,
    subset_label,
)
from .topartitions import (
    TOPartition,
    differential_terms,
    enumerate_topartitions,
    format_block,
)

DEFAULT_FIBER_CAP = 8


@dataclass(frozen=True, eq=True)
class MultiGraph:
    """Connected multigraph; edge ids are 1..n by position, loops allowed."""

    edges: tuple

    @staticmethod
    def from_edges(edges: Iterable) -> MultiGraph:
        edges = tuple((int(u), int(v)) for u, v in edges)
        if not edges:
            raise ValueError("graph needs at least one edge")
        if any(u < 0 or v < 0 for u, v in edges):
            raise ValueError("vertex ids must be nonnegative integers")
        g = MultiGraph(edges)
        if not g.is_connected():
            raise ValueError("graph is not connected")
        return g

    @property
    def n(self) -> int:
        return len(self.edges)

    def vertices(self) -> set:
        out = set()
        for u, v in self.edges:
            out.add(u)
            out.add(v)
        return out

    def is_connected(self) -> bool:
        verts = self.vertices()
        adjacency: dict = {v: set() for v in verts}
        for u, v in self.edges:
            adjacency[u].add(v)
            adjacency[v].add(u)
        start = next(iter(verts))
        seen = {start}
        stack = [start]
        while stack:
            for w in adjacency[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen == verts


def parse_graph(text: str) -> MultiGraph:
    """Edge list, one 'u v' pair per line; '#' starts a comment; edge ids
    are assigned 1..n in order of appearance."""
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: vertex ids must be integers") from exc
        edges.append((u, v))
    return MultiGraph.from_edges(edges)


def load_graph(path) -> MultiGraph:
    with open(path, encoding="utf-8") as handle:
        return parse_graph(handle.read())


def _parity(sequence: Sequence[int]) -> int:
    inversions = sum(1 for i in range(len(sequence))
                     for j in range(i + 1, len(sequence))
                     if sequence[i] > sequence[j])
    return -1 if inversions % 2 else 1


@dataclass(frozen=True, eq=True)
class FiberTree:
    """Rooted tree whose vertices carry disjoint blocks of edge ids.

    ``blocks`` are kept in the canonical order (sorted by smallest edge
    id); ``parent`` gives the parent index of each block, None at the
    root; ``order`` lists canonical indices in the order the blocks
    were applied, i.e. the chosen representative of the mod-2 order.
    A tree listed with an odd permutation of its blocks is the negative
    of the canonically ordered one.
    """

    blocks: tuple
    parent: tuple
    order: tuple
    degenerate: bool = False

    @property
    def sign(self) -> int:
        return _parity(self.order)

    @property
    def root_index(self) -> int:
        return self.parent.index(None)

    @property
    def root_block(self) -> tuple:
        return self.blocks[self.root_index]

    @property
    def width(self) -> int:
        return len(self.root_block)

    def children(self, i: int) -> list:
        return [j for j, p in enumerate(self.parent) if p == i]

    def canonical(self) -> FiberTree:
        return FiberTree(self.blocks, self.parent,
                         tuple(range(len(self.blocks))), self.degenerate)

    def label(self) -> str:
        n = max(max(b) for b in self.blocks)

        def render(i: int) -> str:
            inner = "{" + format_block(self.blocks[i], n) + "}"
            kids = sorted(self.children(i), key=lambda j: self.blocks[j][0])
            return "(" + inner + "".join(" " + render(j) for j in kids) + ")"

        return render(self.root_index)


def flowchart(g: MultiGraph, order: Sequence[int]) -> FiberTree:
    """Tree of contraction events for a total order on the edges.

    ``order`` lists edge ids in the order they are contracted.  The
    event contracting an edge becomes the parent of the most recent
    prior events that produced the current endpoint clusters of that
    edge (one cluster, hence at most one child, for a loop); the final
    event is the root.
    """
    n = g.n
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError(f"order must be a permutation of 1..{n}")
    uf_parent: dict = {}

    def find(x):
        root = x
        while uf_parent.get(root, root) != root:
            root = uf_parent[root]
        while uf_parent.get(x, x) != x:
            uf_parent[x], x = root, uf_parent[x]
        return root

    last_event: dict = {}
    parent_event = [None] * n
    for t, edge in enumerate(order):
        u, v = g.edges[edge - 1]
        ru, rv = find(u), find(v)
        for r in {ru, rv}:
            prior = last_event.pop(r, None)
            if prior is not None:
                parent_event[prior] = t
        if ru != rv:
            uf_parent[ru] = rv
        last_event[find(u)] = t
    # canonical index of event t is order[t]-1 since blocks are singletons
    parent = [None] * n
    for t in range(n):
        p = parent_event[t]
        if p is not None:
            parent[order[t] - 1] = order[p] - 1
    return FiberTree(
        blocks=tuple((e,) for e in range(1, n + 1)),
        parent=tuple(parent),
        order=tuple(e - 1 for e in order),
    )


def fiber_element(g: MultiGraph, alpha: TOPartition,
                  refinement: Sequence[int] | None = None) -> FiberTree:
    """t_alpha: contract edges block by block (least block last) and fuse
    the flow-chart edges inside each block.

    ``refinement`` may supply the total order used, as long as it lists
    each block contiguously in block order; the result does not depend
    on this choice.  The element is degenerate when some block does not
    stay connected in the flow chart, i.e. the fused tree has more
    vertices than alpha has blocks; degenerate elements are sent to
    zero by the maps below.
    """
    if alpha.n != g.n:
        raise ValueError(f"partition of 1..{alpha.n} does not match {g.n} edges")
    if refinement is None:
        refinement = [e for block in alpha.blocks for e in block]
    else:
        refinement = list(refinement)
        position = 0
        for block in alpha.blocks:
            chunk = refinement[position:position + len(block)]
            if set(chunk) != set(block):
                raise ValueError("refinement does not list the blocks in order")
            position += len(block)
        if position != len(refinement):
            raise ValueError("refinement has the wrong length")
    chart = flowchart(g, refinement)
    k = len(alpha.blocks)
    block_of_edge = {}
    for b, block in enumerate(alpha.blocks):
        for e in block:
            block_of_edge[e] = b
    # fuse tree edges joining events of the same block (union-find on edges)
    fuse: dict = {}

    def find(x):
        root = x
        while fuse.get(root, root) != root:
            root = fuse[root]
        while fuse.get(x, x) != x:
            fuse[x], x = root, fuse[x]
        return root

    chart_parent_edge = {}
    for i, p in enumerate(chart.parent):
        e = chart.blocks[i][0]
        if p is not None:
            chart_parent_edge[e] = chart.blocks[p][0]
    for e, pe in chart_parent_edge.items():
        if block_of_edge[e] == block_of_edge[pe]:
            fuse[find(e)] = find(pe)
    pieces: dict = {}
    for e in range(1, g.n + 1):
        pieces.setdefault(find(e), []).append(e)
    piece_blocks = sorted((tuple(sorted(v)) for v in pieces.values()))
    piece_index = {b: i for i, b in enumerate(piece_blocks)}
    piece_of_edge = {e: piece_index[b] for b in piece_blocks for e in b}
    parent = [None] * len(piece_blocks)
    for e, pe in chart_parent_edge.items():
        if piece_of_edge[e] != piece_of_edge[pe]:
            parent[piece_of_edge[e]] = piece_of_edge[pe]
    degenerate = len(piece_blocks) != k
    if degenerate:
        order = tuple(range(len(piece_blocks)))
    else:
        order = tuple(piece_index[block] for block in alpha.blocks)
    return FiberTree(tuple(piece_blocks), tuple(parent), order, degenerate)


def canonical_representative(tree: FiberTree) -> TOPartition:
    """TO partition applying children before parents (ties broken by the
    smallest edge id), so the root block comes last."""
    remaining = {i: set(tree.children(i)) for i in range(len(tree.blocks))}
    placed: list = []
    ready = sorted((i for i, kids in remaining.items() if not kids),
                   key=lambda i: tree.blocks[i][0])
    pending = {i for i in remaining if remaining[i]}
    while ready:
        i = ready.pop(0)
        placed.append(i)
        p = tree.parent[i]
        if p is not None:
            remaining[p].discard(i)
            if not remaining[p] and p in pending:
                pending.discard(p)
                ready.append(p)
                ready.sort(key=lambda i: tree.blocks[i][0])
    n = max(max(b) for b in tree.blocks)
    return TOPartition(n, tuple(tree.blocks[i] for i in placed))


@dataclass(frozen=True)
class FiberComplex:
    """Chain complex of the fiber over total contraction of ``graph``,
    filtered by width (the size of the root block); the k-block trees
    sit in degree -k."""

    graph: MultiGraph
    filtered: FilteredComplex
    trees: dict       # label -> canonical FiberTree
    preimages: dict   # label -> list of (TOPartition alpha, sign of t_alpha)

    @property
    def complex(self) -> ChainComplex:
        return self.filtered.complex

    @property
    def n(self) -> int:
        return self.graph.n


def _pushforward(g: MultiGraph, alpha: TOPartition) -> dict:
    """Signed image of d(alpha) in the fiber: label -> coefficient."""
    acc: dict = {}
    for term in differential_terms(alpha):
        image = fiber_element(g, term.partition)
        if image.degenerate:
            continue
        lab = image.canonical().label()
        acc[lab] = acc.get(lab, 0) + term.sign * image.sign
    return {lab: v for lab, v in acc.items() if v}


def build_fiber(g: MultiGraph, cap: int = DEFAULT_FIBER_CAP) -> FiberComplex:
    n = g.n
    if n > cap:
        raise ValueError(f"graph has {n} edges, above the cap {cap}")
    trees: dict = {}
    preimages: dict = {}
    for alpha in enumerate_topartitions(n):
        t = fiber_element(g, alpha)
        if t.degenerate:
            continue
        lab = t.canonical().label()
        if lab not in trees:
            trees[lab] = t.canonical()
        preimages.setdefault(lab, []).append((alpha, t.sign))
    basis = {}
    index = {}
    for lab, tree in trees.items():
        basis.setdefault(-len(tree.blocks), []).append(lab)
    for r in basis:
        basis[r] = tuple(sorted(basis[r]))
        index[r] = {lab: i for i, lab in enumerate(basis[r])}
    diffs = {}
    for r in sorted(basis):
        if r - 1 not in basis:
            continue
        entries = {}
        for j, lab in enumerate(basis[r]):
            tree = trees[lab]
            alpha = canonical_representative(tree)
            eps = _parity([tree.blocks.index(b) for b in alpha.blocks])
            for target_lab, value in _pushforward(g, alpha).items():
                entries[(index[r - 1][target_lab], j)] = eps * value
        m = SparseMatrix.from_entries(len(basis[r - 1]), len(basis[r]), entries)
        if m.entries:
            diffs[r] = m
    complex = ChainComplex.build(basis, diffs)
    levels = {lab: trees[lab].width for lab in trees}
    return FiberComplex(g, FilteredComplex.build(complex, levels), trees, preimages)


def _as_fiber(g) -> FiberComplex:
    return g if isinstance(g, FiberComplex) else build_fiber(g)


def perm_to_fiber(g, perm: PermComplex | None = None) -> ChainMap:
    """Chain map of shift -n sending a TO partition alpha to t_alpha
    with the sign relating alpha's block order to the canonical one,
    and to zero when t_alpha is degenerate.  Surjective and width
    preserving; for star graphs it is a degreewise bijection."""
    fiber = _as_fiber(g)
    n = fiber.n
    perm = perm or build_perm(n, cap=max(DEFAULT_FIBER_CAP, n))
    source = perm.complex
    target = fiber.complex
    col_index = {r: {lab: j for j, lab in enumerate(source.labels(r))}
                 for r in source.degrees()}
    entries_by_degree: dict = {}
    for lab, pre in fiber.preimages.items():
        k = len(fiber.trees[lab].blocks)
        r = n - k                      # perm degree of the preimages
        row = fiber.complex.labels(r - n).index(lab)
        for alpha, sign in pre:
            j = col_index[r][alpha.label()]
            entries_by_degree.setdefault(r, {})[(row, j)] = sign
    matrices = {r: SparseMatrix.from_entries(target.dim(r - n), source.dim(r), ent)
                for r, ent in entries_by_degree.items()}
    return ChainMap.build(source, target, -n, matrices, note="alpha -> t_alpha")


def fiber_to_simplex(g, simplex: SimplexComplex | None = None) -> ChainMap:
    """Chain map of shift +n sending a tree whose non-root blocks are all
    singletons to its root block, and every other tree to zero; the
    coefficients are fixed by factoring the permutohedron blow-down
    through the fiber."""
    fiber = _as_fiber(g)
    n = fiber.n
    simplex = simplex or build_simplex(n)
    sidx = {p: {lab: i for i, lab in enumerate(simplex.complex.labels(p - 1))}
            for p in range(1, n + 1)}
    entries_by_degree: dict = {}
    for r in fiber.complex.degrees():
        for j, lab in enumerate(fiber.complex.labels(r)):
            tree = fiber.trees[lab]
            root = tree.root_index
            if any(len(b) != 1 for i, b in enumerate(tree.blocks) if i != root):
                continue
            alpha = canonical_representative(tree)
            eps = _parity([tree.blocks.index(b) for b in alpha.blocks])
            coeff = eps * blowdown_coefficient(alpha)
            row = sidx[tree.width][subset_label(tree.root_block, n)]
            entries_by_degree.setdefault(r, {})[(row, j)] = coeff
    matrices = {r: SparseMatrix.from_entries(
                    simplex.complex.dim(r + n), fiber.complex.dim(r), ent)
                for r, ent in entries_by_degree.items()}
    return ChainMap.build(fiber.complex, simplex.complex, n, matrices,
                          note="root block of singleton-fringe trees")


@dataclass(frozen=True)
class WellDefinednessReport:
    label: str
    passed: bool
    checked: int
    detail: str = ""


def push_forward_well_defined(g, label: str) -> WellDefinednessReport:
    """Check that every TO partition representing a basis tree pushes its
    differential forward to the stored differential of that tree."""
    fiber = _as_fiber(g)
    if label not in fiber.trees:
        raise ValueError(f"{label!r} is not a basis tree of the fiber")
    tree = fiber.trees[label]
    r = -len(tree.blocks)
    col = fiber.complex.labels(r).index(label)
    stored = {}
    d = fiber.complex.d(r)
    target_labels = fiber.complex.labels(r - 1)
    for (i, j), value in d.entries.items():
        if j == col:
            stored[target_labels[i]] = value
    checked = 0
    for alpha, sign in fiber.preimages[label]:
        pushed = {lab: Fraction(v) for lab, v in _pushforward(fiber.graph, alpha).items()}
        expected = {lab: Fraction(sign * value) for lab, value in stored.items()}
        if pushed != expected:
            return WellDefinednessReport(
                label, False, checked,
                detail=f"pushforward of {alpha.pretty()} disagrees")
        checked += 1
    return WellDefinednessReport(label, True, checked)


@dataclass(frozen=True)
class KoszulReport:
    n: int
    d_squared_ok: bool
    homology: dict
    homology_ok: bool
    pages: dict            # r -> PageTable for r = 0, 1, 2
    e1_ok: bool
    e2_ok: bool
    note: str = ("pages indexed by (p, q) = (width, degree - width); "
                 "the binomial row sits at q = -n-1")

    @property
    def passed(self) -> bool:
        return self.d_squared_ok and self.homology_ok and self.e1_ok and self.e2_ok


def _binomial(n: int, p: int) -> int:
    from math import comb
    return comb(n, p)


def koszul_check(g) -> KoszulReport:
    """The fiber has one-dimensional homology in degree -n, its E^1 page
    is a single row of binomial dimensions and E^2 a single class at
    width 1."""
    fiber = _as_fiber(g)
    n = fiber.n
    d2 = verify_d_squared(fiber.complex)
    homology = homology_dims(fiber.complex) if d2.passed else {}
    expected = {r: (1 if r == -n else 0) for r in fiber.complex.degrees()}
    homology_ok = d2.passed and homology == expected
    pages = {r: page_dims(fiber.filtered, r) for r in (0, 1, 2)}
    e1_expected = {(p, -n - 1): _binomial(n, p) for p in range(1, n + 1)}
    e1_ok = pages[1].dims == e1_expected
    e2_ok = pages[2].dims == {(1, -n - 1): 1}
    return KoszulReport(n, d2.passed, homology, homology_ok, pages, e1_ok, e2_ok)
