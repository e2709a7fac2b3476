"""Labeled directed multigraphs with folding and certified rewriting moves.

An ``FGraph`` is a finite directed multigraph whose edges carry positive
generator labels 1..m and which may carry a distinguished base vertex.
Traversing an edge backward reads the inverse letter, so a single stored
edge serves both a generator and its inverse.

The module provides:

* ``bouquet`` -- wedge of loop-paths spelling given words;
* ``fold_all`` -- Stallings folding to a folded graph;
* ``remove_degree_one`` -- strip hanging trees (relocating the base with a
  recorded conjugator when necessary);
* ``apply_M1`` / ``apply_M2`` / ``apply_AO`` -- attach a parallel path with
  an equal-in-G label / remove a redundant subpath / the combined
  attach-then-remove surgery;
* ``free_basis`` / ``maximal_arcs`` / ``trace_word`` -- spanning-tree bases,
  arc decomposition, and deterministic word tracing.

Every move returns a ``MoveRecord`` carrying two-way *basis witnesses*:
for each free-basis loop of the post-move graph, a word over the pre-move
basis whose evaluation equals the loop's label (in the free group for
folds and degree-one removals, in the presented group for M1/M2/AO), and
conversely.  The witness computation rests on one identity: for any walk
``p`` closing at the root of a spanning tree, the label of ``p`` freely
equals the product of the basis words of the non-tree edges ``p`` crosses,
in crossing order; this holds in arbitrary graphs, folded or not, because
tree-path labels telescope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .words import Word, free_reduce, inverse, concat, substitute


@dataclass(frozen=True)
class Path:
    """A walk in an FGraph: a start vertex and (edge id, direction) steps.

    Direction +1 traverses the edge from origin to terminus (reading its
    label), -1 the reverse (reading the inverse letter).
    """

    start: int
    steps: tuple = ()

    def __len__(self) -> int:
        return len(self.steps)

    def reversed_from(self, end: int) -> "Path":
        return Path(end, tuple((e, -d) for e, d in reversed(self.steps)))


@dataclass
class MoveRecord:
    """One graph move with enough data to replay and to certify bases.

    ``post_in_pre[j]`` is a word over pre-basis symbols (letter k stands
    for pre-basis element k) whose evaluation at ``pre_basis`` equals
    ``post_basis[j]`` -- freely for Fold/R, in the presented group for
    M1/M2/AO.  ``pre_in_post`` is the converse direction.  For a
    base-moving R the relation is conjugated: label(post_j) equals
    conjugator^-1 * Eval(post_in_pre[j]) * conjugator, and symmetrically
    pre_i equals conjugator * Eval(pre_in_post[i]) * conjugator^-1.
    """

    kind: str  # "Fold" | "R" | "M1" | "M2" | "AO"
    vertex_map: dict  # pre vertex -> post vertex (removed vertices absent)
    edge_map: dict  # pre edge -> post edge (removed edges absent)
    added_vertices: tuple = ()
    added_edges: tuple = ()  # (edge id, origin, terminus, label) in post ids
    pre_basis: tuple = ()
    post_basis: tuple = ()
    post_in_pre: tuple = ()
    pre_in_post: tuple = ()
    conjugator: Word = ()
    detail: dict = field(default_factory=dict)

    def replay_edges(self, pre_edges: dict) -> list:
        """Apply this record's maps to a pre-move edge table.

        ``pre_edges`` maps edge id -> (origin, terminus, label).  Returns
        the sorted post-move edge list [(id, o, t, label), ...] for
        comparison with the actual post graph.
        """
        out = {}
        for eid, (o, t, lbl) in pre_edges.items():
            if eid not in self.edge_map:
                continue
            nid = self.edge_map[eid]
            no = self.vertex_map[o]
            nt = self.vertex_map[t]
            if nid in out:
                assert out[nid] == (no, nt, lbl)
            out[nid] = (no, nt, lbl)
        for eid, o, t, lbl in self.added_edges:
            out[eid] = (o, t, lbl)
        return sorted((eid, o, t, lbl) for eid, (o, t, lbl) in out.items())


class FGraph:
    """Mutable labeled multigraph with optional base vertex."""

    def __init__(self):
        self.vertices: set[int] = set()
        self.edges: dict[int, tuple[int, int, int]] = {}
        self.base: Optional[int] = None
        self._out: dict[int, set[int]] = {}
        self._in: dict[int, set[int]] = {}
        self._next_vertex = 0
        self._next_edge = 0

    # -- construction -----------------------------------------------------

    def add_vertex(self) -> int:
        v = self._next_vertex
        self._next_vertex += 1
        self.vertices.add(v)
        self._out[v] = set()
        self._in[v] = set()
        return v

    def add_edge(self, o: int, t: int, label: int) -> int:
        if label < 1:
            raise ValueError("edge labels are positive generator indices")
        if o not in self.vertices or t not in self.vertices:
            raise ValueError("edge endpoint is not a vertex")
        e = self._next_edge
        self._next_edge += 1
        self.edges[e] = (o, t, label)
        self._out[o].add(e)
        self._in[t].add(e)
        return e

    @staticmethod
    def from_edges(edge_list: Iterable[tuple], base: Optional[int] = None) -> "FGraph":
        """Build a graph from (origin, terminus, label) triples.

        Vertex ids are assigned to cover all mentioned endpoints.
        """
        g = FGraph()
        seen = sorted({v for o, t, _ in edge_list for v in (o, t)} | ({base} if base is not None else set()))
        remap = {}
        for v in seen:
            remap[v] = g.add_vertex()
        for o, t, lbl in edge_list:
            g.add_edge(remap[o], remap[t], lbl)
        if base is not None:
            g.base = remap[base]
        return g

    def copy(self) -> "FGraph":
        g = FGraph()
        g.vertices = set(self.vertices)
        g.edges = dict(self.edges)
        g.base = self.base
        g._out = {v: set(s) for v, s in self._out.items()}
        g._in = {v: set(s) for v, s in self._in.items()}
        g._next_vertex = self._next_vertex
        g._next_edge = self._next_edge
        return g

    # -- mutation primitives (internal) -----------------------------------

    def _remove_edge(self, e: int) -> None:
        o, t, _ = self.edges.pop(e)
        self._out[o].discard(e)
        self._in[t].discard(e)

    def _remove_isolated_vertex(self, v: int) -> None:
        if self._out[v] or self._in[v]:
            raise ValueError("vertex is not isolated")
        self.vertices.discard(v)
        del self._out[v]
        del self._in[v]

    def _merge_vertices(self, keep: int, drop: int) -> None:
        if keep == drop:
            return
        for e in list(self._out[drop]):
            o, t, lbl = self.edges[e]
            self.edges[e] = (keep, t if t != drop else keep, lbl)
            self._out[drop].discard(e)
            self._out[keep].add(e)
            if t == drop:
                self._in[drop].discard(e)
                self._in[keep].add(e)
        for e in list(self._in[drop]):
            o, t, lbl = self.edges[e]
            self.edges[e] = (o if o != drop else keep, keep, lbl)
            self._in[drop].discard(e)
            self._in[keep].add(e)
            if o == drop:
                self._out[drop].discard(e)
                self._out[keep].add(e)
        self._remove_isolated_vertex(drop)
        if self.base == drop:
            self.base = keep

    # -- basic queries ------------------------------------------------------

    def degree(self, v: int) -> int:
        """Degree with loops counted twice."""
        return len(self._out[v]) + len(self._in[v])

    def num_edges(self) -> int:
        return len(self.edges)

    def num_vertices(self) -> int:
        return len(self.vertices)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = set()
        stack = [min(self.vertices)]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            for e in self._out[v]:
                stack.append(self.edges[e][1])
            for e in self._in[v]:
                stack.append(self.edges[e][0])
        return len(seen) == len(self.vertices)

    def rank(self) -> int:
        """First Betti number E - V + 1 of a connected graph."""
        if not self.is_connected():
            raise ValueError("rank requires a connected graph")
        return len(self.edges) - len(self.vertices) + 1

    def is_folded(self) -> bool:
        for v in self.vertices:
            out_labels = [self.edges[e][2] for e in self._out[v]]
            if len(out_labels) != len(set(out_labels)):
                return False
            in_labels = [self.edges[e][2] for e in self._in[v]]
            if len(in_labels) != len(set(in_labels)):
                return False
        return True

    def step_ends(self, e: int, d: int) -> tuple[int, int]:
        o, t, _ = self.edges[e]
        return (o, t) if d > 0 else (t, o)

    def step_letter(self, e: int, d: int) -> int:
        lbl = self.edges[e][2]
        return lbl if d > 0 else -lbl

    def path_end(self, p: Path) -> int:
        cur = p.start
        for e, d in p.steps:
            f, t = self.step_ends(e, d)
            if f != cur:
                raise ValueError("path steps are not consecutive")
            cur = t
        return cur

    def path_letters(self, p: Path) -> Word:
        """Raw letter sequence along the path (not freely reduced)."""
        return tuple(self.step_letter(e, d) for e, d in p.steps)

    def path_label(self, p: Path) -> Word:
        return free_reduce(self.path_letters(p))

    def path_is_reduced(self, p: Path) -> bool:
        return all(not (p.steps[i][0] == p.steps[i + 1][0]
                        and p.steps[i][1] == -p.steps[i + 1][1])
                   for i in range(len(p.steps) - 1))

    def dump(self) -> str:
        """Deterministic debug dump: base line then one line per edge."""
        lines = [f"base {self.base}"]
        for e in sorted(self.edges):
            o, t, lbl = self.edges[e]
            lines.append(f"{o}->{t}:{lbl}")
        return "\n".join(lines)

    # -- spanning tree and basis -------------------------------------------

    def _bfs_tree(self, root: int):
        """Breadth-first spanning tree from root, ties by lowest edge id.

        Returns (parent, tree_edges) where parent[v] = (pv, edge, dir)
        gives the tree step pv -> v, and parent[root] = None.
        """
        if root not in self.vertices:
            raise ValueError(f"root {root!r} is not a vertex")
        parent = {root: None}
        tree_edges = set()
        queue = [root]
        qi = 0
        while qi < len(queue):
            v = queue[qi]
            qi += 1
            for e in sorted(self._out[v] | self._in[v]):
                o, t, _ = self.edges[e]
                if o == v and t not in parent:
                    parent[t] = (v, e, 1)
                    tree_edges.add(e)
                    queue.append(t)
                if t == v and o not in parent:
                    parent[o] = (v, e, -1)
                    tree_edges.add(e)
                    queue.append(o)
        if len(parent) != len(self.vertices):
            raise ValueError("graph is not connected")
        return parent, tree_edges

    def _tree_path_steps(self, parent, v: int) -> tuple:
        """Steps of the tree path root -> v."""
        rev = []
        while parent[v] is not None:
            pv, e, d = parent[v]
            rev.append((e, d))
            v = pv
        return tuple(reversed(rev))

    def basis_data(self, root: int):
        """Spanning tree plus basis loops at root.

        Returns (parent, nontree, loops, labels): nontree is the non-tree
        edge list sorted by (label, id) -- this order makes the basis of
        the alphabet bouquet come out as (a_1, ..., a_m) literally --
        loops[j] is the Path for nontree[j], labels[j] its reduced label.
        """
        parent, tree_edges = self._bfs_tree(root)
        nontree = sorted((e for e in self.edges if e not in tree_edges),
                         key=lambda e: (self.edges[e][2], e))
        loops = []
        labels = []
        for e in nontree:
            o, t, _ = self.edges[e]
            steps = (self._tree_path_steps(parent, o)
                     + ((e, 1),)
                     + Path(0, self._tree_path_steps(parent, t)).reversed_from(0).steps)
            p = Path(root, steps)
            loops.append(p)
            labels.append(self.path_label(p))
        return parent, nontree, tuple(loops), tuple(labels)

    def free_basis(self, root: Optional[int] = None) -> tuple:
        """Labels of the spanning-tree basis loops at root (default base)."""
        if root is None:
            root = self.base
        if root is None:
            raise ValueError("no root given and graph has no base")
        return self.basis_data(root)[3]

    def crossing_read(self, tree_edges_or_index, path: Path) -> Word:
        """Express a root-closed walk in basis symbols by its crossings.

        ``tree_edges_or_index`` is a dict non-tree edge -> 1-based symbol.
        The result freely equals the walk's label after substituting the
        basis labels for the symbols, in any graph.
        """
        index = tree_edges_or_index
        out = []
        for e, d in path.steps:
            j = index.get(e)
            if j is not None:
                out.append(j if d > 0 else -j)
        return free_reduce(out)

    # -- tracing -------------------------------------------------------------

    def trace_word(self, start: int, w: Sequence[int]) -> Optional[Path]:
        """The unique path from start spelling w in a folded graph."""
        if start not in self.vertices:
            raise ValueError("start is not a vertex")
        if not self.is_folded():
            raise ValueError("trace_word requires a folded graph")
        cur = start
        steps = []
        for x in w:
            nxt = self._step_from(cur, x)
            if nxt is None:
                return None
            steps.append(nxt[0])
            cur = nxt[1]
        return Path(start, tuple(steps))

    def _step_from(self, v: int, x: int):
        """((edge, dir), next vertex) reading letter x from v, if any."""
        if x > 0:
            for e in self._out[v]:
                if self.edges[e][2] == x:
                    return (e, 1), self.edges[e][1]
        else:
            for e in self._in[v]:
                if self.edges[e][2] == -x:
                    return (e, -1), self.edges[e][0]
        return None


# ---------------------------------------------------------------------------
# Construction


def bouquet(ws: Sequence[Word]) -> FGraph:
    """Wedge of loop-paths at a single base vertex, one per word."""
    g = FGraph()
    base = g.add_vertex()
    g.base = base
    for w in ws:
        if not w:
            raise ValueError("bouquet words must be nontrivial")
        cur = base
        for i, x in enumerate(w):
            nxt = base if i == len(w) - 1 else g.add_vertex()
            if x > 0:
                g.add_edge(cur, nxt, x)
            else:
                g.add_edge(nxt, cur, -x)
            cur = nxt
    return g


def is_alphabet_bouquet(g: FGraph, m: int) -> bool:
    """Whether g is a single base vertex with one loop per generator."""
    if len(g.vertices) != 1 or len(g.edges) != m or g.base is None:
        return False
    labels = sorted(lbl for _, _, lbl in g.edges.values())
    return labels == list(range(1, m + 1))


# ---------------------------------------------------------------------------
# Folding


def _find_conflict(g: FGraph):
    """First foldable pair: lowest vertex, outgoing before incoming,
    lowest label, two lowest edge ids."""
    for v in sorted(g.vertices):
        for side in (g._out, g._in):
            by_label: dict[int, list[int]] = {}
            for e in side[v]:
                by_label.setdefault(g.edges[e][2], []).append(e)
            for lbl in sorted(by_label):
                if len(by_label[lbl]) >= 2:
                    es = sorted(by_label[lbl])
                    return v, side is g._out, es[0], es[1]
    return None


def _build_pre_path(g_pre_edges, base_pre, post_path: Path, e1: int, e2: int,
                    connector):
    """Lift a post-fold walk to the pre-fold graph.

    Steps map back one-to-one except that the surviving edge also stands
    for the folded-away edge; whenever endpoints jump across the merged
    vertex pair, a freely-trivial connector through the fold site is
    inserted.  ``g_pre_edges`` maps edge -> (o, t) pre endpoints.
    """
    steps = []
    cur = base_pre
    for e, d in post_path.steps:
        cands = (e1, e2) if e == e1 else (e,)
        chosen = None
        for c in cands:
            o, t = g_pre_edges[c]
            f, to = (o, t) if d > 0 else (t, o)
            if f == cur:
                chosen = (c, d, to)
                break
        if chosen is None:
            # jump across the merged pair, then retry
            for c in cands:
                o, t = g_pre_edges[c]
                f, to = (o, t) if d > 0 else (t, o)
                conn = connector(cur, f)
                if conn is not None:
                    steps.extend(conn)
                    chosen = (c, d, to)
                    break
        if chosen is None:
            raise AssertionError("fold lift failed to connect")
        steps.append((chosen[0], chosen[1]))
        cur = chosen[2]
    if cur != base_pre:
        conn = connector(cur, base_pre)
        if conn is None:
            raise AssertionError("fold lift failed to close")
        steps.extend(conn)
    return Path(base_pre, tuple(steps))


def fold_all(g: FGraph) -> list[MoveRecord]:
    """Fold until no vertex has two same-label outgoing or incoming edges.

    Mutates g; one MoveRecord per individual fold, each decreasing the
    edge count by exactly one and never increasing the rank.  Fold order
    is deterministic: lowest conflict vertex first, outgoing before
    incoming, lowest label, lowest pair of edge ids.
    """
    if g.base is None:
        raise ValueError("folding tracks bases; set g.base first")
    records: list[MoveRecord] = []
    pre = g.basis_data(g.base)
    while True:
        hit = _find_conflict(g)
        if hit is None:
            break
        v, outgoing, e1, e2 = hit
        pre_parent, pre_nontree, pre_loops, pre_labels = pre
        pre_index = {e: j + 1 for j, e in enumerate(pre_nontree)}
        pre_ends = {e: (o, t) for e, (o, t, _) in g.edges.items()}
        base_pre = g.base
        rank_pre = g.rank()
        if outgoing:
            far1, far2 = g.edges[e1][1], g.edges[e2][1]
        else:
            far1, far2 = g.edges[e1][0], g.edges[e2][0]

        def connector(a, b, far1=far1, far2=far2, e1=e1, e2=e2, outgoing=outgoing):
            if a == b:
                return ()
            if {a, b} != {far1, far2}:
                return None
            if outgoing:
                first, second = ((e1, -1), (e2, 1))
            else:
                first, second = ((e1, 1), (e2, -1))
            if a == far1:
                return (first, second)
            return ((second[0], -second[1]), (first[0], -first[1]))

        # mutate: merge e2 into e1, far vertices together
        g._remove_edge(e2)
        keep = drop = None
        if far1 != far2:
            keep, drop = min(far1, far2), max(far1, far2)
            g._merge_vertices(keep, drop)

        vertex_map = {u: u for u in g.vertices}
        if drop is not None:
            vertex_map[drop] = keep
        edge_map = {e: e for e in g.edges}
        edge_map[e2] = e1

        post = g.basis_data(g.base)
        post_parent, post_nontree, post_loops, post_labels = post
        post_index = {e: j + 1 for j, e in enumerate(post_nontree)}

        post_in_pre = []
        for lp in post_loops:
            pre_path = _build_pre_path(pre_ends, base_pre, lp, e1, e2, connector)
            post_in_pre.append(FGraph.crossing_read(g, pre_index, pre_path))
        pre_in_post = []
        for lp in pre_loops:
            mapped = tuple((edge_map[e], d) for e, d in lp.steps)
            pre_in_post.append(FGraph.crossing_read(g, post_index, Path(g.base, mapped)))

        # folds are exact in the free group: verify by free reduction
        for j, w in enumerate(post_in_pre):
            assert substitute(w, pre_labels) == post_labels[j]
        for i, w in enumerate(pre_in_post):
            assert substitute(w, post_labels) == pre_labels[i]
        assert g.rank() <= rank_pre

        records.append(MoveRecord(
            kind="Fold",
            vertex_map=vertex_map,
            edge_map=edge_map,
            pre_basis=pre_labels,
            post_basis=post_labels,
            post_in_pre=tuple(post_in_pre),
            pre_in_post=tuple(pre_in_post),
            detail={"at_vertex": v, "outgoing": outgoing, "edges": (e1, e2)},
        ))
        pre = post
    return records


# ---------------------------------------------------------------------------
# Degree-one removal


def remove_degree_one(g: FGraph) -> list[MoveRecord]:
    """Strip degree-one vertices, lowest id first, one record per removal.

    When the base itself is a leaf it hops across its edge and the record
    carries the one-letter conjugator; accumulated over a hanging path
    this is the path's label, relating old-base loops to new-base loops by
    conjugation.
    """
    if g.base is None:
        raise ValueError("degree-one removal tracks bases; set g.base first")
    records: list[MoveRecord] = []
    while True:
        leaves = sorted(v for v in g.vertices if g.degree(v) == 1)
        if not leaves:
            break
        v = leaves[0]
        e = next(iter(g._out[v] | g._in[v]))
        o, t, lbl = g.edges[e]
        far = t if o == v else o
        pre_labels = g.free_basis()
        conjugator: Word = ()
        if v == g.base:
            conjugator = (lbl,) if o == v else (-lbl,)
            g.base = far
        g._remove_edge(e)
        g._remove_isolated_vertex(v)
        post_labels = g.free_basis()
        k = len(post_labels)
        assert len(pre_labels) == k
        identity = tuple((j + 1,) for j in range(k))
        for j in range(k):
            expected = free_reduce(concat(inverse(conjugator), pre_labels[j], conjugator))
            assert post_labels[j] == expected
        records.append(MoveRecord(
            kind="R",
            vertex_map={u: u for u in g.vertices},
            edge_map={eid: eid for eid in g.edges},
            pre_basis=pre_labels,
            post_basis=post_labels,
            post_in_pre=identity,
            pre_in_post=identity,
            conjugator=conjugator,
            detail={"removed_vertex": v, "removed_edge": e},
        ))
    return records


# ---------------------------------------------------------------------------
# Arc decomposition


@dataclass(frozen=True)
class Arc:
    """A maximal path whose interior vertices have degree two."""

    index: int
    steps: tuple  # (edge, dir) steps from one endpoint to the other
    closed: bool

    def edge_set(self) -> frozenset:
        return frozenset(e for e, _ in self.steps)


def maximal_arcs(g: FGraph) -> list[Arc]:
    """Partition the edges into maximal arcs.

    Requires a connected graph with no degree-one vertices.  A lone cycle
    (every vertex degree two) is returned as a single closed arc.
    """
    if any(g.degree(v) == 1 for v in g.vertices):
        raise ValueError("arc decomposition requires no degree-one vertices")
    used: set[int] = set()
    arcs: list[Arc] = []

    def stubs(v):
        out = [(e, 1) for e in g._out[v]]
        inn = [(e, -1) for e in g._in[v]]
        return sorted(out + inn)

    def walk(v, e, d):
        steps = [(e, d)]
        used.add(e)
        cur = g.step_ends(e, d)[1]
        while g.degree(cur) == 2 and cur != v:
            nxt = None
            for e2, d2 in stubs(cur):
                if e2 in used:
                    continue
                nxt = (e2, d2)
                break
            if nxt is None:
                break
            steps.append(nxt)
            used.add(nxt[0])
            cur = g.step_ends(nxt[0], nxt[1])[1]
        return steps, cur

    junctions = sorted(v for v in g.vertices if g.degree(v) != 2)
    for v in junctions:
        for e, d in stubs(v):
            if e in used:
                continue
            steps, end = walk(v, e, d)
            arcs.append(Arc(len(arcs), tuple(steps), closed=(end == v)))
    # leftover lone cycles (all degree two)
    for v in sorted(g.vertices):
        for e, d in stubs(v):
            if e in used:
                continue
            steps, end = walk(v, e, d)
            assert end == v
            arcs.append(Arc(len(arcs), tuple(steps), closed=True))
    assert sum(len(a.steps) for a in arcs) == len(g.edges)
    return arcs


# ---------------------------------------------------------------------------
# Run replacement (shared by M1 / M2 / AO witnesses)


def _replace_runs(loop: Path, target: Sequence[tuple], replacement: Sequence[tuple]) -> Path:
    """Replace every traversal of the step sequence ``target`` in ``loop``.

    ``target``'s interior vertices must be passable only along it (degree
    two), so any use of its edges is a full forward or backward run; each
    forward run becomes ``replacement``, each backward run its reverse.
    """
    if not target:
        return loop
    pos = {e: i for i, (e, _) in enumerate(target)}
    assert len(pos) == len(target), "target steps must use distinct edges"
    out = []
    steps = loop.steps
    i = 0
    n = len(target)
    while i < len(steps):
        e, d = steps[i]
        k = pos.get(e)
        if k is None:
            out.append(steps[i])
            i += 1
            continue
        if d == target[k][1]:
            assert k == 0, "partial forward entry into replaced path"
            assert tuple(steps[i:i + n]) == tuple(target), "broken forward run"
            out.extend(replacement)
            i += n
        else:
            assert k == n - 1, "partial backward entry into replaced path"
            expect = tuple((te, -td) for te, td in reversed(target))
            assert tuple(steps[i:i + n]) == expect, "broken backward run"
            out.extend((re, -rd) for re, rd in reversed(replacement))
            i += n
    return Path(loop.start, tuple(out))


def _structural_path_check(g: FGraph, p: Path) -> None:
    g.path_end(p)  # raises if steps are not consecutive
    if not g.path_is_reduced(p):
        raise ValueError("path must be reduced")


# ---------------------------------------------------------------------------
# M1: attach a parallel path


def apply_M1(g: FGraph, p: Path, v_prime: Word) -> MoveRecord:
    """Attach a new path from o(p) to t(p) spelling v_prime.

    The caller certifies that the label of p equals v_prime in the
    presented group; the move itself checks structure only.  Rank
    increases by exactly one.
    """
    if not v_prime:
        raise ValueError("M1 requires a nonempty attached word")
    _structural_path_check(g, p)
    start = p.start
    end = g.path_end(p)
    pre_parent, pre_nontree, pre_loops, pre_labels = g.basis_data(g.base)
    rank_pre = g.rank()

    added_vertices = []
    added_edges = []
    new_steps = []
    cur = start
    for i, x in enumerate(v_prime):
        nxt = end if i == len(v_prime) - 1 else g.add_vertex()
        if nxt != end:
            added_vertices.append(nxt)
        if x > 0:
            e = g.add_edge(cur, nxt, x)
            new_steps.append((e, 1))
        else:
            e = g.add_edge(nxt, cur, -x)
            new_steps.append((e, -1))
        added_edges.append((e, *g.edges[e]))
        cur = nxt

    post_parent, post_nontree, post_loops, post_labels = g.basis_data(g.base)
    post_index = {e: j + 1 for j, e in enumerate(post_nontree)}
    pre_index = {e: j + 1 for j, e in enumerate(pre_nontree)}

    pre_in_post = tuple(FGraph.crossing_read(g, post_index, lp) for lp in pre_loops)
    post_in_pre = tuple(
        FGraph.crossing_read(g, pre_index, _replace_runs(lp, new_steps, p.steps))
        for lp in post_loops)
    assert g.rank() == rank_pre + 1

    return MoveRecord(
        kind="M1",
        vertex_map={u: u for u in g.vertices if u not in added_vertices},
        edge_map={e: e for e in g.edges if e not in {a[0] for a in added_edges}},
        added_vertices=tuple(added_vertices),
        added_edges=tuple(added_edges),
        pre_basis=pre_labels,
        post_basis=post_labels,
        post_in_pre=post_in_pre,
        pre_in_post=pre_in_post,
        detail={"path_start": start, "path_end": end, "attached": v_prime},
    )


# ---------------------------------------------------------------------------
# M2: remove a redundant subpath


def _check_inside_one_arc(g: FGraph, p: Path) -> None:
    arcs = maximal_arcs(g)
    owner = {}
    for a in arcs:
        for e, _ in a.steps:
            owner[e] = a.index
    ids = {owner[e] for e, _ in p.steps}
    if len(ids) != 1:
        raise ValueError("path must lie inside a single maximal arc")


def apply_M2(g: FGraph, p: Path, alt: Path) -> MoveRecord:
    """Remove the edges of p, a simple path inside one maximal arc.

    ``alt``, sharing no edges with p, must run from o(p) to t(p) with a
    label the caller certifies equal in the presented group.  Rank
    decreases by exactly one; the graph must stay connected.
    """
    _structural_path_check(g, p)
    if not p.steps:
        raise ValueError("M2 requires a nonempty path")
    p_edges = [e for e, _ in p.steps]
    if len(set(p_edges)) != len(p_edges):
        raise ValueError("M2 path must be simple")
    _check_inside_one_arc(g, p)
    g.path_end(alt)
    if alt.start != p.start or g.path_end(alt) != g.path_end(p):
        raise ValueError("alternative path must share endpoints with p")
    if set(e for e, _ in alt.steps) & set(p_edges):
        raise ValueError("alternative path may not use edges of p")

    # connectivity after removal
    trial = g.copy()
    for e in p_edges:
        trial._remove_edge(e)
    for v in [u for u in trial.vertices if trial.degree(u) == 0 and u != trial.base]:
        trial._remove_isolated_vertex(v)
    if not trial.is_connected() or (g.base is not None and g.base not in trial.vertices):
        raise ValueError("removal would disconnect the graph")

    pre_parent, pre_nontree, pre_loops, pre_labels = g.basis_data(g.base)
    rank_pre = g.rank()

    removed_vertices = []
    for e in p_edges:
        g._remove_edge(e)
    for v in sorted(g.vertices):
        if g.degree(v) == 0 and v != g.base:
            g._remove_isolated_vertex(v)
            removed_vertices.append(v)

    post_parent, post_nontree, post_loops, post_labels = g.basis_data(g.base)
    post_index = {e: j + 1 for j, e in enumerate(post_nontree)}
    pre_index = {e: j + 1 for j, e in enumerate(pre_nontree)}

    post_in_pre = tuple(FGraph.crossing_read(g, pre_index, lp) for lp in post_loops)
    pre_in_post = tuple(
        FGraph.crossing_read(g, post_index, _replace_runs(lp, p.steps, alt.steps))
        for lp in pre_loops)
    assert g.rank() == rank_pre - 1

    return MoveRecord(
        kind="M2",
        vertex_map={u: u for u in g.vertices},
        edge_map={e: e for e in g.edges},
        pre_basis=pre_labels,
        post_basis=post_labels,
        post_in_pre=post_in_pre,
        pre_in_post=pre_in_post,
        detail={"removed_edges": tuple(p_edges),
                "removed_vertices": tuple(removed_vertices)},
    )


# ---------------------------------------------------------------------------
# AO: attach a short bypass, remove a long subpath


def apply_AO(g: FGraph, p1: Path, p_prime: Path, p2: Path, y: Word) -> MoveRecord:
    """The combined surgery: attach a path labeled y from t(p) to o(p),
    where p = p1 * p_prime * p2, then remove the edges of p_prime.

    The caller certifies label(p1) label(p_prime) label(p2) y = 1 in the
    presented group.  Structural requirements: the composite is a reduced
    path; p_prime is simple, lies inside one maximal arc, shares no edge
    with p1 or p2, does not contain the base as an interior vertex; and
    |p_prime| > |y| so the edge count strictly decreases.  An empty y is
    allowed only when the composite is a closed path (then the move is a
    pure removal and the rank drops by one; otherwise rank is unchanged).
    """
    if not p_prime.steps:
        raise ValueError("AO requires a nonempty removed path")
    # compose and validate
    steps = p1.steps + p_prime.steps + p2.steps
    start = p1.start if p1.steps else p_prime.start
    p = Path(start, steps)
    _structural_path_check(g, p)
    end = g.path_end(p)
    if g.path_end(Path(start, p1.steps)) != p_prime.start:
        raise ValueError("p1 must end where p_prime starts")
    pp_edges = [e for e, _ in p_prime.steps]
    if len(set(pp_edges)) != len(pp_edges):
        raise ValueError("AO removed path must be simple")
    _check_inside_one_arc(g, p_prime)
    outside = {e for e, _ in p1.steps} | {e for e, _ in p2.steps}
    if outside & set(pp_edges):
        raise ValueError("p1/p2 may not share edges with the removed path")
    if len(p_prime.steps) <= len(y):
        raise ValueError("AO requires |p_prime| > |y|")
    if not y and start != end:
        raise ValueError("empty y requires a closed composite path")
    # interior vertices of p_prime
    interior = []
    cur = p_prime.start
    for e, d in p_prime.steps[:-1]:
        cur = g.step_ends(e, d)[1]
        interior.append(cur)
    if g.base in interior:
        raise ValueError("removed path may not contain the base as interior")

    pre_parent, pre_nontree, pre_loops, pre_labels = g.basis_data(g.base)
    rank_pre = g.rank()
    edges_pre = g.num_edges()

    # attach f: t(p) -> o(p) labeled y
    added_vertices = []
    added_edges = []
    f_steps = []
    cur = end
    for i, x in enumerate(y):
        nxt = start if i == len(y) - 1 else g.add_vertex()
        if nxt != start:
            added_vertices.append(nxt)
        if x > 0:
            e = g.add_edge(cur, nxt, x)
            f_steps.append((e, 1))
        else:
            e = g.add_edge(nxt, cur, -x)
            f_steps.append((e, -1))
        added_edges.append((e, *g.edges[e]))
        cur = nxt

    # remove p_prime
    removed_vertices = []
    for e in pp_edges:
        g._remove_edge(e)
    for v in sorted(set(interior)):
        if g.degree(v) == 0:
            g._remove_isolated_vertex(v)
            removed_vertices.append(v)
    if not g.is_connected():
        raise AssertionError("AO detour failed to keep the graph connected")

    post_parent, post_nontree, post_loops, post_labels = g.basis_data(g.base)
    post_index = {e: j + 1 for j, e in enumerate(post_nontree)}
    pre_index = {e: j + 1 for j, e in enumerate(pre_nontree)}

    # pre loops: each p_prime-run detours along p1^-1 f^-1 p2^-1
    detour = (Path(0, p1.steps).reversed_from(0).steps
              + Path(0, tuple(f_steps)).reversed_from(0).steps
              + Path(0, p2.steps).reversed_from(0).steps)
    pre_in_post = tuple(
        FGraph.crossing_read(g, post_index, _replace_runs(lp, p_prime.steps, detour))
        for lp in pre_loops)
    # post loops: each f-run is replaced by the reverse of p
    rev_p = Path(0, p.steps).reversed_from(0).steps
    post_in_pre = tuple(
        FGraph.crossing_read(g, pre_index, _replace_runs(lp, tuple(f_steps), rev_p))
        for lp in post_loops)

    assert g.num_edges() == edges_pre - len(pp_edges) + len(y)
    assert g.rank() == (rank_pre if y else rank_pre - 1)

    return MoveRecord(
        kind="AO",
        vertex_map={u: u for u in g.vertices if u not in added_vertices},
        edge_map={e: e for e in g.edges if e not in {a[0] for a in added_edges}},
        added_vertices=tuple(added_vertices),
        added_edges=tuple(added_edges),
        pre_basis=pre_labels,
        post_basis=post_labels,
        post_in_pre=post_in_pre,
        pre_in_post=pre_in_post,
        detail={"removed_edges": tuple(pp_edges),
                "removed_vertices": tuple(removed_vertices),
                "attached": y},
    )
