"""Decide whether a word can be spelled by a path in a small labeled graph.

A reduced word ``w`` of length ``l`` is *readable* under an edge budget
``mu`` (an exact rational with ``0 < mu <= 1``) and a rank bound if some
connected folded graph ``G`` with at most ``mu * l`` edges and rank at
most the bound contains a path spelling ``w``.  Optionally the graph must
also have a vertex of degree below ``2 * m`` (a "free slot"), where ``m``
is the alphabet rank.

Searching only folded graphs, and only the subgraph actually traversed by
the path, loses no generality:

* a path spelling a reduced word never backtracks across an edge, so it
  is automatically a reduced path;
* restricting a witness graph to the image of its path keeps the path
  while lowering the edge count and the rank;
* folding a witness merges parallel equal-label edges, again lowering the
  edge count and the rank without disturbing the spelled word;
* for the free-slot variant, restriction is still safe: if the original
  witness was connected, folded, and strictly larger than the path image,
  then connectivity hands some path-image vertex an extra incident edge
  that restriction removes, so the restricted graph has a vertex with an
  open slot (degree below ``2 * m``); if the witness equals its path
  image the property carries over verbatim.

``is_readable`` therefore runs a depth-first search over partial walks:
read ``w`` letter by letter, and at each step either follow the unique
existing edge (foldedness forces it), open a new edge to an existing
vertex whose matching slot is free, or open a new edge to a fresh vertex.
Along any branch the edge count and the rank only ever grow, so the edge
budget and the rank bound prune exactly.  Failed states are memoised
under a canonical relabeling, and an optional node budget turns the
answer into ``Unknown`` instead of letting the search run long.

``oracle_is_readable`` is an independent brute-force check for short
words: it enumerates every partition of the ``l + 1`` path vertices
(restricted growth strings), folds each quotient to closure, and tests
the resulting graph against the same constraints.  Results are cached
per equivalence class under relabeling/inverting generators and word
reversal, which commute with quotients and folding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Optional

from .fgraph import FGraph, Path
from .words import Word, inverse, is_reduced, word_key

READABLE = "Readable"
NOT_READABLE = "NotReadable"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ReadabilityQuery:
    """One readability question: word, alphabet rank, and constraints.

    ``mu`` is kept as an exact :class:`~fractions.Fraction`; the edge
    budget means ``E * mu.denominator <= mu.numerator * len(word)``.
    ``rank_bound`` caps the witness graph's rank.  With
    ``require_low_degree`` the witness must in addition have a vertex of
    degree below ``2 * m``.  ``node_budget`` caps the number of search
    states the solver may expand before giving up with ``Unknown``.
    """

    word: Word
    m: int
    mu: Fraction
    rank_bound: int
    require_low_degree: bool = False
    node_budget: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))
        object.__setattr__(self, "mu", Fraction(self.mu))
        if self.m < 1:
            raise ValueError("alphabet rank must be at least 1")
        if not self.word:
            raise ValueError("word must be nonempty")
        if not is_reduced(self.word):
            raise ValueError("word must be freely reduced")
        for x in self.word:
            if not 1 <= abs(x) <= self.m:
                raise ValueError(f"letter {x} outside alphabet of rank {self.m}")
        if not 0 < self.mu <= 1:
            raise ValueError("edge budget mu must satisfy 0 < mu <= 1")
        if self.rank_bound < 0:
            raise ValueError("rank bound must be nonnegative")
        if self.node_budget is not None and self.node_budget <= 0:
            raise ValueError("node budget must be positive")

    @property
    def edge_budget(self) -> int:
        """Largest edge count allowed: floor(mu * len(word))."""
        return (self.mu.numerator * len(self.word)) // self.mu.denominator


@dataclass(frozen=True)
class ReadabilityAnswer:
    """Outcome of a readability search.

    ``verdict`` is one of ``READABLE``, ``NOT_READABLE``, ``UNKNOWN``.
    For a positive answer ``graph`` and ``path`` carry a witness: a
    folded connected graph and a path in it spelling the queried word.
    ``nodes_expanded`` counts search states visited.
    """

    verdict: str
    graph: Optional[FGraph] = None
    path: Optional[Path] = None
    nodes_expanded: int = 0

    def __bool__(self) -> bool:
        return self.verdict == READABLE


def witness_is_valid(query: ReadabilityQuery, graph: FGraph, path: Path) -> bool:
    """Re-check a witness against every constraint of ``query``."""
    try:
        label = graph.path_label(path)
    except (KeyError, ValueError):
        return False
    if label != query.word:
        return False
    if not graph.is_connected() or not graph.is_folded():
        return False
    l = len(query.word)
    if graph.num_edges() * query.mu.denominator > query.mu.numerator * l:
        return False
    if graph.rank() > query.rank_bound:
        return False
    if query.require_low_degree:
        if all(graph.degree(v) >= 2 * query.m for v in graph.vertices):
            return False
    return True


def _interval_witness(word: Word) -> tuple[FGraph, Path]:
    """The trivial witness: a simple path of len(word) fresh edges."""
    g = FGraph()
    prev = g.add_vertex()
    steps = []
    for x in word:
        nxt = g.add_vertex()
        if x > 0:
            steps.append((g.add_edge(prev, nxt, x), 1))
        else:
            steps.append((g.add_edge(nxt, prev, -x), -1))
        prev = nxt
    return g, Path(0, tuple(steps))


class _BudgetExhausted(Exception):
    pass


def is_readable(query: ReadabilityQuery) -> ReadabilityAnswer:
    """Decide readability, producing a witness for positive answers.

    The verdict is exact (``Readable`` answers carry a witness that
    :func:`witness_is_valid` accepts; ``NotReadable`` means no witness
    exists) unless the node budget runs out, in which case the verdict
    is ``Unknown``.
    """
    word = query.word
    l = len(word)
    num, den = query.mu.numerator, query.mu.denominator
    max_e = query.edge_budget

    if len({abs(x) for x in word}) > max_e:
        # Every distinct generator in the word needs its own edge.
        return ReadabilityAnswer(NOT_READABLE)
    if query.mu == 1:
        # The bare interval graph is a witness: l edges, rank 0, and its
        # endpoints have degree 1.
        g, p = _interval_witness(word)
        return ReadabilityAnswer(READABLE, g, p)

    # Distinct generators still missing from the graph at each suffix.
    suffix_labels = [frozenset()] * (l + 1)
    for j in range(l - 1, -1, -1):
        suffix_labels[j] = suffix_labels[j + 1] | {abs(word[j])}

    # slot (v, x) -> (u, edge_id, direction): reading x at v crosses the
    # recorded edge to u.  Folded means each slot holds at most one edge.
    trans: dict[tuple[int, int], tuple[int, int, int]] = {}
    edges: list[tuple[int, int, int]] = []  # (origin, target, label)
    labels_present: dict[int, int] = {}
    steps: list[tuple[int, int]] = []
    signed = [s * k for k in range(1, query.m + 1) for s in (1, -1)]

    def canon_key(j: int, cur: int, n_vertices: int) -> tuple:
        # Relabel vertices by a deterministic traversal from cur so that
        # states differing only in vertex numbering share a memo entry.
        order = {cur: 0}
        queue = [cur]
        while queue:
            v = queue.pop()
            for x in signed:
                hit = trans.get((v, x))
                if hit is not None and hit[0] not in order:
                    order[hit[0]] = len(order)
                    queue.append(hit[0])
        body = tuple(sorted((order[o], order[t], lab) for o, t, lab in edges))
        return j, body

    failed: set[tuple] = set()
    nodes = 0
    budget = query.node_budget

    def apply_new_edge(cur: int, x: int, u: int) -> None:
        eid = len(edges)
        lab = abs(x)
        if x > 0:
            edges.append((cur, u, lab))
            trans[(cur, x)] = (u, eid, 1)
            trans[(u, -x)] = (cur, eid, -1)
            steps.append((eid, 1))
        else:
            edges.append((u, cur, lab))
            trans[(cur, x)] = (u, eid, -1)
            trans[(u, -x)] = (cur, eid, 1)
            steps.append((eid, -1))
        labels_present[lab] = labels_present.get(lab, 0) + 1

    def undo_new_edge(cur: int, x: int, u: int) -> None:
        edges.pop()
        del trans[(cur, x)]
        del trans[(u, -x)]
        steps.pop()
        lab = abs(x)
        labels_present[lab] -= 1
        if not labels_present[lab]:
            del labels_present[lab]

    # Stack frames: [j, cur, n_vertices, rank, choices, next_index].
    # A choice is (kind, u): "follow" reuses the forced edge, "new" opens
    # an edge to vertex u, "fresh" opens an edge to a new vertex.
    root = [0, 0, 1, 0, None, 0]
    stack = [root]
    found: Optional[tuple[list, list, int]] = None

    try:
        while stack:
            frame = stack[-1]
            j, cur, n_vertices, rank = frame[0], frame[1], frame[2], frame[3]
            choices, idx = frame[4], frame[5]
            if choices is None:
                nodes += 1
                if budget is not None and nodes > budget:
                    raise _BudgetExhausted
                e_now = len(edges)
                missing = len(suffix_labels[j] - labels_present.keys())
                if e_now + missing > max_e:
                    choices = []
                elif j == l:
                    ok = True
                    if query.require_low_degree:
                        deg = [0] * n_vertices
                        for o, t, _ in edges:
                            deg[o] += 1
                            deg[t] += 1
                        ok = min(deg) < 2 * query.m
                    if ok:
                        found = (list(edges), list(steps), n_vertices)
                        break
                    choices = []
                else:
                    key = canon_key(j, cur, n_vertices)
                    if key in failed:
                        choices = []
                    else:
                        frame.append(key)
                        x = word[j]
                        hit = trans.get((cur, x))
                        if hit is not None:
                            choices = [("follow", hit[0])]
                        else:
                            choices = []
                            if e_now < max_e:
                                if rank < query.rank_bound:
                                    choices.extend(
                                        ("new", u)
                                        for u in range(n_vertices)
                                        if (u, -x) not in trans
                                    )
                                choices.append(("fresh", n_vertices))
                frame[4] = choices
            if idx < len(choices):
                frame[5] = idx + 1
                kind, u = choices[idx]
                x = word[j]
                if kind == "follow":
                    _, eid, direction = trans[(cur, x)]
                    steps.append((eid, direction))
                    stack.append([j + 1, u, n_vertices, rank, None, 0])
                elif kind == "new":
                    apply_new_edge(cur, x, u)
                    stack.append([j + 1, u, n_vertices, rank + 1, None, 0])
                else:
                    apply_new_edge(cur, x, u)
                    stack.append([j + 1, u, n_vertices + 1, rank, None, 0])
            else:
                if len(frame) > 6:
                    failed.add(frame[6])
                stack.pop()
                if stack:
                    parent = stack[-1]
                    kind, u = parent[4][parent[5] - 1]
                    if kind == "follow":
                        steps.pop()
                    else:
                        undo_new_edge(parent[1], word[parent[0]], u)
    except _BudgetExhausted:
        return ReadabilityAnswer(UNKNOWN, nodes_expanded=nodes)

    if found is None:
        return ReadabilityAnswer(NOT_READABLE, nodes_expanded=nodes)

    found_edges, found_steps, n_vertices = found
    g = FGraph()
    for _ in range(n_vertices):
        g.add_vertex()
    for o, t, lab in found_edges:
        g.add_edge(o, t, lab)
    return ReadabilityAnswer(READABLE, g, Path(0, tuple(found_steps)), nodes)


# ---------------------------------------------------------------------------
# Independent brute-force oracle for short words.
# ---------------------------------------------------------------------------

_ORACLE_MAX_LEN = 11

# canonical word -> sorted tuple of (edge count, rank, min degree) over all
# folded quotients of the word's interval graph (dominated triples dropped).
_ORACLE_CACHE: dict[Word, tuple[tuple[int, int, int], ...]] = {}


def _canonical_class(word: Word, m: int) -> Word:
    """Least image of ``word`` under generator relabeling/inversion and
    word inversion — symmetries that readability profiles cannot see."""
    if m > 4:
        return word
    best = word
    best_key = word_key(word)
    for perm in permutations(range(1, m + 1)):
        for signs in product((1, -1), repeat=m):
            img = tuple(
                (1 if x > 0 else -1) * signs[abs(x) - 1] * perm[abs(x) - 1]
                for x in word
            )
            for cand in (img, inverse(img)):
                k = word_key(cand)
                if k < best_key:
                    best, best_key = cand, k
    return best


def _partitions(n: int):
    """Yield every restricted growth string of length ``n`` (shared buffer)."""
    a = [0] * n

    def rec(i: int, mx: int):
        if i == n:
            yield a
            return
        for v in range(mx + 2):
            a[i] = v
            yield from rec(i + 1, max(mx, v))

    yield from rec(1, 0)


def _quotient_stats(blocks, n_blocks, word_edges) -> tuple[int, int, int]:
    """Fold the quotient given by ``blocks`` to closure; return
    (edge count, rank, min degree) of the folded graph."""
    parent = list(range(n_blocks))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    changed = True
    while changed:
        changed = False
        outmap: dict[tuple[int, int], int] = {}
        inmap: dict[tuple[int, int], int] = {}
        for o, t, lab in word_edges:
            ro, rt = find(blocks[o]), find(blocks[t])
            prev = outmap.get((ro, lab))
            if prev is None:
                outmap[(ro, lab)] = rt
            else:
                prev = find(prev)
                rt2 = find(rt)
                if prev != rt2:
                    parent[prev] = rt2
                    changed = True
            prev = inmap.get((rt, lab))
            if prev is None:
                inmap[(rt, lab)] = ro
            else:
                prev = find(prev)
                ro2 = find(ro)
                if prev != ro2:
                    parent[prev] = ro2
                    changed = True

    folded = {(find(blocks[o]), find(blocks[t]), lab) for o, t, lab in word_edges}
    verts = {find(b) for b in blocks}
    e, v = len(folded), len(verts)
    deg = dict.fromkeys(verts, 0)
    for o, t, _ in folded:
        deg[o] += 1
        deg[t] += 1
    return e, e - v + 1, min(deg.values())


def _oracle_profile(word: Word) -> tuple[tuple[int, int, int], ...]:
    """All (edge count, rank, min degree) triples achievable by folded
    quotients of the word's interval graph, minimal ones only."""
    n = len(word) + 1
    word_edges = tuple(
        (i, i + 1, x) if x > 0 else (i + 1, i, -x) for i, x in enumerate(word)
    )
    triples = set()
    for blocks in _partitions(n):
        triples.add(_quotient_stats(blocks, max(blocks) + 1, word_edges))
    minimal = tuple(
        sorted(
            t
            for t in triples
            if not any(
                s != t and s[0] <= t[0] and s[1] <= t[1] and s[2] <= t[2]
                for s in triples
            )
        )
    )
    return minimal


def oracle_is_readable(query: ReadabilityQuery) -> bool:
    """Brute-force readability verdict for words of length at most 11.

    Enumerates all vertex partitions of the interval graph, folds each
    quotient to closure, and checks the constraints on the results.  The
    per-word profile is cached under the symmetry class of the word.
    """
    word = query.word
    l = len(word)
    if l > _ORACLE_MAX_LEN:
        raise ValueError(
            f"oracle supports words of length at most {_ORACLE_MAX_LEN}, got {l}"
        )
    canon = _canonical_class(word, query.m)
    profile = _ORACLE_CACHE.get(canon)
    if profile is None:
        profile = _oracle_profile(canon)
        _ORACLE_CACHE[canon] = profile
    max_e = query.edge_budget
    for e, rank, mindeg in profile:
        if e <= max_e and rank <= query.rank_bound:
            if not query.require_low_degree or mindeg < 2 * query.m:
                return True
    return False
