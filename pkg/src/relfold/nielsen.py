"""Certified reduction of generating tuples against a presentation.

Given an m-tuple of words and a small-cancellation presentation, the
driver wedges the tuple into a labeled graph and repeatedly simplifies:

* fold until tracing is deterministic, strip degree-one vertices (both
  only ever shrink the graph and never raise its rank);
* if the graph has become the alphabet bouquet, the tuple generates the
  whole presented group — verdict ``WholeGroup`` with a replayable
  :class:`NielsenTrace`;
* otherwise scan for a path reading almost all of a relator.  If none
  exists, the label homomorphism is injective on the fundamental group
  and the verdict is ``CertifiedFree`` with an explicit free basis;
* if such a path exists, surgery replaces a long stretch of it by the
  short relator complement (strictly decreasing the edge count), unless
  no eligible stretch is long enough — in which case the arcs carrying
  the path form a small graph reading more than half a relator, which is
  exactly a disqualifying readability witness for the presentation:
  verdict ``NotInClass`` with that witness attached.

Every move is logged with two-way basis words so that
:func:`verify_trace` can re-check the whole run against the group
relation by independent rewriting, and every emitted witness is
re-validated through the readability module's own checker before being
returned.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .fgraph import (
    FGraph,
    MoveRecord,
    Path,
    apply_AO,
    bouquet,
    fold_all,
    is_alphabet_bouquet,
    maximal_arcs,
    remove_degree_one,
)
from .genericity import ClassParams, PowerStatus, validate_params
from .readability import ReadabilityQuery, witness_is_valid
from .smallcancel import (
    CprimeResult,
    Presentation,
    check_Cprime,
    find_long_relator_path,
    is_equal_in_G,
)
from .words import (
    Word,
    concat,
    format_word,
    free_reduce,
    inverse,
    is_proper_power,
    parse_word,
    power_decomposition,
    substitute,
)

WHOLE_GROUP = "WholeGroup"
CERTIFIED_FREE = "CertifiedFree"
NOT_IN_CLASS = "NotInClass"

FREE_REASON = "no long relator path ⇒ label homomorphism injective"


@dataclass(frozen=True)
class NielsenTrace:
    """Move-by-move log linking the input tuple to the terminal basis.

    ``steps`` holds (MoveRecord, snapshot) pairs where the snapshot is
    the free-basis labels after the move; consecutive snapshots are tied
    together by the record's two-way basis words.  ``initial_arrangement``
    matches basis slots to input entries: entry ``+(i+1)`` means slot j
    starts as input word i, ``-(i+1)`` as its inverse.  ``conjugator``
    accumulates the base relocations, so the initial tuple is Nielsen-
    equivalent to the conjugate of the final tuple by it.
    """

    initial_tuple: tuple
    initial_arrangement: tuple
    steps: tuple
    final_tuple: tuple
    conjugator: Word


@dataclass(frozen=True)
class C3Witness:
    """A small subgraph reading more than half of a relator.

    ``edges`` are (origin, terminus, label) triples in a self-contained
    id space (vertex ids appear sorted, edge ids follow list order, as
    :func:`witness_graph` rebuilds them); ``path`` spells ``subword``
    there, and ``subword + complement`` is the ``offset`` rotation of
    relator ``relator_index`` (inverted when ``sign`` is -1).
    """

    edges: tuple
    path: Path
    subword: Word
    complement: Word
    relator_index: int
    sign: int
    offset: int


@dataclass(frozen=True)
class ReductionVerdict:
    """Outcome of :func:`reduce_tuple`.

    ``kind`` is ``WholeGroup`` (with ``trace``), ``CertifiedFree`` (with
    ``rank``, ``basis``, ``reason``), or ``NotInClass`` (with
    ``condition`` and the matching payload: ``cprime`` for C1, ``powers``
    for C2, ``witness`` for C3).
    """

    kind: str
    trace: Optional[NielsenTrace] = None
    rank: Optional[int] = None
    basis: Optional[tuple] = None
    reason: Optional[str] = None
    condition: Optional[str] = None
    cprime: Optional[CprimeResult] = None
    powers: Optional[tuple] = None
    witness: Optional[C3Witness] = None


# ---------------------------------------------------------------------------
# Witnesses


def witness_graph(w: C3Witness) -> FGraph:
    """Rebuild the witness subgraph; deterministic for equal witnesses."""
    return FGraph.from_edges(list(w.edges))


def verify_witness(w: C3Witness, p: Presentation, params: ClassParams) -> bool:
    """Independent re-check that a witness disqualifies the presentation.

    The subgraph with the spelled subword must satisfy every constraint
    of a readability witness (edge budget mu * |subword|, rank at most L,
    connected, folded, some vertex of degree below 2m), and the subword
    must be more than half of its relator, completed to a rotation by the
    stored complement.
    """
    if w.relator_index < 0 or w.relator_index >= len(p.relators):
        return False
    r = p.relators[w.relator_index]
    base = r if w.sign == 1 else inverse(r)
    rotation = base[w.offset:] + base[:w.offset]
    if tuple(w.subword) + tuple(w.complement) != rotation:
        return False
    if 2 * len(w.subword) <= len(r):
        return False
    try:
        query = ReadabilityQuery(
            word=w.subword,
            m=p.alphabet.m,
            mu=params.mu,
            rank_bound=params.L,
            require_low_degree=True,
        )
    except ValueError:
        return False
    return witness_is_valid(query, witness_graph(w), w.path)


def _build_witness(g: FGraph, lrp, p: Presentation, params: ClassParams) -> C3Witness:
    arcs = maximal_arcs(g)
    owner = {}
    for a in arcs:
        for e, _ in a.steps:
            owner[e] = a.index
    carrying = sorted({owner[e] for e, _ in lrp.path.steps})
    edge_ids = sorted(
        e for a in arcs if a.index in carrying for e in a.edge_set()
    )
    triples = tuple(
        (g.edges[e][0], g.edges[e][1], g.edges[e][2]) for e in edge_ids
    )
    vertex_ids = sorted({v for o, t, _ in triples for v in (o, t)})
    vmap = {v: i for i, v in enumerate(vertex_ids)}
    emap = {e: i for i, e in enumerate(edge_ids)}
    path = Path(
        vmap[lrp.path.start],
        tuple((emap[e], d) for e, d in lrp.path.steps),
    )
    w = C3Witness(
        edges=triples,
        path=path,
        subword=lrp.v,
        complement=lrp.y,
        relator_index=lrp.relator_index,
        sign=lrp.sign,
        offset=lrp.offset,
    )
    if not verify_witness(w, p, params):
        raise RuntimeError(
            "window selection failed but the emitted witness does not "
            "certify a readable half-relator subword"
        )
    return w


# ---------------------------------------------------------------------------
# Window selection


def _select_window(g: FGraph, path: Path) -> Optional[tuple[int, int]]:
    """Longest surgery-eligible stretch of ``path``, as a step span.

    A step is eligible when its edge is used exactly once in the whole
    path; a stretch may not cross an arc boundary, a junction vertex, or
    the base vertex in its interior.  Returns the (start, stop) indices
    of the longest run (ties to the earliest), or None when no step is
    eligible.
    """
    steps = path.steps
    if not steps:
        return None
    count = Counter(e for e, _ in steps)
    owner = {}
    for a in maximal_arcs(g):
        for e, _ in a.steps:
            owner[e] = a.index
    best: Optional[tuple[int, int]] = None
    run_start: Optional[int] = None
    prev_vertex = path.start

    def close(stop: int) -> None:
        nonlocal best, run_start
        if run_start is not None and (
            best is None or stop - run_start > best[1] - best[0]
        ):
            best = (run_start, stop)
        run_start = None

    for k, (e, d) in enumerate(steps):
        if count[e] != 1:
            close(k)
        else:
            breaks = k > 0 and (
                g.degree(prev_vertex) != 2
                or prev_vertex == g.base
                or owner[steps[k - 1][0]] != owner[e]
            )
            if run_start is None:
                run_start = k
            elif breaks:
                close(k)
                run_start = k
        prev_vertex = g.step_ends(e, d)[1]
    close(len(steps))
    return best


def _fire_or_witness(g: FGraph, lrp, p: Presentation, params: ClassParams):
    """Either apply the long-path surgery or emit the failure witness."""
    r = p.relators[lrp.relator_index]
    num, den = params.lam.numerator, params.lam.denominator
    steps, v, y = lrp.path.steps, lrp.v, lrp.y
    start = lrp.path.start
    if not y and g.path_end(lrp.path) != start:
        # A full-relator reading that does not close up: withhold the
        # last letter so the attached complement is that single letter.
        steps, v, y = steps[:-1], v[:-1], (v[-1],)
    span = _select_window(g, Path(start, steps)) if steps else None
    if span is not None and (span[1] - span[0]) * den >= 3 * num * len(r):
        i, j = span
        assert len(y) * den < 3 * num * len(r)
        mid_start = start if i == 0 else g.path_end(Path(start, steps[:i]))
        mid_end = g.path_end(Path(start, steps[:j]))
        record = apply_AO(
            g,
            Path(start, steps[:i]),
            Path(mid_start, steps[i:j]),
            Path(mid_end, steps[j:]),
            y,
        )
        return record
    return _build_witness(g, lrp, p, params)


# ---------------------------------------------------------------------------
# Base relocation


def _hop_base(g: FGraph) -> Optional[MoveRecord]:
    """Walk a degree-two base along its arc to the nearest junction.

    Surgery may not delete the base, so a base buried inside an arc would
    needlessly split eligible stretches; relocating it is a pure change
    of viewpoint recorded with the conjugating word.  No-op (None) when
    the base already sits on a junction or the graph is a lone cycle.
    """
    if g.base is None or g.degree(g.base) != 2:
        return None
    if all(g.degree(v) == 2 for v in g.vertices):
        return None
    old = g.base
    pre_parent, pre_nontree, pre_loops, pre_labels = g.basis_data(old)
    pre_index = {e: k + 1 for k, e in enumerate(pre_nontree)}

    def stubs(v):
        return sorted([(e, 1) for e in g._out[v]] + [(e, -1) for e in g._in[v]])

    walk = [stubs(old)[0]]
    cur = g.step_ends(*walk[-1])[1]
    while g.degree(cur) == 2:
        back = (walk[-1][0], -walk[-1][1])
        nxt = next(s for s in stubs(cur) if s != back)
        walk.append(nxt)
        cur = g.step_ends(*nxt)[1]
        assert len(walk) <= g.num_edges()
    walk = tuple(walk)
    g.base = cur
    post_parent, post_nontree, post_loops, post_labels = g.basis_data(cur)
    post_index = {e: k + 1 for k, e in enumerate(post_nontree)}
    conj = g.path_label(Path(old, walk))
    rev = Path(old, walk).reversed_from(cur).steps

    post_in_pre = tuple(
        g.crossing_read(pre_index, Path(old, walk + lp.steps + rev))
        for lp in post_loops
    )
    pre_in_post = tuple(
        g.crossing_read(post_index, Path(cur, rev + lp.steps + walk))
        for lp in pre_loops
    )
    for j, u in enumerate(post_in_pre):
        assert substitute(u, pre_labels) == free_reduce(
            concat(conj, post_labels[j], inverse(conj))
        )
    for i, u in enumerate(pre_in_post):
        assert substitute(u, post_labels) == free_reduce(
            concat(inverse(conj), pre_labels[i], conj)
        )
    return MoveRecord(
        kind="R",
        vertex_map={u: u for u in g.vertices},
        edge_map={e: e for e in g.edges},
        pre_basis=pre_labels,
        post_basis=post_labels,
        post_in_pre=post_in_pre,
        pre_in_post=pre_in_post,
        conjugator=conj,
        detail={"base_hop": True, "walk": walk},
    )


# ---------------------------------------------------------------------------
# Rank guard


def rank_guard(g: FGraph, m: int) -> Optional[dict]:
    """Consistency check on saturated graphs.

    In a folded graph every vertex has degree at most 2m, and a graph
    whose vertices all reach that bound must either be the alphabet
    bouquet or have rank above m (its Euler count forces extra loops).  A
    violation being returned means the graph data itself is inconsistent;
    callers treat it as an internal error, never as a verdict.
    """
    if any(g.degree(v) != 2 * m for v in g.vertices):
        return None
    if is_alphabet_bouquet(g, m) or g.rank() > m:
        return None
    return {
        "rank": g.rank(),
        "vertices": g.num_vertices(),
        "edges": g.num_edges(),
    }


# ---------------------------------------------------------------------------
# The driver


def _match_arrangement(basis: tuple, words: tuple) -> tuple:
    """Signed matching of initial basis slots to input tuple entries."""
    used = set()
    out = []
    for label in basis:
        hit = None
        for i, w in enumerate(words):
            if i in used:
                continue
            if label == w:
                hit = i + 1
                break
            if label == inverse(w):
                hit = -(i + 1)
                break
        assert hit is not None, "wedge basis does not match the input tuple"
        used.add(abs(hit) - 1)
        out.append(hit)
    return tuple(out)


def _accumulated_conjugator(steps) -> Word:
    acc: Word = ()
    for record, _ in steps:
        acc = free_reduce(concat(acc, record.conjugator))
    return acc


def reduce_tuple(tpl, p: Presentation, params: ClassParams) -> ReductionVerdict:
    """Run the reduction driver on an m-tuple of words.

    The presentation's cheap class conditions are checked first (no
    proper-power relator, then the piece bound); failing either returns
    ``NotInClass`` immediately with that condition.  The expensive
    readability condition is never pre-checked: the driver is
    self-certifying and produces a checked witness if and when its case
    analysis breaks down.
    """
    m = p.alphabet.m
    ok, msg = validate_params(params, m)
    if not ok:
        raise ValueError(f"invalid class parameters: {msg}")
    words = tuple(free_reduce(w) for w in tpl)
    if len(words) != m:
        raise ValueError("tuple of wrong arity")
    for w in words:
        if not w:
            raise ValueError("trivial word in tuple")
        p.alphabet.check_word(w)

    powers = tuple(
        PowerStatus(i, is_proper_power(r), *power_decomposition(r))
        for i, r in enumerate(p.relators)
    )
    if any(ps.is_power for ps in powers):
        return ReductionVerdict(NOT_IN_CLASS, condition="C2", powers=powers)
    c1 = check_Cprime(p, params.lam)
    if not c1.ok:
        return ReductionVerdict(NOT_IN_CLASS, condition="C1", cprime=c1)

    g = bouquet(words)
    arrangement = _match_arrangement(g.free_basis(), words)
    steps = []

    def record(records) -> None:
        for rec in records:
            steps.append((rec, rec.post_basis))

    while True:
        record(fold_all(g))
        record(remove_degree_one(g))
        hop = _hop_base(g)
        if hop is not None:
            record([hop])
        violation = rank_guard(g, m)
        if violation is not None:
            raise RuntimeError(f"saturated graph of low rank: {violation}")
        assert g.rank() <= params.L
        if is_alphabet_bouquet(g, m):
            trace = NielsenTrace(
                initial_tuple=words,
                initial_arrangement=arrangement,
                steps=tuple(steps),
                final_tuple=g.free_basis(),
                conjugator=_accumulated_conjugator(steps),
            )
            return ReductionVerdict(WHOLE_GROUP, trace=trace)
        lrp = find_long_relator_path(g, p, params.lam)
        if lrp is None:
            return ReductionVerdict(
                CERTIFIED_FREE,
                rank=g.rank(),
                basis=g.free_basis(),
                reason=FREE_REASON,
            )
        edges_before = g.num_edges()
        outcome = _fire_or_witness(g, lrp, p, params)
        if isinstance(outcome, C3Witness):
            return ReductionVerdict(NOT_IN_CLASS, condition="C3", witness=outcome)
        assert g.num_edges() < edges_before
        record([outcome])


# ---------------------------------------------------------------------------
# Trace verification


def verify_trace(t: NielsenTrace, p: Presentation) -> bool:
    """Re-check a trace against the presented group, move by move.

    Every consecutive snapshot pair must be tied together by its record's
    two-way basis words under rewriting in the group (conjugated by the
    record's relocation word where present), the stored conjugator must
    equal the accumulated one, and the final snapshot must literally be
    the alphabet tuple.
    """
    c6 = check_Cprime(p, Fraction(1, 6))
    if not c6.ok:
        raise ValueError("trace verification requires a C'(1/6) presentation")
    m = p.alphabet.m
    try:
        current = tuple(
            t.initial_tuple[k - 1] if k > 0 else inverse(t.initial_tuple[-k - 1])
            for k in t.initial_arrangement
        )
    except IndexError:
        return False
    accumulated: Word = ()
    for record, snapshot in t.steps:
        snapshot = tuple(tuple(w) for w in snapshot)
        if tuple(tuple(w) for w in record.pre_basis) != current:
            return False
        if tuple(tuple(w) for w in record.post_basis) != snapshot:
            return False
        if len(record.post_in_pre) != len(snapshot):
            return False
        if len(record.pre_in_post) != len(current):
            return False
        conj = tuple(record.conjugator)
        try:
            for j, u in enumerate(record.post_in_pre):
                rhs = free_reduce(
                    concat(inverse(conj), substitute(u, current), conj)
                )
                if not is_equal_in_G(snapshot[j], rhs, p):
                    return False
            for i, u in enumerate(record.pre_in_post):
                rhs = free_reduce(
                    concat(conj, substitute(u, snapshot), inverse(conj))
                )
                if not is_equal_in_G(current[i], rhs, p):
                    return False
        except (IndexError, ValueError):
            return False
        accumulated = free_reduce(concat(accumulated, conj))
        current = snapshot
    if tuple(tuple(w) for w in t.final_tuple) != current:
        return False
    if free_reduce(t.conjugator) != accumulated:
        return False
    return current == tuple((i,) for i in range(1, m + 1))


# ---------------------------------------------------------------------------
# Serialization


def _word_list(ws) -> list:
    return [format_word(w) for w in ws]


def trace_jsonable(t: NielsenTrace) -> dict:
    """JSON-ready trace: replayable through :func:`verify_trace`.

    Snapshots and conjugators are alphabet words in text form; the
    two-way witness words are kept as integer lists because their letters
    index basis slots, not alphabet generators.
    """
    return {
        "initial_tuple": _word_list(t.initial_tuple),
        "initial_arrangement": list(t.initial_arrangement),
        "steps": [
            {
                "kind": record.kind,
                "post_in_pre": [list(w) for w in record.post_in_pre],
                "pre_in_post": [list(w) for w in record.pre_in_post],
                "conjugator": format_word(record.conjugator),
                "snapshot": _word_list(snapshot),
            }
            for record, snapshot in t.steps
        ],
        "final_tuple": _word_list(t.final_tuple),
        "conjugator": format_word(t.conjugator),
    }


def trace_from_jsonable(data: dict) -> NielsenTrace:
    """Rebuild a verifiable trace from its JSON form.

    Graph-level bookkeeping (vertex and edge maps) is not serialized, so
    the records round-trip only what :func:`verify_trace` consumes.
    """
    initial = tuple(parse_word(s) for s in data["initial_tuple"])
    arrangement = tuple(int(k) for k in data["initial_arrangement"])
    previous = tuple(
        initial[k - 1] if k > 0 else inverse(initial[-k - 1])
        for k in arrangement
    )
    steps = []
    for row in data["steps"]:
        snapshot = tuple(parse_word(s) for s in row["snapshot"])
        record = MoveRecord(
            kind=row["kind"],
            vertex_map={},
            edge_map={},
            pre_basis=previous,
            post_basis=snapshot,
            post_in_pre=tuple(tuple(w) for w in row["post_in_pre"]),
            pre_in_post=tuple(tuple(w) for w in row["pre_in_post"]),
            conjugator=parse_word(row["conjugator"]),
        )
        steps.append((record, snapshot))
        previous = snapshot
    return NielsenTrace(
        initial_tuple=initial,
        initial_arrangement=arrangement,
        steps=tuple(steps),
        final_tuple=tuple(parse_word(s) for s in data["final_tuple"]),
        conjugator=parse_word(data["conjugator"]),
    )


def witness_jsonable(w: C3Witness) -> dict:
    return {
        "edges": [list(e) for e in w.edges],
        "path": {"start": w.path.start, "steps": [list(s) for s in w.path.steps]},
        "subword": format_word(w.subword),
        "complement": format_word(w.complement),
        "relator_index": w.relator_index,
        "sign": w.sign,
        "offset": w.offset,
    }


def witness_from_jsonable(data: dict) -> C3Witness:
    return C3Witness(
        edges=tuple(tuple(e) for e in data["edges"]),
        path=Path(
            data["path"]["start"],
            tuple(tuple(s) for s in data["path"]["steps"]),
        ),
        subword=parse_word(data["subword"]),
        complement=parse_word(data["complement"]),
        relator_index=data["relator_index"],
        sign=data["sign"],
        offset=data["offset"],
    )
