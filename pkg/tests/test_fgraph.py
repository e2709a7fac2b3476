"""Tests for labeled graphs: folding, basis witnesses, arcs, moves."""

import random

import pytest

from relfold.fgraph import (
    FGraph,
    Path,
    apply_AO,
    apply_M1,
    apply_M2,
    bouquet,
    fold_all,
    is_alphabet_bouquet,
    maximal_arcs,
    remove_degree_one,
)
from relfold.words import concat, free_reduce, inverse, substitute


def edge_table(g):
    return {e: g.edges[e] for e in g.edges}


def replay_chain(records, pre_edges):
    """Push an edge table through a list of MoveRecords."""
    table = dict(pre_edges)
    for rec in records:
        table = {eid: (o, t, lbl) for eid, o, t, lbl in rec.replay_edges(table)}
    return sorted((eid, o, t, lbl) for eid, (o, t, lbl) in table.items())


def assert_free_witnesses(rec):
    """Both witness directions hold in the free group (Fold/R only)."""
    c = rec.conjugator
    for j, w in enumerate(rec.post_in_pre):
        expected = concat(inverse(c), substitute(w, rec.pre_basis), c)
        assert rec.post_basis[j] == expected
    for i, w in enumerate(rec.pre_in_post):
        expected = concat(c, substitute(w, rec.post_basis), inverse(c))
        assert rec.pre_basis[i] == expected


class TestConstruction:
    def test_bouquet_two_words(self):
        g = bouquet([(1, 2), (2,)])
        assert g.num_vertices() == 2
        assert g.num_edges() == 3
        assert g.base == 0
        assert g.rank() == 2

    def test_bouquet_commutator_and_letter(self):
        g = bouquet([(1, 2, -1, -2), (1,)])
        assert g.num_vertices() == 4
        assert g.num_edges() == 5
        assert g.rank() == 2

    def test_bouquet_rejects_empty_word(self):
        with pytest.raises(ValueError):
            bouquet([(1, 2), ()])

    def test_bouquet_traces_its_words(self):
        g = bouquet([(1,), (2,)])
        assert g.is_folded()
        for w in [(1,), (2,), (1, 2, -1, -2)]:
            p = g.trace_word(g.base, w)
            assert p is not None
            assert g.path_end(p) == g.base
            assert g.path_label(p) == free_reduce(w)

    def test_edge_labels_positive(self):
        g = FGraph()
        v = g.add_vertex()
        with pytest.raises(ValueError):
            g.add_edge(v, v, -1)
        with pytest.raises(ValueError):
            g.add_edge(v, v, 0)

    def test_alphabet_bouquet_recognizer(self):
        assert is_alphabet_bouquet(bouquet([(1,), (2,)]), 2)
        assert not is_alphabet_bouquet(bouquet([(1,), (2,)]), 3)
        assert not is_alphabet_bouquet(bouquet([(1,), (1,)]), 2)
        assert not is_alphabet_bouquet(bouquet([(1, 2)]), 2)


class TestPaths:
    def test_path_end_checks_consecutive(self):
        g = bouquet([(1, 2)])
        # edge 0 runs base->1, edge 1 runs 1->base; stepping edge 1 twice breaks
        with pytest.raises(ValueError):
            g.path_end(Path(0, ((1, 1), (1, 1))))

    def test_path_label_reduces(self):
        g = bouquet([(1,)])
        p = Path(0, ((0, 1), (0, -1)))
        assert g.path_letters(p) == (1, -1)
        assert g.path_label(p) == ()
        assert not g.path_is_reduced(p)

    def test_trace_word_absent(self):
        g = bouquet([(1, 2)])
        records = fold_all(g)
        assert records == []  # a single cyclically reduced word is folded
        assert g.trace_word(g.base, (1, 1)) is None
        assert g.trace_word(g.base, (2,)) is None  # base has no b-edge out

    def test_reversed_from(self):
        g = bouquet([(1, 2)])
        p = g.trace_word(g.base, (1, 2))
        q = p.reversed_from(g.path_end(p))
        assert g.path_end(q) == p.start
        assert g.path_label(q) == (-2, -1)


class TestFreeBasis:
    def test_theta_graph_basis(self):
        # two vertices joined by three edges labeled a, b, c
        g = FGraph.from_edges([(0, 1, 1), (0, 1, 2), (0, 1, 3)], base=0)
        assert g.rank() == 2
        assert g.free_basis() == ((2, -1), (3, -1))

    def test_alphabet_bouquet_basis_is_alphabet(self):
        g = bouquet([(2,), (1,), (3,)])
        assert g.free_basis() == ((1,), (2,), (3,))

    def test_basis_requires_connected(self):
        g = FGraph()
        g.add_vertex()
        g.add_vertex()
        g.base = 0
        with pytest.raises(ValueError):
            g.free_basis()

    def test_basis_labels_are_reduced_loops(self):
        rng = random.Random(200)
        for _ in range(30):
            ws = []
            for _ in range(rng.randrange(1, 4)):
                w = free_reduce([rng.choice([1, -1, 2, -2])
                                 for _ in range(rng.randrange(1, 8))])
                if w:
                    ws.append(w)
            if not ws:
                continue
            g = bouquet(ws)
            parent, nontree, loops, labels = g.basis_data(g.base)
            assert len(labels) == g.rank()
            for p, lbl in zip(loops, labels):
                assert p.start == g.base
                assert g.path_end(p) == g.base
                assert g.path_is_reduced(p)
                assert g.path_label(p) == lbl


class TestFolding:
    def test_fold_two_equal_loops(self):
        g = bouquet([(1,), (1,)])
        records = fold_all(g)
        assert len(records) == 1
        assert g.num_edges() == 1
        assert g.num_vertices() == 1
        assert g.rank() == 1
        assert_free_witnesses(records[0])

    def test_fold_duplicate_word(self):
        g = bouquet([(1, 2), (1, 2)])
        records = fold_all(g)
        assert len(records) == 2
        assert g.num_edges() == 2
        assert g.num_vertices() == 2
        assert g.rank() == 1
        assert g.free_basis() == ((1, 2),)
        for rec in records:
            assert_free_witnesses(rec)

    def test_fold_wedge_generates_whole_group(self):
        # <ab, b> = <a, b>: folding reaches the alphabet bouquet
        g = bouquet([(1, 2), (2,)])
        records = fold_all(g)
        assert len(records) == 1
        assert is_alphabet_bouquet(g, 2)
        assert g.free_basis() == ((1,), (2,))

    def test_fold_records_replay(self):
        g = bouquet([(1, 2), (2,), (1, -2, 1)])
        pre = edge_table(g)
        records = fold_all(g)
        assert replay_chain(records, pre) == sorted(
            (e, o, t, lbl) for e, (o, t, lbl) in g.edges.items())

    def test_fold_decrements_edges_by_one(self):
        g = bouquet([(1, 2, 1), (1, 2)])
        e0 = g.num_edges()
        records = fold_all(g)
        assert g.num_edges() == e0 - len(records)
        assert g.is_folded()

    def test_fold_requires_base(self):
        g = FGraph.from_edges([(0, 1, 1), (0, 1, 1)])
        with pytest.raises(ValueError):
            fold_all(g)

    def test_fold_merging_the_base(self):
        # conflict at vertex 2 merges vertices 0 and 1; the base is 1
        g = FGraph()
        for _ in range(4):
            g.add_vertex()
        g.add_edge(2, 0, 1)
        g.add_edge(2, 1, 1)
        g.add_edge(0, 3, 2)
        g.add_edge(1, 3, 3)
        g.base = 1
        records = fold_all(g)
        assert len(records) == 1
        assert g.base == 0
        assert records[0].vertex_map[1] == 0
        assert g.is_folded()
        assert_free_witnesses(records[0])

    def test_folded_graph_still_traces_inputs(self):
        rng = random.Random(201)
        for _ in range(40):
            ws = []
            for _ in range(rng.randrange(1, 4)):
                w = free_reduce([rng.choice([1, -1, 2, -2, 3, -3])
                                 for _ in range(rng.randrange(1, 10))])
                if w:
                    ws.append(w)
            if not ws:
                continue
            g = bouquet(ws)
            pre = edge_table(g)
            records = fold_all(g)
            assert g.is_folded()
            assert g.rank() <= len(ws)
            for w in ws:
                p = g.trace_word(g.base, w)
                assert p is not None and g.path_end(p) == g.base
            for rec in records:
                assert_free_witnesses(rec)
            assert replay_chain(records, pre) == sorted(
                (e, o, t, lbl) for e, (o, t, lbl) in g.edges.items())


class TestDegreeOneRemoval:
    def test_strip_hanging_path_moving_base(self):
        # path 0 -a-> 1 -b-> 2 with base at 0: base hops twice, conjugator ab
        g = FGraph.from_edges([(0, 1, 1), (1, 2, 2)], base=0)
        records = remove_degree_one(g)
        assert len(records) == 2
        assert g.num_vertices() == 1
        assert g.num_edges() == 0
        assert records[0].conjugator == (1,)
        assert records[1].conjugator == (2,)
        for rec in records:
            assert_free_witnesses(rec)

    def test_strip_hanging_edge_keeping_base(self):
        g = FGraph.from_edges([(0, 0, 1), (0, 1, 2)], base=0)
        records = remove_degree_one(g)
        assert len(records) == 1
        assert records[0].conjugator == ()
        assert g.free_basis() == ((1,),)
        assert records[0].pre_basis == ((1,),)
        assert records[0].post_basis == ((1,),)

    def test_conjugator_sign_for_inward_edge(self):
        # edge points into the base leaf: hopping reads the inverse letter
        g = FGraph.from_edges([(1, 0, 1), (1, 1, 2)], base=0)
        records = remove_degree_one(g)
        assert len(records) == 1
        assert records[0].conjugator == (-1,)
        assert g.base == 1
        assert_free_witnesses(records[0])

    def test_accumulated_conjugator_relates_bases(self):
        # hanging path into a loop: old-base loops are conjugates of new
        g = FGraph.from_edges([(0, 1, 1), (1, 2, 2), (2, 2, 3)], base=0)
        pre_basis = g.free_basis()
        records = remove_degree_one(g)
        conj = concat(*[rec.conjugator for rec in records])
        assert conj == (1, 2)
        post_basis = g.free_basis()
        assert len(pre_basis) == len(post_basis) == 1
        assert post_basis[0] == concat(inverse(conj), pre_basis[0], conj)

    def test_no_leaves_no_records(self):
        g = bouquet([(1, 2)])
        assert remove_degree_one(g) == []


class TestArcs:
    def test_theta_three_open_arcs(self):
        g = FGraph.from_edges([(0, 1, 1), (0, 1, 2), (0, 1, 3)], base=0)
        arcs = maximal_arcs(g)
        assert len(arcs) == 3
        assert all(not a.closed for a in arcs)
        assert all(len(a.steps) == 1 for a in arcs)

    def test_wedge_two_closed_arcs(self):
        g = bouquet([(1,), (2,)])
        arcs = maximal_arcs(g)
        assert len(arcs) == 2
        assert all(a.closed for a in arcs)

    def test_dumbbell_three_arcs(self):
        g = FGraph.from_edges([(0, 0, 1), (1, 1, 1), (0, 1, 2)], base=0)
        arcs = maximal_arcs(g)
        assert len(arcs) == 3
        assert sorted(a.closed for a in arcs) == [False, True, True]

    def test_lone_cycle_single_closed_arc(self):
        g = FGraph.from_edges([(0, 1, 1), (1, 2, 1), (2, 0, 2)], base=0)
        arcs = maximal_arcs(g)
        assert len(arcs) == 1
        assert arcs[0].closed
        assert len(arcs[0].steps) == 3

    def test_subdivided_wedge_arcs(self):
        # wedge of a length-3 cycle and a loop at the junction
        g = bouquet([(1, 2, 1), (2,)])
        arcs = maximal_arcs(g)
        assert len(arcs) == 2
        assert all(a.closed for a in arcs)
        assert sorted(len(a.steps) for a in arcs) == [1, 3]

    def test_arcs_cover_all_edges_once(self):
        rng = random.Random(202)
        for _ in range(30):
            ws = [free_reduce([rng.choice([1, -1, 2, -2])
                               for _ in range(rng.randrange(1, 7))])
                  for _ in range(rng.randrange(1, 4))]
            ws = [w for w in ws if w]
            if not ws:
                continue
            g = bouquet(ws)
            fold_all(g)
            remove_degree_one(g)
            if g.num_edges() == 0:
                continue
            arcs = maximal_arcs(g)
            seen = []
            for a in arcs:
                seen.extend(e for e, _ in a.steps)
            assert sorted(seen) == sorted(g.edges)

    def test_rejects_degree_one(self):
        g = FGraph.from_edges([(0, 1, 1)], base=0)
        with pytest.raises(ValueError):
            maximal_arcs(g)


class TestM1M2:
    def test_m1_attach_parallel_then_m2_undo(self):
        g = bouquet([(1,), (2,)])
        original = g.dump()
        pre = edge_table(g)
        p = g.trace_word(g.base, (1,))
        rec1 = apply_M1(g, p, (1,))
        assert g.rank() == 3
        assert rec1.added_edges and rec1.added_vertices == ()
        new_edge = rec1.added_edges[0][0]
        # the attached label freely equals the path label, so even the
        # group-level witnesses hold freely here
        assert_free_witnesses(rec1)
        mid = edge_table(g)
        assert {eid: (o, t, lbl) for eid, o, t, lbl in rec1.replay_edges(pre)} == mid

        rec2 = apply_M2(g, Path(g.base, ((new_edge, 1),)), p)
        assert g.dump() == original
        assert_free_witnesses(rec2)
        assert {eid: (o, t, lbl) for eid, o, t, lbl in rec2.replay_edges(mid)} == edge_table(g)

    def test_m1_rejects_empty_word(self):
        g = bouquet([(1,)])
        with pytest.raises(ValueError):
            apply_M1(g, Path(g.base, ()), ())

    def test_m1_on_open_path(self):
        # attach b parallel to the a-edge of a two-vertex graph
        g = FGraph.from_edges([(0, 1, 1), (1, 0, 2)], base=0)
        p = Path(0, ((0, 1),))
        rec = apply_M1(g, p, (2,))
        assert g.num_edges() == 3
        assert g.rank() == 2
        assert len(rec.post_basis) == 2

    def test_m2_validates_endpoints_and_edges(self):
        g = bouquet([(1,), (2,)])
        p = g.trace_word(g.base, (1,))
        rec = apply_M1(g, p, (1,))
        new_edge = rec.added_edges[0][0]
        q = Path(g.base, ((new_edge, 1),))
        with pytest.raises(ValueError):
            apply_M2(g, q, q)  # alt shares edges with p
        with pytest.raises(ValueError):
            apply_M2(g, Path(g.base, ()), p)  # empty removal path

    def test_m2_must_stay_inside_one_arc(self):
        # wedge of two loops: a path through the junction spans two arcs
        g = bouquet([(1,), (2,)])
        p = Path(g.base, ((0, 1), (1, 1)))
        with pytest.raises(ValueError):
            apply_M2(g, p, Path(g.base, ()))

    def test_m2_protects_isolated_base(self):
        # base sits inside the removed arc: removal would strand it
        g = FGraph.from_edges([(1, 0, 1), (0, 1, 2), (1, 1, 3)], base=0)
        arcs = maximal_arcs(g)
        arc = next(a for a in arcs if len(a.steps) == 2)
        p = Path(1, arc.steps)
        with pytest.raises(ValueError):
            apply_M2(g, p, Path(1, ()))

    def test_m2_closed_arc_removal(self):
        # removing a redundant closed arc hanging at the base
        g = FGraph.from_edges([(0, 0, 1), (0, 1, 2), (1, 0, 2)], base=0)
        arcs = maximal_arcs(g)
        arc = next(a for a in arcs if len(a.steps) == 2)
        start = g.step_ends(*arc.steps[0])[0]
        assert start == 0
        rec = apply_M2(g, Path(0, arc.steps), Path(0, ()))
        assert g.num_edges() == 1
        assert g.num_vertices() == 1
        assert g.rank() == 1
        assert rec.detail["removed_vertices"] == (1,)


class TestAO:
    def build_cycle_with_chord(self):
        # 0 -a-> 1 -a-> 2 with a direct b-edge 0 -b-> 2; base 0
        return FGraph.from_edges([(0, 1, 1), (1, 2, 1), (0, 2, 2)], base=0)

    def test_ao_replaces_long_path_with_short_edge(self):
        g = self.build_cycle_with_chord()
        # relation: aa = b, i.e. label(p') * y = aab^-1 = 1 with y = b^-1
        p_prime = Path(0, ((0, 1), (1, 1)))
        rec = apply_AO(g, Path(0, ()), p_prime, Path(2, ()), (-2,))
        assert g.num_edges() == 2
        assert g.num_vertices() == 2
        assert g.rank() == 1
        assert rec.detail["removed_edges"] == (0, 1)
        assert rec.detail["removed_vertices"] == (1,)
        # both surviving edges run 0->2 with label b
        assert sorted(g.edges.values()) == [(0, 2, 2), (0, 2, 2)]
        # pre basis aab^-1 maps to the trivial post word and back
        assert rec.pre_basis == ((1, 1, -2),)
        assert rec.post_basis == ((),)
        assert rec.pre_in_post == ((1,),)
        assert rec.post_in_pre == ((1,),)

    def test_ao_empty_y_closed_path_drops_rank(self):
        # two loops at the base reading a and a (unfolded): removing one
        # entire loop via the relation a * a^-1 = 1 is an AO with empty y
        g = FGraph.from_edges([(0, 1, 1), (1, 0, 2), (0, 2, 1), (2, 0, 2)],
                              base=0)
        rank_pre = g.rank()
        p_prime = Path(0, ((2, 1), (3, 1)))
        p1 = Path(0, ((0, 1), (1, 1)))  # closed composite: p1 then p_prime
        rec = apply_AO(g, p1, p_prime, Path(0, ()), ())
        assert g.rank() == rank_pre - 1
        assert g.num_edges() == 2
        assert rec.added_edges == ()

    def test_ao_requires_shortening(self):
        g = self.build_cycle_with_chord()
        p_prime = Path(0, ((0, 1),))
        with pytest.raises(ValueError):
            apply_AO(g, Path(0, ()), p_prime, Path(1, ()), (1,))

    def test_ao_empty_y_needs_closed_path(self):
        g = self.build_cycle_with_chord()
        p_prime = Path(0, ((0, 1), (1, 1)))
        with pytest.raises(ValueError):
            apply_AO(g, Path(0, ()), p_prime, Path(2, ()), ())

    def test_ao_protects_base_interior(self):
        g = FGraph.from_edges([(0, 1, 1), (1, 2, 1), (0, 2, 2)], base=1)
        p_prime = Path(0, ((0, 1), (1, 1)))
        with pytest.raises(ValueError):
            apply_AO(g, Path(0, ()), p_prime, Path(2, ()), (-2,))

    def test_ao_removed_path_must_be_inside_one_arc(self):
        g = bouquet([(1,), (2,)])
        p_prime = Path(0, ((0, 1), (1, 1)))
        with pytest.raises(ValueError):
            apply_AO(g, Path(0, ()), p_prime, Path(0, ()), (1,))

    def test_ao_edge_count_change(self):
        # replace a three-edge run by a two-letter word
        g = FGraph.from_edges(
            [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 2)], base=0)
        p_prime = Path(0, ((0, 1), (1, 1), (2, 1)))
        rec = apply_AO(g, Path(0, ()), p_prime, Path(3, ()), (-2, -2))
        assert g.num_edges() == 4 - 3 + 2
        assert g.rank() == 1
        assert len(rec.added_edges) == 2
