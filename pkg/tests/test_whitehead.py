"""Tests for Whitehead moves, orbit minimization, and orbit certificates."""

import random
from collections import deque

import pytest

from relfold.whitehead import (
    Multiplier,
    OrbitCertificate,
    Relabel,
    apply_move,
    canonical_orbit_form,
    certificate_from_jsonable,
    certificate_jsonable,
    invert_move,
    minimize,
    move_from_jsonable,
    move_jsonable,
    multiplier_moves,
    relabel_moves,
    same_orbit,
    verify_certificate,
)
from relfold.words import cyclic_word, enumerate_cyclically_reduced, inverse, parse_word


def all_moves(m):
    return list(multiplier_moves(m)) + list(relabel_moves(m))


def random_cyclic(rng, m, length):
    letters = [s * g for g in range(1, m + 1) for s in (1, -1)]
    while True:
        w = cyclic_word(tuple(rng.choice(letters) for _ in range(length)))
        if w:
            return w


def orbit_ball(w, m, cap):
    """All cyclic words of length <= cap reachable from ``w`` by any moves.

    Because a chain between two orbit-equivalent words never needs to pass
    through anything longer than the longer endpoint, capping the search at
    ``cap >= max endpoint length`` keeps it exact for those endpoints.
    """
    start = cyclic_word(w)
    seen = {start}
    queue = deque([start])
    moves = all_moves(m)
    while queue:
        x = queue.popleft()
        for mv in moves:
            img = apply_move(x, mv)
            if len(img) <= cap and img not in seen:
                seen.add(img)
                queue.append(img)
    return seen


class TestMoveConstruction:
    def test_relabel_accepts_signed_permutation(self):
        Relabel((2, 1))
        Relabel((-1, 2))
        Relabel((-2, -1))

    def test_relabel_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            Relabel((1, 1))
        with pytest.raises(ValueError):
            Relabel((1, 3))
        with pytest.raises(ValueError):
            Relabel((0, 1))

    def test_multiplier_requires_letter_in_cut(self):
        Multiplier(1, frozenset({1, 2}))
        with pytest.raises(ValueError):
            Multiplier(1, frozenset({2}))

    def test_multiplier_rejects_letter_and_inverse(self):
        with pytest.raises(ValueError):
            Multiplier(1, frozenset({1, -1}))
        with pytest.raises(ValueError):
            Multiplier(0, frozenset({0}))

    def test_move_inventory_sizes(self):
        # Signed permutations of two letters: 2! * 2**2.
        assert len(relabel_moves(2)) == 8
        # Four choices of multiplier letter, each with the other letter's
        # four cut states (absent, +, -, both).
        assert len(multiplier_moves(2)) == 16
        assert len(relabel_moves(3)) == 48
        assert len(multiplier_moves(3)) == 6 * 16


class TestApplyMove:
    def test_relabel_swap(self):
        assert apply_move((1,), Relabel((2, 1))) == (2,)
        assert apply_move(parse_word("ab"), Relabel((2, 1))) == parse_word("ab")

    def test_multiplier_on_single_letter(self):
        mv = Multiplier(1, frozenset({1, 2}))
        assert apply_move((2,), mv) == cyclic_word(parse_word("ba"))
        # The multiplier letter itself is fixed.
        assert apply_move((1,), mv) == (1,)

    def test_multiplier_on_longer_word(self):
        mv = Multiplier(1, frozenset({1, 2}))
        assert apply_move(parse_word("aab"), mv) == cyclic_word(parse_word("aaba"))

    def test_two_sided_case_conjugates(self):
        # With both b and B in the cut, b maps to AbA^-1... i.e. a^-1 b a.
        mv = Multiplier(1, frozenset({1, 2, -2}))
        assert apply_move((2,), mv) == cyclic_word((-1, 2, 1))
        # On a cyclic word the conjugation cancels out.
        assert apply_move(parse_word("ab"), mv) == cyclic_word(parse_word("ab"))

    def test_empty_word_is_fixed(self):
        for mv in all_moves(2):
            assert apply_move((), mv) == ()

    def test_result_is_canonical_cyclic(self):
        rng = random.Random(7)
        for _ in range(50):
            w = random_cyclic(rng, 2, 8)
            mv = rng.choice(all_moves(2))
            img = apply_move(w, mv)
            assert img == cyclic_word(img)


class TestInvertMove:
    def test_relabel_inverse(self):
        rho = Relabel((-2, 1))
        inv = invert_move(rho)
        assert isinstance(inv, Relabel)

    def test_multiplier_inverse_form(self):
        mv = Multiplier(1, frozenset({1, 2}))
        inv = invert_move(mv)
        assert inv == Multiplier(-1, frozenset({-1, 2}))

    def test_rejects_other_types(self):
        with pytest.raises(TypeError):
            invert_move("not a move")

    def test_round_trip_on_random_words(self):
        rng = random.Random(11)
        for mv in all_moves(2):
            for _ in range(10):
                w = random_cyclic(rng, 2, rng.randrange(1, 9))
                assert apply_move(apply_move(w, mv), invert_move(mv)) == w

    def test_double_inversion_is_identity(self):
        for mv in all_moves(2):
            assert invert_move(invert_move(mv)) == mv


class TestCanonicalOrbitForm:
    def test_relabel_invariance(self):
        rng = random.Random(3)
        for _ in range(30):
            w = random_cyclic(rng, 2, 6)
            k = canonical_orbit_form(w, 2)
            for rho in relabel_moves(2):
                assert canonical_orbit_form(apply_move(w, rho), 2) == k

    def test_picks_least_image(self):
        assert canonical_orbit_form((2,), 2) == (1,)
        assert canonical_orbit_form((-1,), 2) == (1,)


class TestMinimize:
    def test_fixed_examples(self):
        word, moves = minimize(parse_word("aab"), 2)
        assert len(word) == 1
        assert moves
        assert minimize(parse_word("abAB"), 2) == (parse_word("abAB"), ())
        assert minimize((1,), 2) == ((1,), ())

    def test_moves_replay_to_result(self):
        rng = random.Random(19)
        for _ in range(20):
            w = random_cyclic(rng, 2, 10)
            word, moves = minimize(w, 2)
            x = cyclic_word(w)
            for mv in moves:
                x = apply_move(x, mv)
            assert x == word

    def test_each_move_strictly_shortens(self):
        rng = random.Random(23)
        for _ in range(20):
            w = random_cyclic(rng, 2, 12)
            word, moves = minimize(w, 2)
            x = cyclic_word(w)
            for mv in moves:
                nxt = apply_move(x, mv)
                assert len(nxt) < len(x)
                x = nxt

    def test_agrees_with_exhaustive_search(self):
        # Every cyclic word of length <= 4 over two generators: the greedy
        # minimum must match the true minimum over the orbit ball.
        seen = set()
        for t in range(1, 5):
            for w in enumerate_cyclically_reduced(2, t):
                c = cyclic_word(w)
                if c in seen:
                    continue
                seen.add(c)
                word, _ = minimize(c, 2)
                ball = orbit_ball(c, 2, cap=6)
                assert len(word) == min(len(x) for x in ball), c

    def test_rejects_foreign_letters(self):
        with pytest.raises(ValueError):
            minimize((1, 3), 2)


class TestSameOrbit:
    def test_reflexive(self):
        rng = random.Random(31)
        for _ in range(10):
            w = random_cyclic(rng, 2, 8)
            cert = same_orbit(w, w, 2)
            assert cert is not None
            assert verify_certificate(cert, 2)

    def test_single_relabel_connects_generators(self):
        cert = same_orbit((1,), (2,), 2)
        assert cert is not None
        assert verify_certificate(cert, 2)

    def test_commutator_and_generator_differ(self):
        assert same_orbit(parse_word("abAB"), (1,), 2) is None

    def test_symmetric(self):
        rng = random.Random(37)
        for _ in range(10):
            u = random_cyclic(rng, 2, 6)
            v = random_cyclic(rng, 2, 6)
            fwd = same_orbit(u, v, 2)
            bwd = same_orbit(v, u, 2)
            assert (fwd is None) == (bwd is None)

    def test_moved_words_reconnect(self):
        rng = random.Random(41)
        moves = all_moves(2)
        for _ in range(10):
            w = random_cyclic(rng, 2, 12)
            img = w
            for _ in range(5):
                img = apply_move(img, rng.choice(moves))
            if not img:
                continue
            cert = same_orbit(w, img, 2)
            assert cert is not None
            assert verify_certificate(cert, 2)
            assert cert.source == cyclic_word(w)
            assert cert.target == cyclic_word(img)

    def test_inverse_detected(self):
        # A word and its inverse count as one orbit here, flagged when the
        # replay lands on the inverse rather than the word itself.
        rng = random.Random(43)
        for _ in range(10):
            w = random_cyclic(rng, 2, 7)
            cert = same_orbit(w, cyclic_word(inverse(w)), 2)
            assert cert is not None
            assert verify_certificate(cert, 2)

    def test_agrees_with_exhaustive_search(self):
        # Pairwise check over all cyclic words of length <= 3.
        words = sorted(
            {cyclic_word(w) for t in range(1, 4) for w in enumerate_cyclically_reduced(2, t)}
        )
        balls = {w: orbit_ball(w, 2, cap=6) for w in words}
        for u in words:
            for v in words:
                expected = v in balls[u] or cyclic_word(inverse(v)) in balls[u]
                cert = same_orbit(u, v, 2)
                assert (cert is not None) == expected, (u, v)
                if cert is not None:
                    assert verify_certificate(cert, 2)

    def test_certificate_replay_detects_tampering(self):
        cert = same_orbit((1,), (2,), 2)
        bad = OrbitCertificate(cert.moves, cert.source, (1, 2), cert.inverted)
        assert not verify_certificate(bad, 2)


class TestMoveSerialization:
    def test_move_round_trip(self):
        for mv in all_moves(3):
            data = move_jsonable(mv)
            assert move_from_jsonable(data) == mv

    def test_relabel_shape(self):
        data = move_jsonable(Relabel((-2, 1)))
        assert data == {"kind": "relabel", "images": [-2, 1]}

    def test_multiplier_shape(self):
        data = move_jsonable(Multiplier(1, frozenset({1, 2, -2})))
        assert data["kind"] == "multiplier"
        assert data["letter"] == 1
        assert set(data["cut"]) == {1, 2, -2}

    def test_certificate_round_trip(self):
        rng = random.Random(47)
        w = random_cyclic(rng, 2, 10)
        img = w
        for _ in range(3):
            img = apply_move(img, rng.choice(all_moves(2)))
        cert = same_orbit(w, img, 2)
        data = certificate_jsonable(cert)
        back = certificate_from_jsonable(data)
        assert back == cert
        assert verify_certificate(back, 2)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            move_from_jsonable({"kind": "mystery"})
