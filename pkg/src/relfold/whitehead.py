"""Whitehead moves: cyclic-length minimization and automorphism orbits.

A *Whitehead move* on the free group of rank ``m`` is either a relabel
(a permutation of the generators composed with inverting some of them)
or a multiplier move determined by a signed letter ``a`` and a cut set
``S`` of signed letters with ``a in S`` and ``-a not in S``.  The
multiplier move fixes ``a`` and sends every other letter ``x`` to
``x*a``, ``a^-1*x``, ``a^-1*x*a``, or ``x`` according to whether ``S``
contains ``x`` only, ``x^-1`` only, both, or neither.  Together these
moves generate the automorphism group, and they suffice to answer two
questions about cyclic words (conjugacy classes):

* :func:`minimize` — the shortest cyclic length in a word's orbit.
  Greedy descent works: while some multiplier move strictly shortens
  the word, apply the first one in a fixed enumeration.  By the peak
  reduction property of Whitehead moves, a word no move can shorten has
  globally minimal length in its orbit.
* :func:`same_orbit` — whether two cyclic words lie in a common orbit,
  up to inversion of one of them.  After minimizing both (different
  minimal lengths settle the question), a breadth-first search walks
  the level set of minimal-length words reachable by length-preserving
  multiplier moves, collapsing each node to a canonical form under the
  finite relabel group; again by peak reduction, two minimal words of
  the same orbit are always connected inside that level set.

Positive answers come with an :class:`OrbitCertificate` whose move
sequence replays from source to target — certificates are re-verified
before being returned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Optional

from .words import (
    Word,
    cyclic_word,
    format_word,
    inverse,
    letter_key,
    parse_word,
    substitute,
    word_key,
)


@dataclass(frozen=True)
class Relabel:
    """A signed permutation of the generators: generator k maps to the
    (possibly inverted) generator ``images[k-1]``."""

    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if sorted(abs(x) for x in self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError("images must be a signed permutation of the generators")


@dataclass(frozen=True)
class Multiplier:
    """The move of multiplier ``letter`` and cut set ``cut``."""

    letter: int
    cut: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "cut", frozenset(self.cut))
        if self.letter == 0 or 0 in self.cut:
            raise ValueError("letters are nonzero signed integers")
        if self.letter not in self.cut:
            raise ValueError("cut set must contain the multiplier letter")
        if -self.letter in self.cut:
            raise ValueError("cut set must not contain the multiplier's inverse")


WhiteheadMove = object  # Relabel | Multiplier


def invert_move(mv):
    """The move undoing ``mv``: apply_move(apply_move(w, mv), invert_move(mv)) == w."""
    if isinstance(mv, Relabel):
        inv = [0] * len(mv.images)
        for k, img in enumerate(mv.images, start=1):
            inv[abs(img) - 1] = k if img > 0 else -k
        return Relabel(tuple(inv))
    if isinstance(mv, Multiplier):
        return Multiplier(-mv.letter, (mv.cut - {mv.letter}) | {-mv.letter})
    raise TypeError(f"not a Whitehead move: {mv!r}")


def _image_table(mv, m: int) -> tuple[Word, ...]:
    """Images of generators 1..m under ``mv``, for substitution."""
    if isinstance(mv, Relabel):
        if len(mv.images) < m:
            raise ValueError("relabel does not cover the word's alphabet")
        return tuple((img,) for img in mv.images[:m])
    if isinstance(mv, Multiplier):
        a = mv.letter
        table = []
        for k in range(1, m + 1):
            if k == abs(a):
                table.append((k,))
                continue
            front = k in mv.cut
            back = -k in mv.cut
            if front and back:
                table.append((-a, k, a))
            elif front:
                table.append((k, a))
            elif back:
                table.append((-a, k))
            else:
                table.append((k,))
        return tuple(table)
    raise TypeError(f"not a Whitehead move: {mv!r}")


def apply_move(w: Word, mv) -> Word:
    """Image of the cyclic word ``w``: substitute letter images, then
    reduce freely and cyclically and take the canonical rotation."""
    if not w:
        return ()
    m = max(abs(x) for x in w)
    return cyclic_word(substitute(w, _image_table(mv, m)))


@lru_cache(maxsize=8)
def relabel_moves(m: int) -> tuple[Relabel, ...]:
    """The full relabel group: all 2^m * m! signed permutations."""
    return tuple(
        Relabel(tuple(s * p for s, p in zip(signs, perm)))
        for perm in permutations(range(1, m + 1))
        for signs in product((1, -1), repeat=m)
    )


@lru_cache(maxsize=8)
def multiplier_moves(m: int) -> tuple[Multiplier, ...]:
    """All multiplier moves, in a fixed enumeration: multiplier letters
    by alphabet order, cut sets by a two-bits-per-generator mask."""
    moves = []
    letters = sorted((s * k for k in range(1, m + 1) for s in (1, -1)), key=letter_key)
    for a in letters:
        others = [g for g in range(1, m + 1) if g != abs(a)]
        for mask in range(4 ** len(others)):
            cut = {a}
            for i, g in enumerate(others):
                bits = (mask >> (2 * i)) & 3
                if bits & 1:
                    cut.add(g)
                if bits & 2:
                    cut.add(-g)
            moves.append(Multiplier(a, frozenset(cut)))
    return tuple(moves)


def canonical_orbit_form(w: Word, m: int) -> Word:
    """Least relabel image of the cyclic word ``w`` — a canonical
    representative of its orbit under the relabel group."""
    return min((apply_move(w, rho) for rho in relabel_moves(m)), key=word_key)


def _check_alphabet(w: Word, m: int) -> None:
    if not w:
        raise ValueError("word must be nontrivial")
    if any(abs(x) > m for x in w):
        raise ValueError(f"word uses letters outside alphabet of rank {m}")


def minimize(w: Word, m: int) -> tuple[Word, tuple]:
    """Greedy descent to the minimal cyclic length in the orbit of ``w``.

    Returns the minimal word reached and the moves that got there.  When
    no multiplier move shortens the result, none exists at all, so the
    returned length is the true orbit minimum.

    >>> minimize((1, 1, 2), 2)[0]
    (2,)
    >>> minimize((1, 2, -1, -2), 2)[0]
    (1, 2, -1, -2)
    """
    _check_alphabet(w, m)
    current = cyclic_word(w)
    moves = []
    shortened = True
    while shortened:
        shortened = False
        for mv in multiplier_moves(m):
            img = apply_move(current, mv)
            if len(img) < len(current):
                moves.append(mv)
                current = img
                shortened = True
                break
    return current, tuple(moves)


@dataclass(frozen=True)
class OrbitCertificate:
    """A replayable witness that two cyclic words share an orbit.

    Applying ``moves`` in order to ``source`` yields ``target`` as a
    cyclic word, or the inverse of ``target`` when ``inverted``.
    """

    moves: tuple
    source: Word
    target: Word
    inverted: bool


def verify_certificate(cert: OrbitCertificate, m: int) -> bool:
    """Replay a certificate and compare against its target."""
    x = cyclic_word(cert.source)
    for mv in cert.moves:
        x = apply_move(x, mv)
    expected = cyclic_word(cert.target)
    if cert.inverted:
        expected = cyclic_word(inverse(expected))
    return x == expected


def same_orbit(u: Word, v: Word, m: int) -> Optional[OrbitCertificate]:
    """Search for an automorphism carrying ``u`` to ``v`` or its inverse.

    Minimizes both words (distinct minimal lengths rule the orbits
    apart), then breadth-first searches the level set of minimal words
    reachable from u's minimum by length-preserving multiplier moves,
    visiting each relabel-canonical form once.  Returns a verified
    certificate, or None when the orbits differ.
    """
    _check_alphabet(u, m)
    _check_alphabet(v, m)
    min_u, moves_u = minimize(u, m)
    min_v, moves_v = minimize(v, m)
    if len(min_u) != len(min_v):
        return None

    target_fwd = min_v
    target_inv = cyclic_word(inverse(min_v))
    canon_fwd = canonical_orbit_form(target_fwd, m)
    canon_inv = canonical_orbit_form(target_inv, m)

    start_key = canonical_orbit_form(min_u, m)
    visited = {start_key}
    queue = deque([(min_u, ())])
    hit: Optional[tuple[Word, tuple, bool]] = None
    while queue:
        x, path = queue.popleft()
        key = canonical_orbit_form(x, m)
        if key == canon_fwd:
            hit = (x, path, False)
            break
        if key == canon_inv:
            hit = (x, path, True)
            break
        for mv in multiplier_moves(m):
            img = apply_move(x, mv)
            if len(img) != len(x):
                continue
            ikey = canonical_orbit_form(img, m)
            if ikey not in visited:
                visited.add(ikey)
                queue.append((img, path + (mv,)))
    if hit is None:
        return None

    x, path, inverted = hit
    target_word = target_inv if inverted else target_fwd
    moves = tuple(moves_u) + tuple(path)
    if x != target_word:
        closing = None
        for rho in relabel_moves(m):
            if apply_move(x, rho) == target_word:
                closing = rho
                break
        assert closing is not None, "canonical forms matched but no relabel closes the gap"
        moves = moves + (closing,)

    tail = tuple(invert_move(mv) for mv in reversed(moves_v))
    cert = OrbitCertificate(
        moves=moves + tail,
        source=cyclic_word(u),
        target=cyclic_word(v),
        inverted=inverted,
    )
    assert verify_certificate(cert, m), "assembled certificate failed to replay"
    return cert


# ---------------------------------------------------------------------------
# JSON shapes for moves and certificates.
# ---------------------------------------------------------------------------


def move_jsonable(mv) -> dict:
    if isinstance(mv, Relabel):
        return {"kind": "relabel", "images": list(mv.images)}
    if isinstance(mv, Multiplier):
        return {
            "kind": "multiplier",
            "letter": mv.letter,
            "cut": sorted(mv.cut, key=letter_key),
        }
    raise TypeError(f"not a Whitehead move: {mv!r}")


def move_from_jsonable(data: dict):
    kind = data.get("kind")
    if kind == "relabel":
        return Relabel(tuple(data["images"]))
    if kind == "multiplier":
        return Multiplier(data["letter"], frozenset(data["cut"]))
    raise ValueError(f"unknown move kind: {kind!r}")


def certificate_jsonable(cert: OrbitCertificate) -> dict:
    return {
        "moves": [move_jsonable(mv) for mv in cert.moves],
        "source": format_word(cert.source),
        "target": format_word(cert.target),
        "inverted": cert.inverted,
    }


def certificate_from_jsonable(data: dict) -> OrbitCertificate:
    return OrbitCertificate(
        moves=tuple(move_from_jsonable(d) for d in data["moves"]),
        source=parse_word(data["source"]),
        target=parse_word(data["target"]),
        inverted=bool(data["inverted"]),
    )
