"""Words in a finitely generated free group.

A word is a tuple of nonzero integers: ``+i`` stands for the generator
``a_i`` and ``-i`` for its inverse.  The empty tuple is the identity.
Text form uses lowercase letters for generators and uppercase for their
inverses, so ``"aBa"`` is a * b^-1 * a; the empty word prints as ``"1"``.

A cyclic word is represented by the lexicographically least rotation of a
cyclically reduced word, under the letter order a < A < b < B < c < ...

Counting and sampling of cyclically reduced words use an exact
transfer-matrix dynamic program over (first letter, last letter) pairs,
so sampling is exactly uniform -- there is no rejection step.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

Word = tuple  # tuple of nonzero ints; +i = generator i, -i = its inverse


def letter_key(x: int) -> int:
    """Total order on signed letters: a < A < b < B < ...

    >>> sorted([1, -1, 2, -2], key=letter_key)
    [1, -1, 2, -2]
    """
    return 2 * (abs(x) - 1) + (0 if x > 0 else 1)


def word_key(w: Sequence[int]) -> tuple:
    return tuple(letter_key(x) for x in w)


def free_reduce(letters: Sequence[int]) -> Word:
    """Freely reduce a letter sequence.

    >>> free_reduce((1, 2, -2, -1, 2))
    (2,)
    >>> free_reduce(())
    ()
    """
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("letters must be nonzero integers")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1)) and 0 not in w


def inverse(w: Sequence[int]) -> Word:
    """Inverse word: reverse and negate.

    >>> inverse((1, 2, -3))
    (3, -2, -1)
    """
    return tuple(-x for x in reversed(w))


def concat(*ws: Sequence[int]) -> Word:
    """Concatenate words and freely reduce the result."""
    out: list[int] = []
    for w in ws:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def substitute(w: Sequence[int], images: Sequence[Sequence[int]]) -> Word:
    """Evaluate ``w`` under letter k -> images[k-1], freely reduced.

    Negative letters map to the inverse image.

    >>> substitute((1, -2), ((1, 2), (3,)))
    (1, 2, -3)
    """
    out: list[int] = []
    for k in w:
        img = images[k - 1] if k > 0 else inverse(images[-k - 1])
        for x in img:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def cyclic_reduce(w: Sequence[int]) -> tuple[Word, Word]:
    """Cyclically reduce, returning ``(core, conjugator)``.

    The input must be freely reduced; then ``w = conjugator * core *
    conjugator^-1`` with ``core`` cyclically reduced.

    >>> cyclic_reduce((2, 1, -2))
    ((1,), (2,))
    """
    w = tuple(w)
    if not is_reduced(w):
        raise ValueError("input word is not freely reduced")
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j], w[:i]


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    if not is_reduced(w):
        return False
    return len(w) < 2 or w[0] != -w[-1]


def canonical_rotation(w: Sequence[int]) -> Word:
    """Least rotation of a cyclically reduced word under a < A < b < B < ...

    >>> canonical_rotation((2, 1, 1))
    (1, 1, 2)
    """
    w = tuple(w)
    if not is_cyclically_reduced(w):
        raise ValueError("canonical_rotation needs a cyclically reduced word")
    if not w:
        return w
    best = w
    bestk = word_key(w)
    for o in range(1, len(w)):
        cand = w[o:] + w[:o]
        k = word_key(cand)
        if k < bestk:
            best, bestk = cand, k
    return best


def cyclic_word(w: Sequence[int]) -> Word:
    """Canonical cyclic-word representative: reduce, cyclically reduce,
    then take the least rotation."""
    core, _ = cyclic_reduce(free_reduce(w))
    return canonical_rotation(core)


def cyclic_permutations(w: Sequence[int]) -> list[Word]:
    """All rotations of a nonempty cyclically reduced word, in offset order."""
    w = tuple(w)
    if not w:
        raise ValueError("empty word has no rotations")
    if not is_cyclically_reduced(w):
        raise ValueError("cyclic_permutations needs a cyclically reduced word")
    return [w[o:] + w[:o] for o in range(len(w))]


def power_decomposition(w: Sequence[int]) -> tuple[Word, int]:
    """Write a cyclically reduced word as ``root^k`` with ``k`` maximal.

    For cyclically reduced words, being a proper power in the free group
    is the same as literal periodicity, so a divisor scan is exact.

    >>> power_decomposition((1, 2, 1, 2))
    ((1, 2), 2)
    """
    w = tuple(w)
    if not is_cyclically_reduced(w):
        raise ValueError("power_decomposition needs a cyclically reduced word")
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and w == w[:d] * (n // d):
            return w[:d], n // d
    raise AssertionError("unreachable")


def is_proper_power(w: Sequence[int]) -> bool:
    """Whether a cyclically reduced word equals u^k with k >= 2."""
    if not w:
        return False
    return power_decomposition(w)[1] >= 2


# ---------------------------------------------------------------------------
# Text form


@dataclass(frozen=True)
class Alphabet:
    """Generator alphabet a_1 .. a_m.  Text form needs m <= 26."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("alphabet rank must be at least 2")

    def letters(self) -> list[int]:
        """Signed letters in the order a, A, b, B, ..."""
        out = []
        for i in range(1, self.m + 1):
            out.extend((i, -i))
        return out

    def check_word(self, w: Sequence[int]) -> Word:
        w = tuple(w)
        for x in w:
            if x == 0 or abs(x) > self.m:
                raise ValueError(f"letter index {x} out of range for rank {self.m}")
        return w


def parse_word(text: str, m: int | None = None) -> Word:
    """Parse text form into a word (without reducing it).

    >>> parse_word("aBa")
    (1, -2, 1)
    >>> parse_word("1")
    ()
    """
    text = text.strip()
    if text == "1" or text == "":
        return ()
    out = []
    for ch in text:
        if "a" <= ch <= "z":
            x = ord(ch) - ord("a") + 1
        elif "A" <= ch <= "Z":
            x = -(ord(ch) - ord("A") + 1)
        else:
            raise ValueError(f"bad character {ch!r} in word {text!r}")
        if m is not None and abs(x) > m:
            raise ValueError(f"letter {ch!r} out of range for rank {m}")
        out.append(x)
    return tuple(out)


def format_word(w: Sequence[int]) -> str:
    """Inverse of parse_word; the empty word prints as "1".

    >>> format_word((1, -2, 1))
    'aBa'
    """
    if not w:
        return "1"
    out = []
    for x in w:
        if x == 0 or abs(x) > 26:
            raise ValueError(f"letter {x} has no text form")
        out.append(chr(ord("a") + x - 1) if x > 0 else chr(ord("A") - x - 1))
    return "".join(out)


# ---------------------------------------------------------------------------
# Counting and exact uniform sampling

def _letters(m: int) -> list[int]:
    out = []
    for i in range(1, m + 1):
        out.extend((i, -i))
    return out


@lru_cache(maxsize=16)
def _completion_table(m: int, t: int, first: int) -> list[dict[int, int]]:
    """B[j][y] = number of ways to fill positions j+1..t of a reduced word
    given that position j holds letter y, subject to the cyclic constraint
    that position t must not be the inverse of ``first``.

    Positions are 1-based; the table is indexed B[j] for j in 1..t.
    """
    letters = _letters(m)
    B: list[dict[int, int]] = [dict() for _ in range(t + 1)]
    B[t] = {y: 1 for y in letters}
    for j in range(t - 1, 0, -1):
        nxt = B[j + 1]
        row = {}
        for y in letters:
            total = 0
            for z in letters:
                if z == -y:
                    continue
                if j + 1 == t and z == -first:
                    continue
                total += nxt[z]
            row[y] = total
        B[j] = row
    return B


def count_cyclically_reduced(m: int, t: int) -> int:
    """Number of cyclically reduced words of length exactly t over rank m.

    Transfer-matrix count over (first, last) letter pairs.

    >>> count_cyclically_reduced(2, 2)
    12
    """
    if m < 1:
        raise ValueError("rank must be positive")
    if t < 0:
        raise ValueError("length must be nonnegative")
    if t == 0:
        return 1
    total = 0
    for first in _letters(m):
        total += _completion_table(m, t, first)[1][first]
    return total


def count_cyclically_reduced_up_to(m: int, t: int) -> int:
    """Number of nonempty cyclically reduced words of length <= t."""
    return sum(count_cyclically_reduced(m, k) for k in range(1, t + 1))


def random_cyclically_reduced(m: int, t: int, rng: random.Random) -> Word:
    """Exactly uniform cyclically reduced word of length t.

    Letters are drawn left to right; each conditional distribution is the
    exact ratio of completion counts from the transfer-matrix table, so
    every cyclically reduced word of length t has equal probability.
    """
    if t < 1:
        raise ValueError("length must be at least 1")
    letters = _letters(m)
    # first letter from its exact marginal
    weights = [_completion_table(m, t, f)[1][f] for f in letters]
    total = sum(weights)
    x = rng.randrange(total)
    for first, wt in zip(letters, weights):
        if x < wt:
            break
        x -= wt
    word = [first]
    B = _completion_table(m, t, first)
    for j in range(2, t + 1):
        prev = word[-1]
        cands = [z for z in letters
                 if z != -prev and not (j == t and z == -first)]
        row = B[j]
        total = sum(row[z] for z in cands)
        x = rng.randrange(total)
        for z in cands:
            if x < row[z]:
                break
            x -= row[z]
        word.append(z)
    w = tuple(word)
    assert is_cyclically_reduced(w)
    return w


def random_cyclically_reduced_up_to(m: int, t: int, rng: random.Random) -> Word:
    """Uniform over all nonempty cyclically reduced words of length <= t."""
    counts = [count_cyclically_reduced(m, k) for k in range(1, t + 1)]
    x = rng.randrange(sum(counts))
    for k, c in enumerate(counts, start=1):
        if x < c:
            return random_cyclically_reduced(m, k, rng)
        x -= c
    raise AssertionError("unreachable")


def enumerate_reduced(m: int, t: int) -> Iterator[Word]:
    """All freely reduced words of length exactly t (test oracle)."""
    letters = _letters(m)

    def rec(prefix: list[int]):
        if len(prefix) == t:
            yield tuple(prefix)
            return
        for x in letters:
            if prefix and prefix[-1] == -x:
                continue
            prefix.append(x)
            yield from rec(prefix)
            prefix.pop()

    yield from rec([])


def enumerate_cyclically_reduced(m: int, t: int) -> Iterator[Word]:
    """All cyclically reduced words of length exactly t (test oracle)."""
    for w in enumerate_reduced(m, t):
        if t < 2 or w[0] != -w[-1]:
            yield w
