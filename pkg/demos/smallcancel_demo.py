"""Pieces, the C'(lambda) condition, and Dehn reduction.

A piece is a common prefix of two distinct members of the symmetrized
relator family.  Small cancellation bounds every piece below a fraction
of its relator's length; under C'(1/6) Dehn's algorithm decides the word
problem by greedy replacement.
"""

import random
from fractions import Fraction

from relfold.smallcancel import Presentation, check_Cprime, dehn_reduce, max_piece
from relfold.words import (
    Alphabet,
    concat,
    format_word,
    free_reduce,
    inverse,
    is_proper_power,
    parse_word,
    random_cyclically_reduced,
)


def main():
    for m, text in [(2, "abAB"), (2, "aabb"), (4, "abABcdCD")]:
        p = Presentation(Alphabet(m), (parse_word(text, m),))
        length, ratio = max_piece(p)
        print(f"relator {text:8} (rank {m}): max piece length {length}, ratio {ratio}")

    print("\nC'(1/6) verdicts:")
    for text in ["abAB", "aabb"]:
        p = Presentation(Alphabet(2), (parse_word(text),))
        result = check_Cprime(p, Fraction(1, 6))
        if result:
            print(f"  {text}: passes")
        else:
            print(f"  {text}: fails — piece {format_word(result.piece)} "
                  f"has ratio {result.ratio}")

    rng = random.Random(99)
    while True:
        r = random_cyclically_reduced(2, 120, rng)
        if is_proper_power(r):
            continue
        p = Presentation(Alphabet(2), (r,))
        if check_Cprime(p, Fraction(1, 6)):
            break
    print(f"\nSampled a C'(1/6) relator of length {len(r)}.")

    survivors = 0
    for _ in range(50):
        w = ()
        for _ in range(rng.randrange(1, 4)):
            rel = p.relators[0] if rng.random() < 0.5 else inverse(p.relators[0])
            c = tuple(rng.choice([1, -1, 2, -2]) for _ in range(rng.randrange(0, 5)))
            w = free_reduce(concat(w, c, rel, inverse(c)))
        if dehn_reduce(w, p) != ():
            survivors += 1
    print(f"Dehn reduction annihilated {50 - survivors}/50 products of "
          "conjugated relators.")

    garbage = parse_word("abab")
    print(f"A non-relator like {format_word(garbage)} survives: "
          f"{format_word(dehn_reduce(garbage, p))}")


if __name__ == "__main__":
    main()
