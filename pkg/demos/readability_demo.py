"""Reading words in small labeled graphs.

A word is mu-readable when some connected graph with at most mu·|w|
edges (and bounded rank) carries a path spelling it.  The demo runs the
decision procedure on a few instructive cases and prints the witness
graphs it finds.
"""

from fractions import Fraction

from relfold.readability import ReadabilityQuery, is_readable
from relfold.words import parse_word


CASES = [
    ("ababab", "1/3", 1, False),
    ("abAB", "1/2", 1, False),
    ("aaaa", "1/4", 1, False),
    ("aabb", "1/2", 2, False),
    ("aabb", "1/2", 2, True),
    ("abABab", "1", 2, False),
]


def describe(answer):
    if answer.graph is None:
        return ""
    edges = ", ".join(
        f"{o}->{t}:{label}" for o, t, label in
        (answer.graph.edges[e] for e in sorted(answer.graph.edges))
    )
    return f"  witness edges [{edges}], path start {answer.path.start}"


def main():
    for text, mu, rank_bound, low in CASES:
        query = ReadabilityQuery(
            parse_word(text), 2, Fraction(mu), rank_bound,
            require_low_degree=low,
        )
        answer = is_readable(query)
        flags = f"mu={mu}, rank<={rank_bound}" + (", low-degree" if low else "")
        print(f"{text:8} ({flags}): {answer.verdict}")
        if answer.graph is not None:
            print(describe(answer))

    print("\nBudgeted search on a longer word:")
    query = ReadabilityQuery(parse_word("abABaabbABab"), 2, Fraction(1, 3), 1,
                             node_budget=2)
    print(f"  budget 2 nodes -> {is_readable(query).verdict}")
    query = ReadabilityQuery(parse_word("abABaabbABab"), 2, Fraction(1, 3), 1)
    print(f"  unbounded      -> {is_readable(query).verdict}")


if __name__ == "__main__":
    main()
