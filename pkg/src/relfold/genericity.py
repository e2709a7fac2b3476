"""Membership testing for a class of presentations, and how common it is.

A presentation with relators ``r_1, ..., r_n`` belongs to the class cut
out by parameters ``(lam, mu, L)`` when three conditions hold:

1. the small cancellation condition ``C'(lam)`` (no long pieces);
2. no relator is a proper power;
3. no subword of a cyclic permutation of a relator spanning at least
   half the relator is readable — neither with edge budget ``mu`` and
   rank bound ``m - 1``, nor with edge budget ``mu``, rank bound ``L``,
   and a free-slot (low-degree vertex) requirement.

The parameters must satisfy the exact rational chain
``lam <= mu/(15L + 3mu) <= mu/(15m + 3mu) < 1/6`` with ``0 < mu <= 1``;
the middle link forces ``L >= m``.

Because readability of long subwords is expensive, condition (3) runs
under an optional node budget; exhausting it yields an ``Undetermined``
verdict rather than a false certificate.  ``sample_genericity`` draws
random presentations at given relator lengths and tabulates how often
each condition holds, which makes the asymptotic trend — almost every
long presentation satisfies (1) and (2) — observable at desk scale.

Subwords of relator inverses are not checked separately: readability is
invariant under word inversion, and the subwords of the inverse of a
cyclic word are exactly the inverses of its subwords.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from fractions import Fraction
from math import exp, log
from random import Random
from typing import Iterator, Optional

from .readability import READABLE, UNKNOWN, ReadabilityQuery, is_readable
from .smallcancel import CprimeResult, Presentation, check_Cprime
from .words import (
    Alphabet,
    Word,
    format_word,
    is_proper_power,
    power_decomposition,
    random_cyclically_reduced,
    random_cyclically_reduced_up_to,
)

IN_CLASS = "InClass"
NOT_IN_CLASS = "NotInClass"
UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class ClassParams:
    """Exact rational parameters (lam, mu, L) of the presentation class."""

    lam: Fraction
    mu: Fraction
    L: int

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))
        object.__setattr__(self, "mu", Fraction(self.mu))
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.mu <= 0:
            raise ValueError("mu must be positive")


def default_params(m: int) -> ClassParams:
    """The documented defaults: mu = 1/2, L = m, and the largest legal lam.

    With mu = 1/2 and L = m the bound lam <= mu/(15L + 3mu) becomes
    lam <= 1/(30m + 3); for m = 2 this gives lam = 1/63.
    """
    if m < 2:
        raise ValueError("alphabet rank must be at least 2")
    return ClassParams(Fraction(1, 30 * m + 3), Fraction(1, 2), m)


def validate_params(params: ClassParams, m: int) -> tuple[bool, Optional[str]]:
    """Check the exact inequality chain; report the first violated link."""
    if m < 1:
        raise ValueError("alphabet rank must be at least 1")
    lam, mu, L = params.lam, params.mu, params.L
    if mu > 1:
        return False, "mu <= 1"
    if lam > mu / (15 * L + 3 * mu):
        return False, "lam <= mu/(15*L + 3*mu)"
    if L < m:
        return False, "mu/(15*L + 3*mu) <= mu/(15*m + 3*mu) (needs L >= m)"
    if mu / (15 * m + 3 * mu) >= Fraction(1, 6):
        return False, "mu/(15*m + 3*mu) < 1/6"
    return True, None


def relevant_subwords(r: Word) -> tuple[Word, ...]:
    """All cyclic subwords of ``r`` spanning at least half of it.

    Subwords are read off the doubled word, enumerated by increasing
    length and then by starting offset, deduplicated by literal equality.

    >>> relevant_subwords((1, 2))
    ((1,), (2,), (1, 2), (2, 1))
    >>> relevant_subwords((1, 1))
    ((1,), (1, 1))
    """
    return tuple(_iter_relevant_subwords(r))


def _iter_relevant_subwords(r: Word) -> Iterator[Word]:
    if not r:
        raise ValueError("relator must be nontrivial")
    size = len(r)
    doubled = tuple(r) + tuple(r)
    seen = set()
    for length in range((size + 1) // 2, size + 1):
        for off in range(size):
            w = doubled[off : off + length]
            if w not in seen:
                seen.add(w)
                yield w


@dataclass(frozen=True)
class PowerStatus:
    """Proper-power analysis of one relator: r = root^exponent."""

    relator_index: int
    is_power: bool
    root: Word
    exponent: int


@dataclass(frozen=True)
class C3Status:
    """Outcome of the half-subword readability sweep.

    ``violation`` is the first readable subword found, as a triple
    (relator index, subword, which query flagged it: "mu" for the plain
    rank bound m - 1, "muL" for rank bound L with the free-slot flag).
    ``unknown_checks`` counts readability calls that gave ``Unknown``;
    ``complete`` records whether the sweep visited every subword.
    """

    violation: Optional[tuple[int, Word, str]]
    checked_subwords: int
    unknown_checks: int
    complete: bool


@dataclass(frozen=True)
class MembershipReport:
    """Results of all three class conditions plus the combined verdict.

    ``verdict`` is ``InClass`` only when every condition is certified
    with zero unknowns.  On a definite violation ``failed_condition``
    names the culprit ("C1", "C2", or "C3"); when both C1 and C2 fail,
    C2 is reported.  ``c3`` is None when a C1/C2 failure made the
    subword sweep moot.
    """

    c1: CprimeResult
    c2: tuple[PowerStatus, ...]
    c3: Optional[C3Status]
    verdict: str
    failed_condition: Optional[str]


def check_membership(
    p: Presentation, params: ClassParams, node_budget: Optional[int] = None
) -> MembershipReport:
    """Decide class membership, honestly reporting budget exhaustion."""
    m = p.alphabet.m
    ok, why = validate_params(params, m)
    if not ok:
        raise ValueError(f"invalid class parameters: requires {why}")

    c2 = tuple(
        PowerStatus(i, is_proper_power(r), *power_decomposition(r))
        for i, r in enumerate(p.relators)
    )
    c1 = check_Cprime(p, params.lam)

    if any(st.is_power for st in c2):
        return MembershipReport(c1, c2, None, NOT_IN_CLASS, "C2")
    if not c1.ok:
        return MembershipReport(c1, c2, None, NOT_IN_CLASS, "C1")

    remaining = node_budget
    checked = 0
    unknown = 0
    complete = True
    violation: Optional[tuple[int, Word, str]] = None
    for i, r in enumerate(p.relators):
        for w in _iter_relevant_subwords(r):
            subword_done = True
            for which, rank_bound, low in (
                ("mu", m - 1, False),
                ("muL", params.L, True),
            ):
                if remaining is not None and remaining <= 0:
                    complete = False
                    subword_done = False
                    break
                query = ReadabilityQuery(
                    w, m, params.mu, rank_bound, low, node_budget=remaining
                )
                ans = is_readable(query)
                if remaining is not None:
                    remaining -= ans.nodes_expanded
                if ans.verdict == READABLE:
                    violation = (i, w, which)
                    break
                if ans.verdict == UNKNOWN:
                    unknown += 1
                    complete = False
                    subword_done = False
                    break
            if subword_done:
                checked += 1
            if violation is not None or not complete:
                break
        if violation is not None or not complete:
            break

    c3 = C3Status(violation, checked, unknown, complete)
    if violation is not None:
        return MembershipReport(c1, c2, c3, NOT_IN_CLASS, "C3")
    if not complete or unknown:
        return MembershipReport(c1, c2, c3, UNDETERMINED, None)
    return MembershipReport(c1, c2, c3, IN_CLASS, None)


@dataclass(frozen=True)
class SampleRow:
    """Tallies for one relator length.

    The pass counts are cumulative filters: ``pass_c1`` counts samples
    satisfying condition (1), ``pass_c2`` those satisfying (1) and (2),
    ``pass_c3_checked`` those whose condition-(3) sweep completed with
    no violation and no unknowns, and ``pass_all`` the ``InClass``
    verdicts.  ``unknown`` counts ``Undetermined`` verdicts.
    ``fraction`` is pass_all / (samples - unknown), or None when every
    sample was undetermined.
    """

    t: int
    samples: int
    pass_c1: int
    pass_c2: int
    pass_c3_checked: int
    pass_all: int
    unknown: int
    fraction: Optional[Fraction]


@dataclass(frozen=True)
class SampleTable:
    """Rows per relator length plus an optional fitted decay rate.

    ``decay_rate`` estimates c in (1 - fraction) ~ c^t by least squares
    on the log scale, when at least two rows admit the fit.
    """

    rows: tuple[SampleRow, ...]
    decay_rate: Optional[float]


def sample_genericity(
    m: int,
    n: int,
    t_list,
    samples_per_t: int,
    params: ClassParams,
    node_budget: Optional[int],
    seed,
    exact_length: bool = True,
) -> SampleTable:
    """Estimate how often random presentations land in the class.

    For each ``t``, draws ``samples_per_t`` presentations whose ``n``
    relators are independent uniform cyclically reduced words of length
    exactly ``t`` (or length at most ``t`` with ``exact_length=False``),
    and runs :func:`check_membership` on each.  Each sample uses its own
    RNG substream derived from (seed, t, index), so tables are
    deterministic for a given seed and independent of evaluation order.
    """
    ok, why = validate_params(params, m)
    if not ok:
        raise ValueError(f"invalid class parameters: requires {why}")
    if n < 1:
        raise ValueError("need at least one relator slot")
    if samples_per_t < 1:
        raise ValueError("need at least one sample per length")

    alphabet = Alphabet(m)
    draw = random_cyclically_reduced if exact_length else random_cyclically_reduced_up_to
    rows = []
    for t in t_list:
        pass_c1 = pass_c2 = pass_c3 = pass_all = unknown = 0
        for i in range(samples_per_t):
            rng = Random(f"{seed}:{t}:{i}")
            relators = tuple(draw(m, t, rng) for _ in range(n))
            report = check_membership(Presentation(alphabet, relators), params, node_budget)
            c1_ok = report.c1.ok
            c2_ok = c1_ok and not any(st.is_power for st in report.c2)
            pass_c1 += c1_ok
            pass_c2 += c2_ok
            if (
                c2_ok
                and report.c3 is not None
                and report.c3.complete
                and report.c3.violation is None
                and report.c3.unknown_checks == 0
            ):
                pass_c3 += 1
            pass_all += report.verdict == IN_CLASS
            unknown += report.verdict == UNDETERMINED
        fraction = (
            Fraction(pass_all, samples_per_t - unknown)
            if unknown < samples_per_t
            else None
        )
        rows.append(
            SampleRow(t, samples_per_t, pass_c1, pass_c2, pass_c3, pass_all, unknown, fraction)
        )
    return SampleTable(tuple(rows), _fit_decay_rate(rows))


def _fit_decay_rate(rows) -> Optional[float]:
    """Least-squares fit of log(1 - fraction) against t; returns e^slope."""
    points = [
        (row.t, log(1 - row.fraction))
        for row in rows
        if row.fraction is not None and 0 <= row.fraction < 1
    ]
    if len(points) < 2 or len({t for t, _ in points}) < 2:
        return None
    slope, _ = statistics.linear_regression([t for t, _ in points], [y for _, y in points])
    return exp(slope)


# ---------------------------------------------------------------------------
# Serialization: CSV for tables, JSON-ready dicts for reports.
# ---------------------------------------------------------------------------


def _fraction_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def sample_table_csv(table: SampleTable) -> str:
    """Render a table as CSV; an all-undetermined row gets fraction 0/0."""
    lines = ["t,samples,pass_c1,pass_c2,pass_c3_checked,pass_all,unknown,fraction_num,fraction_den"]
    for row in table.rows:
        num, den = (
            (row.fraction.numerator, row.fraction.denominator)
            if row.fraction is not None
            else (0, 0)
        )
        lines.append(
            f"{row.t},{row.samples},{row.pass_c1},{row.pass_c2},"
            f"{row.pass_c3_checked},{row.pass_all},{row.unknown},{num},{den}"
        )
    return "\n".join(lines) + "\n"


def sample_table_jsonable(table: SampleTable) -> dict:
    return {
        "rows": [
            {
                "t": row.t,
                "samples": row.samples,
                "pass_c1": row.pass_c1,
                "pass_c2": row.pass_c2,
                "pass_c3_checked": row.pass_c3_checked,
                "pass_all": row.pass_all,
                "unknown": row.unknown,
                "fraction": _fraction_str(row.fraction) if row.fraction is not None else None,
            }
            for row in table.rows
        ],
        "decay_rate": table.decay_rate,
    }


def membership_report_jsonable(report: MembershipReport) -> dict:
    """A JSON-ready view of a membership report, with "C1"/"C2"/"C3" ids."""
    c1 = {
        "ok": report.c1.ok,
        "piece": format_word(report.c1.piece) if report.c1.piece is not None else None,
        "relator_index": report.c1.relator_index,
        "ratio": _fraction_str(report.c1.ratio) if report.c1.ratio is not None else None,
    }
    c2 = [
        {
            "relator_index": st.relator_index,
            "is_proper_power": st.is_power,
            "root": format_word(st.root),
            "exponent": st.exponent,
        }
        for st in report.c2
    ]
    c3 = None
    if report.c3 is not None:
        violation = None
        if report.c3.violation is not None:
            idx, w, which = report.c3.violation
            violation = {
                "relator_index": idx,
                "subword": format_word(w),
                "readability": which,
            }
        c3 = {
            "violation": violation,
            "checked_subwords": report.c3.checked_subwords,
            "unknown_checks": report.c3.unknown_checks,
            "complete": report.c3.complete,
        }
    return {
        "verdict": report.verdict,
        "failed_condition": report.failed_condition,
        "C1": c1,
        "C2": c2,
        "C3": c3,
    }
