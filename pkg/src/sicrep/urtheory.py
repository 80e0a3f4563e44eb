"""Exact arithmetic for the constraint system fixing n, alpha and beta.

Everything here is an integer or a :class:`fractions.Fraction`; no floats.

For a measurement achieving certainty with ``m0`` outcomes on an ``n``-outcome
sky, the constants obey ``alpha = n beta + 1`` and ``(m0/n) alpha - beta = 1``,
and the priors meet at ``cos(theta) = (n - m0) / ((m0-1)^2 + n - 1)``. A
universal angle forces ``cos(theta) = q/(q+2)`` for an integer ``q >= 0``;
solving for ``n`` gives the lemma ``n = m0 (q (m0-1) + 2) / 2`` which
:func:`verify_dimension_lemma` checks against a direct scan.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

Rational = Fraction


@dataclass(frozen=True)
class TheoryParams:
    q: int
    m0: int
    n: int
    alpha: Fraction
    beta: Fraction

    def check(self) -> None:
        """Raise ``ValueError`` unless every identity holds exactly."""
        if self.alpha != self.n * self.beta + 1:
            raise ValueError(f"alpha = n beta + 1 fails for {self}")
        if Fraction(self.m0, self.n) * self.alpha - self.beta != 1:
            raise ValueError(f"(m0/n) alpha - beta = 1 fails for {self}")
        if angle_formula(self.n, self.m0) != Fraction(self.q, self.q + 2):
            raise ValueError(f"angle is not q/(q+2) for {self}")

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "m0": self.m0,
            "n": self.n,
            "alpha": str(self.alpha),
            "beta": str(self.beta),
        }


def angle_formula(n: int, m0: int) -> Fraction:
    if m0 < 2 or n < m0:
        raise ValueError(f"need m0 >= 2 and n >= m0, got n={n}, m0={m0}")
    den = (m0 - 1) ** 2 + n - 1
    if den == 0:
        raise ZeroDivisionError("angle denominator vanishes")
    return Fraction(n - m0, den)


def dimension_from(q: int, m0: int) -> int | None:
    """The n for which the angle formula gives q/(q+2), or None if not an integer."""
    if q < 0 or m0 < 2:
        raise ValueError(f"need q >= 0 and m0 >= 2, got q={q}, m0={m0}")
    twice_n = m0 * (q * (m0 - 1) + 2)
    if twice_n % 2:
        return None
    n = twice_n // 2
    if angle_formula(n, m0) != Fraction(q, q + 2):
        raise ArithmeticError(f"closed form failed for q={q}, m0={m0}")
    return n


def scan_dimension(q: int, m0: int) -> int | None:
    """Brute-force search for n with angle_formula(n, m0) = q/(q+2).

    The angle is strictly increasing in n, so the scan stops as soon as it
    overshoots the target.
    """
    target = Fraction(q, q + 2)
    n = m0
    while True:
        c = angle_formula(n, m0)
        if c == target:
            return n
        if c > target:
            return None
        n += 1


def verify_dimension_lemma(q_max: int, m0_max: int) -> list[tuple[int, int]]:
    """Pairs (q, m0) where the closed form and the scan disagree (empty when sound)."""
    bad = []
    for q in range(q_max + 1):
        for m0 in range(2, m0_max + 1):
            if dimension_from(q, m0) != scan_dimension(q, m0):
                bad.append((q, m0))
    return bad


def solve_constants(m0: int, q: int) -> TheoryParams:
    """Solve alpha = n beta + 1 and (m0/n) alpha - beta = 1 exactly."""
    n = dimension_from(q, m0)
    if n is None:
        raise ValueError(f"no integer n for q={q}, m0={m0}")
    # eliminate alpha: m0 beta + m0/n - beta = 1
    beta = Fraction(n - m0, n * (m0 - 1))
    alpha = n * beta + 1
    params = TheoryParams(q=q, m0=m0, n=n, alpha=alpha, beta=beta)
    params.check()
    if q == 2:
        # n = (alpha - 1)^2 and beta = 1/sqrt(n)
        root = isqrt(n)
        if root * root != n or (alpha - 1) ** 2 != n or beta != Fraction(1, root):
            raise ArithmeticError(f"q=2 relations fail for m0={m0}")
    return params


def q_family_table(q_max: int, m0_max: int) -> list[TheoryParams]:
    if q_max < 0 or m0_max < 2:
        raise ValueError("need q_max >= 0 and m0_max >= 2")
    rows = []
    for q in range(q_max + 1):
        for m0 in range(2, m0_max + 1):
            if dimension_from(q, m0) is not None:
                rows.append(solve_constants(m0, q))
    return rows


def cos_admissibility(c: Fraction) -> int | None:
    """q if c = q/(q+2) for a nonnegative integer q, else None."""
    c = Fraction(c)
    if c < 0 or c >= 1:
        raise ValueError(f"cos(theta) must lie in [0, 1), got {c}")
    q = 2 * c / (1 - c)
    return int(q) if q.denominator == 1 else None
