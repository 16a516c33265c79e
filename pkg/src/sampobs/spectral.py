"""Pathological sampling periods.

Two eigenvalues from different Jordan blocks collide under the h-th power,
lambda_p**h == lambda_q**h, exactly when their moduli agree and the phase gap
is 2*pi*k/h.  All such h are multiples of a minimal period h_bar, and any
schedule drawn from multiples of h_bar is rank deficient.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import DegeneratePair
from .sysmodel import TWO_PI, Eigenvalue, SystemSpec, same_eigenvalue

DEFAULT_H_MAX = 1024
DEFAULT_TOL = 1e-9


def simplest_fraction_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Fraction with the smallest denominator in the closed interval [lo, hi].

    Continued-fraction descent: peel off the common integer part of both
    endpoints and recurse on the reciprocals of the fractional parts.
    """
    if lo > hi:
        raise ValueError("empty interval")
    # iterative form of the recursion; each level contributes one partial quotient
    quotients = []
    while True:
        fl = math.floor(lo)
        if lo == fl:
            tail = Fraction(fl)
            break
        if fl + 1 <= hi:
            tail = Fraction(fl + 1)
            break
        quotients.append(fl)
        lo, hi = 1 / (hi - fl), 1 / (lo - fl)
    for a in reversed(quotients):
        tail = a + 1 / tail
    return tail


def rationalize_phase_gap(dphi: float, h_max: int = DEFAULT_H_MAX,
                          tol: float = DEFAULT_TOL) -> Fraction | None:
    """Smallest-denominator k/h with |h*dphi - 2*pi*k| <= tol*h and h <= h_max.

    Returns the fraction k/h (so dphi ~ 2*pi*k/h), or None when every
    candidate denominator exceeds ``h_max``.
    """
    if not math.isfinite(dphi):
        raise ValueError("phase gap must be finite")
    x = Fraction(dphi / TWO_PI)
    eps = Fraction(tol / TWO_PI)
    frac = simplest_fraction_between(x - eps, x + eps)
    if frac.denominator > h_max:
        return None
    return frac


def minimal_pathological_period(a: Eigenvalue, b: Eigenvalue, h_max: int = DEFAULT_H_MAX,
                                tol: float = DEFAULT_TOL) -> tuple[int | None, bool]:
    """Minimal h >= 2 with a**h == b**h, or None.

    Returns ``(h_bar, exact)`` where ``exact`` says the decision was made in
    rational phase arithmetic.
    """
    if same_eigenvalue(a, b, tol):
        raise DegeneratePair(f"eigenvalues {a} and {b} coincide")
    exact = a.is_exact and b.is_exact
    if abs(a.modulus - b.modulus) > tol * max(a.modulus, b.modulus):
        return None, exact
    if exact:
        # conjugate pairs land here too: the gap is 2*phase, i.e. pi/phase = h/k
        h = (a.phase - b.phase).denominator
    else:
        frac = rationalize_phase_gap(a.radians - b.radians, h_max, tol)
        if frac is None:
            return None, False
        h = frac.denominator
    if h == 1:
        raise DegeneratePair(f"eigenvalues {a} and {b} coincide")
    return (h if h <= h_max else None), exact


@dataclass(frozen=True)
class PairPathology:
    p: int
    q: int
    h_bar: int | None
    exact: bool

    @property
    def pathological(self) -> bool:
        return self.h_bar is not None

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "h_bar": self.h_bar, "exact": self.exact}


@dataclass(frozen=True)
class PathologyReport:
    pairs: tuple[PairPathology, ...]
    h_max: int
    tol: float = DEFAULT_TOL

    @property
    def global_minimal_periods(self) -> tuple[int, ...]:
        return tuple(sorted({pp.h_bar for pp in self.pairs if pp.h_bar is not None}))

    @property
    def pathological_pairs(self) -> list[PairPathology]:
        return [pp for pp in self.pairs if pp.h_bar is not None]

    def to_dict(self) -> dict:
        return {
            "h_max": self.h_max,
            "tol": self.tol,
            "pairs": [pp.to_dict() for pp in self.pairs],
            "global_minimal_periods": list(self.global_minimal_periods),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PathologyReport":
        pairs = tuple(PairPathology(x["p"], x["q"], x["h_bar"], x["exact"]) for x in d["pairs"])
        return cls(pairs, d["h_max"], d.get("tol", DEFAULT_TOL))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def pathology_report(system: SystemSpec, h_max: int = DEFAULT_H_MAX,
                     tol: float = DEFAULT_TOL) -> PathologyReport:
    eigs = system.eigenvalues
    pairs = []
    for p, q in combinations(range(len(eigs)), 2):
        h, exact = minimal_pathological_period(eigs[p], eigs[q], h_max, tol)
        pairs.append(PairPathology(p, q, h, exact))
    return PathologyReport(tuple(pairs), h_max, tol)


def is_pathological_period(report: PathologyReport, tbar: int) -> bool:
    """True iff some pair's minimal period divides ``tbar``."""
    if tbar < 1:
        raise ValueError("period must be a positive integer")
    return any(tbar % h == 0 for h in report.global_minimal_periods)


def offending_periods(report: PathologyReport, tbar: int) -> list[int]:
    return [h for h in report.global_minimal_periods if tbar % h == 0]
