"""Measurement schedules with guaranteed full rank.

Each ``scheme_*`` function checks its applicability conditions, raises a
:class:`~sampobs.errors.SchemeError` subclass when one fails, and otherwise
returns a :class:`SchemeResult` recording the conditions it verified.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

from .errors import (
    ConditionCCAViolated, InsufficientCandidates, NotRealSpectrum, NotWorstCaseSystem,
    PathologicalDelta, PathologicalSpacing, ValidationError, WrongDimension,
)
from .spectral import (
    DEFAULT_H_MAX, DEFAULT_TOL, PathologyReport, is_pathological_period, offending_periods,
    pathology_report,
)
from .sysmodel import Provenance, Schedule, SystemSpec, validate


@dataclass(frozen=True)
class Condition:
    name: str
    ok: bool
    detail: str = ""

    def to_dict(self) -> dict:
        d = {"name": self.name, "ok": self.ok}
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass(frozen=True)
class SchemeResult:
    scheme: str
    schedule: Schedule
    guarantee: str
    sample_count_bound: int
    conditions: tuple[Condition, ...] = ()

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "schedule": list(self.schedule.instants),
            "provenance": self.schedule.provenance.value,
            "guarantee": self.guarantee,
            "sample_count_bound": self.sample_count_bound,
            "conditions": [c.to_dict() for c in self.conditions],
        }


@dataclass(frozen=True)
class SchemeRequest:
    """Plain bundle of scheme parameters, as collected by the CLI."""

    scheme: str
    t: int = 0
    T: int | None = None
    tbar: int | None = None
    t2: int | None = None
    deltas: tuple[int, ...] = ()
    candidates: tuple[int, ...] = ()


GUARANTEES = {
    "second_order_free": "second order, no eigenvalue power collision: any two instants",
    "second_order_window": "second order: at least 1 + T/h_bar samples in any window of length T",
    "positive_real": "positive real spectrum: any n instants",
    "real_no_opposite": "real spectrum without opposite-sign pairs: any 2n-1 instants",
    "real_window": "real spectrum: at least (N_p + T)/2 samples in a window of length T >= 2n",
    "regular": "n equidistant instants whose spacing is not a pathological period",
    "third_order": "third order with C never parallel to C A^t: {t1, t2, t1+D, t2+D}, D non-pathological",
    "doubling": "shift-doubled sets K_i, each non-pathological shift raises rank until full",
}


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _require_valid(system: SystemSpec) -> None:
    res = validate(system)
    if not res.ok:
        raise ValidationError(res.violations)


def _report(system, report, h_max, tol) -> PathologyReport:
    return report if report is not None else pathology_report(system, h_max, tol)


def scheme_second_order(system: SystemSpec, t: int, T: int, report: PathologyReport | None = None,
                        h_max: int = DEFAULT_H_MAX, tol: float = DEFAULT_TOL) -> SchemeResult:
    """First N_s instants of the window [t, t+T-1].

    Without a pathological pair any two instants work; with minimal period
    h_bar, N_s = 1 + ceil(T/h_bar) beats the largest set of instants that
    are pairwise congruent modulo h_bar.
    """
    _require_valid(system)
    if system.n != 2:
        raise WrongDimension(f"second-order scheme needs n = 2, got n = {system.n}")
    if t < 0 or T < 1:
        raise ValueError("window needs t >= 0 and T >= 1")
    rep = _report(system, report, h_max, tol)
    h_bars = [pp.h_bar for pp in rep.pairs if pp.h_bar is not None]
    if h_bars:
        h = h_bars[0]
        bound = 1 + _ceil_div(T, h)
        guarantee = GUARANTEES["second_order_window"]
        cond = Condition("pair_pathology_known", True, f"h_bar = {h}")
    else:
        bound = 2
        guarantee = GUARANTEES["second_order_free"]
        cond = Condition("pair_pathology_known", True, f"no pathological period up to {rep.h_max}")
    if bound > T:
        raise InsufficientCandidates(f"window of length {T} cannot hold {bound} samples")
    sched = Schedule(tuple(range(t, t + bound)), Provenance.SECOND_ORDER)
    return SchemeResult("second_order", sched, guarantee, bound,
                        (Condition("dimension_two", True), cond))


def opposite_sign_members(system: SystemSpec, tol: float = DEFAULT_TOL) -> list[int]:
    """Block indices whose eigenvalue has a partner of equal modulus and opposite sign."""
    eigs = system.eigenvalues
    members = set()
    for i in range(len(eigs)):
        for j in range(i + 1, len(eigs)):
            a, b = eigs[i], eigs[j]
            if abs(a.modulus - b.modulus) <= tol * max(a.modulus, b.modulus) \
                    and a.is_positive_real(tol) != b.is_positive_real(tol):
                members.update((i, j))
    return sorted(members)


def scheme_real_eigs(system: SystemSpec, candidate_instants: Iterable[int],
                     window_length: int | None = None, tol: float = DEFAULT_TOL) -> SchemeResult:
    """Select from candidates for a system with purely real spectrum.

    Positive spectrum: first n candidates.  No opposite-sign pair: first 2n-1.
    Otherwise the candidates are treated as lying in a window of length
    ``window_length`` (default: their span, widened to 2n) and the first
    ceil((N_p + T)/2) are taken.
    """
    _require_valid(system)
    n = system.n
    eigs = system.eigenvalues
    if not all(e.is_real(tol) for e in eigs):
        raise NotRealSpectrum("every eigenvalue must be real (phase 0 or pi)")
    cands = sorted({int(c) for c in candidate_instants})
    if cands and cands[0] < 0:
        raise ValueError("candidate instants must be nonnegative")
    conds = [Condition("real_spectrum", True)]

    if all(e.is_positive_real(tol) for e in eigs):
        bound, guarantee = n, GUARANTEES["positive_real"]
        conds.append(Condition("positive_spectrum", True))
    else:
        opp = opposite_sign_members(system, tol)
        if not opp:
            bound, guarantee = 2 * n - 1, GUARANTEES["real_no_opposite"]
            conds.append(Condition("no_opposite_sign_pair", True))
        else:
            n_p = len(opp)
            span = cands[-1] - cands[0] + 1 if cands else 0
            if window_length is None:
                T = max(span, 2 * n)
            else:
                T = int(window_length)
                if span > T:
                    raise ValueError(f"candidates span {span} instants, more than the window {T}")
                if T < 2 * n:
                    raise InsufficientCandidates(f"window length {T} is below 2n = {2 * n}")
            bound, guarantee = _ceil_div(n_p + T, 2), GUARANTEES["real_window"]
            conds.append(Condition("window_at_least_2n", True, f"T = {T}, N_p = {n_p}"))
    if len(cands) < bound:
        raise InsufficientCandidates(f"need {bound} distinct candidates, got {len(cands)}")
    conds.append(Condition("enough_candidates", True, f"{len(cands)} >= {bound}"))
    sched = Schedule(tuple(cands[:bound]), Provenance.REAL_EIGS)
    return SchemeResult("real_eigs", sched, guarantee, bound, tuple(conds))


def scheme_regular(system: SystemSpec, t1: int, tbar: int, report: PathologyReport | None = None,
                   h_max: int = DEFAULT_H_MAX, tol: float = DEFAULT_TOL) -> SchemeResult:
    _require_valid(system)
    if tbar < 1 or t1 < 0:
        raise ValueError("need t1 >= 0 and tbar >= 1")
    rep = _report(system, report, h_max, tol)
    bad = offending_periods(rep, tbar)
    if bad:
        raise PathologicalSpacing(f"spacing {tbar} is a multiple of pathological period(s) {bad}")
    n = system.n
    sched = Schedule(tuple(t1 + i * tbar for i in range(n)), Provenance.REGULAR)
    return SchemeResult("regular", sched, GUARANTEES["regular"], n,
                        (Condition("spacing_non_pathological", True, f"tbar = {tbar}"),))


def cca_witness(system: SystemSpec, report: PathologyReport | None = None,
                h_max: int = DEFAULT_H_MAX, tol: float = DEFAULT_TOL) -> int | None:
    """Smallest t >= 1 with C*A^t parallel to C, or None if there is none.

    Parallel rows force lam_p^t == lam_q^t for every pair, which requires a
    diagonal J and every pair pathological; t is then the lcm of the minimal
    periods.  A block of size >= 2 adds a term linear in t that breaks
    proportionality.
    """
    if not system.is_diagonal:
        return None
    rep = _report(system, report, h_max, tol)
    if any(pp.h_bar is None for pp in rep.pairs):
        return None
    return reduce(math.lcm, (pp.h_bar for pp in rep.pairs), 1)


def check_condition_CCA(system: SystemSpec, report: PathologyReport | None = None,
                        h_max: int = DEFAULT_H_MAX, tol: float = DEFAULT_TOL) -> bool:
    """True iff C is never a scalar multiple of C*A^t for t >= 1."""
    return cca_witness(system, report, h_max, tol) is None


def _check_delta(rep: PathologyReport, delta: int, label: str) -> Condition:
    if delta < 1:
        raise ValueError(f"{label} must be >= 1, got {delta}")
    if is_pathological_period(rep, delta):
        raise PathologicalDelta(
            f"{label} = {delta} is a multiple of pathological period(s) {offending_periods(rep, delta)}")
    return Condition(f"{label}_non_pathological", True)


def _check_cca(system, rep) -> Condition:
    t = cca_witness(system, rep)
    if t is not None:
        raise ConditionCCAViolated(f"C*A^{t} is parallel to C")
    return Condition("C_never_parallel_to_CA^t", True)


def scheme_third_order_irregular(system: SystemSpec, t1: int, t2: int, delta: int,
                                 report: PathologyReport | None = None,
                                 h_max: int = DEFAULT_H_MAX, tol: float = DEFAULT_TOL) -> SchemeResult:
    _require_valid(system)
    if system.n != 3:
        raise WrongDimension(f"third-order scheme needs n = 3, got n = {system.n}")
    if not 0 <= t1 < t2:
        raise ValueError("need 0 <= t1 < t2")
    rep = _report(system, report, h_max, tol)
    conds = (_check_cca(system, rep), _check_delta(rep, delta, "delta"))
    sched = Schedule.of((t1, t2, t1 + delta, t2 + delta), Provenance.THIRD_ORDER)
    return SchemeResult("third_order", sched, GUARANTEES["third_order"], 4, conds)


def doubling_set(base: tuple[int, int], deltas: Sequence[int]) -> list[int]:
    K = {int(base[0]), int(base[1])}
    for d in deltas:
        K |= {k + d for k in K}
    return sorted(K)


def scheme_doubling(system: SystemSpec, base: tuple[int, int], deltas: Sequence[int],
                    report: PathologyReport | None = None,
                    h_max: int = DEFAULT_H_MAX, tol: float = DEFAULT_TOL) -> SchemeResult:
    """K_1 = {t1, t2}, K_i = K_{i-1} united with K_{i-1} + delta_{i-1}, up to K_{n-1}."""
    _require_valid(system)
    n = system.n
    if n < 3:
        raise WrongDimension(f"doubling scheme needs n >= 3, got n = {n}")
    if len(deltas) != n - 2:
        raise ValueError(f"need {n - 2} shifts, got {len(deltas)}")
    t1, t2 = base
    if not 0 <= t1 < t2:
        raise ValueError("need 0 <= t1 < t2")
    rep = _report(system, report, h_max, tol)
    conds = [_check_cca(system, rep)]
    conds += [_check_delta(rep, d, f"delta_{i + 1}") for i, d in enumerate(deltas)]
    sched = Schedule(tuple(doubling_set(base, deltas)), Provenance.DOUBLING)
    return SchemeResult("doubling", sched, GUARANTEES["doubling"], 2 ** (n - 1), tuple(conds))


# -- worst-case systems ---------------------------------------------------------

@dataclass(frozen=True)
class WorstCasePredicate:
    """Membership test for residue-complete sample sets of a worst-case system.

    For a system whose n eigenvalues are distinct n-th roots of one value,
    a schedule has full rank iff it contains {t, t+r_1 n+1, ..., t+r_{n-1} n+n-1}
    for some anchor t and r_i >= 0.
    """

    n: int
    horizon: int
    note: str = field(default="")

    def find(self, schedule: Schedule | Iterable[int]) -> tuple[int, tuple[int, ...]] | None:
        inst = sorted(set(schedule.instants if isinstance(schedule, Schedule) else schedule))
        if inst and (inst[0] < 0 or inst[-1] > self.horizon):
            raise ValueError(f"schedule leaves the horizon [0, {self.horizon}]")
        n = self.n
        for t in inst:
            rs = []
            for i in range(1, n):
                hit = next((s for s in inst if s >= t + i and (s - t - i) % n == 0), None)
                if hit is None:
                    break
                rs.append((hit - t - i) // n)
            else:
                return t, tuple(rs)
        return None

    def __call__(self, schedule) -> bool:
        return self.find(schedule) is not None

    def arbitrary_sample_bound(self, T: int) -> int:
        """Arbitrary samples needed in a window of length T: 1 + ceil((n-1)T/n)."""
        return 1 + _ceil_div((self.n - 1) * T, self.n)


def is_worst_case(system: SystemSpec, tol: float = DEFAULT_TOL) -> bool:
    """All blocks scalar and lam_1^n == ... == lam_n^n."""
    if not system.is_diagonal:
        return False
    eigs = system.eigenvalues
    n = len(eigs)
    ref = eigs[0]
    for e in eigs[1:]:
        if abs(e.modulus - ref.modulus) > tol * max(e.modulus, ref.modulus):
            return False
        if e.is_exact and ref.is_exact:
            if ((e.phase - ref.phase) * n).denominator != 1:
                return False
        elif abs(math.remainder(n * (e.radians - ref.radians), 2 * math.pi)) > tol * n:
            return False
    return True


def worst_case_required_sets(system: SystemSpec, horizon: int,
                             tol: float = DEFAULT_TOL) -> WorstCasePredicate:
    _require_valid(system)
    if not is_worst_case(system, tol):
        raise NotWorstCaseSystem("eigenvalues are not distinct n-th roots of a common value")
    n = system.n
    note = (f"arbitrary samples would need N_s >= 1 + (n-1)T/n (= {1 + _ceil_div((n - 1) * horizon, n)}"
            f" for T = {horizon}), which always contains n consecutive instants")
    return WorstCasePredicate(n, horizon, note)


def synthesize(system: SystemSpec, req: SchemeRequest, report: PathologyReport | None = None,
               h_max: int = DEFAULT_H_MAX, tol: float = DEFAULT_TOL) -> SchemeResult:
    s = req.scheme.replace("-", "_")
    if s == "regular":
        return scheme_regular(system, req.t, req.tbar if req.tbar is not None else 1, report, h_max, tol)
    if s == "second_order":
        return scheme_second_order(system, req.t, req.T if req.T is not None else 2, report, h_max, tol)
    if s == "real_eigs":
        return scheme_real_eigs(system, req.candidates, req.T, tol)
    if s == "third_order":
        return scheme_third_order_irregular(system, req.t, req.t2, req.deltas[0], report, h_max, tol)
    if s == "doubling":
        return scheme_doubling(system, (req.t, req.t2), req.deltas, report, h_max, tol)
    raise ValueError(f"unknown scheme {req.scheme!r}")
