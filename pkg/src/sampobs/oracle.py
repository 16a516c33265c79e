"""Brute-force ground truth on small windows, plus randomized trial runners.

Every rank computed here goes through :func:`sampobs.obsmatrix.numeric_rank`
with the default tolerance, so the oracle and ``rank_verdict`` never disagree
on a single matrix; what the oracle adds is exhaustive bookkeeping over
subsets of a window.
"""
from __future__ import annotations

import math
from itertools import combinations
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import NotApplicable, NotWorstCaseSystem, SchemeError
from .obsmatrix import RowCache, batch_rank, numeric_rank, rank_verdict
from .scheduler import (
    check_condition_CCA, doubling_set, is_worst_case, opposite_sign_members,
    worst_case_required_sets,
)
from .spectral import pathology_report, is_pathological_period
from .sysmodel import Eigenvalue, JordanBlock, SystemSpec, validate

EXHAUSTIVE_MAX_T = 24

# Modulus bands for random trials.  Exactly full-rank matrices become
# numerically singular once moduli spread far enough that lam_min**t drops
# below the rank tolerance relative to lam_max**t; these bands keep every
# trial inside what double precision can certify.
REAL_BAND = (0.7, 1.0)
REGULAR_BAND = (0.9, 1.0)

# printed to four decimals in the source example; exact phases are k/9 turns
NINTH_ROOT_PRINTED = (
    -0.7500 - 0.2730j, -0.7500 + 0.2730j,
    -0.3991 - 0.6912j, -0.3991 + 0.6912j,
    0.1386 - 0.7860j, 0.1386 + 0.7860j,
    0.6114 - 0.5130j, 0.6114 + 0.5130j,
    0.7981 + 0.0000j,
)
NINTH_ROOT_GAMMA = 0.1314


# -- fixtures and generators ------------------------------------------------------

def worst_case_system(n: int, gamma: complex, C: Sequence[float] | None = None) -> SystemSpec:
    """n distinct n-th roots of gamma as scalar blocks, so that A^n = gamma I."""
    gamma = complex(gamma)
    if gamma == 0:
        raise ValueError("gamma must be nonzero")
    mod = abs(gamma) ** (1.0 / n)
    if gamma.imag == 0.0:
        base = Fraction(0) if gamma.real > 0 else Fraction(1, 2)
        eigs = [Eigenvalue(mod, (base + k) / n) for k in range(n)]
    else:
        theta = math.atan2(gamma.imag, gamma.real)
        eigs = [Eigenvalue(mod, (theta + 2 * math.pi * k) / n) for k in range(n)]
    eigs.sort(key=lambda e: e.radians)
    return SystemSpec.diagonal(eigs, C)


def ninth_root_system(C: Sequence[float] | None = None) -> SystemSpec:
    """Ninth-order example: the nine ninth roots of 0.1314."""
    return worst_case_system(9, NINTH_ROOT_GAMMA, C)


def eight_of_nine_schedule(periods: int = 9) -> list[int]:
    return [9 * r + j for r in range(periods) for j in range(8)]


def random_spectrum(rng: np.random.Generator, n: int, *, real_only: bool = False,
                    positive: bool = False, allow_opposite: bool = True,
                    moduli: tuple[float, float] = (0.5, 1.0), max_q: int = 12,
                    min_sep: float = 0.05) -> list[Eigenvalue]:
    """Random distinct eigenvalues with exact phases.

    Moduli sit on a 0.01 grid inside ``moduli``; complex eigenvalues come in
    conjugate pairs with phase p/q turns, q <= max_q.  Eigenvalues are kept at
    least ``min_sep`` apart in the complex plane.
    """
    lo, hi = moduli
    for _ in range(10_000):
        eigs: list[Eigenvalue] = []
        while len(eigs) < n:
            mod = round(float(rng.uniform(lo, hi)), 2)
            if not real_only and n - len(eigs) >= 2 and rng.random() < 0.5:
                q = int(rng.integers(3, max_q + 1))
                p = int(rng.integers(1, (q - 1) // 2 + 1))
                e = Eigenvalue(mod, Fraction(p, q))
                cand = [e, e.conjugate()]
            else:
                neg = not positive and rng.random() < 0.5
                cand = [Eigenvalue(mod, Fraction(1, 2) if neg else Fraction(0))]
            eigs.extend(cand)
        vals = np.array([e.value for e in eigs])
        gaps = np.abs(vals[:, None] - vals[None, :]) + np.eye(n) * 10
        if gaps.min() < min_sep:
            continue
        if not allow_opposite and any(
                abs(vals[i] + vals[j]) < 1e-12 for i in range(n) for j in range(i + 1, n)):
            continue
        return eigs
    raise RuntimeError("could not draw a spectrum with the requested separation")


def random_C(rng: np.random.Generator, n: int) -> list[float]:
    return [float(rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0])) for _ in range(n)]


def random_system(rng: np.random.Generator, n: int, *, jordan_prob: float = 0.0,
                  m: int = 0, **spectrum_kw) -> SystemSpec:
    """Random validated system; real eigenvalues may get a size-2 block with ``jordan_prob``."""
    eigs = random_spectrum(rng, n, **spectrum_kw)
    reals = [i for i, e in enumerate(eigs) if e.is_real()]
    promoted = [i for i in reals if rng.random() < jordan_prob][: len(reals) // 2]
    # each size-2 block displaces one unpromoted real eigenvalue, keeping conjugate pairs whole
    spare = [i for i in reals if i not in promoted]
    dropped = set(spare[len(spare) - len(promoted):]) if promoted else set()
    blocks = [JordanBlock(e, 2 if i in promoted else 1)
              for i, e in enumerate(eigs) if i not in dropped]
    B = rng.normal(size=(n, m)).tolist() if m else None
    D = rng.normal(size=m).tolist() if m else None
    sys_ = SystemSpec(tuple(blocks), random_C(rng, n), B, D)
    assert validate(sys_).ok, validate(sys_).violations
    return sys_


def random_instants(rng: np.random.Generator, k: int, lo: int, hi: int) -> list[int]:
    return sorted(int(x) for x in rng.choice(np.arange(lo, hi + 1), size=k, replace=False))


# -- exhaustive window enumeration ---------------------------------------------------

def _rank(R: np.ndarray, idx: Sequence[int]) -> int:
    if not idx:
        return 0
    return numeric_rank(R[list(idx)])[0]


def _largest_failing_exhaustive(R: np.ndarray, n: int):
    """Largest index set with rank < n, by depth-first enumeration.

    A full-rank set stays full rank under supersets, so branches stop there;
    a branch also stops once it cannot outgrow the best set found.  Returns
    ``(best, ranked)`` where ``ranked`` counts explicit rank evaluations.
    """
    T = R.shape[0]
    best: list[int] = []
    ranked = 0

    def dfs(start: int, chosen: list[int]):
        nonlocal best, ranked
        for j in range(start, T):
            if len(chosen) + (T - j) <= len(best):
                return
            cand = chosen + [j]
            ranked += 1
            if _rank(R, cand) < n:
                if len(cand) > len(best):
                    best = cand
                dfs(j + 1, cand)

    dfs(0, [])
    return best, ranked


def _largest_failing_sampled(R: np.ndarray, n: int, cap: int, seed: int):
    """Greedy maximal failing sets grown along ``cap`` random orderings."""
    rng = np.random.default_rng(seed)
    T = R.shape[0]
    best: list[int] = []
    ranked = 0
    for _ in range(cap):
        chosen: list[int] = []
        for j in rng.permutation(T):
            ranked += 1
            if _rank(R, chosen + [int(j)]) < n:
                chosen.append(int(j))
        if len(chosen) > len(best):
            best = sorted(chosen)
    return best, ranked


@dataclass(frozen=True)
class WindowStudy:
    t0: int
    T: int
    n: int
    min_observable_size: int | None  # None: the whole window is rank deficient
    max_failing_subset_size: int
    failing_witness: tuple[int, ...]
    exhaustive: bool
    ranks_evaluated: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["failing_witness"] = list(self.failing_witness)
        return d


def min_samples_in_window(system: SystemSpec, t0: int, T: int, cap: int = 2000,
                          seed: int = 0) -> WindowStudy:
    """Smallest k such that every k-subset of [t0, t0+T-1] has full rank.

    Equivalently one more than the largest rank-deficient subset.  Exhaustive
    for T <= 24; beyond that ``cap`` randomized greedy draws give a lower
    bound on the largest failing subset and ``exhaustive`` is False.
    """
    if T < 1 or t0 < 0:
        raise ValueError("need t0 >= 0 and T >= 1")
    n = system.n
    rows = RowCache(system)
    R = rows.matrix(range(t0, t0 + T))
    if T <= EXHAUSTIVE_MAX_T:
        best, ranked = _largest_failing_exhaustive(R, n)
        exhaustive = True
    else:
        best, ranked = _largest_failing_sampled(R, n, cap, seed)
        exhaustive = False
    size = len(best)
    min_obs = None if size == T else size + 1
    return WindowStudy(t0, T, n, min_obs, size, tuple(t0 + i for i in best), exhaustive, ranked)


@dataclass(frozen=True)
class BoundCheck:
    passed: bool
    bound: int
    study: WindowStudy
    counterexample: tuple[int, ...] | None
    tight: bool  # some subset of size bound-1 fails; reported, never asserted
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "bound": self.bound,
            "counterexample": list(self.counterexample) if self.counterexample else None,
            "tight": self.tight,
            "note": self.note,
            "study": self.study.to_dict(),
        }


def _bound_check(system, t0, T, bound, note="") -> BoundCheck:
    study = min_samples_in_window(system, t0, T)
    fails = study.max_failing_subset_size
    passed = fails < bound
    return BoundCheck(passed, bound, study, None if passed else study.failing_witness,
                      fails >= bound - 1, note)


def check_bound_second_order(system: SystemSpec, t0: int, T: int) -> BoundCheck:
    """Every subset of the window with at least 1 + ceil(T/h_bar) instants has rank 2."""
    if system.n != 2:
        raise NotApplicable(f"second-order bound needs n = 2, got {system.n}")
    rep = pathology_report(system)
    h = rep.global_minimal_periods[0] if rep.global_minimal_periods else None
    bound = 2 if h is None else 1 + -(-T // h)
    return _bound_check(system, t0, T, bound, f"h_bar = {h}")


def check_bound_real_window(system: SystemSpec, t0: int, T: int) -> BoundCheck:
    """Every subset of size >= ceil((N_p + T)/2) in a window T >= 2n has full rank."""
    n = system.n
    if not all(e.is_real() for e in system.eigenvalues):
        raise NotApplicable("needs a real spectrum")
    if T < 2 * n or T > EXHAUSTIVE_MAX_T:
        raise NotApplicable(f"needs 2n <= T <= {EXHAUSTIVE_MAX_T}, got T = {T}")
    n_p = len(opposite_sign_members(system))
    bound = -(-(n_p + T) // 2)
    return _bound_check(system, t0, T, bound, f"N_p = {n_p}")


# -- randomized trial runners ----------------------------------------------------------

@dataclass
class TrialSummary:
    name: str
    trials: int = 0
    failures: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.trials > 0 and not self.failures

    def fail(self, **info):
        self.failures.append(info)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "trials": self.trials,
                "failures": self.failures, **self.extra}


def _run(name: str, trials: int, seed: int, body: Callable[[np.random.Generator, TrialSummary], None]):
    rng = np.random.default_rng(seed)
    out = TrialSummary(name)
    for _ in range(trials):
        body(rng, out)
        out.trials += 1
    return out


def check_real_spectrum_trials(trials: int = 200, seed: int = 0, n_range=(2, 5), horizon: int = 50) -> TrialSummary:
    """Real spectrum without opposite-sign pairs: any 2n-1 distinct instants give rank n."""
    def body(rng, out):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        sys_ = random_system(rng, n, real_only=True, allow_opposite=False, jordan_prob=0.2,
                             moduli=REAL_BAND)
        inst = random_instants(rng, 2 * n - 1, 0, horizon)
        rep = rank_verdict(sys_, inst)
        if not rep.observable:
            out.fail(system=sys_.to_dict(), instants=inst, rank=rep.rank)
    return _run("real_spectrum_any_2n-1", trials, seed, body)


def check_positive_spectrum_trials(trials: int = 200, seed: int = 1, n_range=(1, 5), horizon: int = 50) -> TrialSummary:
    """Positive real spectrum: any n distinct instants give rank n."""
    def body(rng, out):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        sys_ = random_system(rng, n, real_only=True, positive=True, jordan_prob=0.2,
                             moduli=REAL_BAND)
        inst = random_instants(rng, n, 0, horizon)
        rep = rank_verdict(sys_, inst)
        if not rep.observable:
            out.fail(system=sys_.to_dict(), instants=inst, rank=rep.rank)
    return _run("positive_spectrum_any_n", trials, seed, body)


def check_regular_trials(trials: int = 100, seed: int = 2, n_range=(2, 6), tbar_max: int = 40) -> TrialSummary:
    """Regular n-sample schedules: full rank off the pathological periods, deficient on them."""
    sharp = 0

    def body(rng, out):
        nonlocal sharp
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        sys_ = random_system(rng, n, moduli=REGULAR_BAND, max_q=8)
        rep = pathology_report(sys_)
        good = [t for t in range(1, tbar_max + 1) if not is_pathological_period(rep, t)]
        tbar = int(rng.choice(good))
        v = rank_verdict(sys_, [i * tbar for i in range(n)])
        if not v.observable:
            out.fail(system=sys_.to_dict(), tbar=tbar, rank=v.rank)
        for h in rep.global_minimal_periods:
            sharp += 1
            v = rank_verdict(sys_, [i * h for i in range(n)])
            if v.observable:
                out.fail(system=sys_.to_dict(), tbar=h, rank=v.rank, expected="deficient")
    out = _run("regular_spacing", trials, seed, body)
    out.extra["sharpness_checks"] = sharp
    return out


def check_third_order_trials(trials: int = 100, seed: int = 3, t_max: int = 20, delta_max: int = 15) -> TrialSummary:
    """Third order with C never parallel to C A^t: {t1, t2, t1+D, t2+D} has rank 3."""
    def body(rng, out):
        while True:
            sys_ = random_system(rng, 3, moduli=REAL_BAND, max_q=8, jordan_prob=0.2)
            rep = pathology_report(sys_)
            if check_condition_CCA(sys_, rep):
                break
        t1, t2 = sorted(int(x) for x in rng.choice(t_max + 1, size=2, replace=False))
        deltas = [d for d in range(1, delta_max + 1) if not is_pathological_period(rep, d)]
        d = int(rng.choice(deltas))
        inst = sorted({t1, t2, t1 + d, t2 + d})
        v = rank_verdict(sys_, inst)
        if not v.observable:
            out.fail(system=sys_.to_dict(), instants=inst, rank=v.rank)
    return _run("third_order_four_samples", trials, seed, body)


def check_doubling_trials(trials: int = 50, seed: int = 4, n: int = 4, t_max: int = 20,
                   delta_max: int = 15) -> TrialSummary:
    """Shift-doubled sets K_{n-1} have rank n."""
    def body(rng, out):
        while True:
            sys_ = random_system(rng, n, moduli=REAL_BAND, max_q=8)
            rep = pathology_report(sys_)
            if check_condition_CCA(sys_, rep):
                break
        t1, t2 = sorted(int(x) for x in rng.choice(t_max + 1, size=2, replace=False))
        ok = [d for d in range(1, delta_max + 1) if not is_pathological_period(rep, d)]
        deltas = [int(rng.choice(ok)) for _ in range(n - 2)]
        inst = doubling_set((t1, t2), deltas)
        v = rank_verdict(sys_, inst)
        if not v.observable:
            out.fail(system=sys_.to_dict(), instants=inst, rank=v.rank)
    return _run("doubling_sets", trials, seed, body)


@dataclass(frozen=True)
class EquivalenceCheck:
    passed: bool
    subsets_checked: int
    observable_subsets: int
    mismatches: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "subsets_checked": self.subsets_checked,
                "observable_subsets": self.observable_subsets,
                "mismatches": [list(m) for m in self.mismatches]}


def check_worst_case_equivalence(system: SystemSpec, T: int) -> EquivalenceCheck:
    """Over every subset S of [0, T-1]: rank(S) == n iff S holds a residue-complete set."""
    n = system.n
    if not is_worst_case(system):
        raise NotWorstCaseSystem("eigenvalues are not distinct n-th roots of a common value")
    if n > 4 or T > 16:
        raise NotApplicable("exhaustive check is limited to n <= 4 and T <= 16")
    pred = worst_case_required_sets(system, T - 1)
    R = RowCache(system).matrix(range(T))
    bad = []
    full = 0
    for k in range(T + 1):
        subsets = list(combinations(range(T), k))
        ranks = batch_rank(R[np.array(subsets)]) if k else [0]
        for S, r in zip(subsets, ranks):
            observable = bool(r == n)
            full += observable
            if observable != pred(S):
                bad.append(S)
    return EquivalenceCheck(not bad, 1 << T, full, tuple(bad))


def ninth_root_checks(C: Sequence[float] | None = None) -> dict:
    """Facts of the ninth-order example: A^9 = gamma I, eight-of-nine rank 8, plus residue 8 gives 9."""
    from .obsmatrix import row_at

    sys_ = ninth_root_system(C)
    Cr = sys_.c_row()
    raw9 = row_at(sys_, 9).raw
    printed = np.array(NINTH_ROOT_PRINTED)
    sched = eight_of_nine_schedule()
    rep8 = rank_verdict(sys_, sched)
    rep9 = rank_verdict(sys_, sorted(sched + [8]))
    return {
        "ca9_over_c": (raw9 / Cr).tolist(),
        "ca9_rel_err": float(np.max(np.abs(raw9 - NINTH_ROOT_GAMMA * Cr)) / (NINTH_ROOT_GAMMA * np.max(np.abs(Cr)))),
        "printed_power9_rel_err": float(np.max(np.abs(printed ** 9 - NINTH_ROOT_GAMMA)) / NINTH_ROOT_GAMMA),
        "rank_eight_of_nine": rep8.rank,
        "rank_with_residue_8": rep9.rank,
    }
