"""The twelve acceptance criteria, each at its stated tolerance and runtime budget.

Every test records one PASS/FAIL line; conftest prints them after the run.
"""
import contextlib
import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

from oracles import dense_rank, first_power_collision, polar
from sampobs import Eigenvalue, SystemSpec, pathology_report, rank_verdict
from sampobs.obsmatrix import RowCache, batch_rank
from sampobs.oracle import (
    NINTH_ROOT_GAMMA, NINTH_ROOT_PRINTED, REGULAR_BAND, ninth_root_system, check_bound_real_window,
    check_positive_spectrum_trials, check_doubling_trials, check_worst_case_equivalence, check_real_spectrum_trials, check_regular_trials,
    check_third_order_trials, eight_of_nine_schedule, min_samples_in_window, random_system, worst_case_system,
)
from sampobs.obsmatrix import row_at
from sampobs.scheduler import (
    check_condition_CCA, scheme_doubling, scheme_regular, scheme_third_order_irregular,
)
from sampobs.simkit import reconstruct_initial_state, simulate
from sampobs.spectral import is_pathological_period, minimal_pathological_period

pytestmark = pytest.mark.acceptance


@pytest.fixture
def criterion(acceptance_log):
    @contextlib.contextmanager
    def run(number, label, budget):
        start = time.perf_counter()
        status = "FAIL"
        try:
            yield
            elapsed = time.perf_counter() - start
            assert elapsed < budget, f"took {elapsed:.2f} s, budget {budget} s"
            status = "PASS"
        finally:
            elapsed = time.perf_counter() - start
            line = f"[{status}] criterion {number:2d}: {label} ({elapsed:.2f} s / {budget} s)"
            acceptance_log.append(line)
            print(line)
    return run


def _pair_draws(n_pairs=100, seed=2024):
    """Equal-modulus eigenvalue pairs with exact phases p/q, q <= 64."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n_pairs:
        mod = round(float(rng.uniform(0.3, 1.5)), 3)
        qa, qb = (int(q) for q in rng.integers(1, 65, size=2))
        a = Eigenvalue.exact(mod, int(rng.integers(0, qa)), qa)
        b = Eigenvalue.exact(mod, int(rng.integers(0, qb)), qb)
        if a != b:
            out.append((a, b))
    return out


def test_c01_ninth_root_example(criterion):
    with criterion(1, "ninth-order example: A^9 = gamma I, eight-of-nine rank 8, residue 8 gives 9", 1.0):
        sys_ = ninth_root_system()
        built = sorted((e.value for e in sys_.eigenvalues), key=lambda z: (round(z.real, 4), z.imag))
        printed = sorted(NINTH_ROOT_PRINTED, key=lambda z: (round(z.real, 4), z.imag))
        # the printed list is the built spectrum rounded to four decimals
        assert np.max(np.abs(np.array(built) - np.array(printed))) <= 1e-4
        C = sys_.c_row()
        raw9 = row_at(sys_, 9).raw
        assert np.max(np.abs(raw9 - NINTH_ROOT_GAMMA * C)) <= 5e-4 * NINTH_ROOT_GAMMA * np.max(np.abs(C))
        printed_pow = np.array(NINTH_ROOT_PRINTED) ** 9
        assert np.max(np.abs(printed_pow - NINTH_ROOT_GAMMA)) <= 5e-4 * NINTH_ROOT_GAMMA
        sched = eight_of_nine_schedule()
        assert len(sched) == 72
        assert rank_verdict(sys_, sched).rank == 8
        assert rank_verdict(sys_, sorted(sched + [8])).rank == 9


def test_c02_minimal_period(criterion):
    pairs = _pair_draws()
    # reference periods from unit-modulus power comparison
    ref = [first_power_collision(polar(1.0, float(a.phase)), polar(1.0, float(b.phase)), 64 * 63)
           for a, b in pairs]
    with criterion(2, "minimal pathological period is the reduced gap denominator; multiples flagged", 1.0):
        for (a, b), h_ref in zip(pairs, ref):
            h, exact = minimal_pathological_period(a, b, h_max=4096)
            assert exact and h == h_ref
            rep = pathology_report(SystemSpec.diagonal([a, b]), h_max=4096)
            assert all(is_pathological_period(rep, m * h) for m in range(1, 10**4 // h + 1))


def test_c03_pathological_sequences(criterion):
    pairs = _pair_draws()
    with criterion(3, "every schedule of at most 4 instants from {r h_bar : r <= 20} has rank 1", 10.0):
        total = 0
        for a, b in pairs:
            sys_ = SystemSpec.diagonal([a, b], [1.0, 1.0])
            h = pathology_report(sys_, h_max=4096).pairs[0].h_bar
            R = RowCache(sys_).matrix([r * h for r in range(21)])
            for k in range(1, 5):
                idx = np.array(list(itertools.combinations(range(21), k)))
                ranks = batch_rank(R[idx])
                assert np.all(ranks == 1)
                total += len(idx)
        assert total == 100 * 7546


def test_c04_opposite_pair_window(criterion):
    sys_ = SystemSpec.diagonal([0.5, -0.5], [1.0, 1.0])
    with criterion(4, "opposite pair, T = 8: every 5-subset observable, {0,2,4,6} fails", 1.0):
        study = min_samples_in_window(sys_, 0, 8)
        assert study.exhaustive and study.min_observable_size == 5
        assert dense_rank(sys_, [0, 2, 4, 6]) == 1 and rank_verdict(sys_, [0, 2, 4, 6]).rank == 1
        assert all(dense_rank(sys_, S) == 2 for S in itertools.combinations(range(8), 5))


def test_c05_real_spectrum_any_2n_minus_1(criterion):
    with criterion(5, "real spectrum, no opposite pair: 200 trials of 2n-1 instants in [0,50]", 30.0):
        out = check_real_spectrum_trials(200)
        assert out.trials == 200 and out.passed, out.failures[:1]


def test_c06_positive_spectrum_any_n(criterion):
    with criterion(6, "positive spectrum: 200 trials of n instants", 10.0):
        out = check_positive_spectrum_trials(200)
        assert out.trials == 200 and out.passed, out.failures[:1]


def test_c07_real_window_threshold(criterion):
    sys_ = SystemSpec.diagonal([0.5, -0.5, 0.9])
    with criterion(7, "{0.5,-0.5,0.9}, T = 6: every 4-subset observable", 5.0):
        out = check_bound_real_window(sys_, 0, 6)
        assert out.bound == 4 and out.passed
        assert all(rank_verdict(sys_, S).observable for S in itertools.combinations(range(6), 4))


def test_c08_regular_spacing(criterion):
    with criterion(8, "regular schedules: 100 systems, non-pathological spacing full rank, h_bar deficient", 30.0):
        out = check_regular_trials(100)
        assert out.trials == 100 and out.passed, out.failures[:1]
        assert out.extra["sharpness_checks"] > 0


def test_c09_third_order_four_samples(criterion):
    with criterion(9, "third order: 100 systems, {t1, t2, t1+D, t2+D} has rank 3", 10.0):
        out = check_third_order_trials(100)
        assert out.trials == 100 and out.passed, out.failures[:1]


def test_c10_worst_case_equivalence(criterion):
    sys_ = worst_case_system(3, 0.343)
    with criterion(10, "cube roots of 0.343, T = 9: rank test equals residue predicate on 512 subsets", 5.0):
        out = check_worst_case_equivalence(sys_, 9)
        assert out.subsets_checked == 512 and out.passed, out.mismatches[:3]


def test_c11_doubling(criterion):
    with criterion(11, "n = 4 shift-doubled sets: 50 systems, K_3 has rank 4", 10.0):
        out = check_doubling_trials(50)
        assert out.trials == 50 and out.passed, out.failures[:1]


def _scheme_schedule(rng, sys_):
    rep = pathology_report(sys_)
    n = sys_.n
    ok = [d for d in range(1, 16) if not is_pathological_period(rep, d)]
    kind = rng.integers(0, 3)
    if n == 3 and kind == 1 and check_condition_CCA(sys_, rep):
        t1, t2 = sorted(rng.choice(15, size=2, replace=False).tolist())
        return scheme_third_order_irregular(sys_, t1, t2, int(rng.choice(ok)), rep).schedule
    if n >= 3 and kind == 2 and check_condition_CCA(sys_, rep):
        t1, t2 = sorted(rng.choice(15, size=2, replace=False).tolist())
        return scheme_doubling(sys_, (t1, t2), [int(rng.choice(ok)) for _ in range(n - 2)], rep).schedule
    return scheme_regular(sys_, int(rng.integers(0, 10)), int(rng.choice(ok)), rep).schedule


def test_c12_reconstruction(criterion):
    rng = np.random.default_rng(12)
    with criterion(12, "reconstruction: 100 forced systems, scheme schedules, x0 within 1e-6", 10.0):
        worst = 0.0
        for _ in range(100):
            n = int(rng.integers(1, 6))
            sys_ = random_system(rng, n, m=int(rng.integers(1, 3)), jordan_prob=0.3,
                                 moduli=REGULAR_BAND, max_q=8)
            sched = _scheme_schedule(rng, sys_)
            x0 = rng.normal(size=n)
            t_max = max(sched.instants)
            u = rng.normal(size=(t_max + 1, sys_.m))
            y = simulate(sys_, x0, u, t_max).samples(sched)
            rec = reconstruct_initial_state(sys_, sched, y, u)
            assert rec.unique
            worst = max(worst, np.linalg.norm(rec.x0 - x0) / np.linalg.norm(x0))
        assert worst <= 1e-6, worst
