import numpy as np
import pytest
from hypothesis import given, strategies as st

from sampobs import Eigenvalue, JordanBlock, Schedule, SystemSpec, rank_verdict
from sampobs.errors import DimensionMismatch, InconsistentSamples
from sampobs.oracle import REAL_BAND, eight_of_nine_schedule, random_system
from sampobs.simkit import (
    Trajectory, forced_response, parse_scalar, read_inputs_csv, read_samples_csv,
    reconstruct_initial_state, simulate,
)


def test_geometric_decay():
    sys_ = SystemSpec.diagonal([0.5], [1.0])
    assert simulate(sys_, [4.0], t_max=3).outputs.tolist() == [4.0, 2.0, 1.0, 0.5]


def test_jordan_shift_counts():
    sys_ = SystemSpec((JordanBlock(Eigenvalue.real(1.0), 2),), (1.0, 0.0))
    y = simulate(sys_, [0.0, 1.0], t_max=10).outputs
    assert np.allclose(y, np.arange(11), atol=1e-12)


def test_ninth_root_ninth_sample(ninth_root):
    x0 = np.zeros(9)
    x0[0] = 1.0
    y = simulate(ninth_root, x0, t_max=9).outputs
    assert y[9] == pytest.approx(0.1314 * y[0], rel=1e-12)


def test_dimension_errors():
    sys_ = SystemSpec.diagonal([0.5, 0.6], [1.0, 1.0], B=((1.0,), (1.0,)), D=(0.0,))
    with pytest.raises(DimensionMismatch):
        simulate(sys_, [1.0], t_max=2)
    with pytest.raises(DimensionMismatch):
        simulate(sys_, [1.0, 1.0], inputs=np.ones((2, 2)), t_max=1)
    with pytest.raises(DimensionMismatch):
        simulate(sys_, [1.0, 1.0], inputs=np.ones((2, 1)), t_max=5)


def test_csv_round_trip(tmp_path):
    sys_ = SystemSpec.diagonal([Eigenvalue.exact(0.9, 1, 7), Eigenvalue.exact(0.9, -1, 7)],
                               [1.0, 1.0], B=((1.0,), (0.5,)), D=(0.1,))
    u = np.linspace(-1, 1, 8)[:, None]
    traj = simulate(sys_, [1.0, 2.0], u, t_max=7)
    path = tmp_path / "traj.csv"
    path.write_text(traj.to_csv())
    ts, ys = read_samples_csv(path)
    assert ts == list(range(8))
    assert np.array_equal(ys, traj.outputs)
    assert np.array_equal(read_inputs_csv(path), u)
    assert parse_scalar("1.5") == 1.5 and parse_scalar("1+2j") == 1 + 2j


def test_unique_recovery_noiseless(rng):
    sys_ = random_system(rng, 4, moduli=REAL_BAND)
    x0 = rng.normal(size=4)
    sched = [0, 3, 7, 12, 20]
    y = simulate(sys_, x0, t_max=20).samples(sched)
    rec = reconstruct_initial_state(sys_, sched, y)
    assert rec.unique
    assert np.linalg.norm(rec.x0 - x0) <= 1e-8 * np.linalg.norm(x0)


def test_ninth_root_flagged_non_unique(ninth_root, rng):
    sched = eight_of_nine_schedule()
    x0 = rng.normal(size=9)
    y = simulate(ninth_root, x0, t_max=max(sched)).samples(sched)
    rec = reconstruct_initial_state(ninth_root, sched, y)
    assert not rec.unique and rec.report.rank == 8
    assert rec.report.witness is not None


def test_corrupted_samples_rejected():
    sys_ = SystemSpec.diagonal([0.5, 0.8], [1.0, 1.0])
    y = simulate(sys_, [1.0, -1.0], t_max=5).samples([0, 1, 2, 5])
    y[2] += 0.3
    with pytest.raises(InconsistentSamples):
        reconstruct_initial_state(sys_, [0, 1, 2, 5], y)


def test_forced_response_matches_simulation(rng):
    sys_ = random_system(rng, 3, m=2, jordan_prob=0.5, moduli=REAL_BAND)
    u = rng.normal(size=(16, 2))
    y_forced = simulate(sys_, np.zeros(3), u, t_max=15).outputs
    got = forced_response(sys_, u, range(16))
    assert np.allclose(got, y_forced, rtol=1e-10, atol=1e-12)


def test_conjugate_system_estimate_is_near_real(rng):
    # real state space data in complex Jordan coordinates: conjugate-symmetric x0 and C
    sys_ = SystemSpec.diagonal([Eigenvalue.exact(0.9, 1, 5), Eigenvalue.exact(0.9, -1, 5), 0.7])
    x0 = np.array([1.0, 2.0, -0.5])
    y = simulate(sys_, x0, t_max=6).samples([0, 2, 6])
    rec = reconstruct_initial_state(sys_, [0, 2, 6], y)
    assert rec.imag_residue <= 1e-8


# -- properties ------------------------------------------------------------------------

@given(st.integers(0, 2**32 - 1))
def test_superposition(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    sys_ = random_system(rng, n, m=int(rng.integers(1, 3)), jordan_prob=0.3, moduli=(0.5, 1.1))
    x0 = rng.normal(size=n)
    u = rng.normal(size=(21, sys_.m))
    both = simulate(sys_, x0, u, 20).outputs
    free = simulate(sys_, x0, None, 20).outputs
    forced = simulate(sys_, np.zeros(n), u, 20).outputs
    assert np.max(np.abs(both - (free + forced))) <= 1e-10 * max(1.0, np.max(np.abs(both)))


@given(st.integers(0, 2**32 - 1))
def test_round_trip_when_observable(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    sys_ = random_system(rng, n, m=1, jordan_prob=0.3, moduli=REAL_BAND, max_q=8)
    sched = sorted(rng.choice(25, size=int(rng.integers(n, n + 4)), replace=False).tolist())
    if not rank_verdict(sys_, sched).observable:
        return
    x0 = rng.normal(size=n)
    u = rng.normal(size=(max(sched) + 1, 1))
    y = simulate(sys_, x0, u, max(sched)).samples(sched)
    rec = reconstruct_initial_state(sys_, sched, y, u)
    assert np.linalg.norm(rec.x0 - x0) <= 1e-6 * np.linalg.norm(x0)


@given(st.integers(0, 2**32 - 1), st.floats(1e-6, 1e-2))
def test_witness_is_invisible(seed, eps):
    rng = np.random.default_rng(seed)
    sys_ = SystemSpec.diagonal([0.8, -0.8, Eigenvalue.exact(0.6, 1, 3), Eigenvalue.exact(0.6, -1, 3)])
    sched = Schedule.of(6 * r for r in rng.choice(8, size=4, replace=False))
    rep = rank_verdict(sys_, sched)
    assert not rep.observable
    x0 = rng.normal(size=4)
    x1 = x0 + eps * np.array(rep.witness)
    t = max(sched.instants)
    y0 = simulate(sys_, x0, t_max=t).samples(sched)
    y1 = simulate(sys_, x1, t_max=t).samples(sched)
    assert np.max(np.abs(y1 - y0)) <= eps * 1e-9 * max(1.0, np.max(np.abs(y0)))


def test_forced_response_at_time_zero():
    sys_ = SystemSpec.diagonal([0.5], [1.0], B=((1.0,),), D=(2.0,))
    assert forced_response(sys_, [[3.0]], [0]).tolist() == [6.0]
