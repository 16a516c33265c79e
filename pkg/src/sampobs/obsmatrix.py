"""Sampled observability matrix and its numerical rank.

Rows C*J**t are formed analytically from the Jordan structure,
(J**t)[a, a+k] = binom(t, k) * lam**(t-k), with every term carried as
(log magnitude, unit phase) so that large t neither underflows nor
overflows.  Each row is then scaled to unit infinity norm; scaling rows
never changes the row space, so the rank verdict is unaffected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .sysmodel import MAX_DIMENSION, JordanBlock, ObservabilityReport, Schedule, SystemSpec

RANK_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class SampledRow:
    t: int
    entries: np.ndarray  # normalized, max |entry| == 1
    log_scale: float

    @property
    def scale(self) -> float:
        return math.exp(self.log_scale)

    @property
    def raw(self) -> np.ndarray:
        return self.entries * self.scale


def _log_binom(t: int, k: int) -> float:
    return math.log(math.comb(t, k))


def row_at(system: SystemSpec, t: int) -> SampledRow:
    if t < 0 or int(t) != t:
        raise ValueError(f"sample instant must be a nonnegative integer, got {t!r}")
    t = int(t)
    n = system.n
    if n > MAX_DIMENSION:
        raise ValueError(f"dimension {n} exceeds cap {MAX_DIMENSION}")
    C = system.c_row()

    # (column, log magnitude, unit phase) for every nonzero term
    cols, logs, units = [], [], []
    for blk, s in zip(system.blocks, system.block_starts):
        lam = blk.eigenvalue
        if lam.modulus == 0.0:
            raise ValueError("zero eigenvalue: the system matrix must be invertible")
        loglam = math.log(lam.modulus)
        for k in range(min(blk.size, t + 1)):
            lmag = _log_binom(t, k) + (t - k) * loglam
            unit = lam.power_unit(t - k)
            for b in range(s + k, s + blk.size):
                if C[b - k] != 0.0:
                    cols.append(b)
                    logs.append(lmag + math.log(abs(C[b - k])))
                    units.append(unit * math.copysign(1.0, C[b - k]))
    if not logs:
        raise ValueError("output row is identically zero")
    logs = np.asarray(logs)
    top = logs.max()
    contrib = np.exp(logs - top) * np.asarray(units, dtype=complex)
    entries = np.zeros(n, dtype=complex)
    np.add.at(entries, np.asarray(cols), contrib)
    peak = np.abs(entries).max()
    if peak == 0.0:
        raise ValueError(f"output row vanishes at t={t}")
    return SampledRow(t, entries / peak, float(top + math.log(peak)))


def _instants(schedule: Schedule | Iterable[int]) -> list[int]:
    return list(schedule.instants) if isinstance(schedule, Schedule) else [int(t) for t in schedule]


def observability_matrix(system: SystemSpec, schedule: Schedule | Iterable[int]) -> np.ndarray:
    """l x n complex matrix of normalized rows, in schedule order."""
    inst = _instants(schedule)
    if not inst:
        raise ValueError("schedule is empty")
    return np.vstack([row_at(system, t).entries for t in inst])


def default_tolerance(l: int, n: int) -> float:
    return RANK_RTOL * max(l, n)


def equilibrate(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale columns of M to unit max modulus; returns ``(M * d, d)``.

    Right-multiplying by an invertible diagonal leaves the exact rank alone
    but stops a column of tiny entries (a small-modulus eigenvalue seen at
    late instants) from reading as numerically zero.  All-zero columns keep
    scale 1.
    """
    peak = np.abs(M).max(axis=0)
    d = np.where(peak > 0.0, 1.0 / np.where(peak > 0.0, peak, 1.0), 1.0)
    return M * d, d


def numeric_rank(M: np.ndarray, tol_rel: float | None = None, equilibrated: bool = True):
    """Rank of M by relative singular value threshold.

    Returns ``(rank, scaled_singular_values, tol_rel, Vh, d)``.  The SVD is of
    ``M * d`` (``d`` is all ones when ``equilibrated`` is False) and is full,
    so the trailing rows of Vh span its numerical null space.
    """
    l, n = M.shape
    if tol_rel is None:
        tol_rel = default_tolerance(l, n)
    if equilibrated:
        M, d = equilibrate(M)
    else:
        d = np.ones(n)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return 0, np.zeros_like(s), tol_rel, Vh, d
    scaled = s / s[0]
    return int(np.count_nonzero(scaled > tol_rel)), scaled, tol_rel, Vh, d


def batch_rank(Ms: np.ndarray, tol_rel: float | None = None, equilibrated: bool = True) -> np.ndarray:
    """numeric_rank over a stack of equally shaped matrices (k, l, n)."""
    k, l, n = Ms.shape
    if tol_rel is None:
        tol_rel = default_tolerance(l, n)
    if equilibrated:
        peak = np.abs(Ms).max(axis=1, keepdims=True)
        Ms = Ms / np.where(peak > 0.0, peak, 1.0)
    s = np.linalg.svd(Ms, compute_uv=False)
    top = s[:, :1]
    ok = top[:, 0] > 0.0
    scaled = s / np.where(top > 0.0, top, 1.0)
    return np.where(ok, np.count_nonzero(scaled > tol_rel, axis=1), 0)


def report_from_matrix(M: np.ndarray, tol_rel: float | None = None,
                       equilibrated: bool = True) -> ObservabilityReport:
    n = M.shape[1]
    rank, scaled, tol_rel, Vh, d = numeric_rank(M, tol_rel, equilibrated)
    witness = None
    if rank < n:
        # null direction of M*d maps back through d
        v = d * Vh[-1].conj()
        v = v / np.linalg.norm(v)
        # fix the free phase so the witness is deterministic
        k = int(np.argmax(np.abs(v)))
        v = v * (abs(v[k]) / v[k])
        witness = tuple(complex(x) for x in v)
    return ObservabilityReport(rank, n, tuple(float(x) for x in scaled), float(tol_rel), witness)


def truncated_lstsq(M: np.ndarray, b: np.ndarray, tol_rel: float | None = None,
                    equilibrated: bool = True) -> tuple[np.ndarray, int]:
    """Minimum-norm least squares solution of M x = b, truncated at the numerical rank."""
    rank, _, _, _, d = numeric_rank(M, tol_rel, equilibrated)
    U, s, Vh = np.linalg.svd(M * d, full_matrices=False)
    y = Vh[:rank].conj().T @ ((U[:, :rank].conj().T @ b) / s[:rank])
    return d * y, rank


def rank_verdict(system: SystemSpec, schedule: Schedule | Iterable[int],
                 tol_rel: float | None = None, equilibrated: bool = True) -> ObservabilityReport:
    """Numerical rank of the sampled observability matrix.

    rank = #{sigma_i > tol_rel * sigma_1}; tol_rel defaults to 1e-9 * max(l, n).
    With ``equilibrated=False`` the singular values are those of the
    row-normalized matrix alone.
    """
    return report_from_matrix(observability_matrix(system, schedule), tol_rel, equilibrated)


def conjugate_system(system: SystemSpec) -> SystemSpec:
    blocks = tuple(JordanBlock(b.eigenvalue.conjugate(), b.size) for b in system.blocks)
    return SystemSpec(blocks, system.C, system.B, system.D)


def rank_verdict_real(system: SystemSpec, schedule: Schedule | Iterable[int],
                      tol_rel: float | None = None) -> ObservabilityReport:
    """rank_verdict for a real system, checking conjugation does not move the singular values."""
    rep = rank_verdict(system, schedule, tol_rel)
    twin = rank_verdict(conjugate_system(system), schedule, tol_rel)
    gap = max(abs(a - b) for a, b in zip(rep.scaled_singular_values, twin.scaled_singular_values))
    if gap > rep.tolerance:
        raise ValueError(f"singular values change by {gap:.3g} under conjugation; system is not real")
    return rep


class RowCache:
    """Normalized rows of one system, memoized by instant."""

    def __init__(self, system: SystemSpec):
        self.system = system
        self._rows: dict[int, np.ndarray] = {}

    def __getitem__(self, t: int) -> np.ndarray:
        row = self._rows.get(t)
        if row is None:
            row = self._rows[t] = row_at(self.system, t).entries
        return row

    def matrix(self, instants: Iterable[int]) -> np.ndarray:
        return np.vstack([self[t] for t in instants])
