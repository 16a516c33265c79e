"""Independent reference computations for the test suite.

Nothing here imports the analytic row formula or the rank engine: rows come
from repeated dense multiplication, rank from numpy's own matrix_rank, and
periods from direct comparison of complex powers.
"""
from __future__ import annotations

import cmath
import math
from itertools import combinations

import numpy as np


def dense_jordan(eigs: list[complex], sizes: list[int]) -> np.ndarray:
    n = sum(sizes)
    A = np.zeros((n, n), dtype=complex)
    s = 0
    for lam, p in zip(eigs, sizes):
        for k in range(p):
            A[s + k, s + k] = lam
            if k + 1 < p:
                A[s + k, s + k + 1] = 1.0
        s += p
    return A


def system_matrix(system) -> np.ndarray:
    return dense_jordan([b.eigenvalue.value for b in system.blocks], [b.size for b in system.blocks])


def iterated_row(system, t: int) -> np.ndarray:
    """C A^t by t successive right multiplications."""
    A = system_matrix(system)
    row = np.asarray(system.C, dtype=complex)
    for _ in range(t):
        row = row @ A
    return row


def dense_rank(system, instants, rtol: float = 1e-9) -> int:
    """Rank of the stacked rows C A^t, each row scaled by its own max modulus."""
    rows = []
    for t in instants:
        r = iterated_row(system, t)
        rows.append(r / np.abs(r).max())
    M = np.array(rows)
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rtol * max(M.shape) * s[0]))


def first_power_collision(a: complex, b: complex, h_limit: int, tol: float = 1e-9) -> int | None:
    """Smallest h <= h_limit with |a^h - b^h| <= tol * max(|a|,|b|)^h."""
    for h in range(1, h_limit + 1):
        scale = max(abs(a), abs(b)) ** h
        if abs(a ** h - b ** h) <= tol * scale:
            return h
    return None


def min_turn_distance(x_rad: float, h_max: int) -> float:
    """min over 1 <= h <= h_max of the distance of h*x to the nearest multiple of 2 pi."""
    return min(abs(math.remainder(h * x_rad, 2 * math.pi)) for h in range(1, h_max + 1))


def residue_complete(schedule, n: int) -> bool:
    """Brute force: does the schedule contain {t, t+r1 n+1, ..., t+r_{n-1} n+n-1}?"""
    inst = sorted(set(schedule))
    for t in inst:
        if all(any(s - t - i >= 0 and (s - t - i) % n == 0 for s in inst) for i in range(1, n)):
            return True
    return False


def all_subsets(items, max_size: int):
    for k in range(1, max_size + 1):
        yield from combinations(items, k)


def polar(mod: float, turns: float) -> complex:
    return cmath.rect(mod, 2 * math.pi * turns)
