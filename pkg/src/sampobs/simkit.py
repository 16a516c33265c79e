"""Trajectory simulation and initial-state reconstruction from sampled outputs."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InconsistentSamples
from .obsmatrix import report_from_matrix, row_at, truncated_lstsq
from .sysmodel import ObservabilityReport, Schedule, SystemSpec, encode_vector

CONSISTENCY_RTOL = 1e-6


def _as_inputs(system: SystemSpec, inputs, length: int) -> np.ndarray:
    """(length, m) input array; zeros when the system or caller has no inputs."""
    m = system.m
    if inputs is None or len(inputs) == 0:
        return np.zeros((length, m))
    U = np.asarray(inputs, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    if U.shape[1] != m:
        raise DimensionMismatch(f"inputs have width {U.shape[1]}, system expects m = {m}")
    if U.shape[0] < length:
        raise DimensionMismatch(f"need {length} input samples, got {U.shape[0]}")
    return U[:length]


@dataclass(frozen=True, eq=False)
class Trajectory:
    x0: np.ndarray
    inputs: np.ndarray   # (t_max+1, m)
    outputs: np.ndarray  # (t_max+1,), complex for complex Jordan coordinates

    @property
    def t_max(self) -> int:
        return len(self.outputs) - 1

    def samples(self, schedule: Schedule | Sequence[int]) -> np.ndarray:
        inst = schedule.instants if isinstance(schedule, Schedule) else schedule
        return self.outputs[list(inst)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        m = self.inputs.shape[1]
        w.writerow(["t", "y"] + [f"u_{j + 1}" for j in range(m)])
        for t, y in enumerate(self.outputs):
            w.writerow([t, format_scalar(y)] + [repr(float(u)) for u in self.inputs[t]])
        return buf.getvalue()


def format_scalar(y) -> str:
    y = complex(y)
    if y.imag == 0.0:
        return repr(y.real)
    return repr(y).strip("()")


def parse_scalar(s: str):
    z = complex(s.strip())
    return z.real if z.imag == 0.0 else z


def simulate(system: SystemSpec, x0, inputs=None, t_max: int = 0) -> Trajectory:
    """Iterate x(t+1) = J x(t) + B u(t), y(t) = C x(t) + D u(t) for t = 0..t_max."""
    n = system.n
    x = np.asarray(x0, dtype=complex).ravel()
    if x.shape != (n,):
        raise DimensionMismatch(f"x0 has length {x.size}, expected {n}")
    U = _as_inputs(system, inputs, t_max + 1)
    A = system.jordan_matrix()
    B, C, D = system.b_matrix(), system.c_row(), system.d_row()
    y = np.empty(t_max + 1, dtype=complex)
    for t in range(t_max + 1):
        y[t] = C @ x + D @ U[t]
        x = A @ x + B @ U[t]
    if not np.any(y.imag):
        y = y.real
    return Trajectory(np.asarray(x0).ravel().copy(), U, y)


def forced_response(system: SystemSpec, inputs, instants: Sequence[int]) -> np.ndarray:
    """Input-driven output sum_k C A^(t-1-k) B u(k) + D u(t) at each instant."""
    inst = list(instants)
    if system.m == 0 or not inst:
        return np.zeros(len(inst), dtype=complex)
    horizon = max(inst)
    U = _as_inputs(system, inputs, horizon + 1)
    B, D = system.b_matrix(), system.d_row()
    # C A^j B for j = 0..horizon-1, via the analytic rows
    CAB = np.array([row_at(system, j).raw @ B for j in range(horizon)]).reshape(horizon, system.m)
    out = np.empty(len(inst), dtype=complex)
    for i, t in enumerate(inst):
        acc = D @ U[t]
        if t > 0:
            # k runs 0..t-1, power t-1-k runs t-1..0
            acc = acc + np.sum(CAB[t - 1::-1] * U[:t])
        out[i] = acc
    return out


@dataclass(frozen=True, eq=False)
class Reconstruction:
    x0: np.ndarray
    residual: float
    report: ObservabilityReport
    imag_residue: float

    @property
    def unique(self) -> bool:
        return self.report.observable

    def to_dict(self) -> dict:
        return {
            "x0": encode_vector(self.x0),
            "unique": self.unique,
            "residual": self.residual,
            "imag_residue": self.imag_residue,
            "report": self.report.to_dict(),
        }


def reconstruct_initial_state(system: SystemSpec, schedule: Schedule | Sequence[int], samples,
                              inputs=None, tol_rel: float | None = None,
                              consistency_rtol: float = CONSISTENCY_RTOL) -> Reconstruction:
    """Least-squares initial state from samples y(t_i).

    Each equation C A^t_i x0 = y(t_i) - forced(t_i) is divided by the row's
    scale, giving exactly the matrix used by the rank verdict; the solve
    truncates at the same numerical rank.  When the rank is deficient the
    minimum-norm solution is returned and ``unique`` is False.
    """
    inst = list(schedule.instants if isinstance(schedule, Schedule) else schedule)
    y = np.asarray(samples, dtype=complex).ravel()
    if len(y) != len(inst):
        raise DimensionMismatch(f"{len(y)} samples for {len(inst)} instants")
    rows = [row_at(system, t) for t in inst]
    M = np.vstack([r.entries for r in rows])
    free = y - forced_response(system, inputs, inst)
    b = np.array([f * np.exp(-r.log_scale) for f, r in zip(free, rows)])

    report = report_from_matrix(M, tol_rel)
    x0, _ = truncated_lstsq(M, b, report.tolerance)
    residual = float(np.linalg.norm(M @ x0 - b))
    bnorm = float(np.linalg.norm(b))
    if report.observable and residual > consistency_rtol * max(bnorm, 1e-300):
        raise InconsistentSamples(f"residual {residual:.3g} vs sample norm {bnorm:.3g} at full rank")
    xnorm = float(np.linalg.norm(x0))
    imag = float(np.linalg.norm(x0.imag) / xnorm) if xnorm > 0 else 0.0
    return Reconstruction(x0, residual, report, imag)


def read_samples_csv(path: str | Path) -> tuple[list[int], np.ndarray]:
    """Samples CSV with header ``t,y``; extra columns are ignored."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    ts = [int(r["t"]) for r in rows]
    ys = np.array([complex(r["y"].strip()) for r in rows])
    if not np.any(ys.imag):
        ys = ys.real
    return ts, ys


def read_inputs_csv(path: str | Path) -> np.ndarray:
    """Input CSV with columns u_1..u_m (an optional ``t`` column is dropped); one row per instant."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = sorted((c for c in reader.fieldnames or [] if c.startswith("u_")),
                      key=lambda c: int(c[2:]))
        rows = list(reader)
    if "t" in (reader.fieldnames or []):
        rows.sort(key=lambda r: int(r["t"]))
    return np.array([[float(r[c]) for c in cols] for r in rows]).reshape(len(rows), len(cols))
