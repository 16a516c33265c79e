"""System, schedule and report data model.

Systems are given directly in Jordan canonical form: an ordered list of
Jordan blocks (one eigenvalue each, upper-bidiagonal) plus the output row C.
Eigenvalues are kept in polar form.  A phase is either a ``float`` in radians
or a :class:`fractions.Fraction` measured in turns (phase = 2*pi*p/q), which
lets period detection run in exact arithmetic.
"""
from __future__ import annotations

import cmath
import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
MAX_DIMENSION = 32
DUPLICATE_RTOL = 1e-9


def _wrap_turns(f: Fraction) -> Fraction:
    f = f - math.floor(f)
    if f > Fraction(1, 2):
        f -= 1
    return f


def _wrap_radians(x: float) -> float:
    r = math.remainder(x, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


@dataclass(frozen=True)
class Eigenvalue:
    """Complex eigenvalue in polar form.

    ``phase`` is a Fraction (exact, in turns, normalized to (-1/2, 1/2]) or a
    float (radians, normalized to (-pi, pi]).
    """

    modulus: float
    phase: Fraction | float = 0.0

    def __post_init__(self):
        modulus = float(self.modulus)
        if not math.isfinite(modulus) or modulus < 0:
            raise ValueError(f"modulus must be finite and nonnegative, got {self.modulus!r}")
        object.__setattr__(self, "modulus", modulus)
        if isinstance(self.phase, Fraction):
            object.__setattr__(self, "phase", _wrap_turns(self.phase))
        else:
            x = float(self.phase)
            if not math.isfinite(x):
                raise ValueError(f"phase must be finite, got {self.phase!r}")
            object.__setattr__(self, "phase", _wrap_radians(x))

    @classmethod
    def exact(cls, modulus: float, p: int, q: int) -> "Eigenvalue":
        return cls(modulus, Fraction(p, q))

    @classmethod
    def real(cls, x: float) -> "Eigenvalue":
        return cls(abs(x), Fraction(1, 2) if x < 0 else Fraction(0))

    @classmethod
    def from_complex(cls, z: complex) -> "Eigenvalue":
        z = complex(z)
        if z.imag == 0.0:
            return cls.real(z.real)
        return cls(abs(z), cmath.phase(z))

    @property
    def is_exact(self) -> bool:
        return isinstance(self.phase, Fraction)

    @property
    def turns(self) -> Fraction | None:
        return self.phase if self.is_exact else None

    @property
    def radians(self) -> float:
        if self.is_exact:
            return TWO_PI * self.phase.numerator / self.phase.denominator
        return self.phase

    @property
    def value(self) -> complex:
        if self.is_exact:
            # exact axis points avoid cos/sin rounding residue
            axis = {Fraction(0): 1, Fraction(1, 2): -1, Fraction(1, 4): 1j, Fraction(-1, 4): -1j}
            if self.phase in axis:
                return complex(self.modulus * axis[self.phase])
        return cmath.rect(self.modulus, self.radians)

    def power_angle(self, t: int) -> float:
        """Phase of ``self**t`` in radians, reduced exactly when possible."""
        if self.is_exact:
            p, q = self.phase.numerator, self.phase.denominator
            return TWO_PI * _wrap_turns(Fraction((t * p) % q, q))
        return _wrap_radians(t * self.phase)

    def power_unit(self, t: int) -> complex:
        """exp(i * t * phase); exact on the real and imaginary axes."""
        if self.is_exact:
            p, q = self.phase.numerator, self.phase.denominator
            r = Fraction((t * p) % q, q)
            axis = {Fraction(0): 1, Fraction(1, 2): -1, Fraction(1, 4): 1j, Fraction(3, 4): -1j}
            if r in axis:
                return complex(axis[r])
            return cmath.exp(1j * TWO_PI * float(r))
        return cmath.exp(1j * _wrap_radians(t * self.phase))

    def is_real(self, tol: float = DUPLICATE_RTOL) -> bool:
        if self.is_exact:
            return self.phase in (0, Fraction(1, 2))
        return abs(self.phase) <= tol * math.pi or math.pi - abs(self.phase) <= tol * math.pi

    def is_positive_real(self, tol: float = DUPLICATE_RTOL) -> bool:
        if self.is_exact:
            return self.phase == 0
        return abs(self.phase) <= tol * math.pi

    def conjugate(self) -> "Eigenvalue":
        return Eigenvalue(self.modulus, -self.phase)

    def to_dict(self) -> dict:
        if self.is_exact:
            phase = {"exact": [self.phase.numerator, self.phase.denominator]}
        else:
            phase = {"radians": self.phase}
        return {"modulus": self.modulus, "phase": phase}

    @classmethod
    def from_dict(cls, d: dict) -> "Eigenvalue":
        if "complex" in d:
            re, im = d["complex"]
            return cls.from_complex(complex(re, im))
        phase = d.get("phase", {"exact": [0, 1]})
        if "exact" in phase:
            p, q = phase["exact"]
            if not (isinstance(p, int) and isinstance(q, int)) or q < 1:
                raise ValueError(f"exact phase needs integers p, q>=1, got {phase['exact']!r}")
            return cls.exact(d["modulus"], p, q)
        if "radians" in phase:
            return cls(d["modulus"], float(phase["radians"]))
        raise ValueError(f"unknown phase encoding {phase!r}")

    def __str__(self):
        if self.is_exact:
            return f"{self.modulus:g}*exp(2pi*i*{self.phase})"
        return f"{self.modulus:g}*exp(i*{self.phase:g})"


def same_eigenvalue(a: Eigenvalue, b: Eigenvalue, rtol: float = DUPLICATE_RTOL) -> bool:
    scale = max(a.modulus, b.modulus)
    if abs(a.modulus - b.modulus) > rtol * scale:
        return False
    if scale == 0.0:
        return True
    if a.is_exact and b.is_exact:
        return a.phase == b.phase
    return abs(_wrap_radians(a.radians - b.radians)) <= rtol * math.pi


@dataclass(frozen=True)
class JordanBlock:
    eigenvalue: Eigenvalue
    size: int = 1

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f"block size must be a positive integer, got {self.size!r}")
        object.__setattr__(self, "size", int(self.size))


def _tuple_row(row) -> tuple[float, ...]:
    return tuple(float(x) for x in row)


@dataclass(frozen=True)
class SystemSpec:
    """Single-output LTI system x(t+1) = J x(t) + B u(t), y(t) = C x(t) + D u(t).

    J is block diagonal with the given Jordan blocks.  Construction does not
    enforce the standing assumptions; call :func:`validate`.
    """

    blocks: tuple[JordanBlock, ...]
    C: tuple[float, ...]
    B: tuple[tuple[float, ...], ...] | None = None
    D: tuple[float, ...] | None = None

    def __post_init__(self):
        blocks = tuple(b if isinstance(b, JordanBlock) else JordanBlock(*b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "C", _tuple_row(np.ravel(self.C)))
        if self.B is not None:
            B = np.atleast_2d(np.asarray(self.B, dtype=float))
            object.__setattr__(self, "B", tuple(_tuple_row(r) for r in B))
        if self.D is not None:
            object.__setattr__(self, "D", _tuple_row(np.ravel(self.D)))

    @classmethod
    def diagonal(cls, eigenvalues: Iterable[Eigenvalue | complex], C=None, **kw) -> "SystemSpec":
        eigs = [e if isinstance(e, Eigenvalue) else Eigenvalue.from_complex(e) for e in eigenvalues]
        if C is None:
            C = [1.0] * len(eigs)
        return cls(tuple(JordanBlock(e, 1) for e in eigs), C, **kw)

    @property
    def n(self) -> int:
        return sum(b.size for b in self.blocks)

    @property
    def m(self) -> int:
        if self.B is not None:
            return len(self.B[0])
        if self.D is not None:
            return len(self.D)
        return 0

    @property
    def eigenvalues(self) -> list[Eigenvalue]:
        return [b.eigenvalue for b in self.blocks]

    @property
    def block_starts(self) -> list[int]:
        starts, s = [], 0
        for b in self.blocks:
            starts.append(s)
            s += b.size
        return starts

    @property
    def is_diagonal(self) -> bool:
        return all(b.size == 1 for b in self.blocks)

    def c_row(self) -> np.ndarray:
        return np.asarray(self.C, dtype=float)

    def b_matrix(self) -> np.ndarray:
        if self.B is None:
            return np.zeros((self.n, self.m))
        return np.asarray(self.B, dtype=float)

    def d_row(self) -> np.ndarray:
        if self.D is None:
            return np.zeros(self.m)
        return np.asarray(self.D, dtype=float)

    def jordan_matrix(self) -> np.ndarray:
        """Dense complex J (for cross-checks and simulation)."""
        A = np.zeros((self.n, self.n), dtype=complex)
        for blk, s in zip(self.blocks, self.block_starts):
            lam = blk.eigenvalue.value
            for i in range(blk.size):
                A[s + i, s + i] = lam
                if i + 1 < blk.size:
                    A[s + i, s + i + 1] = 1.0
        return A

    def with_C(self, C) -> "SystemSpec":
        return SystemSpec(self.blocks, C, self.B, self.D)

    def to_dict(self) -> dict:
        d = {
            "blocks": [{**b.eigenvalue.to_dict(), "size": b.size} for b in self.blocks],
            "C": list(self.C),
        }
        if self.B is not None:
            d["B"] = [list(r) for r in self.B]
        if self.D is not None:
            d["D"] = list(self.D)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SystemSpec":
        blocks = tuple(JordanBlock(Eigenvalue.from_dict(b), b.get("size", 1)) for b in d["blocks"])
        return cls(blocks, d["C"], d.get("B"), d.get("D"))


def dimension(system: SystemSpec) -> int:
    return system.n


def load_system(path: str | Path) -> SystemSpec:
    return SystemSpec.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def dump_system(system: SystemSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(system.to_dict(), indent=2) + "\n", encoding="utf-8")


# -- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    assumption: str
    message: str

    def __str__(self):
        return f"{self.assumption}: {self.message}"


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"assumption": v.assumption, "message": v.message} for v in self.violations],
        }


def validate(system: SystemSpec, rtol: float = DUPLICATE_RTOL) -> ValidationResult:
    """Check structure, observability of the pair (A, C) and a nonzero spectrum.

    Single-output observability in Jordan form: distinct blocks carry distinct
    eigenvalues and C is nonzero at the first column of every block.
    """
    out: list[Violation] = []
    n = system.n
    if n < 1:
        out.append(Violation("structure", "system has no states"))
    if n > MAX_DIMENSION:
        out.append(Violation("structure", f"dimension {n} exceeds cap {MAX_DIMENSION}"))
    if len(system.C) != n:
        out.append(Violation("structure", f"C has length {len(system.C)}, expected {n}"))
    if system.B is not None:
        if len(system.B) != n or len({len(r) for r in system.B}) != 1:
            out.append(Violation("structure", f"B must be {n} x m"))
    if system.D is not None and system.B is not None and len(system.D) != len(system.B[0]):
        out.append(Violation("structure", "D width does not match B"))
    if not all(math.isfinite(c) for c in system.C):
        out.append(Violation("structure", "C has non-finite entries"))

    for i, blk in enumerate(system.blocks):
        if blk.eigenvalue.modulus == 0.0:
            out.append(Violation("nonzero-spectrum", f"block {i} has a zero eigenvalue"))

    eigs = system.eigenvalues
    for i in range(len(eigs)):
        for j in range(i + 1, len(eigs)):
            if same_eigenvalue(eigs[i], eigs[j], rtol):
                out.append(Violation(
                    "observable-pair",
                    f"blocks {i} and {j} share eigenvalue {eigs[i]}; (A, C) cannot be observable",
                ))

    if len(system.C) == n:
        for i, s in enumerate(system.block_starts):
            if system.C[s] == 0.0:
                out.append(Violation(
                    "observable-pair", f"C is zero at column {s}, the first column of block {i}"))
    return ValidationResult(tuple(out))


# -- schedules ------------------------------------------------------------------

class Provenance(str, enum.Enum):
    MANUAL = "manual"
    REGULAR = "regular"
    SECOND_ORDER = "second_order"
    REAL_EIGS = "real_eigs"
    THIRD_ORDER = "third_order"
    DOUBLING = "doubling"
    ORACLE = "oracle"


@dataclass(frozen=True)
class Schedule:
    instants: tuple[int, ...]
    provenance: Provenance = Provenance.MANUAL

    def __post_init__(self):
        inst = tuple(int(t) for t in self.instants)
        if any(t != u for t, u in zip(inst, self.instants)):
            raise ValueError("instants must be integers")
        if inst and inst[0] < 0:
            raise ValueError("instants must be nonnegative")
        if any(b <= a for a, b in zip(inst, inst[1:])):
            raise ValueError(f"instants must be strictly increasing, got {inst}")
        object.__setattr__(self, "instants", inst)
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    @classmethod
    def of(cls, instants: Iterable[int], provenance: Provenance | str = Provenance.MANUAL) -> "Schedule":
        """Build from any iterable; sorts and merges duplicates."""
        return cls(tuple(sorted({int(t) for t in instants})), Provenance(provenance))

    def __len__(self):
        return len(self.instants)

    def __iter__(self):
        return iter(self.instants)

    def to_dict(self) -> dict:
        return {"instants": list(self.instants), "provenance": self.provenance.value}

    @classmethod
    def from_dict(cls, d: dict) -> "Schedule":
        return cls.of(d["instants"], d.get("provenance", "manual"))


def load_schedule(path: str | Path) -> Schedule:
    return Schedule.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# -- reports --------------------------------------------------------------------

def encode_vector(v: Sequence[complex] | np.ndarray | None, tol: float = 0.0):
    """JSON form of a vector: plain reals when the imaginary part vanishes, else [re, im] pairs."""
    if v is None:
        return None
    v = np.asarray(v)
    if not np.iscomplexobj(v) or np.all(np.abs(v.imag) <= tol):
        return [float(x) for x in np.real(v)]
    return [[float(x.real), float(x.imag)] for x in v]


def decode_vector(data) -> np.ndarray:
    if any(isinstance(x, (list, tuple)) for x in data):
        return np.array([complex(*x) if isinstance(x, (list, tuple)) else complex(x) for x in data])
    return np.array([float(x) for x in data])


@dataclass(frozen=True)
class ObservabilityReport:
    rank: int
    n: int
    scaled_singular_values: tuple[float, ...]
    tolerance: float
    witness: tuple[complex, ...] | None = None
    observable: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "observable", self.rank == self.n)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "n": self.n,
            "observable": self.observable,
            "scaled_singular_values": list(self.scaled_singular_values),
            "tolerance": self.tolerance,
            "witness": encode_vector(self.witness),
        }
