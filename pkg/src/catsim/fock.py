"""Truncated harmonic-oscillator states and operators.

Everything lives on the first ``n_max`` Fock levels {|0>, ..., |n_max-1>}
as dense complex matrices.  Ladder operators are exact on the retained
block; identities involving products of two ladder operators hold exactly
away from the top one or two levels (see tests).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-9

COHERENT_TAIL_WARN = 1e-10
COHERENT_TAIL_ERROR = 1e-6


class TruncationError(ValueError):
    """Requested state leaks too much weight past the retained levels."""


class DegenerateAmplitude(ValueError):
    """Cat-state amplitude must be strictly positive (gamma_minus = 0 at alpha = 0)."""


@dataclass(frozen=True)
class FockSpace:
    """Truncation context: basis {|0>, ..., |n_max-1>}."""

    n_max: int

    def __post_init__(self):
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 2:
            raise ValueError(f"n_max must be an integer >= 2, got {self.n_max!r}")

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.n_max)


@dataclass(frozen=True)
class FockOperator:
    """Dense operator on a truncated Fock space."""

    space: FockSpace
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (self.space.n_max, self.space.n_max):
            raise ValueError(
                f"entries shape {entries.shape} does not match n_max={self.space.n_max}"
            )
        object.__setattr__(self, "entries", entries)

    def dag(self) -> "FockOperator":
        return FockOperator(self.space, self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.linalg.norm(self.entries))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def _check_same_space(self, other: "FockOperator"):
        if self.space != other.space:
            raise ValueError("operators live on different spaces")

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        self._check_same_space(other)
        return FockOperator(self.space, self.entries @ other.entries)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        self._check_same_space(other)
        return FockOperator(self.space, self.entries + other.entries)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        self._check_same_space(other)
        return FockOperator(self.space, self.entries - other.entries)

    def __neg__(self) -> "FockOperator":
        return FockOperator(self.space, -self.entries)

    def __mul__(self, scalar) -> "FockOperator":
        return FockOperator(self.space, self.entries * complex(scalar))

    __rmul__ = __mul__

    def apply(self, ket: "Ket") -> "Ket":
        if ket.space != self.space:
            raise ValueError("ket lives on a different space")
        return Ket(self.space, self.entries @ ket.amplitudes, normalize=False)


@dataclass(frozen=True)
class Ket:
    """State vector on a truncated Fock space.

    State-preparing constructors (vacuum/fock/coherent/cat) return unit-norm
    vectors; intermediate results of operator application need not be
    normalized, hence the flag.
    """

    space: FockSpace
    amplitudes: np.ndarray
    normalize: bool = False

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.n_max,):
            raise ValueError(
                f"amplitude vector length {amps.shape} does not match n_max={self.space.n_max}"
            )
        if self.normalize:
            nrm = np.linalg.norm(amps)
            if nrm == 0.0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / nrm
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "Ket") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def outer(self) -> FockOperator:
        """|self><self| as an operator (not trace-normalized)."""
        return FockOperator(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive-semidefinite, unit-trace operator."""

    space: FockSpace
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (self.space.n_max, self.space.n_max):
            raise ValueError(
                f"entries shape {entries.shape} does not match n_max={self.space.n_max}"
            )
        skew = np.max(np.abs(entries - entries.conj().T))
        if skew > HERMITIAN_TOL:
            raise ValueError(f"density matrix not Hermitian: max |rho - rho^dag| = {skew:.3e}")
        tr = np.trace(entries).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr!r} not 1 within {TRACE_TOL}")
        lo = float(np.linalg.eigvalsh(entries)[0])
        if lo < EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix has eigenvalue {lo:.3e} < {EIGENVALUE_FLOOR}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_ket(cls, ket: Ket) -> "DensityMatrix":
        amps = ket.amplitudes / np.linalg.norm(ket.amplitudes)
        return cls(ket.space, np.outer(amps, amps.conj()))

    def expectation(self, op: FockOperator) -> float:
        """tr(rho O), real part (O is expected Hermitian)."""
        return float(np.einsum("ij,ji->", self.entries, op.entries).real)

    def as_operator(self) -> FockOperator:
        return FockOperator(self.space, self.entries)


def annihilation(space: FockSpace) -> FockOperator:
    """a with a|n> = sqrt(n)|n-1>."""
    n = space.n_max
    m = np.zeros((n, n), dtype=complex)
    m[np.arange(n - 1), np.arange(1, n)] = np.sqrt(np.arange(1, n))
    return FockOperator(space, m)


def creation(space: FockSpace) -> FockOperator:
    """a^dag = conjugate transpose of the annihilation operator."""
    return annihilation(space).dag()


def number_op(space: FockSpace) -> FockOperator:
    return FockOperator(space, np.diag(np.arange(space.n_max).astype(complex)))


def identity_op(space: FockSpace) -> FockOperator:
    return FockOperator(space, np.eye(space.n_max, dtype=complex))


def parity_op(space: FockSpace) -> FockOperator:
    """(-1)^N, diagonal with entries (-1)^n."""
    signs = np.where(space.levels % 2 == 0, 1.0, -1.0).astype(complex)
    return FockOperator(space, np.diag(signs))


def fock_ket(space: FockSpace, n: int) -> Ket:
    """Number state |n>."""
    if not 0 <= n < space.n_max:
        raise ValueError(f"level {n} outside [0, {space.n_max - 1}]")
    amps = np.zeros(space.n_max, dtype=complex)
    amps[n] = 1.0
    return Ket(space, amps)


def vacuum(space: FockSpace) -> Ket:
    return fock_ket(space, 0)


def coherent_state(space: FockSpace, alpha: complex) -> Ket:
    """|alpha> = e^{-|alpha|^2/2} sum_n alpha^n/sqrt(n!) |n>, renormalized after truncation.

    Warns when the discarded tail mass exceeds 1e-10 and refuses above 1e-6.
    """
    n = space.n_max
    alpha = complex(alpha)
    if alpha == 0.0:
        amps = np.zeros(n, dtype=complex)
        amps[0] = 1.0
    else:
        ns = np.arange(n)
        # amplitudes alpha^n / sqrt(n!) via logs to dodge overflow at large n;
        # real alpha takes a real-arithmetic path so sign alternation is exact
        log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, n)))))
        radial = np.exp(-0.5 * abs(alpha) ** 2 + ns * np.log(abs(alpha)) - 0.5 * log_fact)
        if alpha.imag == 0.0:
            phase = np.ones(n) if alpha.real > 0 else (-1.0) ** ns
        else:
            phase = np.exp(1j * ns * np.angle(alpha))
        amps = (radial * phase).astype(complex)
    retained = float(np.sum(np.abs(amps) ** 2))
    tail = max(0.0, 1.0 - retained)
    if tail > COHERENT_TAIL_ERROR:
        raise TruncationError(
            f"coherent tail mass {tail:.3e} beyond n_max={n} exceeds {COHERENT_TAIL_ERROR}"
        )
    if tail > COHERENT_TAIL_WARN:
        warnings.warn(
            f"coherent state |alpha|^2={abs(alpha)**2:.3g} poorly truncated at "
            f"n_max={n} (tail mass {tail:.3e})",
            RuntimeWarning,
        )
    return Ket(space, amps, normalize=True)


def cat_norms(alpha: float) -> tuple[float, float]:
    """Normalization factors gamma_plus/gamma_minus = sqrt(2(1 +/- e^{-2 alpha^2}))."""
    if alpha <= 0.0:
        raise DegenerateAmplitude(f"cat amplitude must be > 0, got {alpha}")
    e = math.exp(-2.0 * alpha * alpha)
    return math.sqrt(2.0 * (1.0 + e)), math.sqrt(2.0 * (1.0 - e))


def cat_state(space: FockSpace, alpha: float, sign: int) -> Ket:
    """|c_alpha^+-> = (|alpha> +- |-alpha>)/gamma_+-, renormalized after truncation."""
    if alpha <= 0.0:
        raise DegenerateAmplitude(f"cat amplitude must be > 0, got {alpha}")
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    plus = coherent_state(space, alpha).amplitudes
    minus = coherent_state(space, -alpha).amplitudes
    return Ket(space, plus + sign * minus, normalize=True)


def two_photon_jump(space: FockSpace, alpha: float) -> FockOperator:
    """L = a^2 - alpha^2 I; its kernel is span{|alpha>, |-alpha>}."""
    a = annihilation(space)
    return a @ a - (alpha * alpha) * identity_op(space)
