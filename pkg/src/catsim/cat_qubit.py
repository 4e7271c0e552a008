"""Protected-subspace machinery for the cat qubit.

The nominal dynamics stabilizes span{|alpha>, |-alpha>}.  In the cat basis
{|c_alpha^+>, |c_alpha^->} the residual single-photon loss acts, to first
order, as the 2x2 Lindblad generator eps*alpha^2*D[X] with
X = (g+/g-)|c+><c-| + (g-/g+)|c-><c+|, whose Bloch dynamics is solvable in
closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import (
    DegenerateAmplitude,
    DensityMatrix,
    FockOperator,
    FockSpace,
    Ket,
    cat_norms,
    cat_state,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-9
BLOCH_BALL_TOL = 1e-9


@dataclass(frozen=True)
class QubitDensity:
    """2x2 state in the cat basis {|c_alpha^+>, |c_alpha^->}."""

    entries: np.ndarray
    alpha: float

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise DegenerateAmplitude(f"cat amplitude must be > 0, got {self.alpha}")
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (2, 2):
            raise ValueError(f"qubit density must be 2x2, got {entries.shape}")
        if np.max(np.abs(entries - entries.conj().T)) > HERMITIAN_TOL:
            raise ValueError("qubit density not Hermitian within tolerance")
        if abs(np.trace(entries).real - 1.0) > TRACE_TOL:
            raise ValueError(f"qubit density trace {np.trace(entries).real!r} not 1")
        if np.linalg.eigvalsh(entries)[0] < EIGENVALUE_FLOOR:
            raise ValueError("qubit density not positive semidefinite within tolerance")
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        r2 = self.x**2 + self.y**2 + self.z**2
        if r2 > 1.0 + BLOCH_BALL_TOL:
            raise ValueError(f"Bloch vector norm^2 = {r2} outside the closed ball")


@dataclass(frozen=True)
class SlowBasis:
    """The four Hermitian operators spanning the steady manifold.

    Ordered as |c+><c+|, |c-><c-|, |c+><c-|+|c-><c+|, i(|c+><c-|-|c-><c+|);
    Frobenius norms 1, 1, sqrt(2), sqrt(2).
    """

    ops: tuple[FockOperator, FockOperator, FockOperator, FockOperator]
    alpha: float


def cat_kets(space: FockSpace, alpha: float) -> tuple[Ket, Ket]:
    return cat_state(space, alpha, +1), cat_state(space, alpha, -1)


def projector_pc(space: FockSpace, alpha: float) -> FockOperator:
    """Orthogonal projector onto span{|c+>, |c->} (rank 2)."""
    cp, cm = cat_kets(space, alpha)
    return cp.outer() + cm.outer()


def slow_basis(space: FockSpace, alpha: float) -> SlowBasis:
    cp, cm = cat_kets(space, alpha)
    pm = np.outer(cp.amplitudes, cm.amplitudes.conj())
    ops = (
        cp.outer(),
        cm.outer(),
        FockOperator(space, pm + pm.conj().T),
        FockOperator(space, 1j * (pm - pm.conj().T)),
    )
    gram = np.array(
        [[np.vdot(a.entries, b.entries).real for b in ops] for a in ops]
    )
    if np.max(np.abs(gram - np.diag([1.0, 1.0, 2.0, 2.0]))) > 1e-9:
        raise ValueError("cat operators lost orthogonality under truncation")
    return SlowBasis(ops, alpha)


def project_to_qubit(rho, alpha: float) -> tuple[np.ndarray, float]:
    """2x2 block <c_i|rho|c_j> plus the subspace population tr(P_c rho P_c).

    Deliberately not renormalized, so leakage out of the protected subspace
    stays visible.  Accepts a DensityMatrix or FockOperator.
    """
    entries = rho.entries
    space = rho.space
    cp, cm = cat_kets(space, alpha)
    basis = np.column_stack([cp.amplitudes, cm.amplitudes])
    block = basis.conj().T @ entries @ basis
    return block, float(np.trace(block).real)


def embed_to_fock(rho_s: QubitDensity, space: FockSpace) -> DensityMatrix:
    """sum_ij (rho_s)_ij |c_i><c_j| as a full-space density matrix."""
    cp, cm = cat_kets(space, rho_s.alpha)
    basis = np.column_stack([cp.amplitudes, cm.amplitudes])
    return DensityMatrix(space, basis @ rho_s.entries @ basis.conj().T)


def embed_qubit_operator(space: FockSpace, alpha: float, m2: np.ndarray) -> FockOperator:
    """Embed an arbitrary 2x2 cat-basis operator into the full space."""
    cp, cm = cat_kets(space, alpha)
    basis = np.column_stack([cp.amplitudes, cm.amplitudes])
    return FockOperator(space, basis @ np.asarray(m2, dtype=complex) @ basis.conj().T)


@dataclass(frozen=True)
class CatPaulis:
    """Pauli operators in the cat basis, as 2x2 blocks and embedded operators."""

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    sx_fock: FockOperator
    sy_fock: FockOperator
    sz_fock: FockOperator


def cat_paulis(space: FockSpace, alpha: float) -> CatPaulis:
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sy = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
    sz = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    return CatPaulis(
        sx,
        sy,
        sz,
        embed_qubit_operator(space, alpha, sx),
        embed_qubit_operator(space, alpha, sy),
        embed_qubit_operator(space, alpha, sz),
    )


def slow_flip_operator(alpha: float) -> np.ndarray:
    """X = (g+/g-)|c+><c-| + (g-/g+)|c-><c+| as a 2x2 cat-basis block."""
    gp, gm = cat_norms(alpha)
    return np.array([[0.0, gp / gm], [gm / gp, 0.0]], dtype=complex)


def slow_generator(alpha: float, epsilon: float):
    """Reduced dynamics d rho_s/dt = eps * alpha^2 * D[X](rho_s).

    Returns the 2x2 operator X and a callable evaluating the derivative of a
    2x2 cat-basis block.
    """
    if alpha <= 0.0:
        raise DegenerateAmplitude(f"cat amplitude must be > 0, got {alpha}")
    x = slow_flip_operator(alpha)
    xdx = x.conj().T @ x
    scale = epsilon * alpha * alpha

    def generator(rho_s: np.ndarray) -> np.ndarray:
        rho_s = np.asarray(rho_s, dtype=complex)
        return scale * (x @ rho_s @ x.conj().T - 0.5 * (xdx @ rho_s + rho_s @ xdx))

    return x, generator


@dataclass(frozen=True)
class BlochRates:
    r_x: float
    r_y: float
    r_z: float
    z_inf: float


def bloch_rates(alpha: float, epsilon: float) -> BlochRates:
    """Closed-form decay rates of the reduced dynamics on the Bloch sphere.

    The eps*alpha^2 prefactor of the reduced generator is included, so the
    rates live on the same time axis as the full model.
    """
    gp, gm = cat_norms(alpha)
    gp2, gm2 = gp * gp, gm * gm
    scale = epsilon * alpha * alpha
    return BlochRates(
        r_x=scale * (gp2 - gm2) ** 2 / (2.0 * gp2 * gm2),
        r_y=scale * (gp2 + gm2) ** 2 / (2.0 * gp2 * gm2),
        r_z=scale * (gp2 * gp2 + gm2 * gm2) / (gp2 * gm2),
        z_inf=(gp2 * gp2 - gm2 * gm2) / (gp2 * gp2 + gm2 * gm2),
    )


def solve_bloch(b0: BlochVector, alpha: float, epsilon: float, t: float) -> BlochVector:
    """Closed-form Bloch trajectory of the reduced dynamics."""
    r = bloch_rates(alpha, epsilon)
    return BlochVector(
        x=b0.x * math.exp(-r.r_x * t),
        y=b0.y * math.exp(-r.r_y * t),
        z=r.z_inf + (b0.z - r.z_inf) * math.exp(-r.r_z * t),
    )


def bloch_from_qubit(rho_s: QubitDensity) -> BlochVector:
    m = rho_s.entries
    return BlochVector(
        x=float((m[0, 1] + m[1, 0]).real),
        y=float((1j * (m[1, 0] - m[0, 1])).real),
        z=float((m[0, 0] - m[1, 1]).real),
    )


def qubit_from_bloch(b: BlochVector, alpha: float) -> QubitDensity:
    eye = np.eye(2, dtype=complex)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sy = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
    sz = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    return QubitDensity(0.5 * (eye + b.x * sx + b.y * sy + b.z * sz), alpha)
