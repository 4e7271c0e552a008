"""Lindblad generators for the two-photon driven dissipative oscillator.

The system comes in two equivalent parametrizations: the L-form with a
single combined jump L = a^2 - alpha^2 (no Hamiltonian), and the drive form
with Hamiltonian i u ((a^dag)^2 - a^2) plus a bare a^2 jump.  They agree
when u = kappa alpha^2 / 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import (
    FockOperator,
    FockSpace,
    HERMITIAN_TOL,
    annihilation,
    two_photon_jump,
)


@dataclass(frozen=True)
class LindbladModel:
    """d rho/dt = -i[H, rho] + sum_j rate_j * D[A_j](rho)."""

    space: FockSpace
    hamiltonian: FockOperator
    jumps: tuple[tuple[float, FockOperator], ...]

    def __post_init__(self):
        if self.hamiltonian.space != self.space:
            raise ValueError("hamiltonian lives on a different space")
        if not self.hamiltonian.is_hermitian(HERMITIAN_TOL):
            raise ValueError("hamiltonian is not Hermitian within tolerance")
        jumps = tuple((float(rate), op) for rate, op in self.jumps)
        for rate, op in jumps:
            if rate < 0.0:
                raise ValueError(f"jump rate {rate} is negative")
            if op.space != self.space:
                raise ValueError("jump operator lives on a different space")
        object.__setattr__(self, "jumps", jumps)


def dissipator(a: FockOperator, rho: FockOperator) -> FockOperator:
    """D[A](rho) = A rho A^dag - (A^dag A rho + rho A^dag A)/2."""
    if a.space != rho.space:
        raise ValueError("operator shapes do not match")
    am = a.entries
    rm = rho.entries
    ada = am.conj().T @ am
    out = am @ rm @ am.conj().T - 0.5 * (ada @ rm + rm @ ada)
    return FockOperator(a.space, out)


def adjoint_dissipator(a: FockOperator, x: FockOperator) -> FockOperator:
    """Heisenberg dual D*[A](X) = A^dag X A - (A^dag A X + X A^dag A)/2."""
    if a.space != x.space:
        raise ValueError("operator shapes do not match")
    am = a.entries
    xm = x.entries
    ada = am.conj().T @ am
    out = am.conj().T @ xm @ am - 0.5 * (ada @ xm + xm @ ada)
    return FockOperator(a.space, out)


def rhs(model: LindbladModel, rho: FockOperator) -> FockOperator:
    """Generator applied to rho; output symmetrized to kill roundoff skew."""
    hm = model.hamiltonian.entries
    rm = rho.entries
    out = -1j * (hm @ rm - rm @ hm)
    for rate, op in model.jumps:
        if rate == 0.0:
            continue
        am = op.entries
        ada = am.conj().T @ am
        out = out + rate * (am @ rm @ am.conj().T - 0.5 * (ada @ rm + rm @ ada))
    out = 0.5 * (out + out.conj().T)
    return FockOperator(model.space, out)


def drive_amplitude(alpha: float, kappa: float) -> float:
    """Two-photon drive strength u matching the L-form at amplitude alpha (u = kappa alpha^2/2)."""
    return 0.5 * kappa * alpha * alpha


def cat_model(space: FockSpace, alpha: float, kappa: float, epsilon: float) -> LindbladModel:
    """L-form: no Hamiltonian, jumps (kappa, a^2 - alpha^2) and (epsilon, a)."""
    zero = FockOperator(space, np.zeros((space.n_max, space.n_max), dtype=complex))
    return LindbladModel(
        space,
        zero,
        ((kappa, two_photon_jump(space, alpha)), (epsilon, annihilation(space))),
    )


def drive_form_model(space: FockSpace, u: float, kappa: float, epsilon: float) -> LindbladModel:
    """Drive form: H = i u ((a^dag)^2 - a^2), jumps (kappa, a^2) and (epsilon, a)."""
    a = annihilation(space)
    a2 = a @ a
    h = FockOperator(space, 1j * u * (a2.dag().entries - a2.entries))
    return LindbladModel(space, h, ((kappa, a2), (epsilon, a)))
