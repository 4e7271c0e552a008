"""Slow/fast reduction of linear perturbed systems and its quantum application.

Generic setting: a nominal system dx/dt = Ax with block structure
A = [[0, A1], [0, A2]] (A2 Hurwitz) plus an order-eps perturbation B.  The
slow dynamics on the invariant subspace x2 = 0 is eps*(B0 + Q)x1 with the
corrective term Q = -A1 A2^{-1} B3, computable either directly or through m
conserved functionals of the nominal system (left-kernel vectors), which
avoids inverting the fast block.

Quantum application: the generator of the two-photon dissipation is
vectorized over a real orthonormal basis of Hermitian matrices; the slow
coordinates are the four cat-state operators, the fast ones their orthogonal
complement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.linalg

from .cat_qubit import slow_basis
from .fock import FockSpace, annihilation, two_photon_jump


class SingularFastBlock(ValueError):
    """Fast block too ill-conditioned to invert."""


class KernelDimensionMismatch(ValueError):
    """Numerical left kernel does not have the requested dimension."""


class IllConditionedFunctionals(ValueError):
    """Stacked slow components of the functionals are numerically singular."""


FAST_BLOCK_COND_LIMIT = 1e12
FUNCTIONAL_COND_LIMIT = 1e10
KERNEL_REL_TOL = 1e-7
FUNCTIONAL_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class BlockSystem:
    """dx1/dt = A1 x2 + eps(B1 x2 + B0 x1); dx2/dt = A2 x2 + eps(B2 x2 + B3 x1)."""

    a1: np.ndarray
    a2: np.ndarray
    b0: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    b3: np.ndarray
    eps: float
    hurwitz_margin: float = 1e-8
    fast_abscissa: float = field(init=False, default=float("nan"))

    def __post_init__(self):
        m, n = np.shape(self.a1)
        shapes = {
            "a1": (m, n), "a2": (n, n), "b0": (m, m),
            "b1": (m, n), "b2": (n, n), "b3": (n, m),
        }
        for name, want in shapes.items():
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != want:
                raise ValueError(f"{name} has shape {arr.shape}, expected {want}")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "eps", float(self.eps))
        if self.eps <= 0.0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        abscissa = float(np.max(np.linalg.eigvals(self.a2).real))
        if abscissa >= -self.hurwitz_margin:
            raise ValueError(
                f"fast block is not Hurwitz: spectral abscissa {abscissa:.3e} "
                f">= -{self.hurwitz_margin:.1e}"
            )
        object.__setattr__(self, "fast_abscissa", abscissa)

    @property
    def m(self) -> int:
        return self.a1.shape[0]

    @property
    def n(self) -> int:
        return self.a1.shape[1]

    @property
    def spectral_gap(self) -> float:
        """Decay rate of the slowest fast mode."""
        return -self.fast_abscissa

    def full_matrix(self) -> np.ndarray:
        """(m+n)x(m+n) generator of the perturbed system."""
        top = np.hstack([self.eps * self.b0, self.a1 + self.eps * self.b1])
        bottom = np.hstack([self.eps * self.b3, self.a2 + self.eps * self.b2])
        return np.vstack([top, bottom])


@dataclass(frozen=True)
class ConservedFunctional:
    """Left-kernel vector p = (p1, p2) of the nominal generator."""

    p1: np.ndarray
    p2: np.ndarray


@dataclass(frozen=True)
class SlowModel:
    """Reduced slow dynamics dx1/dt = generator x1 with generator = eps(B0 + Q)."""

    generator: np.ndarray
    q: np.ndarray
    eps: float


def reduce_direct(sys: BlockSystem) -> SlowModel:
    """Q = -A1 A2^{-1} B3 by direct inversion of the fast block."""
    cond = np.linalg.cond(sys.a2, 1)
    if not np.isfinite(cond) or cond > FAST_BLOCK_COND_LIMIT:
        raise SingularFastBlock(f"fast block condition number {cond:.3e}")
    q = -sys.a1 @ np.linalg.solve(sys.a2, sys.b3)
    return SlowModel(generator=sys.eps * (sys.b0 + q), q=q, eps=sys.eps)


def left_kernel(matrix: np.ndarray, rel_tol: float = KERNEL_REL_TOL):
    """Orthonormal left-null vectors of a square matrix, with its singular values.

    Returns (vectors as columns, singular values descending).  A vector
    qualifies when its singular value is below rel_tol times the largest.
    """
    u, s, _ = np.linalg.svd(matrix)
    k = int(np.sum(s <= rel_tol * s[0]))
    vecs = u[:, u.shape[1] - k:] if k > 0 else u[:, :0]
    return vecs, s


def conserved_functionals(
    a1: np.ndarray, a2: np.ndarray, count: int, rel_tol: float = KERNEL_REL_TOL
) -> list[ConservedFunctional]:
    """The ``count`` conserved functionals of the nominal system [[0, A1], [0, A2]].

    Solves p^T A = 0 by SVD; raises KernelDimensionMismatch when the
    numerical kernel dimension disagrees, and validates each functional
    against p1^T A1 A2^{-1} + p2^T = 0.
    """
    m, n = np.shape(a1)
    a_full = np.zeros((m + n, m + n))
    a_full[:m, m:] = a1
    a_full[m:, m:] = a2
    vecs, s = left_kernel(a_full, rel_tol)
    if vecs.shape[1] != count:
        gap = s[-(count + 1)] / max(s[-count], 1e-300) if len(s) > count else float("inf")
        raise KernelDimensionMismatch(
            f"left kernel dimension {vecs.shape[1]} != {count} at relative "
            f"tolerance {rel_tol} (gap ratio to next singular value: {gap:.2e})"
        )
    out = []
    for j in range(count):
        p1, p2 = vecs[:m, j], vecs[m:, j]
        resid = np.linalg.norm(np.linalg.solve(a2.T, a1.T @ p1) + p2)
        if resid > FUNCTIONAL_RESIDUAL_TOL:
            raise KernelDimensionMismatch(
                f"functional {j} violates the kernel identity (residual {resid:.3e})"
            )
        out.append(ConservedFunctional(p1=p1, p2=p2))
    return out


def reduce_dual(sys: BlockSystem, functionals: list[ConservedFunctional]) -> SlowModel:
    """Q from the linear equations p1(k)^T Q = p2(k)^T B3, no fast-block inverse."""
    if len(functionals) != sys.m:
        raise ValueError(f"need {sys.m} functionals, got {len(functionals)}")
    p1_stack = np.vstack([f.p1 for f in functionals])
    p2_stack = np.vstack([f.p2 for f in functionals])
    cond = np.linalg.cond(p1_stack)
    if not np.isfinite(cond) or cond > FUNCTIONAL_COND_LIMIT:
        raise IllConditionedFunctionals(
            f"stacked slow components have condition number {cond:.3e}"
        )
    q = np.linalg.solve(p1_stack, p2_stack @ sys.b3)
    return SlowModel(generator=sys.eps * (sys.b0 + q), q=q, eps=sys.eps)


def tikhonov_form(sys: BlockSystem) -> dict[str, np.ndarray]:
    """Coefficient matrices after the change of variables x~1 = x1 - A1 A2^{-1} x2.

    d x~1/dt = eps (S1 x~1 + S2 x~2);  d x~2/dt = A2 x~2 + eps (B3 x~1 + F2 x~2).
    """
    a1_a2inv = np.linalg.solve(sys.a2.T, sys.a1.T).T
    s1 = sys.b0 - a1_a2inv @ sys.b3
    s2 = sys.b1 - a1_a2inv @ sys.b2 + s1 @ a1_a2inv
    f2 = sys.b2 + sys.b3 @ a1_a2inv
    return {"slow_slow": s1, "slow_fast": s2, "fast_slow": sys.b3, "fast_fast": f2}


# -- vectorization of superoperators over a real Hermitian basis --------------

def vec_hermitian(x: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix in the orthonormal basis
    {E_ii} + {(E_ij + E_ji)/sqrt2} + {(iE_ij - iE_ji)/sqrt2} (i < j, row-major)."""
    n = x.shape[0]
    iu = np.triu_indices(n, 1)
    return np.concatenate([
        np.diag(x).real,
        np.sqrt(2.0) * x[iu].real,
        np.sqrt(2.0) * x[iu].imag,
    ])


def unvec_hermitian(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of vec_hermitian."""
    npairs = n * (n - 1) // 2
    x = np.zeros((n, n), dtype=complex)
    iu = np.triu_indices(n, 1)
    x[np.diag_indices(n)] = v[:n]
    upper = (v[n:n + npairs] + 1j * v[n + npairs:]) / np.sqrt(2.0)
    x[iu] = upper
    x[(iu[1], iu[0])] = upper.conj()
    return x


@dataclass(frozen=True)
class VectorizedLiouvillian:
    """Real matrix of a trace-preserving superoperator in the Hermitian basis."""

    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        d = self.space.n_max**2
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (d, d):
            raise ValueError(f"matrix shape {matrix.shape}, expected {(d, d)}")
        trace_vec = vec_hermitian(np.eye(self.space.n_max, dtype=complex))
        resid = np.linalg.norm(trace_vec @ matrix)
        if resid > 1e-9:
            raise ValueError(
                f"not trace preserving: ||vec(I)^T M|| = {resid:.3e} > 1e-9"
            )
        object.__setattr__(self, "matrix", matrix)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec_hermitian(self.matrix @ vec_hermitian(rho), self.space.n_max)


def vectorize_generator(
    superop: Callable[[np.ndarray], np.ndarray], space: FockSpace
) -> VectorizedLiouvillian:
    """Matrix of a Hermitian-preserving superoperator, column by column."""
    n = space.n_max
    d = n * n
    m = np.empty((d, d))
    for k in range(d):
        e = np.zeros(d)
        e[k] = 1.0
        m[:, k] = vec_hermitian(superop(unvec_hermitian(e, n)))
    return VectorizedLiouvillian(space, m)


# -- quantum block system ------------------------------------------------------

@dataclass(frozen=True)
class QuantumBlockSystem:
    """Slow/fast split of the vectorized cat-qubit dynamics.

    ``rotation`` maps block coordinates (slow first) back to the canonical
    Hermitian-basis coordinates; its first four columns are the normalized
    cat-state operators.
    """

    system: BlockSystem
    rotation: np.ndarray
    space: FockSpace
    alpha: float
    kappa: float
    epsilon: float

    def operator_from_block_coords(self, p: np.ndarray) -> np.ndarray:
        """Hermitian matrix whose block coordinates are p = (p_slow, p_fast)."""
        return unvec_hermitian(self.rotation @ p, self.space.n_max)


def _dissipator_closure(op: np.ndarray, rate: float):
    opd = op.conj().T
    opdop = opd @ op

    def apply(x: np.ndarray) -> np.ndarray:
        return rate * (op @ x @ opd - 0.5 * (opdop @ x + x @ opdop))

    return apply


def quantum_block_system(
    space: FockSpace, alpha: float, kappa: float, epsilon: float
) -> QuantumBlockSystem:
    """Block form of d rho/dt = kappa D[L](rho) + eps D[a](rho).

    Slow coordinates: the four cat-state operators (normalized); fast: their
    orthogonal complement.  The nominal generator's columns on the slow
    coordinates vanish (steady states), so it has the [[0, A1], [0, A2]]
    shape required by the reduction; this is asserted at build time.
    """
    n = space.n_max
    d = n * n
    nominal = vectorize_generator(
        _dissipator_closure(two_photon_jump(space, alpha).entries, kappa), space
    )
    perturbation = vectorize_generator(
        _dissipator_closure(annihilation(space).entries, 1.0), space
    )

    ops = slow_basis(space, alpha).ops
    slow_vecs = np.column_stack([
        vec_hermitian(ops[0].entries),
        vec_hermitian(ops[1].entries),
        vec_hermitian(ops[2].entries) / np.sqrt(2.0),
        vec_hermitian(ops[3].entries) / np.sqrt(2.0),
    ])
    # orthonormalize (exact up to truncation residuals) and complete the basis;
    # sign-fix the QR so slow coordinates keep the cat-operator orientation
    slow_q, r = np.linalg.qr(slow_vecs)
    slow_q = slow_q * np.sign(np.diag(r))
    fast_q = scipy.linalg.null_space(slow_q.T)
    rotation = np.hstack([slow_q, fast_q])

    a_rot = rotation.T @ nominal.matrix @ rotation
    b_rot = rotation.T @ perturbation.matrix @ rotation

    slow_col_resid = np.linalg.norm(a_rot[:, :4])
    if slow_col_resid > 1e-9 * max(1.0, kappa):
        raise ValueError(
            f"cat operators are not steady under the nominal generator "
            f"(residual {slow_col_resid:.3e}); truncation too tight?"
        )

    system = BlockSystem(
        a1=a_rot[:4, 4:], a2=a_rot[4:, 4:],
        b0=b_rot[:4, :4], b1=b_rot[:4, 4:],
        b2=b_rot[4:, 4:], b3=b_rot[4:, :4],
        eps=epsilon,
    )
    return QuantumBlockSystem(
        system=system, rotation=rotation, space=space,
        alpha=alpha, kappa=kappa, epsilon=epsilon,
    )


# -- plain-text container for the reduce-linear CLI ---------------------------

_BLOCK_ORDER = ("a1", "a2", "b0", "b1", "b2", "b3")


def save_block_system(path, sys: BlockSystem):
    """Dimensions header plus the six blocks, row-major, one matrix row per line."""
    lines = [f"{sys.m} {sys.n} {sys.eps!r}"]
    for name in _BLOCK_ORDER:
        mat = getattr(sys, name)
        lines.append(name.upper())
        for row in np.atleast_2d(mat):
            lines.append(" ".join(f"{float(v)!r}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_block_system(path) -> BlockSystem:
    tokens = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.append(line)
    header = tokens[0].split()
    m, n, eps = int(header[0]), int(header[1]), float(header[2])
    shapes = {"a1": (m, n), "a2": (n, n), "b0": (m, m), "b1": (m, n), "b2": (n, n), "b3": (n, m)}
    blocks = {}
    pos = 1
    for name in _BLOCK_ORDER:
        rows, cols = shapes[name]
        if tokens[pos].strip().lower() != name:
            raise ValueError(f"expected block {name!r} at line {pos}, got {tokens[pos]!r}")
        pos += 1
        data = []
        for _ in range(rows):
            vals = [float(v) for v in tokens[pos].split()]
            if len(vals) != cols:
                raise ValueError(f"block {name!r}: expected {cols} values per row")
            data.append(vals)
            pos += 1
        blocks[name] = np.asarray(data)
    return BlockSystem(eps=eps, **blocks)
