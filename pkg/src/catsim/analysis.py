"""State-comparison metrics and rate extraction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fock import DensityMatrix, FockOperator, parity_op, two_photon_jump


class FitRejected(RuntimeError):
    """Log-linear rate fit did not explain the data (R^2 below threshold)."""


RANGE_TOL = 1e-9


@dataclass(frozen=True)
class MetricReport:
    """Bundle of comparison metrics between a state rho and a reference sigma."""

    fidelity: float
    trace_distance: float
    lyapunov_v: float
    moments: dict[int, float] = field(default_factory=dict)
    subspace_population: float = float("nan")
    parity_expectation: float = float("nan")

    def __post_init__(self):
        if not -RANGE_TOL <= self.fidelity <= 1.0 + RANGE_TOL:
            raise ValueError(f"fidelity {self.fidelity} outside [0, 1]")
        if not -RANGE_TOL <= self.trace_distance <= 1.0 + RANGE_TOL:
            raise ValueError(f"trace distance {self.trace_distance} outside [0, 1]")


def _clip_spectrum(w: np.ndarray) -> np.ndarray:
    """Zero out eigenvalues below 1e-12 of the largest (and all negatives)."""
    floor = max(0.0, 1e-12 * float(w[-1]))
    return np.where(w < floor, 0.0, w)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Hermitian square root with near-zero eigenvalues clipped at 0."""
    w, v = np.linalg.eigh(m)
    w = _clip_spectrum(w)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """F(rho, sigma) = tr sqrt(sqrt(sigma) rho sqrt(sigma)), clipped into [0, 1]."""
    if rho.space != sigma.space:
        raise ValueError("states live on different spaces")
    s = _psd_sqrt(sigma.entries)
    inner = s @ rho.entries @ s
    inner = 0.5 * (inner + inner.conj().T)
    w = _clip_spectrum(np.linalg.eigvalsh(inner))
    return float(min(np.sum(np.sqrt(w)), 1.0))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """(1/2) sum |eig(rho - sigma)| (the 1/2-normalized convention)."""
    if rho.space != sigma.space:
        raise ValueError("states live on different spaces")
    w = np.linalg.eigvalsh(rho.entries - sigma.entries)
    return float(0.5 * np.sum(np.abs(w)))


def lyapunov_v(rho: DensityMatrix, jump: FockOperator) -> float:
    """V(rho) = tr(L rho L^dag), >= 0 for a valid state."""
    lm = jump.entries
    return float(np.einsum("ij,jk,ik->", lm, rho.entries, lm.conj()).real)


def moment(rho: DensityMatrix, nu: int) -> float:
    """tr(rho N^nu) using the diagonal of rho."""
    if nu < 1:
        raise ValueError("moment order must be >= 1")
    n = np.arange(rho.space.n_max, dtype=float)
    return float(np.sum(np.diag(rho.entries).real * n**nu))


@dataclass(frozen=True)
class FitResult:
    rate: float
    r_squared: float
    log_intercept: float


def decay_rate_fit(
    times: np.ndarray,
    values: np.ndarray,
    window: tuple[float, float] | None = None,
    min_r_squared: float = 0.99,
) -> FitResult:
    """Fit values ~ exp(log_intercept - rate * t) by least squares on log(values).

    Raises FitRejected when R^2 of the log-linear fit falls below
    ``min_r_squared``.  A series that the fit reproduces to roundoff
    (e.g. an exact constant) counts as R^2 = 1.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is not None:
        mask = (times >= window[0]) & (times <= window[1])
        times, values = times[mask], values[mask]
    if times.size < 2:
        raise FitRejected("fewer than two samples in the fit window")
    if np.any(values <= 0.0):
        raise FitRejected("non-positive values cannot be rate-fitted on a log scale")
    logs = np.log(values)
    slope, intercept = np.polyfit(times, logs, 1)
    resid = logs - (slope * times + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((logs - logs.mean()) ** 2))
    if ss_tot <= 1e-24:
        r2 = 1.0 if ss_res <= 1e-20 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    if r2 < min_r_squared:
        raise FitRejected(f"log-linear fit R^2 = {r2:.4f} < {min_r_squared}")
    return FitResult(rate=float(-slope), r_squared=r2, log_intercept=float(intercept))


def metric_report(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    alpha: float,
    projector: FockOperator | None = None,
    moment_orders: tuple[int, ...] = (1, 2),
) -> MetricReport:
    """Full metric bundle for rho against reference sigma at cat amplitude alpha."""
    space = rho.space
    jump = two_photon_jump(space, alpha)
    pop = rho.expectation(projector) if projector is not None else float("nan")
    return MetricReport(
        fidelity=fidelity(rho, sigma),
        trace_distance=trace_distance(rho, sigma),
        lyapunov_v=lyapunov_v(rho, jump),
        moments={nu: moment(rho, nu) for nu in moment_orders},
        subspace_population=pop,
        parity_expectation=rho.expectation(parity_op(space)),
    )
