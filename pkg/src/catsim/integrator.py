"""Time propagation of Lindblad models.

Two one-step methods:

* ``kraus-euler`` -- first order, unconditionally positivity preserving.
  One step applies the Kraus sum M0 rho M0^dag + dt sum_j rate_j A_j rho A_j^dag
  with M0 = I - (iH + (1/2) sum_j rate_j A_j^dag A_j) dt, then divides by the
  exact trace of the result (no secular trace drift over long runs).
* ``rk4`` -- classical fourth order on the raw generator, used as an accuracy
  reference; positivity is not guaranteed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .fock import DensityMatrix, FockOperator
from .lindblad import LindbladModel

SCHEMES = ("kraus-euler", "rk4")

#: accuracy budget in the conservative step bound: dt * max_j rate_j ||A_j||^2 <= 0.1
STABILITY_FACTOR = 0.1


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    t_final: float
    scheme: str = "kraus-euler"
    record_stride: int = 100

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.t_final <= 0.0:
            raise ValueError(f"t_final must be > 0, got {self.t_final}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not isinstance(self.record_stride, (int, np.integer)) or self.record_stride < 1:
            raise ValueError(f"record_stride must be a positive integer, got {self.record_stride!r}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    observables: dict[str, np.ndarray]
    snapshots: list[DensityMatrix] | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("recorded times must be strictly increasing")
        for name, series in self.observables.items():
            if len(series) != len(times):
                raise ValueError(f"observable {name!r} length does not match times")
        if self.snapshots is not None and len(self.snapshots) != len(times):
            raise ValueError("snapshot count does not match times")
        object.__setattr__(self, "times", times)


def stability_bound(model: LindbladModel) -> float:
    """Largest dt with dt * max_j rate_j ||A_j||_2^2 <= 0.1.

    The truncation edge dominates ||A_j|| for ladder-operator jumps, so this
    bound is very conservative for states supported on low levels; exceeding
    it only degrades accuracy of the (unconditionally positive) Kraus step.
    """
    worst = 0.0
    for rate, op in model.jumps:
        if rate == 0.0:
            continue
        s = np.linalg.norm(op.entries, 2)
        worst = max(worst, rate * s * s)
    return float("inf") if worst == 0.0 else STABILITY_FACTOR / worst


def positivity_threshold(model: LindbladModel) -> float:
    """Largest dt keeping M0 = I - (iH + decay/2) dt positive semidefinite.

    Beyond it the fastest edge modes decay non-monotonically (the step map
    stays completely positive); beyond twice it they amplify and the stepper
    refuses to run.
    """
    n = model.space.n_max
    decay = np.zeros((n, n), dtype=complex)
    for rate, op in model.jumps:
        if rate != 0.0:
            decay += rate * (op.entries.conj().T @ op.entries)
    fastest = float(np.linalg.eigvalsh(decay)[-1])
    return float("inf") if fastest == 0.0 else 2.0 / fastest


def _check_stability(model: LindbladModel, config: IntegratorConfig):
    bound = positivity_threshold(model)
    if config.dt > bound:
        warnings.warn(
            f"dt={config.dt:g} exceeds the stability guard {bound:.3e} "
            "(fastest decay mode at the truncation edge steps past M0 >= 0); "
            "edge modes will be damped inaccurately",
            RuntimeWarning,
        )


class _KrausStepper:
    """Precomputed arrays for the positivity-preserving step."""

    def __init__(self, model: LindbladModel, dt: float):
        n = model.space.n_max
        k = 1j * model.hamiltonian.entries
        decay = np.zeros((n, n), dtype=complex)
        self.jump_ops = []
        for rate, op in model.jumps:
            if rate == 0.0:
                continue
            am = op.entries
            decay += rate * (am.conj().T @ am)
            self.jump_ops.append(np.sqrt(dt * rate) * am)
        # |1 - dt*lambda/2| > 1 amplifies the fastest-decaying mode instead of
        # damping it; the run would converge to truncation-edge garbage
        fastest = float(np.linalg.eigvalsh(decay)[-1]) if self.jump_ops else 0.0
        if dt * fastest >= 4.0:
            raise ValueError(
                f"dt={dt:g} amplifies modes decaying at rate {fastest:.3g} "
                f"(need dt < {4.0 / fastest:.3e}); reduce dt or n_max"
            )
        self.m0 = np.eye(n, dtype=complex) - dt * (k + 0.5 * decay)

    def step(self, rho: np.ndarray) -> np.ndarray:
        out = self.m0 @ rho @ self.m0.conj().T
        for b in self.jump_ops:
            out += b @ rho @ b.conj().T
        out = 0.5 * (out + out.conj().T)
        return out / np.trace(out).real


class _RK4Stepper:
    def __init__(self, model: LindbladModel, dt: float):
        self.dt = dt
        self.h = model.hamiltonian.entries
        self.jumps = [(rate, op.entries, rate * (op.entries.conj().T @ op.entries))
                      for rate, op in model.jumps if rate != 0.0]

    def _rhs(self, rho: np.ndarray) -> np.ndarray:
        out = -1j * (self.h @ rho - rho @ self.h)
        for rate, am, ada in self.jumps:
            out += rate * (am @ rho @ am.conj().T) - 0.5 * (ada @ rho + rho @ ada)
        return out

    def step(self, rho: np.ndarray) -> np.ndarray:
        dt = self.dt
        k1 = self._rhs(rho)
        k2 = self._rhs(rho + 0.5 * dt * k1)
        k3 = self._rhs(rho + 0.5 * dt * k2)
        k4 = self._rhs(rho + dt * k3)
        out = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out = 0.5 * (out + out.conj().T)
        return out / np.trace(out).real


def _make_stepper(model: LindbladModel, scheme: str, dt: float):
    return _KrausStepper(model, dt) if scheme == "kraus-euler" else _RK4Stepper(model, dt)


def step_kraus(model: LindbladModel, rho: DensityMatrix, dt: float) -> DensityMatrix:
    """One positivity-preserving step; local error O(dt^2) versus the exact flow."""
    if dt == 0.0:
        return rho
    return DensityMatrix(model.space, _KrausStepper(model, dt).step(rho.entries))


def step_rk4(model: LindbladModel, rho: DensityMatrix, dt: float) -> DensityMatrix:
    """One classical RK4 step (trace renormalized; positivity not guaranteed)."""
    if dt == 0.0:
        return rho
    return DensityMatrix(model.space, _RK4Stepper(model, dt).step(rho.entries))


def evolve(
    model: LindbladModel,
    rho0: DensityMatrix,
    config: IntegratorConfig,
    observables: dict[str, FockOperator],
    keep_snapshots: bool = False,
) -> Trajectory:
    """Propagate rho0 to t_final, recording tr(rho O) every record_stride steps.

    The final step is always recorded.  Aborts on the first non-finite value.
    """
    if rho0.space != model.space:
        raise ValueError("initial state lives on a different space")
    for name, op in observables.items():
        if op.space != model.space:
            raise ValueError(f"observable {name!r} lives on a different space")
    _check_stability(model, config)

    n_steps = int(round(config.t_final / config.dt))
    if n_steps < 1:
        raise ValueError("t_final shorter than one step")
    stepper = _make_stepper(model, config.scheme, config.dt)
    obs_mats = {name: op.entries for name, op in observables.items()}

    rho = rho0.entries.copy()
    times = []
    series: dict[str, list[float]] = {name: [] for name in observables}
    snapshots: list[DensityMatrix] | None = [] if keep_snapshots else None

    def record(step_index: int, state: np.ndarray):
        t = step_index * config.dt
        for name, mat in obs_mats.items():
            val = float(np.einsum("ij,ji->", state, mat).real)
            if not np.isfinite(val):
                raise RuntimeError(
                    f"non-finite value for observable {name!r} at t={t:g} "
                    f"(step {step_index}); integration aborted"
                )
            series[name].append(val)
        times.append(t)
        if snapshots is not None:
            snapshots.append(DensityMatrix(model.space, state.copy()))

    record(0, rho)
    for step in range(1, n_steps + 1):
        rho = stepper.step(rho)
        if step % config.record_stride == 0 or step == n_steps:
            record(step, rho)

    return Trajectory(
        times=np.asarray(times),
        observables={name: np.asarray(vals) for name, vals in series.items()},
        snapshots=snapshots,
    )
