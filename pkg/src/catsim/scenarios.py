"""Scenario assembly and execution shared by the CLI and the check battery.

A scenario bundles model parameters, integrator settings, an initial state,
and the observables to record.  Execution functions return plain arrays;
serialization lives in the CLI.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import FitRejected, decay_rate_fit, fidelity
from .cat_qubit import (
    QubitDensity,
    bloch_from_qubit,
    cat_paulis,
    embed_to_fock,
    project_to_qubit,
    projector_pc,
    slow_generator,
    solve_bloch,
)
from .fock import (
    DensityMatrix,
    FockSpace,
    cat_state,
    fock_ket,
    number_op,
    parity_op,
    two_photon_jump,
    vacuum,
)
from .integrator import IntegratorConfig, Trajectory, evolve
from .lindblad import LindbladModel, cat_model, drive_amplitude, drive_form_model


class ConfigError(ValueError):
    """Scenario configuration is invalid (CLI exit code 2)."""


MODEL_FORMS = ("L-form", "drive-form")
INITIAL_STATES = ("vacuum", "cat+", "cat-", "superposition")  # plus fock:n, file:path
REDUCED_INITS = ("auto", "parity", "project")
OBSERVABLE_NAMES = ("sigma_z", "sigma_x", "subspace_population", "V", "N", "parity")
DEFAULT_OBSERVABLES = list(OBSERVABLE_NAMES)


@dataclass(frozen=True)
class ModelSettings:
    alpha: float = 1.0
    kappa: float = 1.0
    epsilon: float = 0.01
    n_max: int = 40
    form: str = "L-form"

    def __post_init__(self):
        for name in ("alpha", "kappa", "epsilon"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"model.{name} must be >= 0")
        if self.form not in MODEL_FORMS:
            raise ConfigError(f"model.form must be one of {MODEL_FORMS}")
        if self.n_max < 2:
            raise ConfigError("model.n_max must be >= 2")
        if self.epsilon >= self.kappa > 0.0:
            warnings.warn(
                f"epsilon={self.epsilon} is not small against kappa={self.kappa}; "
                "the slow-dynamics reduction assumes the perturbative regime",
                RuntimeWarning,
            )


@dataclass(frozen=True)
class OutputSettings:
    csv_path: str | None = None
    json_summary_path: str | None = None
    full_csv_path: str | None = None
    reduced_csv_path: str | None = None


@dataclass(frozen=True)
class Scenario:
    model: ModelSettings = ModelSettings()
    integrator: IntegratorConfig = IntegratorConfig(dt=1e-3, t_final=20.0)
    initial_state: str = "vacuum"
    reduced_init: str = "auto"
    observables: list[str] = field(default_factory=lambda: list(DEFAULT_OBSERVABLES))
    outputs: OutputSettings = OutputSettings()
    seed: int = 0

    def __post_init__(self):
        if self.reduced_init not in REDUCED_INITS:
            raise ConfigError(f"reduced_init must be one of {REDUCED_INITS}")
        for name in self.observables:
            if name not in OBSERVABLE_NAMES:
                raise ConfigError(
                    f"unknown observable {name!r}; known: {OBSERVABLE_NAMES}"
                )
        _parse_initial_state_token(self.initial_state)

    @property
    def space(self) -> FockSpace:
        return FockSpace(self.model.n_max)


def _parse_initial_state_token(token: str):
    if token in INITIAL_STATES:
        return token, None
    if token.startswith("fock:"):
        try:
            return "fock", int(token.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad Fock level in initial_state {token!r}") from exc
    if token.startswith("file:"):
        return "file", token.split(":", 1)[1]
    raise ConfigError(
        f"unknown initial_state {token!r}; expected one of {INITIAL_STATES}, "
        "fock:<n>, or file:<path>"
    )


def build_model(settings: ModelSettings) -> LindbladModel:
    space = FockSpace(settings.n_max)
    if settings.form == "L-form":
        return cat_model(space, settings.alpha, settings.kappa, settings.epsilon)
    u = drive_amplitude(settings.alpha, settings.kappa)
    return drive_form_model(space, u, settings.kappa, settings.epsilon)


def build_initial_state(scenario: Scenario) -> DensityMatrix:
    space = scenario.space
    alpha = scenario.model.alpha
    kind, arg = _parse_initial_state_token(scenario.initial_state)
    if kind == "vacuum":
        return DensityMatrix.from_ket(vacuum(space))
    if kind == "cat+":
        return DensityMatrix.from_ket(cat_state(space, alpha, +1))
    if kind == "cat-":
        return DensityMatrix.from_ket(cat_state(space, alpha, -1))
    if kind == "superposition":
        q = QubitDensity(0.5 * np.ones((2, 2), dtype=complex), alpha)
        return embed_to_fock(q, space)
    if kind == "fock":
        return DensityMatrix.from_ket(fock_ket(space, arg))
    entries = np.load(arg)
    return DensityMatrix(space, entries)


def reduced_initial_qubit(scenario: Scenario, rho0: DensityMatrix) -> QubitDensity:
    """Initial 2x2 state for the reduced run.

    "project": renormalized P_c rho0 P_c.  "parity": the cat-basis projector
    eigenstate matching the sign of <parity>.  "auto": exact projection when
    rho0 already lives on the protected subspace, parity matching otherwise.
    """
    alpha = scenario.model.alpha
    mode = scenario.reduced_init
    block, population = project_to_qubit(rho0, alpha)
    if mode == "auto":
        mode = "project" if population >= 1.0 - 1e-9 else "parity"
    if mode == "project":
        if population <= 1e-12:
            raise ConfigError("initial state has no weight on the protected subspace")
        return QubitDensity(block / population, alpha)
    par = rho0.expectation(parity_op(rho0.space))
    which = 0 if par >= 0.0 else 1
    entries = np.zeros((2, 2), dtype=complex)
    entries[which, which] = 1.0
    return QubitDensity(entries, alpha)


def observable_operators(space: FockSpace, alpha: float, names: list[str]):
    paulis = cat_paulis(space, alpha) if ("sigma_z" in names or "sigma_x" in names) else None
    jump = two_photon_jump(space, alpha)
    table = {}
    for name in names:
        if name == "sigma_z":
            table[name] = paulis.sz_fock
        elif name == "sigma_x":
            table[name] = paulis.sx_fock
        elif name == "subspace_population":
            table[name] = projector_pc(space, alpha)
        elif name == "V":
            table[name] = jump.dag() @ jump  # tr(rho L^dag L) = tr(L rho L^dag)
        elif name == "N":
            table[name] = number_op(space)
        elif name == "parity":
            table[name] = parity_op(space)
        else:
            raise ConfigError(f"unknown observable {name!r}")
    return table


@dataclass(frozen=True)
class SimulateResult:
    trajectory: Trajectory
    summary: dict


def fit_series_rates(times: np.ndarray, observables: dict[str, np.ndarray]) -> dict:
    """Best-effort exponential rates per column (null where no clean fit exists)."""
    out = {}
    for name, series in observables.items():
        try:
            fit = decay_rate_fit(times, series)
            out[name] = {"rate": fit.rate, "r_squared": fit.r_squared}
        except FitRejected:
            out[name] = None
    return out


def run_simulate(scenario: Scenario, keep_snapshots: bool = False) -> SimulateResult:
    model = build_model(scenario.model)
    rho0 = build_initial_state(scenario)
    ops = observable_operators(scenario.space, scenario.model.alpha, scenario.observables)
    traj = evolve(model, rho0, scenario.integrator, ops, keep_snapshots=keep_snapshots)
    summary = {
        "final": {name: float(series[-1]) for name, series in traj.observables.items()},
        "fitted_rates": fit_series_rates(traj.times, traj.observables),
        "seed": scenario.seed,
    }
    return SimulateResult(trajectory=traj, summary=summary)


@dataclass(frozen=True)
class ReducedResult:
    times: np.ndarray
    sigma_z: np.ndarray
    sigma_x: np.ndarray
    bloch_x: np.ndarray
    bloch_y: np.ndarray
    bloch_z: np.ndarray
    qubit_states: list[QubitDensity]
    summary: dict


def run_reduced(scenario: Scenario, rho0_full: DensityMatrix | None = None) -> ReducedResult:
    """Integrate the 2x2 slow model on the full run's time grid (rk4) and
    evaluate the closed-form Bloch solution alongside."""
    alpha, eps = scenario.model.alpha, scenario.model.epsilon
    if rho0_full is None:
        rho0_full = build_initial_state(scenario)
    q0 = reduced_initial_qubit(scenario, rho0_full)
    _, gen = slow_generator(alpha, eps)

    cfg = scenario.integrator
    n_steps = int(round(cfg.t_final / cfg.dt))
    dt = cfg.dt
    b0 = bloch_from_qubit(q0)

    times, sz, sx, bx, by, bz = [], [], [], [], [], []
    states: list[QubitDensity] = []

    def record(step: int, q: np.ndarray):
        t = step * dt
        times.append(t)
        sz.append(float((q[0, 0] - q[1, 1]).real))
        sx.append(float((q[0, 1] + q[1, 0]).real))
        b = solve_bloch(b0, alpha, eps, t)
        bx.append(b.x)
        by.append(b.y)
        bz.append(b.z)
        states.append(QubitDensity(0.5 * (q + q.conj().T), alpha))

    q = q0.entries.copy()
    record(0, q)
    for step in range(1, n_steps + 1):
        k1 = gen(q)
        k2 = gen(q + 0.5 * dt * k1)
        k3 = gen(q + 0.5 * dt * k2)
        k4 = gen(q + dt * k3)
        q = q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % cfg.record_stride == 0 or step == n_steps:
            record(step, q)

    times = np.asarray(times)
    result = ReducedResult(
        times=times,
        sigma_z=np.asarray(sz),
        sigma_x=np.asarray(sx),
        bloch_x=np.asarray(bx),
        bloch_y=np.asarray(by),
        bloch_z=np.asarray(bz),
        qubit_states=states,
        summary={
            "final": {"sigma_z_s": sz[-1], "sigma_x_s": sx[-1], "z": bz[-1]},
            "seed": scenario.seed,
        },
    )
    return result


@dataclass(frozen=True)
class CompareResult:
    times: np.ndarray
    fidelity: np.ndarray
    delta_sigma_z: np.ndarray
    delta_sigma_x: np.ndarray
    log10_one_minus_f: np.ndarray
    full: SimulateResult
    reduced: ReducedResult
    summary: dict


LOG_INFIDELITY_FLOOR = 1e-16


def run_compare(scenario: Scenario) -> CompareResult:
    """Run the complete and reduced systems and compare them pointwise."""
    needed = {"sigma_z", "sigma_x"}
    obs = list(scenario.observables)
    for name in needed:
        if name not in obs:
            obs.append(name)
    scenario = Scenario(
        model=scenario.model,
        integrator=scenario.integrator,
        initial_state=scenario.initial_state,
        reduced_init=scenario.reduced_init,
        observables=obs,
        outputs=scenario.outputs,
        seed=scenario.seed,
    )
    full = run_simulate(scenario, keep_snapshots=True)
    rho0 = build_initial_state(scenario)
    reduced = run_reduced(scenario, rho0_full=rho0)

    space = scenario.space
    fids = np.array([
        fidelity(rho, embed_to_fock(q, space))
        for rho, q in zip(full.trajectory.snapshots, reduced.qubit_states)
    ])
    one_minus_f = np.clip(1.0 - fids, LOG_INFIDELITY_FLOOR, None)
    d_sz = full.trajectory.observables["sigma_z"] - reduced.sigma_z
    d_sx = full.trajectory.observables["sigma_x"] - reduced.sigma_x

    times = full.trajectory.times
    kappa = scenario.model.kappa if scenario.model.kappa > 0 else 1.0
    post = times > 5.0 / kappa
    summary = {
        "plateau_one_minus_f": float(np.median(one_minus_f[post])) if post.any() else None,
        "sigma_z_offset": float(np.mean(d_sz[post])) if post.any() else None,
        "seed": scenario.seed,
    }
    return CompareResult(
        times=times,
        fidelity=fids,
        delta_sigma_z=d_sz,
        delta_sigma_x=d_sx,
        log10_one_minus_f=np.log10(one_minus_f),
        full=full,
        reduced=reduced,
        summary=summary,
    )


# -- strict config parsing -----------------------------------------------------

def _require_keys(section: dict, allowed: set[str], where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def scenario_from_dict(doc: dict, base_dir: Path | None = None) -> Scenario:
    """Build a Scenario from a JSON document, rejecting unknown keys."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(doc, {"model", "integrator", "initial_state", "reduced_init",
                        "observables", "outputs", "seed"}, "config")

    model_doc = doc.get("model", {})
    _require_keys(model_doc, {"alpha", "kappa", "epsilon", "n_max", "form"}, "model")
    integ_doc = doc.get("integrator", {})
    _require_keys(integ_doc, {"dt", "t_final", "scheme", "record_stride"}, "integrator")
    out_doc = doc.get("outputs", {})
    _require_keys(out_doc, {"csv_path", "json_summary_path", "full_csv_path",
                            "reduced_csv_path"}, "outputs")

    def resolve(p):
        if p is None:
            return None
        path = Path(p)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return str(path)

    try:
        model = ModelSettings(**model_doc)
        integrator = IntegratorConfig(**integ_doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    outputs = OutputSettings(
        csv_path=resolve(out_doc.get("csv_path")),
        json_summary_path=resolve(out_doc.get("json_summary_path")),
        full_csv_path=resolve(out_doc.get("full_csv_path")),
        reduced_csv_path=resolve(out_doc.get("reduced_csv_path")),
    )
    observables = doc.get("observables", list(DEFAULT_OBSERVABLES))
    if not isinstance(observables, list):
        raise ConfigError("observables must be a list of names")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    return Scenario(
        model=model,
        integrator=integrator,
        initial_state=doc.get("initial_state", "vacuum"),
        reduced_init=doc.get("reduced_init", "auto"),
        observables=observables,
        outputs=outputs,
        seed=seed,
    )
