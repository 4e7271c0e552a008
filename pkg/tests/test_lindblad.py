import numpy as np
import pytest

from catsim.fock import (
    DensityMatrix,
    FockOperator,
    FockSpace,
    annihilation,
    cat_state,
    fock_ket,
    identity_op,
    number_op,
    parity_op,
    two_photon_jump,
)
from catsim.lindblad import (
    LindbladModel,
    adjoint_dissipator,
    cat_model,
    dissipator,
    drive_amplitude,
    drive_form_model,
    rhs,
)

from conftest import random_density, random_hermitian


@pytest.fixture(scope="module")
def space():
    return FockSpace(40)


def test_single_photon_dissipator_on_vacuum(space):
    a = annihilation(space)
    rho = DensityMatrix.from_ket(fock_ket(space, 0)).as_operator()
    out = dissipator(a, rho)
    assert np.max(np.abs(out.entries)) == 0.0


def test_single_photon_dissipator_on_one_photon(space):
    # expand by hand on the 2x2 block: a|1><1|a^dag = |0><0|, {N, |1><1|}/2 = |1><1|
    a = annihilation(space)
    rho = DensityMatrix.from_ket(fock_ket(space, 1)).as_operator()
    out = dissipator(a, rho).entries
    expected = np.zeros_like(out)
    expected[0, 0] = 1.0
    expected[1, 1] = -1.0
    np.testing.assert_allclose(out, expected, atol=1e-14)


def test_dissipator_traceless(space):
    rng = np.random.default_rng(7)
    for _ in range(5):
        a = FockOperator(space, rng.standard_normal((40, 40)) + 1j * rng.standard_normal((40, 40)))
        rho = random_density(space, rng).as_operator()
        assert abs(dissipator(a, rho).trace()) <= 1e-12 * np.linalg.norm(a.entries) ** 2


def test_adjoint_kernel_identity(space):
    jump = two_photon_jump(space, 1.0)
    out = adjoint_dissipator(jump, identity_op(space)).entries
    assert np.max(np.abs(out)) <= 1e-12


def test_adjoint_kernel_parity(space):
    # photons exchanged in pairs leave the parity sectors alone
    jump = two_photon_jump(space, 1.0)
    out = adjoint_dissipator(jump, parity_op(space)).entries
    m = space.n_max - 2
    assert np.max(np.abs(out[:m, :m])) <= 1e-12


def test_dissipator_adjoint_duality(space):
    rng = np.random.default_rng(11)
    a = FockOperator(space, rng.standard_normal((40, 40)) + 1j * rng.standard_normal((40, 40)))
    for _ in range(5):
        rho = FockOperator(space, random_hermitian(40, rng))
        x = FockOperator(space, random_hermitian(40, rng))
        lhs = np.trace(dissipator(a, rho).entries @ x.entries)
        rhs_ = np.trace(rho.entries @ adjoint_dissipator(a, x).entries)
        assert abs(lhs - rhs_) <= 1e-10 * np.linalg.norm(a.entries) ** 2


def test_rhs_steady_on_protected_subspace(space):
    model = cat_model(space, alpha=1.0, kappa=1.0, epsilon=0.0)
    rng = np.random.default_rng(3)
    cp = cat_state(space, 1.0, +1).amplitudes
    cm = cat_state(space, 1.0, -1).amplitudes
    basis = np.column_stack([cp, cm])
    for _ in range(5):
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        blk = g @ g.conj().T
        blk /= np.trace(blk).real
        rho = FockOperator(space, basis @ blk @ basis.conj().T)
        assert np.max(np.abs(rhs(model, rho).entries)) <= 1e-9


def test_rhs_trivial_model(space):
    zero_h = FockOperator(space, np.zeros((40, 40)))
    model = LindbladModel(space, zero_h, ())
    rng = np.random.default_rng(5)
    rho = random_density(space, rng).as_operator()
    assert np.max(np.abs(rhs(model, rho).entries)) == 0.0


def test_rhs_traceless_and_hermitian(space):
    model = cat_model(space, alpha=1.0, kappa=1.0, epsilon=0.01)
    rng = np.random.default_rng(9)
    for _ in range(5):
        rho = random_density(space, rng).as_operator()
        out = rhs(model, rho).entries
        assert abs(np.trace(out)) <= 1e-11
        assert np.max(np.abs(out - out.conj().T)) == 0.0


def test_rhs_linearity(space):
    model = cat_model(space, alpha=1.0, kappa=1.0, epsilon=0.01)
    rng = np.random.default_rng(13)
    r1 = FockOperator(space, random_hermitian(40, rng))
    r2 = FockOperator(space, random_hermitian(40, rng))
    c1, c2 = 0.3, -1.7
    combined = rhs(model, c1 * r1 + c2 * r2).entries
    separate = c1 * rhs(model, r1).entries + c2 * rhs(model, r2).entries
    np.testing.assert_allclose(combined, separate, atol=1e-10)


def test_model_validation(space):
    a = annihilation(space)
    with pytest.raises(ValueError):
        LindbladModel(space, a, ())  # not Hermitian
    zero_h = FockOperator(space, np.zeros((40, 40)))
    with pytest.raises(ValueError):
        LindbladModel(space, zero_h, ((-1.0, a),))


def test_drive_form_matches_l_form(space):
    # D[a^2 - alpha^2] = D[a^2] + (alpha^2/2)[(a^dag)^2 - a^2, .]
    # alpha != 1 distinguishes u = kappa alpha^2/2 from a linear alpha relation
    rng = np.random.default_rng(17)
    for alpha in (0.5, 1.0, 2.0):
        kappa, eps = 1.0, 0.01
        lform = cat_model(space, alpha, kappa, eps)
        dform = drive_form_model(space, drive_amplitude(alpha, kappa), kappa, eps)
        for _ in range(5):
            rho = random_density(space, rng).as_operator()
            np.testing.assert_allclose(
                rhs(lform, rho).entries, rhs(dform, rho).entries, atol=1e-9
            )


def test_drive_form_linear_alpha_relation_fails(space):
    # with u = kappa*alpha/2 (alpha != 1) the two generators genuinely differ
    rng = np.random.default_rng(18)
    alpha, kappa = 2.0, 1.0
    lform = cat_model(space, alpha, kappa, 0.0)
    dform = drive_form_model(space, 0.5 * kappa * alpha, kappa, 0.0)
    rho = random_density(space, rng).as_operator()
    diff = rhs(lform, rho).entries - rhs(dform, rho).entries
    assert np.max(np.abs(diff)) > 1e-3


def test_drive_form_alpha_zero_reduces_to_bare_two_photon(space):
    rng = np.random.default_rng(19)
    lform = cat_model(space, alpha=0.0, kappa=1.0, epsilon=0.0)
    dform = drive_form_model(space, u=0.0, kappa=1.0, epsilon=0.0)
    rho = random_density(space, rng).as_operator()
    np.testing.assert_allclose(rhs(lform, rho).entries, rhs(dform, rho).entries, atol=1e-12)


def test_drive_amplitude_at_unit_alpha():
    # kappa=1, u=1/2 gives alpha=1 under both alpha=2u/kappa and alpha^2=2u/kappa
    assert drive_amplitude(1.0, 1.0) == pytest.approx(0.5)


def test_lyapunov_pointwise_inequality(space):
    # tr(L D[L](rho) L^dag) <= -2 tr(L rho L^dag) on interior-supported states
    jump = two_photon_jump(space, 1.0)
    lm = jump.entries
    rng = np.random.default_rng(23)
    for _ in range(20):
        rho = random_density(space, rng, support=space.n_max - 5)
        drho = dissipator(jump, rho.as_operator()).entries
        lhs = np.trace(lm @ drho @ lm.conj().T).real
        v = np.trace(lm @ rho.entries @ lm.conj().T).real
        assert lhs <= -2.0 * v + 1e-9


def test_moment_drift_bound_fitted_mu(space):
    # tr(D[L](rho) N) <= -(tr rho N)^2 + mu; the pointwise bound
    # 2(-x^2+2x+3) <= -x^2+mu gives mu=10 at alpha=1.
    # Low-photon states realize the surplus, so sample small supports too.
    jump = two_photon_jump(space, 1.0)
    nmat = number_op(space).entries
    rng = np.random.default_rng(29)
    fitted = -np.inf
    for trial in range(200):
        rho = random_density(space, rng, support=2 + trial % 20)
        drift = np.trace(dissipator(jump, rho.as_operator()).entries @ nmat).real
        mean_n = np.trace(rho.entries @ nmat).real
        fitted = max(fitted, drift + mean_n**2)
    assert 0.0 < fitted <= 10.0 + 1e-9


def test_cat_model_alpha_zero_allowed_for_zero_alpha_jump(space):
    # alpha=0 is a valid *model* (L = a^2); only cat-state construction rejects it
    model = cat_model(space, alpha=0.0, kappa=1.0, epsilon=0.0)
    assert len(model.jumps) == 2
