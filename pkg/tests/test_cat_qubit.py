import numpy as np
import pytest

from catsim.cat_qubit import (
    BlochVector,
    QubitDensity,
    bloch_from_qubit,
    bloch_rates,
    cat_kets,
    cat_paulis,
    embed_to_fock,
    project_to_qubit,
    projector_pc,
    qubit_from_bloch,
    slow_basis,
    slow_generator,
    solve_bloch,
)
from catsim.fock import (
    DegenerateAmplitude,
    DensityMatrix,
    FockSpace,
    coherent_state,
    fock_ket,
    parity_op,
    two_photon_jump,
)
from catsim.lindblad import dissipator

# direct evaluation of the closed forms at alpha=1 (and eps=0.01 where rates enter)
X_RATIO_PLUS = 1.1458775176690272   # gamma_plus / gamma_minus
X_RATIO_MINUS = 0.8726936208978295  # gamma_minus / gamma_plus
VACUUM_POPULATION = 0.6480542736638852  # |<c+|0>|^2
R_X = 3.7314720727548166e-4
Z_INF = 0.26580222883407995


@pytest.fixture(scope="module")
def space():
    return FockSpace(40)


def random_qubit_density(rng, alpha=1.0):
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    m = g @ g.conj().T
    return QubitDensity(m / np.trace(m).real, alpha)


def test_projector_properties(space):
    pc = projector_pc(space, 1.0)
    assert np.trace(pc.entries).real == pytest.approx(2.0, abs=1e-10)
    assert np.max(np.abs((pc @ pc).entries - pc.entries)) <= 1e-11
    assert np.max(np.abs(pc.entries - pc.entries.conj().T)) <= 1e-12


def test_projector_annihilated_by_jump(space):
    jump = two_photon_jump(space, 1.0)
    assert np.max(np.abs((jump @ projector_pc(space, 1.0)).entries)) <= 1e-9


def test_projector_fixes_coherent_state(space):
    pc = projector_pc(space, 1.0).entries
    ket = coherent_state(space, 1.0).amplitudes
    assert np.linalg.norm(pc @ ket - ket) <= 1e-9


def test_project_pure_plus_cat(space):
    rho = DensityMatrix.from_ket(cat_kets(space, 1.0)[0])
    block, pop = project_to_qubit(rho, 1.0)
    np.testing.assert_allclose(block, np.array([[1.0, 0.0], [0.0, 0.0]]), atol=1e-12)
    assert pop == pytest.approx(1.0, abs=1e-12)


def test_vacuum_subspace_population(space):
    rho = DensityMatrix.from_ket(fock_ket(space, 0))
    _, pop = project_to_qubit(rho, 1.0)
    assert pop == pytest.approx(VACUUM_POPULATION, abs=1e-9)


def test_embed_project_round_trip(space):
    rng = np.random.default_rng(1)
    for _ in range(5):
        q = random_qubit_density(rng)
        block, pop = project_to_qubit(embed_to_fock(q, space), 1.0)
        np.testing.assert_allclose(block, q.entries, atol=1e-10)
        assert pop == pytest.approx(1.0, abs=1e-10)


def test_embedded_plus_cat_has_even_parity(space):
    q = QubitDensity(np.diag([1.0, 0.0]).astype(complex), 1.0)
    rho = embed_to_fock(q, space)
    assert rho.expectation(parity_op(space)) == pytest.approx(1.0, abs=1e-10)


def test_cat_pauli_algebra(space):
    p = cat_paulis(space, 1.0)
    np.testing.assert_allclose(p.sx @ p.sx, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(p.sz @ np.array([1.0, 0.0]), np.array([1.0, 0.0]))
    # embedded operators act like the blocks on the protected subspace
    cp, cm = cat_kets(space, 1.0)
    assert np.vdot(cp.amplitudes, p.sz_fock.entries @ cp.amplitudes).real == pytest.approx(1.0, abs=1e-10)
    assert np.vdot(cm.amplitudes, p.sz_fock.entries @ cm.amplitudes).real == pytest.approx(-1.0, abs=1e-10)


def test_vacuum_sigma_z_expectation(space):
    # <c-|0> = 0, so tr(sigma_z |0><0|) equals the c+ overlap squared
    rho = DensityMatrix.from_ket(fock_ket(space, 0))
    p = cat_paulis(space, 1.0)
    assert rho.expectation(p.sz_fock) == pytest.approx(VACUUM_POPULATION, abs=1e-9)


def test_slow_basis_orthogonality(space):
    ops = slow_basis(space, 1.0).ops
    norms = [np.linalg.norm(op.entries) for op in ops]
    np.testing.assert_allclose(norms, [1.0, 1.0, np.sqrt(2.0), np.sqrt(2.0)], atol=1e-12)
    for i in range(4):
        for j in range(i + 1, 4):
            assert abs(np.vdot(ops[i].entries, ops[j].entries)) <= 1e-12


def test_slow_flip_entries():
    x, _ = slow_generator(1.0, 0.01)
    assert x[0, 1].real == pytest.approx(X_RATIO_PLUS, abs=1e-12)
    assert x[1, 0].real == pytest.approx(X_RATIO_MINUS, abs=1e-12)


def test_slow_flip_approaches_bit_flip():
    x, _ = slow_generator(3.0, 0.01)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.linalg.norm(x - sx) <= 1e-7


def test_slow_generator_trace_free():
    rng = np.random.default_rng(2)
    _, gen = slow_generator(1.0, 0.01)
    for _ in range(5):
        q = random_qubit_density(rng)
        assert abs(np.trace(gen(q.entries))) <= 1e-14


def test_slow_generator_rejects_degenerate():
    with pytest.raises(DegenerateAmplitude):
        slow_generator(0.0, 0.01)


def test_first_component_identity(space):
    # P_c D[a](rho_s) P_c = alpha^2 D[X](rho_s) for states on the protected subspace
    rng = np.random.default_rng(3)
    from catsim.fock import annihilation

    a = annihilation(space)
    for alpha in (0.5, 1.0, 2.0):
        pc = projector_pc(space, alpha).entries
        x, gen = slow_generator(alpha, 1.0)  # eps=1 isolates the alpha^2 D[X] factor
        for _ in range(10):
            q = random_qubit_density(rng, alpha)
            rho = embed_to_fock(q, space)
            lhs = pc @ dissipator(a, rho.as_operator()).entries @ pc
            rhs_embedded = np.column_stack([c.amplitudes for c in cat_kets(space, alpha)])
            rhs = rhs_embedded @ gen(q.entries) @ rhs_embedded.conj().T
            assert np.linalg.norm(lhs - rhs) <= 1e-9


def test_bloch_rate_values():
    r = bloch_rates(1.0, 0.01)
    assert r.r_x == pytest.approx(R_X, rel=1e-12)
    assert r.z_inf == pytest.approx(Z_INF, rel=1e-12)
    assert r.r_y > r.r_x


def test_bloch_rates_match_generator_spectrum():
    # eigenvalues of the vectorized 2x2 slow generator are {0, -r_x, -r_y, -r_z}
    _, gen = slow_generator(1.0, 0.01)
    basis = [
        np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex),
        np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex),
        np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex) / np.sqrt(2),
        np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex) / np.sqrt(2),
    ]
    mat = np.array([
        [np.vdot(bi, gen(bj)).real for bj in basis] for bi in basis
    ])
    eigs = np.sort(np.linalg.eigvals(mat).real)
    r = bloch_rates(1.0, 0.01)
    np.testing.assert_allclose(eigs, sorted([-r.r_z, -r.r_y, -r.r_x, 0.0]), atol=1e-12)


def test_bit_flip_limit_rates():
    r = bloch_rates(6.0, 0.01)
    assert abs(r.r_x) <= 1e-10
    assert abs(r.z_inf) <= 1e-10


def test_solve_bloch_endpoints():
    b0 = BlochVector(0.3, -0.2, 0.5)
    assert solve_bloch(b0, 1.0, 0.01, 0.0) == b0
    b_inf = solve_bloch(b0, 1.0, 0.01, 1e7)
    assert b_inf.x == pytest.approx(0.0, abs=1e-12)
    assert b_inf.y == pytest.approx(0.0, abs=1e-12)
    assert b_inf.z == pytest.approx(Z_INF, abs=1e-12)


def test_solve_bloch_stays_in_ball():
    b0 = BlochVector(0.6, 0.0, 0.8)
    for t in np.linspace(0.0, 500.0, 64):
        b = solve_bloch(b0, 1.0, 0.01, float(t))
        assert b.x**2 + b.y**2 + b.z**2 <= 1.0 + 1e-9


def test_solve_bloch_matches_numeric_integration():
    # rk4 on the 2x2 slow generator, dt=1e-3 to t=50
    alpha, eps = 1.0, 0.01
    _, gen = slow_generator(alpha, eps)
    b0 = BlochVector(0.4, -0.3, 0.1)
    rho = qubit_from_bloch(b0, alpha).entries
    dt, steps = 1e-3, 50_000
    for _ in range(steps):
        k1 = gen(rho)
        k2 = gen(rho + 0.5 * dt * k1)
        k3 = gen(rho + 0.5 * dt * k2)
        k4 = gen(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    numeric = bloch_from_qubit(QubitDensity(rho, alpha))
    closed = solve_bloch(b0, alpha, eps, dt * steps)
    assert numeric.x == pytest.approx(closed.x, abs=1e-8)
    assert numeric.y == pytest.approx(closed.y, abs=1e-8)
    assert numeric.z == pytest.approx(closed.z, abs=1e-8)


def test_bloch_affine_round_trip():
    rng = np.random.default_rng(4)
    for _ in range(10):
        q = random_qubit_density(rng)
        back = qubit_from_bloch(bloch_from_qubit(q), 1.0)
        np.testing.assert_allclose(back.entries, q.entries, atol=1e-12)


def test_bloch_vector_validation():
    with pytest.raises(ValueError):
        BlochVector(1.0, 1.0, 1.0)


def test_qubit_density_validation():
    with pytest.raises(ValueError):
        QubitDensity(np.diag([0.7, 0.7]).astype(complex), 1.0)
    with pytest.raises(DegenerateAmplitude):
        QubitDensity(np.diag([1.0, 0.0]).astype(complex), -1.0)
