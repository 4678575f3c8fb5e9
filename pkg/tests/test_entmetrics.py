import numpy as np
import pytest

from singletopt.channel import amplitude_damping, apply_to_half
from singletopt.choi import choi
from singletopt.entmetrics import (
    negativity,
    pt_spectrum_identity_residual,
    schmidt,
    singlet_fraction,
    singlet_fraction_oracle,
    teleportation_fidelity,
)
from singletopt.entmetrics import _mes_overlap
from singletopt.linalg import PHI_PLUS, PSI_MINUS

from conftest import (
    random_channels,
    random_density,
    random_product_state,
    random_unitary,
)


BELL = np.outer(PHI_PLUS, PHI_PLUS.conj())


def test_singlet_fraction_bell_state():
    value, phi = singlet_fraction(BELL)
    assert value == pytest.approx(1.0, abs=1e-12)
    assert abs(np.vdot(phi, PHI_PLUS)) == pytest.approx(1.0, abs=1e-12)


def test_singlet_fraction_maximally_mixed():
    value, _ = singlet_fraction(np.eye(4) / 4)
    assert value == pytest.approx(0.25, abs=1e-12)


def test_singlet_fraction_optimal_input_output():
    # Output of amplitude damping p = 0.5 on its optimal input reaches the
    # top Choi eigenvalue 1 - p/2.
    p = 0.5
    chi = np.zeros(4, dtype=complex)
    chi[0] = 1 / np.sqrt(2 - p)
    chi[3] = np.sqrt((1 - p) / (2 - p))
    out = apply_to_half(amplitude_damping(p), chi)
    value, _ = singlet_fraction(out)
    assert value == pytest.approx(1 - p / 2, abs=1e-12)


def test_singlet_fraction_maximizer_attains_value():
    rng = np.random.default_rng(2)
    for _ in range(20):
        rho = random_density(rng)
        value, phi = singlet_fraction(rho)
        assert np.vdot(phi, rho @ phi).real == pytest.approx(value, abs=1e-12)
        # phi is maximally entangled
        np.testing.assert_allclose(
            schmidt(phi).coefficients, [0.5, 0.5], atol=1e-10
        )


def test_singlet_fraction_rejects_invalid():
    with pytest.raises(ValueError):
        singlet_fraction(np.eye(4))  # trace 4
    with pytest.raises(ValueError):
        singlet_fraction(np.diag([1.5, -0.5, 0, 0]).astype(complex))


def test_singlet_fraction_local_unitary_invariance():
    rng = np.random.default_rng(3)
    for _ in range(15):
        rho = random_density(rng)
        u = np.kron(random_unitary(rng), random_unitary(rng))
        rotated = u @ rho @ u.conj().T
        a, _ = singlet_fraction(rho)
        b, _ = singlet_fraction(rotated)
        assert abs(a - b) < 1e-10


def test_mes_overlap_formula_matches_explicit_construction():
    # Anchor the oracle's trigonometric form against a from-scratch state.
    rng = np.random.default_rng(4)
    rho = random_density(rng)

    def explicit(beta, ph, pm):
        alpha, gamma = ph + pm, ph - pm
        rz = lambda t: np.array(
            [[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]], dtype=complex
        )
        ry = lambda t: np.array(
            [[np.cos(t / 2), -np.sin(t / 2)], [np.sin(t / 2), np.cos(t / 2)]],
            dtype=complex,
        )
        w = rz(alpha) @ ry(beta) @ rz(gamma)
        v = np.kron(w, np.eye(2)) @ PHI_PLUS
        return np.vdot(v, rho @ v).real

    for _ in range(30):
        beta = rng.uniform(0, np.pi)
        ph = rng.uniform(0, 2 * np.pi)
        pm = rng.uniform(0, 2 * np.pi)
        assert _mes_overlap(rho, beta, ph, pm) == pytest.approx(
            explicit(beta, ph, pm), abs=1e-12
        )


def test_oracle_bell_state_exact_on_grid():
    assert singlet_fraction_oracle(BELL, 2.0, refine=False) == pytest.approx(
        1.0, abs=1e-6
    )


def test_oracle_maximally_mixed_constant():
    assert singlet_fraction_oracle(np.eye(4) / 4, 4.0, refine=False) == pytest.approx(
        0.25, abs=1e-12
    )


def test_oracle_agrees_with_closed_form():
    rng = np.random.default_rng(5)
    for _ in range(10):
        rho = random_density(rng)
        closed, _ = singlet_fraction(rho)
        pre = singlet_fraction_oracle(rho, 2.0, refine=False)
        refined = singlet_fraction_oracle(rho, 2.0)
        assert pre <= closed + 1e-9
        assert refined <= closed + 1e-9
        assert abs(closed - pre) < 1e-3
        assert abs(closed - refined) < 1e-8


def test_teleportation_fidelity():
    assert teleportation_fidelity(1.0) == pytest.approx(1.0)
    assert teleportation_fidelity(0.5) == pytest.approx(2 / 3)
    assert teleportation_fidelity(0.75) == pytest.approx(5 / 6)
    assert teleportation_fidelity(0.5, d=3) == pytest.approx((1.5 + 1) / 4)
    with pytest.raises(ValueError):
        teleportation_fidelity(1.2)
    with pytest.raises(ValueError):
        teleportation_fidelity(-0.1)
    with pytest.raises(ValueError):
        teleportation_fidelity(0.5, d=1)


def test_negativity_bell_and_product():
    assert negativity(BELL) == pytest.approx(1.0, abs=1e-12)
    rng = np.random.default_rng(6)
    for _ in range(10):
        assert negativity(random_product_state(rng)) == pytest.approx(0, abs=1e-12)


def test_negativity_amplitude_damping_formulas():
    # Closed forms for the Schmidt family sqrt(l)|00> + sqrt(1-l)|11>.
    rng = np.random.default_rng(7)
    for _ in range(25):
        p = rng.uniform(0, 1)
        lam = rng.uniform(0, 1)
        state = np.zeros(4, dtype=complex)
        state[0], state[3] = np.sqrt(lam), np.sqrt(1 - lam)
        out = apply_to_half(amplitude_damping(p), state)
        expected = np.sqrt(
            p**2 * (1 - lam) ** 2 + 4 * lam * (1 - lam) * (1 - p)
        ) - (1 - lam) * p
        assert negativity(out) == pytest.approx(max(0.0, expected), abs=1e-12)


def test_negativity_local_unitary_invariance():
    rng = np.random.default_rng(8)
    for _ in range(15):
        rho = random_density(rng)
        u = np.kron(random_unitary(rng), random_unitary(rng))
        assert negativity(u @ rho @ u.conj().T) == pytest.approx(
            negativity(rho), abs=1e-10
        )


def test_fraction_bounded_by_negativity():
    rng = np.random.default_rng(9)
    for _ in range(50):
        rho = random_density(rng, rank=int(rng.integers(1, 5)))
        value, _ = singlet_fraction(rho)
        assert value <= 0.5 * (1 + negativity(rho)) + 1e-10


def test_schmidt_basic_cases():
    np.testing.assert_allclose(schmidt(PHI_PLUS).coefficients, [0.5, 0.5], atol=1e-12)
    ket00 = np.array([1, 0, 0, 0], dtype=complex)
    np.testing.assert_allclose(schmidt(ket00).coefficients, [1, 0], atol=1e-12)
    p = 0.5
    chi = np.zeros(4, dtype=complex)
    chi[0] = 1 / np.sqrt(2 - p)
    chi[3] = np.sqrt((1 - p) / (2 - p))
    np.testing.assert_allclose(schmidt(chi).coefficients, [2 / 3, 1 / 3], atol=1e-12)


def test_schmidt_reconstruction():
    rng = np.random.default_rng(10)
    for _ in range(30):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        v /= np.linalg.norm(v)
        data = schmidt(v)
        rebuilt = data.state()
        overlap = np.vdot(rebuilt, v)
        np.testing.assert_allclose(
            rebuilt * (overlap.conjugate() / abs(overlap)), v, atol=1e-10
        )
        assert data.coefficients[0] >= data.coefficients[1]
        assert data.coefficients.sum() == pytest.approx(1.0, abs=1e-12)


def test_schmidt_rejects_unnormalized():
    with pytest.raises(ValueError):
        schmidt(np.array([1, 0, 0, 1], dtype=complex))


def test_pt_identity_simple_cases():
    assert pt_spectrum_identity_residual(BELL) == pytest.approx(0, abs=1e-12)
    assert pt_spectrum_identity_residual(np.eye(4) / 4) == pytest.approx(0, abs=1e-12)
    sing = np.outer(PSI_MINUS, PSI_MINUS.conj())
    assert pt_spectrum_identity_residual(sing) == pytest.approx(0, abs=1e-12)


def test_pt_identity_on_random_choi_states():
    for c in random_channels(67, 40):
        assert abs(pt_spectrum_identity_residual(choi(c).matrix)) < 1e-10


def test_pt_identity_rejects_bad_marginal():
    state = np.diag([1.0, 0, 0, 0]).astype(complex)  # marginal |0><0|
    with pytest.raises(ValueError):
        pt_spectrum_identity_residual(state)
