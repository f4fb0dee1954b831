import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussentropy.boson_gaussian import (
    BosonBathSpec, CovariancePropagator, bose, bose_entropy, bose_entropy_ledger, build_bosonic_hamiltonian,
    evolve_covariance, evolve_covariance_real, init_covariance, mode_block, quadrature_hamiltonian,
    simulate_bose, stationary_occupancy_bose, symplectic_drift, symplectic_eigenvalues, symplectic_form,
    two_mode_bose, two_mode_covariance, two_mode_eps_max, vn_entropy_bose, wehrl_entropy,
    wehrl_mutual_information,
)
from gaussentropy.fock_probability import quadrature_rotation

from conftest import random_covariance

BOSE_ENTROPY_N3 = 4 * math.log(4) - 3 * math.log(3)  # (n+1) ln(n+1) - n ln n


def small_spec(K=20, beta=0.5):
    return BosonBathSpec.ohmic(K, omega_c=3.0, gamma=0.05, beta=beta, omega0=1.0)


def test_bose_occupation_and_entropy():
    assert bose(1.0, math.log(2)) == pytest.approx(1.0)
    assert bose(2.0, math.inf) == 0.0
    with pytest.raises(ValueError):
        bose(0.0, 1.0)
    assert bose_entropy(0.5) == 0.0
    assert bose_entropy(3.5) == pytest.approx(BOSE_ENTROPY_N3, rel=1e-14)
    assert bose_entropy(3.5) == pytest.approx(2.2493405784752334, rel=1e-14)
    np.testing.assert_allclose(bose_entropy(np.array([0.5, 3.5])), [0.0, BOSE_ENTROPY_N3])


def test_bath_discretisations():
    s = BosonBathSpec.ohmic(4, omega_c=2.0, gamma=0.1, beta=1.0)
    np.testing.assert_allclose(s.frequencies, [0.5, 1.0, 1.5, 2.0])
    np.testing.assert_allclose(s.couplings, np.sqrt(2 * 0.1 * s.frequencies * 0.5 / math.pi))
    b = BosonBathSpec.band(5, W=1.0, gamma=0.1, beta=1.0, omega0=4.0)
    np.testing.assert_allclose(b.frequencies, [3.5, 3.75, 4.0, 4.25, 4.5])
    np.testing.assert_allclose(b.couplings, np.sqrt(2 * 0.1 * b.frequencies * 0.25 / math.pi))
    with pytest.raises(ValueError, match="above zero"):
        BosonBathSpec.band(5, W=3.0, gamma=0.1, beta=1.0, omega0=1.0)
    with pytest.raises(ValueError, match="K must be"):
        BosonBathSpec.ohmic(1, 2.0, 0.1, 1.0)
    with pytest.raises(ValueError, match="gamma"):
        BosonBathSpec.ohmic(4, 2.0, 0.0, 1.0)


def test_stationary_occupancy_weights_baths_by_coupling():
    h = BosonBathSpec.band(5, 1.0, 0.03, 1.0, omega0=4.0)
    c = BosonBathSpec.band(5, 1.0, 0.01, 2.0, omega0=4.0)
    ref = (0.03 * bose(4.0, 1.0) + 0.01 * bose(4.0, 2.0)) / 0.04
    assert stationary_occupancy_bose([h, c]) == pytest.approx(ref, rel=1e-14)


def test_mode_and_quadrature_hamiltonians_agree():
    s = small_spec(6)
    H = build_bosonic_hamiltonian(s)
    U = quadrature_rotation(7)
    np.testing.assert_allclose(U.conj().T @ H @ U, quadrature_hamiltonian(s), atol=1e-14)
    np.testing.assert_allclose(H, H.T, atol=0)


def test_initial_covariance():
    s = small_spec(3)
    S0 = init_covariance(s, system_occupancy=0.0)
    n = np.r_[0.0, s.occupations()]
    np.testing.assert_allclose(S0, np.diag(np.r_[n, n] + 0.5))
    St = init_covariance(s, system_beta=0.25)
    assert St[0, 0] == pytest.approx(bose(1.0, 0.25) + 0.5)
    with pytest.raises(ValueError):
        init_covariance(s, system_occupancy="hot")


def test_propagator_matches_real_exponential():
    s = small_spec()
    H, M = build_bosonic_hamiltonian(s), quadrature_hamiltonian(s)
    S0 = init_covariance(s, system_occupancy=0.0)
    prop = CovariancePropagator(H)
    assert not prop.use_expm
    for t in (0.3, 5.0, 40.0):
        np.testing.assert_allclose(prop(S0, t), evolve_covariance_real(S0, M, t), atol=1e-11)
        assert symplectic_drift(prop.symplectic(t)) < 1e-10


def test_expm_fallback_and_drift_guard(monkeypatch):
    s = small_spec(8)
    H = build_bosonic_hamiltonian(s)
    S0 = init_covariance(s, system_occupancy=1.0)
    ref = evolve_covariance(S0, H, 3.0)
    prop = CovariancePropagator(H)
    prop.use_expm = True
    np.testing.assert_allclose(prop(S0, 3.0), ref, atol=1e-11)
    good = prop.symplectic
    monkeypatch.setattr(prop, "symplectic", lambda t: 1.001 * good(t))
    with pytest.raises(FloatingPointError, match="symplectic"):
        prop(S0, 3.0)


def test_uncoupled_system_mode_rotates_freely():
    s = BosonBathSpec(frequencies=[0.7, 1.3], couplings=[0.0, 0.0], beta=1.0, omega0=1.5)
    S0 = init_covariance(s, system_occupancy=0.0)
    S0[0, 0], S0[3, 3] = 0.25, 1.0  # squeezed system mode
    t = 0.9
    St = evolve_covariance(S0, build_bosonic_hamiltonian(s), t)
    c, sn = math.cos(1.5 * t), math.sin(1.5 * t)
    R = np.array([[c, sn], [-sn, c]])
    np.testing.assert_allclose(mode_block(St, [0]), R @ np.diag([0.25, 1.0]) @ R.T, atol=1e-13)
    np.testing.assert_allclose(mode_block(St, [1, 2]), mode_block(S0, [1, 2]), atol=1e-13)


def test_dimension_and_shape_errors():
    H = build_bosonic_hamiltonian(small_spec(3))
    with pytest.raises(ValueError, match="mismatch"):
        evolve_covariance(0.5 * np.eye(6), H, 1.0)
    with pytest.raises(ValueError, match="even"):
        CovariancePropagator(np.eye(3))
    with pytest.raises(ValueError, match="Hermitian"):
        CovariancePropagator(np.triu(np.ones((4, 4))))


def test_evolution_conserves_energy_spectrum_and_entropy():
    s = small_spec()
    M = quadrature_hamiltonian(s)
    S0 = init_covariance(s, system_occupancy=0.0)
    prop = CovariancePropagator(build_bosonic_hamiltonian(s))
    E0 = np.trace(M @ S0) / 2
    nu0 = symplectic_eigenvalues(S0)
    for t in (2.0, 17.0, 60.0):
        St = prop(S0, t)
        assert np.trace(M @ St) / 2 == pytest.approx(E0, abs=1e-9)
        np.testing.assert_allclose(symplectic_eigenvalues(St), nu0, atol=1e-9)
        assert vn_entropy_bose(St) == pytest.approx(vn_entropy_bose(S0), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(1, 4))
def test_symplectic_eigenvalues_match_williamson_spectrum(seed, N):
    S = random_covariance(np.random.default_rng(seed), N)
    ref = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(N) @ S)))[::-2]
    np.testing.assert_allclose(symplectic_eigenvalues(S), ref, rtol=1e-9)
    assert wehrl_entropy(S) >= N - 1e-12
    assert 0 <= wehrl_mutual_information(S) + 1e-12


def test_uncertainty_violation_is_reported():
    with pytest.raises(ValueError, match="uncertainty"):
        symplectic_eigenvalues(np.diag([0.2, 0.2]))
    with pytest.raises(ValueError, match="positive definite"):
        symplectic_eigenvalues(np.diag([1.0, -1.0]))


def test_wehrl_entropy_closed_forms():
    assert wehrl_entropy(0.5 * np.eye(2)) == pytest.approx(1.0)
    assert wehrl_entropy(3.5 * np.eye(2)) == pytest.approx(math.log(4) + 1, rel=1e-14)
    assert wehrl_entropy(3.5 * np.eye(2)) == pytest.approx(2.386294361119891, rel=1e-14)


def test_wehrl_partitions(rng):
    S = random_covariance(rng, 3)
    assert wehrl_mutual_information(S, "system") == pytest.approx(
        wehrl_mutual_information(S, [[0], [1, 2]]), abs=1e-14)
    assert wehrl_mutual_information(S, [[0], [1], [2]]) == pytest.approx(wehrl_mutual_information(S), abs=1e-13)
    assert wehrl_mutual_information(np.diag([1.0, 2.0, 1.0, 2.0])) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError, match="cover"):
        wehrl_mutual_information(S, [[0], [1]])
    with pytest.raises(ValueError, match="unknown"):
        wehrl_mutual_information(S, "halves")


def test_ledger_vanishes_at_zero_time():
    s = small_spec()
    S0 = init_covariance(s, system_occupancy=0.0)
    L = bose_entropy_ledger(S0, S0, s, t=0.0)
    for name in ("sigma", "I_M", "D_env", "I_SE", "I_env", "heat_Q", "dS_system", "J_W_M", "J_W_SE"):
        assert abs(getattr(L, name)) < 1e-12, name


@pytest.mark.parametrize("start", [dict(system_occupancy=0.0), dict(system_beta=0.25)])
def test_ledger_identities_along_trajectory(start):
    s = small_spec(30)
    for L in simulate_bose(s, [1.0, 10.0, 40.0], **start):
        assert L.violations() == []
        assert L.sigma == pytest.approx(L.I_M + L.D_env, abs=1e-9)
        assert 0 <= L.J_W_M <= L.I_M
        assert 0 <= L.J_W_SE and L.I_SE <= L.I_M + 1e-12
        assert L.entropy_flow == pytest.approx(-s.beta * L.heat_Q)


def test_ledger_rejects_mismatched_state():
    s = small_spec(3)
    with pytest.raises(ValueError, match="modes"):
        bose_entropy_ledger(0.5 * np.eye(6), 0.5 * np.eye(6), s)


def test_two_mode_zero_correlation():
    r = two_mode_bose(1.0, 0.5, 0.0, 0.0)
    assert r.I_ij == pytest.approx(0, abs=1e-12)
    assert r.J_W_ij == pytest.approx(0, abs=1e-12)
    assert r.J_F_ij == pytest.approx(0, abs=1e-12)


def test_two_mode_small_eps_series():
    e = 1e-3
    r = two_mode_bose(3.0, 3.0, e, -e, fock=False)
    assert r.I_ij / e**2 == pytest.approx(math.log(16 / 9) / 7, rel=1e-5)
    assert r.J_W_ij / e**2 == pytest.approx(1 / 16, rel=1e-5)
    assert math.isnan(r.J_F_ij)


@pytest.mark.parametrize("sym,sign", [("squeezed", -1), ("equal", 1), ("q_only", 0)])
@pytest.mark.parametrize("n", [(3.0, 3.0), (2.0, 0.5)])
def test_eps_max_is_the_physical_boundary(sym, sign, n):
    e = two_mode_eps_max(*n, sym)
    nu = symplectic_eigenvalues(two_mode_covariance(*n, e, sign * e))
    assert nu[-1] == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ValueError, match=f"eps_max = {two_mode_eps_max(*n, sym):.9g}"):
        two_mode_bose(*n, 1.01 * e, sign * 1.01 * e, fock=False)


def test_pure_two_mode_state_fock_information_is_half_the_total():
    e = two_mode_eps_max(3.0, 3.0, "squeezed")
    r = two_mode_bose(3.0, 3.0, e, -e, cutoff=30, max_leakage=None)
    assert r.I_ij == pytest.approx(2 * BOSE_ENTROPY_N3, rel=1e-6)
    assert r.J_F_ij == pytest.approx(r.I_ij / 2, rel=1e-3)
    assert r.J_F_ij <= r.I_ij


def test_classical_limit_is_monotone():
    ratios = []
    for n in (1, 3, 10, 30, 100):
        e = 0.5 * two_mode_eps_max(n, n, "squeezed")
        r = two_mode_bose(n, n, e, -e, fock=False)
        ratios.append(r.J_W_ij / r.I_ij)
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] > 0.95


def test_low_density_ratio():
    n = 1e-3
    e = 0.5 * two_mode_eps_max(n, n, "squeezed")
    r = two_mode_bose(n, n, e, -e, fock=False)
    assert r.J_W_ij / r.I_ij == pytest.approx(1 / math.log(1 / n**2), rel=0.2)


def test_fock_information_bounded_by_total(rng):
    for n, f in ((0.5, 0.3), (1.0, 0.8), (0.2, 0.99)):
        e = f * two_mode_eps_max(n, n, "equal")
        r = two_mode_bose(n, n, e, e, cutoff=40)
        assert 0 <= r.J_F_ij <= r.I_ij
        assert r.leakage < 1e-6
