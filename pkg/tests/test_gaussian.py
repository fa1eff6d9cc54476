import numpy as np
import pytest

from lossymem.gaussian import (
    GaussianState,
    ModeRotation,
    cascade_apply,
    random_state,
    unraveled_apply,
    unraveling,
    verify_equivalence,
)
from lossymem.model import ChannelParams, build_cascade, memory_matrix
from lossymem.spectral import diagonalize


def coherent(mean):
    mean = np.asarray(mean, dtype=float)
    return GaussianState(mean, np.eye(mean.size))


def test_state_validation():
    with pytest.raises(ValueError):
        GaussianState(np.zeros(3), np.eye(3))
    with pytest.raises(ValueError):
        GaussianState(np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]))
    assert GaussianState.vacuum(2).is_physical()
    assert not GaussianState(np.zeros(2), 0.5 * np.eye(2)).is_physical()


def test_identity_channel():
    rng = np.random.default_rng(3)
    state = random_state(4, rng)
    out = cascade_apply(ChannelParams(0.0, 1.0, 4, "EE"), state)
    np.testing.assert_allclose(out.mean, state.mean, atol=1e-14)
    np.testing.assert_allclose(out.cov, state.cov, atol=1e-13)


@pytest.mark.parametrize("setup", ["EE", "AB", "AE", "EB"])
def test_vacuum_stays_vacuum(setup):
    params = ChannelParams(0.45, 0.3, 5, setup)
    senders = build_cascade(params).a_coeffs.shape[1]
    out = cascade_apply(params, GaussianState.vacuum(senders))
    np.testing.assert_allclose(out.mean, 0.0, atol=1e-15)
    np.testing.assert_allclose(out.cov, np.eye(out.cov.shape[0]), atol=1e-13)


def test_memoryless_is_single_mode_loss():
    eta = 0.35
    state = GaussianState(np.array([1.0, -2.0, 0.5, 3.0]), np.diag([2.0, 0.7, 3.0, 1.5]))
    out = cascade_apply(ChannelParams(0.0, eta, 2, "EE"), state)
    np.testing.assert_allclose(out.mean, np.sqrt(eta) * state.mean, atol=1e-14)
    np.testing.assert_allclose(out.cov, eta * state.cov + (1 - eta) * np.eye(4), atol=1e-14)


def test_cascade_mode_count_mismatch():
    with pytest.raises(ValueError):
        cascade_apply(ChannelParams(0.3, 0.7, 3, "AB"), GaussianState.vacuum(3))


@pytest.mark.parametrize("setup", ["EE", "AB", "AE", "EB"])
def test_cascade_preserves_uncertainty(setup):
    params = ChannelParams(0.6, 0.4, 4, setup)
    senders = build_cascade(params).a_coeffs.shape[1]
    rng = np.random.default_rng(11)
    for _ in range(10):
        assert cascade_apply(params, random_state(senders, rng)).is_physical()


def test_unraveled_examples():
    rng = np.random.default_rng(5)
    state = random_state(3, rng)
    same = unraveled_apply([1, 1, 1], state)
    np.testing.assert_allclose(same.cov, state.cov, atol=1e-15)
    np.testing.assert_allclose(same.mean, state.mean, atol=1e-15)
    dark = unraveled_apply([0, 0, 0], state)
    np.testing.assert_allclose(dark.cov, np.eye(6), atol=1e-15)
    np.testing.assert_allclose(dark.mean, 0.0, atol=1e-15)
    thermal = unraveled_apply([0.5], GaussianState(np.zeros(2), 3 * np.eye(2)))
    np.testing.assert_allclose(thermal.cov, 2 * np.eye(2), atol=1e-15)
    with pytest.raises(ValueError):
        unraveled_apply([1.2], GaussianState.vacuum(1))


def test_random_states_are_physical():
    rng = np.random.default_rng(0)
    for m in (1, 3, 6):
        for _ in range(20):
            s = random_state(m, rng)
            assert s.is_physical()
            assert np.all(np.abs(s.mean) <= 3)


def test_rotation_requires_orthogonal():
    with pytest.raises(ValueError):
        ModeRotation(np.array([[1.0, 0.1], [0.0, 1.0]]))


@pytest.mark.parametrize("eps,eta", [(0.3, 0.7), (0.9, 0.2), (0.5, 0.0)])
def test_ee_encoder_from_eigenvectors(eps, eta):
    params = ChannelParams(eps, eta, 6, "EE")
    a = build_cascade(params).a_coeffs
    d = diagonalize(memory_matrix(params))
    encoder, decoder, taus = unraveling(params)
    np.testing.assert_allclose(taus, d.taus, rtol=0, atol=1e-12)
    good = d.taus > 1e-6
    # rows (O A)_k / sqrt(tau_k) are orthonormal wherever tau_k > 0
    r = (d.diagonalizer @ a)[good] / np.sqrt(d.taus[good])[:, None]
    np.testing.assert_allclose(r @ r.T, np.eye(good.sum()), atol=1e-12)
    for rot in (encoder, decoder):
        np.testing.assert_allclose(rot.matrix @ rot.matrix.T, np.eye(6), atol=1e-12)


def test_encoder_preserves_photon_number():
    params = ChannelParams(0.3, 0.7, 5, "AB")
    encoder, _, _ = unraveling(params)
    rng = np.random.default_rng(2)
    for _ in range(10):
        state = random_state(6, rng)
        encoded = ModeRotation(encoder.matrix.T).apply(state)
        assert encoded.photon_numbers().sum() == pytest.approx(state.photon_numbers().sum(), abs=1e-10)


def test_verify_memoryless():
    assert verify_equivalence(ChannelParams(0.0, 0.6, 4, "EE"), trials=10, seed=1) < 1e-12


@pytest.mark.parametrize("setup", ["EE", "AB"])
def test_verify_examples(setup):
    assert verify_equivalence(ChannelParams(0.3, 0.7, 6, setup), trials=50, seed=0) < 1e-10


def test_verify_dark_modes_completed():
    # eta = 0 makes tau_1 = 0 for EE; the encoder row is an orthonormal completion
    assert verify_equivalence(ChannelParams(0.5, 0.0, 5, "EE"), trials=10, seed=4) < 1e-10
    assert verify_equivalence(ChannelParams(0.9, 0.1, 40, "AB"), trials=5, seed=4) < 1e-10


def test_verify_deterministic_and_seed_sensitive():
    p = ChannelParams(0.3, 0.7, 4, "EE")
    assert verify_equivalence(p, 5, 7) == verify_equivalence(p, 5, 7)


@pytest.mark.parametrize("setup", ["AE", "EB"])
def test_verify_rejects_rectangular(setup):
    with pytest.raises(ValueError):
        verify_equivalence(ChannelParams(0.3, 0.7, 4, setup), 2, 0)
