"""Covariance-matrix simulation of the cascade and of its unraveled form.

Quadratures are ordered mode by mode, ``(x_1, p_1, x_2, p_2, ...)``, and the
vacuum has identity covariance.  Every map used here is passive with real
coefficients, so a mode transformation ``R`` acts as ``R (x) I_2`` on phase
space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChannelParams, Setup, build_cascade


def symplectic_form(modes: int) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _lift(matrix: np.ndarray) -> np.ndarray:
    return np.kron(matrix, np.eye(2))


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size % 2:
            raise ValueError("mean must be a vector of even length")
        if cov.shape != (mean.size, mean.size):
            raise ValueError("covariance shape does not match the mean")
        if np.max(np.abs(cov - cov.T), initial=0.0) > 1e-10:
            raise ValueError("covariance must be symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    @property
    def modes(self) -> int:
        return self.mean.size // 2

    @classmethod
    def vacuum(cls, modes: int) -> "GaussianState":
        return cls(np.zeros(2 * modes), np.eye(2 * modes))

    def is_physical(self, atol: float = 1e-10) -> bool:
        """Uncertainty relation ``cov + i Omega >= 0``."""
        eig = np.linalg.eigvalsh(self.cov + 1j * symplectic_form(self.modes))
        return bool(eig.min() >= -atol)

    def photon_numbers(self) -> np.ndarray:
        """Mean photon number of each mode."""
        var = np.diag(self.cov).reshape(-1, 2).sum(axis=1)
        sq = (self.mean ** 2).reshape(-1, 2).sum(axis=1)
        return (var + sq - 2.0) / 4.0


@dataclass(frozen=True)
class ModeRotation:
    """Passive linear-optics network given by a real orthogonal mode matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("rotation must be square")
        if np.max(np.abs(m @ m.T - np.eye(m.shape[0]))) > 1e-12:
            raise ValueError("rotation must be orthogonal")
        object.__setattr__(self, "matrix", m)

    def apply(self, state: GaussianState) -> GaussianState:
        if state.modes != self.matrix.shape[0]:
            raise ValueError(f"rotation acts on {self.matrix.shape[0]} modes, state has {state.modes}")
        s = _lift(self.matrix)
        return GaussianState(s @ state.mean, s @ state.cov @ s.T)


def cascade_apply(params: ChannelParams, state: GaussianState) -> GaussianState:
    """Send ``state`` through the cascade with every environment mode in vacuum."""
    coeffs = build_cascade(params)
    senders = coeffs.a_coeffs.shape[1]
    if state.modes != senders:
        raise ValueError(f"setup {params.setup.value} with n={params.n} takes {senders} input modes, got {state.modes}")
    env = coeffs.e_coeffs.shape[1]
    full_mean = np.concatenate([state.mean, np.zeros(2 * env)])
    full_cov = np.zeros((2 * (senders + env),) * 2)
    full_cov[: 2 * senders, : 2 * senders] = state.cov
    full_cov[2 * senders:, 2 * senders:] = np.eye(2 * env)
    s = _lift(coeffs.full)
    return GaussianState(s @ full_mean, s @ full_cov @ s.T)


def unraveled_apply(taus, state: GaussianState) -> GaussianState:
    """Independent single-mode lossy channels with transmissivities ``taus``."""
    taus = np.asarray(taus, dtype=float)
    if np.any(taus < 0) or np.any(taus > 1):
        raise ValueError("transmissivities must lie in [0, 1]")
    if taus.size != state.modes:
        raise ValueError(f"{taus.size} transmissivities for a {state.modes}-mode state")
    amp = np.repeat(np.sqrt(taus), 2)
    noise = np.repeat(1.0 - taus, 2)
    return GaussianState(amp * state.mean, amp[:, None] * state.cov * amp[None, :] + np.diag(noise))


def unraveling(params: ChannelParams):
    """Encoder, decoder and transmissivities that diagonalize a square cascade.

    Uses the SVD ``A = U diag(s) V^T`` of the sender coefficients: ``U^T`` is
    the decoder (it diagonalizes ``A A^T``), ``V^T`` the encoder and
    ``s**2`` the effective transmissivities, in nondecreasing order.  Where
    ``s > 0`` the encoder rows equal ``(U^T A)_k / s_k``; rows for vanishing
    ``s`` come out as an orthonormal completion.
    """
    if params.setup not in (Setup.EE, Setup.AB):
        raise ValueError(f"unraveling is only implemented for square setups EE and AB, got {params.setup.value}")
    a = build_cascade(params).a_coeffs
    u, s, vt = np.linalg.svd(a)
    order = np.argsort(s, kind="stable")
    return ModeRotation(vt[order]), ModeRotation(u[:, order].T), np.clip(s[order] ** 2, 0.0, 1.0)


def random_state(modes: int, rng: np.random.Generator) -> GaussianState:
    """Thermal (or pure) squeezed state mixed by a random passive network, displaced.

    Symplectic eigenvalues are drawn from ``[1, 5]`` (exactly 1 for the pure
    half of the draws), squeezing from ``[0, 1]``, means from ``[-3, 3]``.
    """
    pure = rng.random() < 0.5
    nu = np.ones(modes) if pure else rng.uniform(1.0, 5.0, modes)
    r = rng.uniform(0.0, 1.0, modes)
    diag = np.empty(2 * modes)
    diag[0::2] = nu * np.exp(-2 * r)
    diag[1::2] = nu * np.exp(2 * r)
    z = (rng.standard_normal((modes, modes)) + 1j * rng.standard_normal((modes, modes))) / np.sqrt(2)
    q, rr = np.linalg.qr(z)
    unitary = q * (np.diag(rr) / np.abs(np.diag(rr)))
    # interleaved (x, p) ordering of the passive symplectic matrix of ``unitary``
    passive = np.zeros((2 * modes, 2 * modes))
    passive[0::2, 0::2] = unitary.real
    passive[0::2, 1::2] = -unitary.imag
    passive[1::2, 0::2] = unitary.imag
    passive[1::2, 1::2] = unitary.real
    cov = passive @ np.diag(diag) @ passive.T
    return GaussianState(rng.uniform(-3.0, 3.0, 2 * modes), cov)


def verify_equivalence(params: ChannelParams, trials: int = 50, seed: int = 0) -> float:
    """Max deviation between encode-cascade-decode and the product of lossy channels.

    Transmissivities are the squared singular values of the sender
    coefficients rather than eigenvalues of ``A A^T``: the eigen-solver
    resolves tiny eigenvalues only to ~1e-16 absolute, which puts an error
    of ~1e-8 on their square roots.  Deterministic for a fixed ``seed``.
    """
    if int(trials) != trials or trials < 1:
        raise ValueError("trials must be a positive integer")
    encoder, decoder, taus = unraveling(params)
    modes = encoder.matrix.shape[0]
    worst = 0.0
    for child in np.random.SeedSequence(seed).spawn(int(trials)):
        state = random_state(modes, np.random.default_rng(child))
        # encoding maps the logical modes onto the physical inputs: x_in = V y
        physical = ModeRotation(encoder.matrix.T).apply(state)
        out = decoder.apply(cascade_apply(params, physical))
        ref = unraveled_apply(taus, state)
        worst = max(worst, float(np.max(np.abs(out.mean - ref.mean))),
                    float(np.max(np.abs(out.cov - ref.cov))))
    return worst
