"""Beam-splitter cascade of the lossy bosonic memory channel.

Every channel use mixes the signal mode ``a_k``, a local environment ``e_k``
and the memory mode ``m_k`` at two beam splitters (memory transmissivity
``epsilon``, signal transmissivity ``eta``).  The outgoing memory ``m_k'`` is
fed forward as ``m_{k+1}``.  All coefficients are real, so the whole channel
is captured by two real matrices: the receiver outputs expressed in the
sender inputs (``a_coeffs``) and in the environment inputs (``e_coeffs``).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Setup(str, Enum):
    """Who holds the initial (first letter) and final (second letter) memory."""

    EE = "EE"
    AB = "AB"
    AE = "AE"
    EB = "EB"

    @property
    def initial_to_sender(self) -> bool:
        return self.value[0] == "A"

    @property
    def final_to_receiver(self) -> bool:
        return self.value[1] == "B"


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class ChannelParams:
    epsilon: float
    eta: float
    n: int
    setup: Setup = Setup.EE

    def __post_init__(self):
        object.__setattr__(self, "epsilon", _check_unit("epsilon", self.epsilon))
        object.__setattr__(self, "eta", _check_unit("eta", self.eta))
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "setup", Setup(self.setup))


@dataclass(frozen=True)
class CascadeCoefficients:
    """Receiver outputs as real linear combinations of all input modes.

    Column order: for ``a_coeffs`` the sender modes ``(m_1,) a_1 .. a_n``
    (``m_1`` only when the sender owns the initial memory); for
    ``e_coeffs`` the environment modes ``(m_1,) e_1 .. e_n``.  Rows are
    ``b_1 .. b_n`` followed by ``m_n'`` when the receiver owns the final
    memory.
    """

    a_coeffs: np.ndarray
    e_coeffs: np.ndarray
    setup: Setup

    @property
    def full(self) -> np.ndarray:
        """Receiver rows of the passive mode map, sender columns first."""
        return np.hstack([self.a_coeffs, self.e_coeffs])


@dataclass(frozen=True)
class MemoryMatrix:
    entries: np.ndarray
    setup: Setup
    n: int

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("memory matrix must be square")
        if np.max(np.abs(m - m.T), initial=0.0) >= 1e-14:
            raise ValueError("memory matrix must be symmetric")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _validate(epsilon, eta, n=None):
    epsilon = _check_unit("epsilon", epsilon)
    eta = _check_unit("eta", eta)
    if n is not None and (int(n) != n or n < 1):
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return epsilon, eta


def eta_limit(epsilon: float, eta: float) -> float:
    """Asymptotic diagonal ``eta + eps (1-eta)^2 / (1 - eps eta)``.

    At ``epsilon = eta = 1`` the expression is 0/0; it is defined as 1 by
    continuity.
    """
    epsilon, eta = _validate(epsilon, eta)
    if epsilon * eta == 1.0:
        return 1.0
    return eta + epsilon * (1.0 - eta) ** 2 / (1.0 - epsilon * eta)


def eta_k_sequence(epsilon: float, eta: float, n: int) -> np.ndarray:
    """Diagonal ``[eta_1, ..., eta_n]`` of the EE memory matrix."""
    epsilon, eta = _validate(epsilon, eta, n)
    k = np.arange(1, n + 1)
    prod = epsilon * eta
    if prod == 1.0:
        return np.ones(n)
    # 0**0 == 1 in numpy, which keeps eta_1 == eta when prod == 0
    decay = prod ** (k - 1)
    return eta + (1.0 - decay) * epsilon * (1.0 - eta) ** 2 / (1.0 - prod)


def build_cascade(params: ChannelParams) -> CascadeCoefficients:
    """Propagate the memory mode through ``n`` uses of the two beam splitters."""
    eps, eta, n = params.epsilon, params.eta, params.n
    # global input ordering: m_1, a_1..a_n, e_1..e_n
    width = 2 * n + 1
    memory = np.zeros(width)
    memory[0] = 1.0

    c_mm = np.sqrt(eps * eta)
    c_ma = np.sqrt(1.0 - eta)
    c_me = np.sqrt(eta * (1.0 - eps))
    c_bm = -np.sqrt(eps * (1.0 - eta))
    c_ba = np.sqrt(eta)
    c_be = -np.sqrt((1.0 - eps) * (1.0 - eta))

    rows = np.zeros((n + 1, width))
    for k in range(n):
        a_col, e_col = 1 + k, 1 + n + k
        out = c_bm * memory
        out[a_col] += c_ba
        out[e_col] += c_be
        rows[k] = out
        memory = c_mm * memory
        memory[a_col] += c_ma
        memory[e_col] += c_me
    rows[n] = memory

    if not params.setup.final_to_receiver:
        rows = rows[:n]
    signal = list(range(1, n + 1))
    env = list(range(n + 1, width))
    if params.setup.initial_to_sender:
        signal = [0] + signal
    else:
        env = [0] + env
    return CascadeCoefficients(
        a_coeffs=rows[:, signal], e_coeffs=rows[:, env], setup=params.setup
    )


def memory_matrix_ee_formula(epsilon: float, eta: float, n: int) -> MemoryMatrix:
    """Closed-form EE memory matrix ``delta - (1 - eta_min) sqrt(eps eta)^|k-k'|``."""
    epsilon, eta = _validate(epsilon, eta, n)
    etas = eta_k_sequence(epsilon, eta, n)
    k = np.arange(n)
    lag = np.abs(k[:, None] - k[None, :])
    kmin = np.minimum(k[:, None], k[None, :])
    entries = np.eye(n) - (1.0 - etas[kmin]) * np.sqrt(epsilon * eta) ** lag
    return MemoryMatrix(entries=entries, setup=Setup.EE, n=n)


def memory_matrix(params: ChannelParams) -> MemoryMatrix:
    """Gram matrix ``A A^T`` of the cascade's sender coefficients."""
    a = build_cascade(params).a_coeffs
    gram = a @ a.T
    # exact symmetry; the product is symmetric only up to roundoff
    gram = 0.5 * (gram + gram.T)
    return MemoryMatrix(entries=gram, setup=params.setup, n=params.n)


def retention_amplitude_probability(epsilon: float, eta: float, n: int) -> float:
    """Probability ``(eps eta)^n`` that a photon entering at ``m_1`` leaves at ``m_n'``."""
    epsilon, eta = _validate(epsilon, eta, n)
    return (epsilon * eta) ** n
