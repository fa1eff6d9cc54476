"""Toeplitz symbol of the memory matrices and finite-n eigendecomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import quadrature
from .errors import ConvergenceError
from .model import MemoryMatrix, Setup, _validate

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SpectralSymbol:
    """The nondecreasing map ``z -> tau(z)`` on ``[0, 2 pi]``."""

    epsilon: float
    eta: float

    def __post_init__(self):
        _validate(self.epsilon, self.eta)

    def __call__(self, z):
        return symbol_tau(self.epsilon, self.eta, z)

    @property
    def endpoints(self) -> tuple[float, float]:
        return spectrum_endpoints(self.epsilon, self.eta)

    @property
    def is_flat(self) -> bool:
        lo, hi = self.endpoints
        return lo == hi

    def crossing(self, level: float) -> float | None:
        """Smallest ``z`` with ``tau(z) = level``, or None if ``level`` is not in the open range."""
        lo, hi = self.endpoints
        if not lo < level < hi:
            return None
        return brentq(lambda z: float(self(z)) - level, 0.0, TWO_PI, xtol=1e-15, rtol=1e-15)


@dataclass(frozen=True)
class EffectiveTransmissivities:
    taus: np.ndarray
    diagonalizer: np.ndarray
    setup: Setup
    n: int


def symbol_tau(epsilon: float, eta: float, z):
    r"""Asymptotic effective transmissivity.

    .. math::
        \tau(z) = \frac{\epsilon + \eta - 2\sqrt{\epsilon\eta}\cos(z/2)}
                       {1 + \epsilon\eta - 2\sqrt{\epsilon\eta}\cos(z/2)}

    The only 0/0 point, ``epsilon = eta = 1`` at ``z = 0``, evaluates to 1.
    Scalar input gives a float, array input an array.
    """
    epsilon, eta = _validate(epsilon, eta)
    z_arr = np.asarray(z, dtype=float)
    s = np.sqrt(epsilon * eta)
    # 1 - cos(z/2) = 2 sin^2(z/4) avoids cancellation near z = 0 when s -> 1
    bump = 4.0 * s * np.sin(0.25 * z_arr) ** 2
    num = (epsilon + eta - 2.0 * s) + bump
    den = (1.0 + epsilon * eta - 2.0 * s) + bump
    with np.errstate(invalid="ignore", divide="ignore"):
        tau = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 1.0)
    tau = np.clip(tau, 0.0, 1.0)
    return float(tau) if tau.ndim == 0 else tau


def symbol_tau_modulus(epsilon: float, eta: float, z):
    """Same symbol written as ``|(sqrt(eps) - sqrt(eta) e^{iz/2}) / (1 - sqrt(eps eta) e^{iz/2})|^2``."""
    epsilon, eta = _validate(epsilon, eta)
    phase = np.exp(0.5j * np.asarray(z, dtype=float))
    ratio = (np.sqrt(epsilon) - np.sqrt(eta) * phase) / (1.0 - np.sqrt(epsilon * eta) * phase)
    return np.abs(ratio) ** 2


def spectrum_endpoints(epsilon: float, eta: float) -> tuple[float, float]:
    """``(tau(0), tau(2 pi))``, the infimum and supremum of the symbol."""
    epsilon, eta = _validate(epsilon, eta)
    s = np.sqrt(epsilon * eta)
    if s == 1.0:
        return 1.0, 1.0
    lo = (np.sqrt(epsilon) - np.sqrt(eta)) ** 2 / (1.0 - s) ** 2
    hi = (np.sqrt(epsilon) + np.sqrt(eta)) ** 2 / (1.0 + s) ** 2
    return float(min(lo, 1.0)), float(min(hi, 1.0))


def diagonalize(m: MemoryMatrix | np.ndarray) -> EffectiveTransmissivities:
    """Eigendecomposition ``O M O^T = diag(taus)`` with taus nondecreasing.

    Rows of the returned ``diagonalizer`` are the eigenvectors.  Eigenvalues
    within 1e-12 of ``[0, 1]`` are clamped onto it.
    """
    if isinstance(m, MemoryMatrix):
        entries, setup, n = m.entries, m.setup, m.n
    else:
        entries = np.asarray(m, dtype=float)
        setup, n = None, entries.shape[0]
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("matrix must be square")
        if np.max(np.abs(entries - entries.T), initial=0.0) >= 1e-14:
            raise ValueError("matrix must be symmetric")
    w, v = np.linalg.eigh(entries)
    order = np.argsort(w, kind="stable")
    w, v = w[order], v[:, order]
    if w.size and (w[0] < -1e-12 or w[-1] > 1.0 + 1e-12):
        raise ValueError(f"eigenvalues leave [0, 1]: [{w[0]:.3g}, {w[-1]:.3g}]")
    return EffectiveTransmissivities(
        taus=np.clip(w, 0.0, 1.0), diagonalizer=v.T.copy(), setup=setup, n=n
    )


def szego_average(f, epsilon: float, eta: float, tol: float = 1e-9,
                  breakpoints=(), max_panels: int = 20000) -> float:
    """``(1/2pi) * integral over [0, 2pi] of f(tau(z))``.

    ``f`` must accept numpy arrays.  Known kinks of ``f`` can be passed as
    levels of tau via ``breakpoints``; the matching z values are found by
    root finding and used as panel edges.
    """
    symbol = SpectralSymbol(epsilon, eta)
    edges = [z for z in (symbol.crossing(t) for t in breakpoints) if z is not None]
    value, err = quadrature.integrate(
        lambda z: f(symbol(z)), 0.0, TWO_PI, tol=tol * TWO_PI,
        breakpoints=edges, max_panels=max_panels,
    )
    if err > tol * TWO_PI:
        raise ConvergenceError(f"Szego average error estimate {err / TWO_PI:.3g} exceeds tol={tol:g}")
    return value / TWO_PI


def quantile_samples(epsilon: float, eta: float, size: int) -> np.ndarray:
    """``tau(2 pi k / size)`` for ``k = 1 .. size``, paired with the k-th smallest eigenvalue."""
    k = np.arange(1, size + 1)
    return symbol_tau(epsilon, eta, TWO_PI * k / size)


def quantile_deviation(taus, epsilon: float, eta: float) -> tuple[float, np.ndarray]:
    """Largest gap between the sorted spectrum and the symbol's quantiles.

    Eigenvalues outside ``[tau(0), tau(2 pi)]`` (the unit-efficiency and
    dark edge modes that appear when the receiver owns the final memory) are
    split off first; the remaining bulk is compared against
    ``quantile_samples`` of its own size.  Returns ``(max_deviation, outliers)``.
    """
    taus = np.sort(np.asarray(taus, dtype=float))
    lo, hi = spectrum_endpoints(epsilon, eta)
    outside = (taus < lo - 1e-12) | (taus > hi + 1e-12)
    bulk = taus[~outside]
    if bulk.size == 0:
        return 0.0, taus[outside]
    dev = np.abs(bulk - quantile_samples(epsilon, eta, bulk.size))
    return float(dev.max()), taus[outside]
