"""Entropy functions and optimal photon-number allocation.

Two problems are solved, each over a finite list of transmissivities
(discrete) or over the spectral symbol (continuous):

* classical: maximize the mean of ``g(tau N_j)``;
* quantum: maximize the mean of ``q(tau, N_j)``.

Both under a mean photon number budget ``N``.  The optimum is characterized
by a common Lagrange multiplier ``L`` that is found by bracketing and
bisection, since the spent budget decreases strictly with ``L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError
from .spectral import TWO_PI, SpectralSymbol, szego_average

LN2 = math.log(2.0)


class _Infinite:
    """Marker for a rate that diverges; not a float and not usable in arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


def is_infinite(value) -> bool:
    return value is INFINITE


def g_function(x):
    """Thermal entropy in bits, ``(x+1) log2(x+1) - x log2(x)``, with ``g(0) = 0``."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("g is defined for x >= 0 only")
    with np.errstate(divide="ignore", invalid="ignore"):
        # log2(x+1) + x log2(1 + 1/x): no cancellation for large x
        out = np.log1p(arr) / LN2 + np.where(arr > 0, arr * np.log1p(1.0 / np.where(arr > 0, arr, 1.0)), 0.0) / LN2
    return float(out) if out.ndim == 0 else out


def coherent_info(tau, n_photons):
    """Maximal coherent information ``max(0, g(tau N) - g((1-tau) N))``."""
    tau = np.asarray(tau, dtype=float)
    n_photons = np.asarray(n_photons, dtype=float)
    diff = g_function(tau * n_photons) - g_function((1.0 - tau) * n_photons)
    out = np.where(tau > 0.5, np.maximum(diff, 0.0), 0.0)
    return float(out) if out.ndim == 0 else out


def coherent_info_unconstrained(tau: float):
    """``max(0, log2(tau / (1 - tau)))``; returns ``INFINITE`` at ``tau = 1``."""
    tau = float(tau)
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau!r}")
    if tau == 1.0:
        return INFINITE
    if tau <= 0.5:
        return 0.0
    return math.log2(tau) - math.log2(1.0 - tau)


def _q_unconstrained_array(tau):
    tau = np.asarray(tau, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.log2(tau) - np.log2(1.0 - tau)
    return np.where(tau > 0.5, val, 0.0)


# --- marginal rates -------------------------------------------------------

def classical_marginal(tau, n_photons):
    """``d g(tau N) / dN = tau log2(1 + 1/(tau N))``."""
    tau = np.asarray(tau, dtype=float)
    return tau * np.log1p(1.0 / (tau * np.asarray(n_photons, dtype=float))) / LN2


def quantum_marginal(tau, n_photons):
    """``d q(tau, N) / dN`` on the branch ``tau > 1/2``."""
    tau = np.asarray(tau, dtype=float)
    n_photons = np.asarray(n_photons, dtype=float)
    loss = 1.0 - tau
    with np.errstate(divide="ignore", invalid="ignore"):
        lost = np.where(loss > 0, loss * np.log1p(1.0 / (np.where(loss > 0, loss, 1.0) * n_photons)), 0.0)
    return (tau * np.log1p(1.0 / (tau * n_photons)) - lost) / LN2


def _classical_photons(tau, lagrange):
    """Invert the classical marginal: ``N = 1 / (tau (2^{L/tau} - 1))``, 0 where tau = 0."""
    tau = np.asarray(tau, dtype=float)
    pos = tau > 0
    safe = np.where(pos, tau, 1.0)
    with np.errstate(over="ignore"):
        denom = safe * np.expm1(lagrange * LN2 / safe)
    return np.where(pos, 1.0 / denom, 0.0)


_LOG_N_MIN, _LOG_N_MAX = math.log(1e-30), math.log(1e30)


def _quantum_photons(tau, lagrange, iterations: int = 64):
    """Solve ``quantum_marginal(tau, N) = L`` per mode; 0 for tau <= 1/2.

    The marginal is positive and strictly decreasing in N on the active
    branch, so a vectorized bisection in log N is safe.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.zeros_like(tau)
    active = tau > 0.5
    if not np.any(active):
        return out
    t = tau[active]
    lo = np.full(t.shape, _LOG_N_MIN)
    hi = np.full(t.shape, _LOG_N_MAX)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        above = quantum_marginal(t, np.exp(mid)) > lagrange
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    n = np.exp(0.5 * (lo + hi))
    # marginal already below L at the smallest bracket: photon number is 0 to working precision
    n = np.where(quantum_marginal(t, np.exp(_LOG_N_MIN)) <= lagrange, 0.0, n)
    out[active] = n
    return out


def solve_lagrange(spent: Callable[[float], float], budget: float, tol: float = 1e-10,
                   max_iter: int = 400) -> float:
    """Find ``L > 0`` with ``spent(L) = budget`` for strictly decreasing ``spent``.

    Stops when the budget residual is below ``tol * max(1, budget)`` and the
    bracket is relatively narrower than 1e-10, or when the bracket cannot
    shrink further.
    """
    target = tol * max(1.0, budget)
    last = 1.0
    value = spent(last)
    factor = 2.0 if value > budget else 0.5
    for _ in range(2000):
        if value == budget:
            return last
        prev, last = last, last * factor
        value = spent(last)
        if (value < budget) == (factor == 2.0):
            break
    else:
        raise ConvergenceError("could not bracket the Lagrange multiplier")
    if value == budget:
        return last
    lo, hi = min(prev, last), max(prev, last)
    # spent(lo) >= budget >= spent(hi)
    best, best_res = None, math.inf
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        if not lo < mid < hi:
            break
        value = spent(mid)
        res = abs(value - budget)
        if res < best_res:
            best, best_res = mid, res
        if value > budget:
            lo = mid
        else:
            hi = mid
        if best_res <= target and hi / lo - 1.0 < 1e-10:
            return best
        if hi / lo - 1.0 < 1e-15:
            break
    if best_res <= target:
        return best
    raise ConvergenceError(
        f"Lagrange bisection stalled: bracket [{lo:.17g}, {hi:.17g}], budget residual {best_res:.3g}"
    )


# --- allocations ------------------------------------------------------------

@dataclass
class PhotonAllocation:
    """Optimal photon numbers together with the multiplier that produced them.

    ``values`` is an array of per-mode photon numbers (discrete) or a
    callable ``z -> N(z)`` (continuous).
    """

    kind: str
    problem: str
    values: np.ndarray | Callable
    lagrange: float | None
    budget: float
    taus: np.ndarray | None = None
    symbol: SpectralSymbol | None = None
    breakpoints: tuple = field(default_factory=tuple)

    def photons_at(self, tau):
        """Photon number as a function of transmissivity (continuous allocations)."""
        if self.lagrange is None:
            return np.zeros_like(np.asarray(tau, dtype=float))
        if self.problem == "classical":
            return _classical_photons(tau, self.lagrange)
        shape = np.shape(tau)
        return _quantum_photons(np.ravel(tau), self.lagrange).reshape(shape)

    def rate(self, tau, n_photons):
        if self.problem == "classical":
            return g_function(np.asarray(tau) * n_photons)
        return coherent_info(tau, n_photons)

    def objective(self, tol: float = 1e-9) -> float:
        """Mean rate achieved by this allocation."""
        if self.kind == "discrete":
            return float(np.mean(self.rate(self.taus, self.values)))
        sym = self.symbol
        return szego_average(lambda t: self.rate(t, self.photons_at(t)), sym.epsilon, sym.eta,
                             tol=tol, breakpoints=self.breakpoints)

    def mean_photons(self, tol: float = 1e-9) -> float:
        if self.kind == "discrete":
            return float(np.mean(self.values))
        sym = self.symbol
        return szego_average(self.photons_at, sym.epsilon, sym.eta, tol=tol,
                             breakpoints=self.breakpoints)


def _check_taus(taus):
    taus = np.asarray(taus, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("taus must be a non-empty 1-D sequence")
    if np.any(taus < 0) or np.any(taus > 1):
        raise ValueError("taus must lie in [0, 1]")
    return taus


def _check_budget(n_photons):
    n_photons = float(n_photons)
    if not n_photons > 0 or not math.isfinite(n_photons):
        raise ValueError(f"photon budget must be positive and finite, got {n_photons!r}")
    return n_photons


def classical_allocation_discrete(taus, n_photons: float, tol: float = 1e-10) -> PhotonAllocation:
    taus = _check_taus(taus)
    n_photons = _check_budget(n_photons)
    if not np.any(taus > 0):
        raise ValueError("all transmissivities are zero; the allocation is undefined")
    lagrange = solve_lagrange(lambda lam: float(np.mean(_classical_photons(taus, lam))), n_photons, tol)
    return PhotonAllocation("discrete", "classical", _classical_photons(taus, lagrange),
                            lagrange, n_photons, taus=taus)


def quantum_allocation_discrete(taus, n_photons: float, tol: float = 1e-10) -> PhotonAllocation:
    taus = _check_taus(taus)
    n_photons = _check_budget(n_photons)
    if not np.any(taus > 0.5):
        return PhotonAllocation("discrete", "quantum", np.zeros_like(taus), None, n_photons, taus=taus)
    lagrange = solve_lagrange(lambda lam: float(np.mean(_quantum_photons(taus, lam))), n_photons, tol)
    return PhotonAllocation("discrete", "quantum", _quantum_photons(taus, lagrange),
                            lagrange, n_photons, taus=taus)


def _continuous(problem, symbol, n_photons, tol, quad_tol, breakpoints):
    photons = _classical_photons if problem == "classical" else _quantum_photons

    def spent(lam):
        return szego_average(lambda t: photons(t, lam), symbol.epsilon, symbol.eta,
                             tol=quad_tol, breakpoints=breakpoints)

    lagrange = solve_lagrange(spent, n_photons, tol)
    alloc = PhotonAllocation("continuous", problem, None, lagrange, n_photons,
                             symbol=symbol, breakpoints=breakpoints)
    alloc.values = lambda z: alloc.photons_at(symbol(z))
    return alloc


def classical_allocation_continuous(symbol: SpectralSymbol, n_photons: float, tol: float = 1e-10,
                                    quad_tol: float = 1e-11) -> PhotonAllocation:
    """Photon density ``N(z) = 1 / (tau(z) (2^{L/tau(z)} - 1))`` meeting the budget."""
    n_photons = _check_budget(n_photons)
    if symbol.endpoints[1] == 0.0:
        raise ValueError("symbol vanishes identically; the allocation is undefined")
    return _continuous("classical", symbol, n_photons, tol, quad_tol, ())


def quantum_allocation_continuous(symbol: SpectralSymbol, n_photons: float, tol: float = 1e-10,
                                  quad_tol: float = 1e-11) -> PhotonAllocation:
    """Quantum photon density, zero wherever ``tau(z) <= 1/2``."""
    n_photons = _check_budget(n_photons)
    if symbol.endpoints[1] <= 0.5:
        return PhotonAllocation("continuous", "quantum", lambda z: np.zeros_like(np.asarray(z, float)),
                                None, n_photons, symbol=symbol)
    return _continuous("quantum", symbol, n_photons, tol, quad_tol, (0.5,))


__all__ = [
    "INFINITE", "is_infinite", "g_function", "coherent_info", "coherent_info_unconstrained",
    "classical_marginal", "quantum_marginal", "solve_lagrange", "PhotonAllocation",
    "classical_allocation_discrete", "classical_allocation_continuous",
    "quantum_allocation_discrete", "quantum_allocation_continuous", "TWO_PI",
]
