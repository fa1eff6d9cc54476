"""Classical and quantum capacities of the memory channel in the large-n limit."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import partial

import numpy as np

from .allocation import (
    INFINITE,
    _q_unconstrained_array,
    classical_allocation_continuous,
    classical_allocation_discrete,
    coherent_info,
    g_function,
    is_infinite,
    quantum_allocation_continuous,
)
from .model import _validate
from .spectral import TWO_PI, SpectralSymbol, szego_average


class Kind(str, Enum):
    CLASSICAL = "classical"
    QUANTUM_CONSTRAINED = "quantum_constrained"
    QUANTUM_UNCONSTRAINED = "quantum_unconstrained"
    BOUND_LOWER = "bound_lower"
    BOUND_UPPER = "bound_upper"


@dataclass(frozen=True)
class CapacityResult:
    """Rate in bits per channel use, or ``INFINITE``."""

    value: float | object
    lagrange: float | None
    kind: Kind
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not is_infinite(self.value):
            v = float(self.value)
            if not math.isfinite(v):
                raise ValueError("use the INFINITE sentinel for divergent rates")
            if v < 0:
                # roundoff in a quadrature of a nonnegative integrand
                if v < -1e-12:
                    raise ValueError(f"capacity must be nonnegative, got {v!r}")
                v = 0.0
            object.__setattr__(self, "value", v)

    @property
    def infinite(self) -> bool:
        return is_infinite(self.value)


def _check_photons(n_photons):
    n_photons = float(n_photons)
    if not n_photons > 0 or not math.isfinite(n_photons):
        raise ValueError(f"mean photon number must be positive, got {n_photons!r}")
    return n_photons


def classical_capacity(epsilon: float, eta: float, n_photons: float, tol: float = 1e-9,
                       lagrange_tol: float = 1e-10) -> CapacityResult:
    """Integral of ``g(tau(z) N(z))`` under the optimal photon density."""
    epsilon, eta = _validate(epsilon, eta)
    n_photons = _check_photons(n_photons)
    meta = {"epsilon": epsilon, "eta": eta, "N": n_photons, "tol": tol}
    symbol = SpectralSymbol(epsilon, eta)
    if symbol.endpoints[1] == 0.0:
        # every mode is fully lossy; any allocation carries nothing
        return CapacityResult(0.0, None, Kind.CLASSICAL, meta)
    alloc = classical_allocation_continuous(symbol, n_photons, tol=lagrange_tol, quad_tol=0.01 * tol)
    value = szego_average(lambda t: g_function(t * alloc.photons_at(t)), epsilon, eta, tol=tol)
    return CapacityResult(value, alloc.lagrange, Kind.CLASSICAL, meta)


def block_transmissivities(epsilon: float, eta: float, blocks: int):
    """Symbol values at the lower and upper edge of each of ``blocks`` equal blocks."""
    if int(blocks) != blocks or blocks < 1:
        raise ValueError(f"J must be a positive integer, got {blocks!r}")
    j = np.arange(1, int(blocks) + 1)
    symbol = SpectralSymbol(epsilon, eta)
    return symbol(TWO_PI * (j - 1) / blocks), symbol(TWO_PI * j / blocks)


def _discrete_classical(taus, n_photons, lagrange_tol):
    if not np.any(taus > 0):
        return 0.0, None
    alloc = classical_allocation_discrete(taus, n_photons, tol=lagrange_tol)
    return alloc.objective(), alloc.lagrange


def classical_capacity_bounds(epsilon: float, eta: float, n_photons: float, blocks: int,
                              tol: float = 1e-9, lagrange_tol: float = 1e-10):
    """Block lower and upper bounds on the classical capacity, as ``(lower, upper)``."""
    epsilon, eta = _validate(epsilon, eta)
    n_photons = _check_photons(n_photons)
    lower_taus, upper_taus = block_transmissivities(epsilon, eta, blocks)
    meta = {"epsilon": epsilon, "eta": eta, "N": n_photons, "J": int(blocks), "tol": tol}
    results = []
    for taus, kind in ((lower_taus, Kind.BOUND_LOWER), (upper_taus, Kind.BOUND_UPPER)):
        value, lagrange = _discrete_classical(taus, n_photons, lagrange_tol)
        results.append(CapacityResult(value, lagrange, kind, meta))
    return tuple(results)


def discrete_classical_capacity(taus, n_photons: float, lagrange_tol: float = 1e-10) -> float:
    """Classical rate of the product of lossy channels with the given transmissivities."""
    return _discrete_classical(np.asarray(taus, dtype=float), _check_photons(n_photons), lagrange_tol)[0]


def quantum_capacity(epsilon: float, eta: float, n_photons: float, tol: float = 1e-9,
                     lagrange_tol: float = 1e-10) -> CapacityResult:
    """Integral of the coherent information under the optimal quantum photon density."""
    epsilon, eta = _validate(epsilon, eta)
    n_photons = _check_photons(n_photons)
    meta = {"epsilon": epsilon, "eta": eta, "N": n_photons, "tol": tol}
    symbol = SpectralSymbol(epsilon, eta)
    alloc = quantum_allocation_continuous(symbol, n_photons, tol=lagrange_tol, quad_tol=0.01 * tol)
    if alloc.lagrange is None:
        return CapacityResult(0.0, None, Kind.QUANTUM_CONSTRAINED, meta)
    value = szego_average(lambda t: coherent_info(t, alloc.photons_at(t)), epsilon, eta,
                          tol=tol, breakpoints=(0.5,))
    return CapacityResult(value, alloc.lagrange, Kind.QUANTUM_CONSTRAINED, meta)


def quantum_capacity_unconstrained(epsilon: float, eta: float, tol: float = 1e-9) -> CapacityResult:
    """Integral of ``max(0, log2(tau / (1 - tau)))``; ``INFINITE`` when ``eps = 1`` or ``eta = 1``."""
    epsilon, eta = _validate(epsilon, eta)
    meta = {"epsilon": epsilon, "eta": eta, "tol": tol}
    if epsilon == 1.0 or eta == 1.0:
        return CapacityResult(INFINITE, None, Kind.QUANTUM_UNCONSTRAINED, meta)
    value = szego_average(_q_unconstrained_array, epsilon, eta, tol=tol, breakpoints=(0.5,))
    return CapacityResult(value, None, Kind.QUANTUM_UNCONSTRAINED, meta)


# --- parameter sweeps -------------------------------------------------------

@dataclass(frozen=True)
class GridPoint:
    epsilon: float
    eta: float
    result: CapacityResult | None
    error: str | None = None


def _one_point(which, n_photons, tol, point):
    eps, eta = point
    try:
        if which == "classical":
            res = classical_capacity(eps, eta, n_photons, tol=tol)
        elif which == "quantum":
            res = quantum_capacity(eps, eta, n_photons, tol=tol)
        else:
            res = quantum_capacity_unconstrained(eps, eta, tol=tol)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        return GridPoint(eps, eta, None, f"{type(exc).__name__}: {exc}")
    return GridPoint(eps, eta, res)


WHICH = ("classical", "quantum", "quantum-unconstrained")


def capacity_grid(epsilons, etas, which: str = "classical", n_photons: float = 8.0,
                  tol: float = 1e-9, workers: int | None = None) -> list[GridPoint]:
    """Evaluate one capacity on every ``(epsilon, eta)`` pair, epsilon-major order.

    Failures are captured per point.  With ``workers > 1`` points are fanned
    out to a process pool; the returned order never depends on completion.
    """
    if which not in WHICH:
        raise ValueError(f"which must be one of {WHICH}, got {which!r}")
    if which != "quantum-unconstrained":
        n_photons = _check_photons(n_photons)
    points = [(float(e), float(h)) for e in epsilons for h in etas]
    task = partial(_one_point, which, n_photons, tol)
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(task, points, chunksize=8))
    return [task(p) for p in points]
