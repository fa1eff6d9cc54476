import math

import numpy as np
import pytest

from lossymem.errors import ConvergenceError
from lossymem.quadrature import integrate


@pytest.mark.parametrize("f,a,b,exact", [
    (np.exp, 0.0, 1.0, math.e - 1.0),
    (np.cos, 0.0, 2 * np.pi, 0.0),
    (lambda x: 1.0 / (1.0 + 1e4 * x ** 2), -1.0, 1.0, 2 * math.atan(100.0) / 100.0),
    (lambda x: np.sqrt(np.abs(x - 0.3)), 0.0, 1.0, (0.3 ** 1.5 + 0.7 ** 1.5) * 2 / 3),
])
def test_known_integrals(f, a, b, exact):
    value, err = integrate(f, a, b, tol=1e-10)
    assert value == pytest.approx(exact, abs=1e-10)
    assert err <= 1e-10


def test_breakpoint_at_kink():
    f = lambda x: np.maximum(0.0, x - 1.0 / 3.0)
    plain, _ = integrate(f, 0.0, 1.0, tol=1e-12)
    split, _ = integrate(f, 0.0, 1.0, tol=1e-12, breakpoints=[1.0 / 3.0])
    exact = (2.0 / 3.0) ** 2 / 2
    assert split == pytest.approx(exact, abs=1e-15)
    assert plain == pytest.approx(exact, abs=1e-12)


def test_budget_exhaustion_reported():
    with pytest.raises(ConvergenceError):
        integrate(lambda x: np.sin(1.0 / np.maximum(x, 1e-300)), 0.0, 1.0, tol=1e-14, max_panels=200)


def test_rejects_bad_tol():
    with pytest.raises(ValueError):
        integrate(np.exp, 0.0, 1.0, tol=0.0)
