"""Two-point scaling functions: the gas-to-polymer transform and the D=1 pair."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

FOUR_PI2 = 4.0 * math.pi**2


@dataclass(frozen=True)
class ScalingFunction:
    func: Callable[[float], float]
    derivative: Callable[[float], float] | None = None
    D: int | None = None
    eta: float | None = None

    def __call__(self, x: float) -> float:
        return self.func(x)

    def __add__(self, other: "ScalingFunction") -> "ScalingFunction":
        return self.combine(1.0, other, 1.0)

    def combine(self, a: float, other: "ScalingFunction", b: float) -> "ScalingFunction":
        """Pointwise ``a*self + b*other``; the derivative survives only if both have one."""
        deriv = None
        if self.derivative is not None and other.derivative is not None:
            d1, d2 = self.derivative, other.derivative
            deriv = lambda x: a * d1(x) + b * d2(x)
        f1, f2 = self.func, other.func
        return ScalingFunction(lambda x: a * f1(x) + b * f2(x), deriv, self.D, self.eta)


def _check_domain(x: float):
    if not x > 0:
        raise ValueError(f"scaling functions are defined for x > 0, got {x}")


def k_hc_d1(x: float) -> float:
    _check_domain(x)
    return -4.0 / x**2 * math.exp(-x)


def k_hc_d1_prime(x: float) -> float:
    _check_domain(x)
    return 4.0 * math.exp(-x) * (2.0 / x**3 + 1.0 / x**2)


def k_bp_d3(x: float) -> float:
    """Closed-form three-dimensional polymer scaling function ``e^{-x}/(pi^2 x)``."""
    _check_domain(x)
    return math.exp(-x) / (math.pi**2 * x)


K_HC_D1 = ScalingFunction(k_hc_d1, k_hc_d1_prime, D=1, eta=-1.0)


def fd_derivative(f: Callable[[float], float], x: float, rel_step: float = 1e-5) -> float:
    """Five-point central difference with one Richardson step; ``h`` scales with ``x``."""
    h = x * rel_step

    def stencil(h):
        return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)

    d1 = stencil(h)
    d2 = stencil(2 * h)
    return (16.0 * d1 - d2) / 15.0


def k_transform(K: ScalingFunction, D: float, eta: float, x: float, mode: str = "analytic") -> float:
    """``(x K'(x) - (D - 2 + eta) K(x)) / (4 pi^2)``."""
    _check_domain(x)
    if mode == "analytic":
        if K.derivative is None:
            raise ValueError("analytic mode needs K.derivative")
        dk = K.derivative(x)
    elif mode == "fd":
        dk = fd_derivative(K.func, x)
    else:
        raise ValueError(f"unknown derivative mode {mode!r}")
    return (x * dk - (D - 2 + eta) * K.func(x)) / FOUR_PI2


def miller_check(grid: Sequence[float], modes=("analytic", "fd")) -> dict:
    """Sup-norm distance between the transformed D=1 gas function and the closed form."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or grid.min() < 0.1 or grid.max() > 10.0:
        raise ValueError("grid must lie in [0.1, 10]")
    out = {"grid_points": int(grid.size)}
    for mode in modes:
        errs = [abs(k_transform(K_HC_D1, 1, -1, x, mode) - k_bp_d3(x)) for x in grid]
        i = int(np.argmax(errs))
        out[mode] = {"sup_error": float(errs[i]), "argmax": float(grid[i])}
    return out
