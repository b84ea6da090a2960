"""Zero-dimensional Yukawa integral and the Airy crossover to mean-field polymers.

With ``t = (z_c - z)/z_c`` and ``z_c = 1/e`` the integrand, after the shift
``phi = psi - i``, is ``exp(-S/v)`` with

    S = (1 - t) e^{i psi} + psi^2/2 - i psi - 1/2
      = 1/2 - t - i t psi - i psi^3/6 + O(t psi^2, psi^4).

The constant ``(t - 1/2)/v`` is split off analytically (its t-derivative is the
nonsingular part of G); the remaining "reduced" integral is evaluated on a
contour bent at a point of the imaginary axis into rays at angles pi/6 and
5 pi/6, where the cubic term decays.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .hardcore_exact import tree_function

Z_C = math.exp(-1.0)
AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)
AIRY_RANGE = 15.0
# Maclaurin series on [-7, 6], asymptotic expansions outside. On the oscillatory side
# the optimally truncated expansion is only good to ~2e-10 at |s| = 6, so the
# series (still accurate to ~1e-11 there) is kept one unit further.
SERIES_LEFT, SERIES_RIGHT = -7.0, 6.0
B0_THEORY = math.e
B1_THEORY = 2.0 ** (1.0 / 3.0)


# -- Airy function -----------------------------------------------------------

def _airy_series(x: float) -> tuple[float, float]:
    # Ai = c1 f - c2 g with f = sum 3^k (1/3)_k x^{3k}/(3k)!, g = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!
    x3 = x * x * x
    f = t = 1.0
    g = u = x
    fp = p = 0.5 * x * x
    gp = q = 1.0
    for k in range(1, 200):
        t *= x3 / ((3 * k - 1) * (3 * k))
        u *= x3 / ((3 * k) * (3 * k + 1))
        q *= x3 / ((3 * k) * (3 * k - 2))
        f += t
        g += u
        gp += q
        if k >= 2:
            p *= x3 / ((3 * k - 1) * (3 * k - 3))
            fp += p
        if max(abs(t), abs(u), abs(p), abs(q)) < 1e-18 * max(1.0, abs(f), abs(g)):
            break
    return AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp


def _asym_coeffs(kmax: int) -> tuple[list[float], list[float]]:
    u = [1.0]
    for k in range(1, kmax + 1):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, kmax + 1)]
    return u, v


_U, _V = _asym_coeffs(60)


def _truncated(coeffs, zeta: float, parity: int | None = None) -> float:
    """Asymptotic sum stopped before its terms start growing.

    ``parity=None`` gives ``sum (-1)^k c_k zeta^-k``; ``parity=0/1`` gives the even
    or odd subseries with signs ``(-1)^{floor(k/2)}``.
    """
    total = 0.0
    prev = math.inf
    zk = 1.0
    for k, c in enumerate(coeffs):
        if k:
            zk *= zeta
        if parity is not None and k % 2 != parity:
            continue
        term = c / zk
        if abs(term) > prev or abs(term) < 1e-17 * abs(total):
            break
        sign = (-1.0) ** k if parity is None else (-1.0) ** (k // 2)
        total += sign * term
        prev = abs(term)
    return total


def _airy_asym(x: float) -> tuple[float, float]:
    if x > 0:
        zeta = 2.0 / 3.0 * x**1.5
        e = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
        return e / x**0.25 * _truncated(_U, zeta), -e * x**0.25 * _truncated(_V, zeta)
    y = -x
    zeta = 2.0 / 3.0 * y**1.5
    s, c = math.sin(zeta + math.pi / 4), math.cos(zeta + math.pi / 4)
    pu, qu = _truncated(_U, zeta, 0), _truncated(_U, zeta, 1)
    pv, qv = _truncated(_V, zeta, 0), _truncated(_V, zeta, 1)
    ai = (s * pu - c * qu) / (math.sqrt(math.pi) * y**0.25)
    aip = -(y**0.25) * (c * pv + s * qv) / math.sqrt(math.pi)
    return ai, aip


def airy_pair(s: float) -> tuple[float, float]:
    """``(Ai(s), Ai'(s))`` on ``[-15, 15]``."""
    s = float(s)
    if not abs(s) <= AIRY_RANGE:
        raise ValueError(f"Airy evaluation implemented on [-{AIRY_RANGE:g}, {AIRY_RANGE:g}], got {s}")
    if SERIES_LEFT <= s <= SERIES_RIGHT:
        return _airy_series(s)
    return _airy_asym(s)


def airy(s: float) -> float:
    return airy_pair(s)[0]


def airy_prime(s: float) -> float:
    return airy_pair(s)[1]


def airy_log_derivative(x: float) -> float:
    """``Ai'(x)/Ai(x)``; past the series range taken from the asymptotic ratio (no underflow)."""
    if x > SERIES_RIGHT:
        zeta = 2.0 / 3.0 * x**1.5
        return -math.sqrt(x) * _truncated(_V, zeta) / _truncated(_U, zeta)
    ai, aip = airy_pair(x)
    if ai == 0:
        raise ZeroDivisionError("Ai vanishes here")
    return aip / ai


def airy_integral(s: float, panels: int = 48, nodes: int = 24) -> float:
    """Ai(s) from ``(1/2pi) int e^{i(s p + p^3/3)} dp`` rotated onto the rays arg p = pi/6, 5pi/6.

    Each ray integrand is entire and decays like ``exp(-r^3/3)``, so composite
    Gauss-Legendre on equal panels converges geometrically.
    """
    # |integrand| <= exp(|s| r/2 - r^3/3): beyond this radius it is below e^-40
    rmax = 6.0 + math.sqrt(2.0 * abs(s))
    r, wr = _ray_nodes(np.linspace(0.0, rmax, panels + 1), nodes)
    out = 0.0
    for ang, sgn in ((math.pi / 6, 1.0), (5 * math.pi / 6, -1.0)):
        w = cmath.exp(1j * ang)
        out += sgn * float(np.sum(wr * (np.exp(1j * s * r * w - r**3 / 3.0) * w).real))
    return out / (2.0 * math.pi)


def bisect_zero(fn, lo: float, hi: float, tol: float = 1e-13) -> float:
    flo = fn(lo)
    if flo * fn(hi) > 0:
        raise ValueError("no sign change in bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def first_airy_zero(method: str = "series") -> float:
    """First negative zero of Ai by bisection, from the series or from the integral."""
    if method == "series":
        return bisect_zero(airy, -3.0, -2.0, 1e-14)
    if method == "integral":
        return bisect_zero(airy_integral, -3.0, -2.0, 1e-11)
    raise ValueError(f"unknown method {method!r}")


A1_ZERO = first_airy_zero()


# -- contour integral --------------------------------------------------------

@dataclass(frozen=True)
class ContourSpec:
    kink: float                  # kink at psi = i*kink
    angles: tuple[float, float] = (math.pi / 6, 5 * math.pi / 6)
    nodes: int = 24              # Gauss-Legendre points per panel
    radius: float = 0.0          # truncation radius along each ray

    @classmethod
    def default(cls, t: complex, v: float, nodes: int = 24) -> "ContourSpec":
        """Kink at the real saddle ``psi = i(1 - T(z))`` when ``z <= 1/e``, else at the origin."""
        tr = complex(t).real
        kink = 0.0
        if tr > 0:
            kink = 1.0 - tree_function(Z_C * (1.0 - min(tr, 1.0))).T
        return cls(kink=kink, nodes=nodes, radius=12.0 * v ** (1.0 / 3.0) + 6.0)


@dataclass(frozen=True)
class CrossoverPoint:
    v: float
    t: float

    def __post_init__(self):
        if not self.v > 0:
            raise ValueError("v must be positive")

    @property
    def z(self) -> float:
        return Z_C * (1.0 - self.t)

    @property
    def s(self) -> float:
        return self.t * self.v ** (-2.0 / 3.0)

    @classmethod
    def from_s(cls, s: float, v: float) -> "CrossoverPoint":
        return cls(v, s * v ** (2.0 / 3.0))


class ContourError(RuntimeError):
    pass


def _reduced_exponent(psi: np.ndarray, t: complex, v: float) -> np.ndarray:
    """``-(S - 1/2 + t)/v`` with ``S - 1/2 + t = (1 - t)(e^{ip} - 1 - ip) + p^2/2 - i t p``.

    ``e^{ip} - 1 - ip`` is summed as a series near 0 so no O(1) cancellation survives.
    """
    ip = 1j * psi
    small = np.abs(psi) < 1e-2
    e1 = np.expm1(ip) - ip
    if np.any(small):
        x = ip[small]
        e1[small] = x * x * (0.5 + x * (1 / 6 + x * (1 / 24 + x * (1 / 120 + x * (1 / 720 + x / 5040)))))
    S = (1.0 - t) * e1 + 0.5 * psi * psi - t * ip
    return -S / v


def _panels(scale: float, radius: float, halvings: int) -> np.ndarray:
    # geometric panels out to a few widths of the peak, then growing ones to the radius
    edges = [0.0]
    h = scale / 8.0
    while edges[-1] + h < radius and h < 4.0 * scale:
        edges.append(edges[-1] + h)
        h *= 2.0
    step = 4.0 * scale
    while edges[-1] < radius:
        edges.append(min(radius, edges[-1] + step))
        step *= 1.5
    edges = np.array(edges)
    for _ in range(halvings):
        mids = 0.5 * (edges[:-1] + edges[1:])
        edges = np.sort(np.concatenate([edges, mids]))
    return edges


_LEGENDRE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _ray_nodes(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _LEGENDRE:
        _LEGENDRE[n] = np.polynomial.legendre.leggauss(n)
    x, w = _LEGENDRE[n]
    a, b = edges[:-1, None], edges[1:, None]
    r = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    wr = 0.5 * (b - a) * w[None, :]
    return r.ravel(), wr.ravel()


def _peak_width(spec: ContourSpec, v: float) -> float:
    # cubic width v^{1/3} at the branch point, Gaussian width sqrt(v/kink) at a real saddle
    w = v ** (1.0 / 3.0)
    if spec.kink > 0:
        w = min(w, math.sqrt(v / spec.kink))
    return max(w, math.sqrt(v))


def _contour_sum(t: complex, v: float, spec: ContourSpec, halvings: int):
    """``(m, J, A)``: reduced integral ``e^m J`` and ``e^m A = int |e^E| |dpsi|``."""
    edges = _panels(_peak_width(spec, v), spec.radius, halvings)
    r, wr = _ray_nodes(edges, spec.nodes)
    kink = 1j * spec.kink
    e_right = cmath.exp(1j * spec.angles[0])
    e_left = cmath.exp(1j * spec.angles[1])
    E_right = _reduced_exponent(kink + r * e_right, t, v)
    E_left = _reduced_exponent(kink + r * e_left, t, v)
    m = float(max(E_right.real.max(), E_left.real.max()))
    tail = max(E_right.real[-1], E_left.real[-1]) - m
    if tail > math.log(1e-14):
        raise ContourError(f"truncation radius {spec.radius} too small: tail e^{tail:.1f}")
    # in along the 5pi/6 ray, out along the pi/6 ray
    wr_right, wr_left = wr * np.exp(E_right - m), wr * np.exp(E_left - m)
    J = np.sum(wr_right) * e_right - np.sum(wr_left) * e_left
    scale = float(np.sum(np.abs(wr_right)) + np.sum(np.abs(wr_left)))
    return m, complex(J), scale


def contour_integral(t: complex, v: float, spec: ContourSpec | None = None,
                     rtol: float = 1e-12, max_halvings: int = 8, near_zero: bool = False):
    """``(m, J, halvings)`` for the reduced integral ``e^m J``, halving panels until stable.

    The full integral is ``e^{(t - 1/2)/v} e^m J / sqrt(2 pi v)``. Successive
    refinements must agree to ``rtol`` relative to ``|J|``, or, next to a zero of
    the integral, to ``rtol`` relative to the integral of ``|integrand|``.
    """
    if not (1e-8 < v <= 1.0):
        raise ValueError("v must lie in (1e-8, 1]")
    spec = spec or ContourSpec.default(t, v)
    m0, J0, _ = _contour_sum(t, v, spec, 0)
    for h in range(1, max_halvings + 1):
        m1, J1, A1 = _contour_sum(t, v, spec, h)
        J0s = J0 * cmath.exp(m0 - m1)
        if abs(J1 - J0s) <= rtol * max(abs(J1), A1 if near_zero else 0.0):
            return m1, J1, h
        m0, J0 = m1, J1
    raise ContourError(f"contour quadrature did not converge at t={t}, v={v}")


def _reduced_log(t: complex, v: float, spec: ContourSpec | None = None) -> complex:
    m, J, _ = contour_integral(t, v, spec)
    return m + cmath.log(J) - 0.5 * math.log(2.0 * math.pi * v)


def _log_integral_t(t: complex, v: float, spec: ContourSpec | None = None) -> complex:
    # phi = psi - i is a translation, so dphi = dpsi
    return (t - 0.5) / v + _reduced_log(t, v, spec)


def _t_of_z(z: complex) -> complex:
    return 1.0 - z / Z_C


def yukawa0d_log_integral(z: complex, v: float, spec: ContourSpec | None = None):
    """``log int exp(-(z e^{i phi} + phi^2/2)/v) dphi/sqrt(2 pi v)``.

    Real while the integral is positive; past its sign change (or for complex
    ``z``) the principal complex logarithm is returned.
    """
    val = _log_integral_t(_t_of_z(z), v, spec)
    if not isinstance(z, complex) and abs(val.imag) < 1e-12:
        return val.real
    return val


def yukawa0d_integral(z: complex, v: float) -> complex:
    """The normalized integral itself (overflows for tiny v)."""
    return cmath.exp(_log_integral_t(_t_of_z(z), v))


def laplace_log_integral(z: float, v: float) -> float:
    """Saddle-point value ``-(x - x^2/2)/v - log(1 - x)/2`` with ``x = T(z)``."""
    x = tree_function(z).T
    return -(x - 0.5 * x * x) / v - 0.5 * math.log(1.0 - x)


def gaussian_moment_coefficients(v: float, order: int) -> list[float]:
    """Exact ``N!``-scaled Taylor coefficients ``(-1/v)^N e^{-v N^2/2}`` in ``z``."""
    return [(-1.0 / v) ** n * math.exp(-v * n * n / 2.0) for n in range(order + 1)]


def taylor_coefficients(v: float, order: int, radius: float = 0.5, points: int = 64) -> list[complex]:
    """``N!``-scaled Taylor coefficients of the integral in ``z`` from a Cauchy circle (FFT)."""
    theta = 2 * math.pi * np.arange(points) / points
    vals = np.array([yukawa0d_integral(complex(radius * cmath.exp(1j * th)), v) for th in theta])
    c = np.fft.fft(vals) / points
    return [complex(c[k] / radius**k * math.factorial(k)) for k in range(order + 1)]


# -- branched-polymer Green's function ----------------------------------------

def nonsingular_term(v: float) -> float:
    """``-(d/dz)(t/v) = e^{1+v/2}``, the part of G dropped in the scaling form."""
    return math.exp(1.0 + v / 2.0)


def _chain(v: float) -> float:
    # d/dz = v e^{v/2} d/dz~ = -e v e^{v/2} d/dt, and G = -d/dz log(integral)
    return math.e * v * math.exp(v / 2.0)


def g_bp_singular_numeric(t: float, v: float, rel_step: float = 1e-3, nodes: int = 24) -> float:
    """Singular part of G: central t-difference (step ``rel_step * v^{2/3}``) of the reduced log."""
    h = rel_step * v ** (2.0 / 3.0)
    lp = _reduced_log(t + h, v, ContourSpec.default(t + h, v, nodes))
    lm = _reduced_log(t - h, v, ContourSpec.default(t - h, v, nodes))
    return float((_chain(v) * (lp - lm) / (2.0 * h)).real)


def g_bp_numeric(t: float, v: float, rel_step: float = 1e-3, nodes: int = 24) -> float:
    """``G = -d/dz log(integral)``: the singular part plus ``e^{1+v/2}``."""
    return g_bp_singular_numeric(t, v, rel_step, nodes) + nonsingular_term(v)


def airy_scaling_F(s: float, b0: float = B0_THEORY, b1: float = B1_THEORY) -> float:
    """``F(s) = b0 d/ds ln Ai(b1 s) = b0 b1 Ai'(b1 s)/Ai(b1 s)``."""
    x = b1 * s
    if x <= A1_ZERO + 1e-12:
        raise ValueError(f"F has a pole at b1*s = {A1_ZERO:.6f}; got b1*s = {x}")
    return b0 * b1 * airy_log_derivative(x)


def scaling_form(t: float, v: float, b0: float = B0_THEORY, b1: float = B1_THEORY) -> float:
    """``v^{1/3} F(t v^{-2/3})``."""
    return v ** (1.0 / 3.0) * airy_scaling_F(t * v ** (-2.0 / 3.0), b0, b1)


FIT_S_MIN = -1.5


def s_grid_default(n: int = 19) -> np.ndarray:
    return np.linspace(-1.5, 3.0, n)


def singular_scan(v: float, s_grid) -> np.ndarray:
    return np.array([g_bp_singular_numeric(s * v ** (2.0 / 3.0), v) for s in s_grid])


def fit_constants(v: float = 1e-6, s_grid=None, numeric=None) -> dict:
    """Least-squares ``(b0, b1)`` matching ``g_bp_singular_numeric`` over an s-window.

    Only points with ``s >= FIT_S_MIN`` enter, so a scan reaching past the pole
    does not distort the fit.
    """
    s_grid = np.asarray(s_grid_default() if s_grid is None else s_grid, dtype=float)
    if numeric is None:
        numeric = singular_scan(v, s_grid)
    numeric = np.asarray(numeric, dtype=float)
    keep = s_grid >= FIT_S_MIN - 1e-12
    if keep.sum() < 3:
        raise ValueError(f"need at least 3 scan points with s >= {FIT_S_MIN} to fit")
    s_grid, numeric = s_grid[keep], numeric[keep]
    scale = v ** (1.0 / 3.0)
    b1_max = 5.0 if s_grid.min() >= 0 else 0.999 * A1_ZERO / s_grid.min()

    def resid(p):
        model = np.array([scale * airy_scaling_F(s, p[0], p[1]) for s in s_grid])
        return (model - numeric) / np.abs(numeric)

    x0 = [B0_THEORY, min(B1_THEORY, 0.99 * b1_max)]
    sol = optimize.least_squares(resid, x0=x0, bounds=([0.1, 0.1], [10.0, b1_max]),
                                 xtol=1e-14, ftol=1e-14)
    b0, b1 = map(float, sol.x)
    return {"v": v, "b0": b0, "b1": b1, "s": s_grid.tolist(), "numeric": numeric.tolist(),
            "max_rel_residual": float(np.max(np.abs(sol.fun)))}


def numeric_pole(v: float, s_lo: float = -2.3, s_hi: float = -1.5, tol: float = 1e-8) -> float:
    """Scaling variable where the integral changes sign (the pole of G) at fixed v."""
    def sign_fn(s):
        _, J, _ = contour_integral(s * v ** (2.0 / 3.0), v, near_zero=True)
        return J.real

    return bisect_zero(sign_fn, s_lo, s_hi, tol)


def meanfield_limit(z: float) -> float:
    """``e^{T(z)} = T(z)/z``, the v -> 0 limit of G."""
    if not (0 < z <= Z_C * (1 + 1e-15)):
        raise ValueError("mean-field limit defined for 0 < z <= 1/e")
    return math.exp(tree_function(z).T)


def loglog_slope(xs, ys) -> float:
    lx, ly = np.log(np.asarray(xs, dtype=float)), np.log(np.abs(np.asarray(ys, dtype=float)))
    return float(np.polyfit(lx, ly, 1)[0])
